#ifndef OPSEQ_CLI_LINE_PIPELINE_HPP
#define OPSEQ_CLI_LINE_PIPELINE_HPP

#include <functional>
#include <istream>
#include <string>
#include <thread>
#include <vector>

namespace cli {

// Pulls records from `next`, applies `work` with up to `jobs` workers, and
// hands results to `emit` in input order. Records are processed in bounded
// batches, so memory stays proportional to jobs * batch, not corpus size.
template <typename Result>
void for_each_record_ordered(const std::function<bool(std::string &)> &next, unsigned jobs,
                             const std::function<Result(size_t, const std::string &)> &work,
                             const std::function<void(size_t, Result &)> &emit) {
    if (jobs == 0) jobs = 1;
    const size_t batch_size = jobs == 1 ? 1 : static_cast<size_t>(jobs) * 16;

    std::vector<std::string> records;
    records.reserve(batch_size);
    size_t base_index = 0;
    std::string record;

    auto flush = [&]() {
        if (records.empty()) return;
        std::vector<Result> results(records.size());
        if (jobs == 1 || records.size() == 1) {
            for (size_t i = 0; i < records.size(); ++i)
                results[i] = work(base_index + i, records[i]);
        } else {
            std::vector<std::thread> pool;
            const unsigned n =
                std::min<unsigned>(jobs, static_cast<unsigned>(records.size()));
            for (unsigned w = 0; w < n; ++w) {
                pool.emplace_back([&, w]() {
                    for (size_t i = w; i < records.size(); i += n)
                        results[i] = work(base_index + i, records[i]);
                });
            }
            for (auto &t : pool) t.join();
        }
        for (size_t i = 0; i < records.size(); ++i) emit(base_index + i, results[i]);
        base_index += records.size();
        records.clear();
    };

    while (next(record)) {
        records.push_back(record);
        if (records.size() >= batch_size) flush();
    }
    flush();
}

template <typename Result>
void for_each_line_ordered(std::istream &in, unsigned jobs,
                           const std::function<Result(size_t, const std::string &)> &work,
                           const std::function<void(size_t, Result &)> &emit) {
    for_each_record_ordered<Result>(
        [&in](std::string &line) { return static_cast<bool>(std::getline(in, line)); }, jobs,
        work, emit);
}

}  // namespace cli

#endif

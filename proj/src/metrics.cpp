#include "metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "absolute.hpp"
#include "errors.hpp"
#include "relative.hpp"

namespace opseq {

double wer(const EvalPair &pair, bool *convention_applied) {
    const auto &hyp = pair.hypothesis;
    const auto &ref = pair.reference;
    if (convention_applied) *convention_applied = false;
    if (ref.empty()) {
        if (hyp.empty()) return 0.0;
        if (convention_applied) *convention_applied = true;
        return static_cast<double>(hyp.size());
    }

    const size_t n = hyp.size(), m = ref.size();
    std::vector<size_t> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = j;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= m; ++j) {
            const size_t sub = prev[j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return static_cast<double>(prev[m]) / static_cast<double>(m);
}

namespace {

std::string fold_case(std::string_view s) {
    std::string out(s);
    for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::vector<std::string> eval_tokens(std::string_view line) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(fold_case(line.substr(i, j - i)));
        i = j;
    }
    return out;
}

void BleuAccumulator::add(const EvalPair &pair) {
    std::vector<std::string> hyp(pair.hypothesis.size()), ref(pair.reference.size());
    std::transform(pair.hypothesis.begin(), pair.hypothesis.end(), hyp.begin(), fold_case);
    std::transform(pair.reference.begin(), pair.reference.end(), ref.begin(), fold_case);

    hyp_len_ += hyp.size();
    ref_len_ += ref.size();
    ++pairs_;

    for (int order = 1; order <= kMaxOrder; ++order) {
        const size_t o = static_cast<size_t>(order);
        if (hyp.size() < o) continue;

        auto ngrams = [o](const std::vector<std::string> &words) {
            std::map<std::vector<std::string>, size_t> counts;
            if (words.size() >= o)
                for (size_t i = 0; i + o <= words.size(); ++i)
                    ++counts[std::vector<std::string>(words.begin() + static_cast<long>(i),
                                                      words.begin() + static_cast<long>(i + o))];
            return counts;
        };
        auto hyp_counts = ngrams(hyp);
        auto ref_counts = ngrams(ref);
        for (const auto &[gram, count] : hyp_counts) {
            total_[order - 1] += count;
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) matched_[order - 1] += std::min(count, it->second);
        }
    }
}

double BleuAccumulator::score(bool smooth) const {
    if (hyp_len_ == 0) return 0.0;
    double log_precision = 0.0;
    for (int order = 0; order < kMaxOrder; ++order) {
        double matched = static_cast<double>(matched_[order]);
        double total = static_cast<double>(total_[order]);
        if (total == 0.0) return 0.0;  // hypothesis too short for this order
        if (matched == 0.0) {
            if (!smooth || order == 0) return 0.0;
            matched = 1.0;
            total += 1.0;
        }
        log_precision += std::log(matched / total);
    }
    double bp = 0.0;
    if (hyp_len_ < ref_len_)
        bp = 1.0 - static_cast<double>(ref_len_) / static_cast<double>(hyp_len_);
    return 100.0 * std::exp(log_precision / kMaxOrder + bp);
}

double bleu(const std::vector<EvalPair> &corpus, bool smooth) {
    BleuAccumulator acc;
    for (const auto &p : corpus) acc.add(p);
    return acc.score(smooth);
}

void LatencyTrace::check() const {
    if (delays.empty()) throw IngestError("latency trace with no delays");
    if (src_len <= 0 || tgt_len <= 0)
        throw IngestError("latency trace requires positive source/target lengths");
    double prev = -1.0;
    for (double d : delays) {
        if (d < prev) throw IngestError("latency delays must be non-decreasing");
        if (d > src_len) throw IngestError("latency delay exceeds source length");
        prev = d;
    }
}

double average_lagging(const LatencyTrace &trace) {
    trace.check();
    const double gamma = trace.src_len / trace.tgt_len;
    size_t tau = trace.delays.size();
    for (size_t i = 0; i < trace.delays.size(); ++i) {
        if (trace.delays[i] >= trace.src_len) {
            tau = i + 1;
            break;
        }
    }
    double sum = 0.0;
    for (size_t i = 0; i < tau; ++i)
        sum += trace.delays[i] - static_cast<double>(i) * gamma;
    return sum / static_cast<double>(tau);
}

double aggregate_lagging(double asr_al, double st_al, LatencyAggregate mode) {
    return mode == LatencyAggregate::Sum ? asr_al + st_al : std::max(asr_al, st_al);
}

StreamStats opseq_stats(const std::vector<Token> &tokens, Variant variant,
                        const Options &opts) {
    StreamStats stats;
    for (const auto &t : tokens) {
        if (t.is(kSetMarker)) ++stats.count_sm;
        else if (t.is(kJmpBwd)) ++stats.count_jb;
        else if (t.is(kJmpFwd)) ++stats.count_jf;
        else if (t.is(kNoOps)) ++stats.count_no_ops;
    }

    ParseReport report = variant == Variant::Absolute ? validate_absolute(tokens, opts)
                                                      : validate_relative(tokens, opts);
    if (!report.accepted)
        throw DecodeError("invalid stream at token " + std::to_string(report.error_index) +
                          ": " + report.message);

    DecodeResult decoded = variant == Variant::Absolute ? decode_absolute(tokens, opts)
                                                        : decode_relative(tokens, opts);
    for (size_t i = 0; i < decoded.tgt_emission_ranks.size(); ++i) {
        const long final_pos = static_cast<long>(i) + 1;
        stats.reorder_distance += std::labs(final_pos - decoded.tgt_emission_ranks[i]);
    }
    return stats;
}

}  // namespace opseq

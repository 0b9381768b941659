#include "ingest.hpp"

#include <algorithm>
#include <list>
#include <map>

#include "errors.hpp"

namespace opseq {

namespace {

bool parse_uint(std::string_view s, int &out) {
    if (s.empty()) return false;
    long v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
        if (v > 1'000'000'000) return false;
    }
    out = static_cast<int>(v);
    return true;
}

}  // namespace

std::set<Link> parse_pharaoh(std::string_view align_line, int src_len, int tgt_len) {
    std::set<Link> links;
    size_t i = 0;
    while (i < align_line.size()) {
        while (i < align_line.size() && (align_line[i] == ' ' || align_line[i] == '\t')) ++i;
        size_t j = i;
        while (j < align_line.size() && align_line[j] != ' ' && align_line[j] != '\t') ++j;
        if (j == i) break;
        std::string_view pair = align_line.substr(i, j - i);
        i = j;

        size_t dash = pair.find('-');
        int a = 0, b = 0;
        if (dash == std::string_view::npos || !parse_uint(pair.substr(0, dash), a) ||
            !parse_uint(pair.substr(dash + 1), b))
            throw IngestError("malformed alignment pair '" + std::string(pair) + "'");
        if (a >= src_len)
            throw IngestError("alignment pair '" + std::string(pair) +
                              "' source index out of range (length " +
                              std::to_string(src_len) + ")");
        if (b >= tgt_len)
            throw IngestError("alignment pair '" + std::string(pair) +
                              "' target index out of range (length " +
                              std::to_string(tgt_len) + ")");
        links.emplace(a + 1, b + 1);
    }
    return links;
}

AlignedSentencePair parse_record(const CorpusRecord &record) {
    AlignedSentencePair pair;
    pair.src = parse_words(record.src_line);
    pair.tgt = parse_words(record.tgt_line);
    pair.links = parse_pharaoh(record.align_line, static_cast<int>(pair.src.size()),
                               static_cast<int>(pair.tgt.size()));
    return pair;
}

TupleSequence build_tuples(const AlignedSentencePair &pair) {
    pair.check();
    const int ls = static_cast<int>(pair.src.size());
    const int lt = static_cast<int>(pair.tgt.size());

    // Resolve many-to-many: each target keeps only its leftmost source.
    std::vector<int> owner_src(lt + 1, 0);  // 0 = unaligned
    for (const auto &[i, j] : pair.links)
        if (owner_src[j] == 0 || i < owner_src[j]) owner_src[j] = i;

    std::vector<std::vector<int>> targets_of(ls + 1);
    for (int j = 1; j <= lt; ++j)
        if (owner_src[j] != 0) targets_of[owner_src[j]].push_back(j);

    std::list<OpTuple> stream;
    // Owning tuple of each already-placed target position, for anchoring
    // the [NO_SRC] chain.
    std::vector<std::list<OpTuple>::iterator> tuple_of(lt + 1);

    for (int i = 1; i <= ls; ++i) {
        OpTuple t;
        t.src = pair.src[static_cast<size_t>(i - 1)];
        auto &js = targets_of[i];
        std::sort(js.begin(), js.end());
        if (js.empty()) {
            t.targets.push_back(TargetEntry{std::nullopt, std::nullopt});
        } else {
            for (int j : js)
                t.targets.push_back(TargetEntry{pair.tgt[static_cast<size_t>(j - 1)], j});
        }
        auto it = stream.insert(stream.end(), std::move(t));
        for (int j : js) tuple_of[static_cast<size_t>(j)] = it;
    }

    for (int p = 1; p <= lt; ++p) {
        if (owner_src[p] != 0) continue;
        OpTuple t;
        t.src = std::nullopt;
        t.targets.push_back(TargetEntry{pair.tgt[static_cast<size_t>(p - 1)], p});
        std::list<OpTuple>::iterator it;
        if (p == 1) {
            it = stream.insert(stream.begin(), std::move(t));
        } else {
            auto anchor = tuple_of[static_cast<size_t>(p - 1)];
            it = stream.insert(std::next(anchor), std::move(t));
        }
        tuple_of[static_cast<size_t>(p)] = it;
    }

    return TupleSequence(stream.begin(), stream.end());
}

FilterDecision filter_record(const AlignedSentencePair &pair, double max_ratio,
                             int max_tgt_len) {
    const auto ls = pair.src.size();
    const auto lt = pair.tgt.size();
    if (ls == 0 || lt == 0) return {false, "degenerate: empty side"};

    const double ratio =
        std::max(static_cast<double>(ls) / static_cast<double>(lt),
                 static_cast<double>(lt) / static_cast<double>(ls));
    if (ratio > max_ratio)
        return {false, "length ratio " + std::to_string(ratio) + " exceeds " +
                           std::to_string(max_ratio)};

    size_t tgt_pieces = 0;
    for (const auto &w : pair.tgt) tgt_pieces += w.pieces.size();
    if (tgt_pieces > static_cast<size_t>(max_tgt_len))
        return {false, "target length " + std::to_string(tgt_pieces) + " tokens exceeds " +
                           std::to_string(max_tgt_len)};

    return {true, {}};
}

}  // namespace opseq

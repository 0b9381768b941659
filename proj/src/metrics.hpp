#ifndef OPSEQ_METRICS_HPP
#define OPSEQ_METRICS_HPP

#include <string>
#include <vector>

#include "types.hpp"

namespace opseq {

struct EvalPair {
    std::vector<std::string> hypothesis;
    std::vector<std::string> reference;
};

// Word error rate: (substitutions + insertions + deletions) / |reference|
// via unit-cost minimum edit distance. An empty reference with a non-empty
// hypothesis scores |hypothesis| by convention (every word an insertion
// against nothing); *convention_applied is set when that happens.
double wer(const EvalPair &pair, bool *convention_applied = nullptr);

// Corpus-level case-insensitive BLEU-4: geometric mean of modified n-gram
// precisions times the brevity penalty exp(1 - ref/hyp) when hyp < ref.
// Without smoothing a zero precision at any order zeroes the score; with
// smoothing, zero counts at orders >= 2 are add-one smoothed.
class BleuAccumulator {
public:
    void add(const EvalPair &pair);
    double score(bool smooth = false) const;  // in [0, 100]
    size_t pairs() const { return pairs_; }

private:
    static constexpr int kMaxOrder = 4;
    size_t matched_[kMaxOrder] = {0, 0, 0, 0};
    size_t total_[kMaxOrder] = {0, 0, 0, 0};
    size_t hyp_len_ = 0;
    size_t ref_len_ = 0;
    size_t pairs_ = 0;
};

double bleu(const std::vector<EvalPair> &corpus, bool smooth = false);

// Splits on whitespace and case-folds (ASCII).
std::vector<std::string> eval_tokens(std::string_view line);

// Per-target-word emission delays, in source units consumed, in emission
// order (hence non-decreasing), each capped by src_len.
struct LatencyTrace {
    std::vector<double> delays;
    double src_len = 0;
    double tgt_len = 0;

    void check() const;  // throws IngestError on violated invariants
};

// AL = (1/tau) * sum_{i<=tau} (d_i - (i-1) * srcLen/tgtLen), where tau is
// the first index whose delay reaches srcLen (all delays if none does).
double average_lagging(const LatencyTrace &trace);

enum class LatencyAggregate { Sum, Max };

double aggregate_lagging(double asr_al, double st_al, LatencyAggregate mode);

// Operation counts plus the total reorder distance sum_i |finalPos_i -
// emissionRank_i| over real target words. Works on either variant; the
// stream must validate.
struct StreamStats {
    size_t count_sm = 0;
    size_t count_jb = 0;
    size_t count_jf = 0;
    size_t count_no_ops = 0;
    long reorder_distance = 0;
};

enum class Variant { Absolute, Relative };

StreamStats opseq_stats(const std::vector<Token> &tokens, Variant variant,
                        const Options &opts = {});

}  // namespace opseq

#endif

#ifndef OPSEQ_TYPES_HPP
#define OPSEQ_TYPES_HPP

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "token.hpp"

namespace opseq {

// Word-level alignment link, 1-based on both sides.
using Link = std::pair<int, int>;

struct AlignedSentencePair {
    std::vector<Word> src;
    std::vector<Word> tgt;
    std::set<Link> links;

    // Throws IngestError when a link index is out of bounds.
    void check() const;
};

// One aligned target word and its final position in the translation.
// word == nullopt encodes [NO_TGT]; such entries carry no position.
struct TargetEntry {
    std::optional<Word> word;
    std::optional<int> final_pos;

    friend bool operator==(const TargetEntry &, const TargetEntry &) = default;
};

// Operation tuple: one source slot plus its aligned target words.
// src == nullopt encodes [NO_SRC].
struct OpTuple {
    std::optional<Word> src;
    std::vector<TargetEntry> targets;

    friend bool operator==(const OpTuple &, const OpTuple &) = default;
};

using TupleSequence = std::vector<OpTuple>;

// Verifies the structural invariants: NO_TGT entries are singletons without
// positions, final positions form a permutation of 1..Lt, and real source
// slots never reorder. Throws IngestError with a reason when violated.
void check_tuple_sequence(const TupleSequence &tuples);

// Words-to-pieces flattening of a tuple sequence: source slot then target
// slots per tuple, with [NO_SRC]/[NO_TGT] standing in for absent words.
// Operation tokens are the encoders' business, not collapse's.
std::vector<Token> collapse(const TupleSequence &tuples);

enum class MarkerPolicy {
    Lazy,   // set a marker only when a gap with pending words is abandoned
    Eager,  // set a marker before any insert whose gap has none
};

struct Options {
    int max_positions = 512;  // hard cap for [n] tokens and buffer growth
    MarkerPolicy marker_policy = MarkerPolicy::Lazy;
    bool trace = false;  // collect per-op interpreter trace during decode
};

// Accept/reject result of a grammar validator. Never thrown.
struct ParseReport {
    bool accepted = false;
    size_t error_index = 0;   // offending token index when rejected
    std::string message;      // what was expected / what went wrong
    std::vector<std::pair<size_t, size_t>> tuples;  // [begin,end) token ranges

    static ParseReport accept(std::vector<std::pair<size_t, size_t>> tuples) {
        ParseReport r;
        r.accepted = true;
        r.tuples = std::move(tuples);
        return r;
    }
    static ParseReport reject(size_t index, std::string message) {
        ParseReport r;
        r.error_index = index;
        r.message = std::move(message);
        return r;
    }
};

// Output of an offline decode: restored sentences plus diagnostics.
struct DecodeResult {
    std::vector<Word> src;
    std::vector<Word> tgt;
    std::vector<int> tgt_emission_ranks;  // 1-based write order per tgt word
    std::vector<std::string> warnings;    // e.g. duplicate-position rewrites
    bool truncated = false;               // stream ended without [EOS]
    std::vector<std::string> trace;       // per-op lines when Options::trace
};

}  // namespace opseq

#endif

#ifndef OPSEQ_INGEST_HPP
#define OPSEQ_INGEST_HPP

#include <set>
#include <string>
#include <string_view>

#include "types.hpp"

namespace opseq {

// One raw corpus record before parsing: parallel text plus a Pharaoh
// alignment line ("i-j" pairs, 0-based, whitespace separated).
struct CorpusRecord {
    std::string src_line;
    std::string tgt_line;
    std::string align_line;
};

// Converts a Pharaoh line into 1-based links. Duplicates collapse into the
// set. Throws IngestError for malformed pairs or out-of-range indices.
std::set<Link> parse_pharaoh(std::string_view align_line, int src_len, int tgt_len);

AlignedSentencePair parse_record(const CorpusRecord &record);

// Turns a word-aligned pair into the operation-tuple representation:
// one tuple per source word in order, targets sorted by final position,
// [NO_TGT] singletons for barren source words, and one [NO_SRC] tuple per
// unaligned target word placed right after the tuple holding target p-1
// (start of stream for p == 1). A target linked to several source words
// goes to the leftmost one.
TupleSequence build_tuples(const AlignedSentencePair &pair);

struct FilterDecision {
    bool keep = true;
    std::string reason;  // set when dropped
};

// Corpus hygiene: drop when the word-length ratio exceeds max_ratio, when
// the collapsed target piece count exceeds max_tgt_len, or when either side
// is empty (degenerate).
FilterDecision filter_record(const AlignedSentencePair &pair, double max_ratio = 5.0,
                             int max_tgt_len = 150);

}  // namespace opseq

#endif

#ifndef OPSEQ_ABSOLUTE_HPP
#define OPSEQ_ABSOLUTE_HPP

#include <vector>

#include "types.hpp"

namespace opseq {

// Serializes a tuple sequence as the absolute positional stream: per tuple
// the source slot, [BL], then each target word followed by its position
// token ([NO_TGT] entries carry [-1]); [EOS] terminates. Throws IngestError
// when a position exceeds opts.max_positions.
std::vector<Token> encode_absolute(const TupleSequence &tuples, const Options &opts = {});

// FIFO restoration: tokens queue up and every position token flushes one
// group into the S/T buffers (T indexed by the position, [-1] skips the
// write). Duplicate positions rewrite the cell and leave a warning. A
// missing [EOS] is tolerated: complete groups are applied and the result is
// flagged truncated. Structural damage throws DecodeError.
DecodeResult decode_absolute(const std::vector<Token> &tokens, const Options &opts = {});

// Grammar check; never throws. Accepted streams are guaranteed to decode
// without DecodeError.
ParseReport validate_absolute(const std::vector<Token> &tokens, const Options &opts = {});

}  // namespace opseq

#endif

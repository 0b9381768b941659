#include "types.hpp"

#include <algorithm>

#include "errors.hpp"

namespace opseq {

void AlignedSentencePair::check() const {
    const int ls = static_cast<int>(src.size());
    const int lt = static_cast<int>(tgt.size());
    for (const auto &[i, j] : links) {
        if (i < 1 || i > ls)
            throw IngestError("alignment link source index " + std::to_string(i) +
                              " out of range 1.." + std::to_string(ls));
        if (j < 1 || j > lt)
            throw IngestError("alignment link target index " + std::to_string(j) +
                              " out of range 1.." + std::to_string(lt));
    }
}

void check_tuple_sequence(const TupleSequence &tuples) {
    std::vector<int> positions;
    for (const auto &t : tuples) {
        if (t.targets.empty()) throw IngestError("tuple with no target entries");
        for (const auto &e : t.targets) {
            if (!e.word.has_value()) {
                if (t.targets.size() != 1)
                    throw IngestError("[NO_TGT] entry must be the tuple's only target");
                if (e.final_pos.has_value())
                    throw IngestError("[NO_TGT] entry must not carry a position");
            } else {
                if (!e.final_pos.has_value())
                    throw IngestError("real target word without a final position");
                positions.push_back(*e.final_pos);
            }
        }
        if (!t.src.has_value() && t.targets.size() == 1 && !t.targets[0].word.has_value())
            throw IngestError("[NO_SRC] tuple with a [NO_TGT] target");
    }
    std::sort(positions.begin(), positions.end());
    for (size_t i = 0; i < positions.size(); ++i)
        if (positions[i] != static_cast<int>(i) + 1)
            throw IngestError("final positions are not a permutation of 1..Lt");
}

std::vector<Token> collapse(const TupleSequence &tuples) {
    std::vector<Token> out;
    for (const auto &t : tuples) {
        if (t.src.has_value()) {
            auto pieces = collapse(*t.src);
            out.insert(out.end(), pieces.begin(), pieces.end());
        } else {
            out.push_back(Token::special(kNoSrc));
        }
        for (const auto &e : t.targets) {
            if (e.word.has_value()) {
                auto pieces = collapse(*e.word);
                out.insert(out.end(), pieces.begin(), pieces.end());
            } else {
                out.push_back(Token::special(kNoTgt));
            }
        }
    }
    return out;
}

}  // namespace opseq

#include "absolute.hpp"

#include <functional>

#include "errors.hpp"

namespace opseq {

namespace {

// What the current unflushed group segment holds.
enum class Slot { Empty, NoSrcMark, NoTgtMark, WordBegun };

struct GroupEvent {
    bool new_tuple = false;            // group carried a [BL]
    bool src_is_word = false;          // false => [NO_SRC] (when new_tuple)
    Word src;                          // valid when src_is_word
    bool tgt_is_word = false;          // false => [NO_TGT]
    Word tgt;                          // valid when tgt_is_word
    int position = -1;                 // -1 => skip ([-1] token)
    size_t first_index = 0;            // token index where the group began
};

struct WalkResult {
    bool ok = true;
    size_t error_index = 0;
    std::string message;
    bool saw_eos = false;
    size_t pending_tokens = 0;  // unflushed tail size when the stream ran out
    std::vector<std::pair<size_t, size_t>> tuples;
};

// Single structural pass shared by the validator and the decoder. Flushes
// one GroupEvent per position token into `sink`.
WalkResult walk_absolute(const std::vector<Token> &tokens, const Options &opts,
                         const std::function<void(const GroupEvent &)> &sink) {
    WalkResult res;
    auto fail = [&](size_t idx, std::string msg) {
        res.ok = false;
        res.error_index = idx;
        res.message = std::move(msg);
        return res;
    };

    Slot slot = Slot::Empty;
    bool after_blank = false;  // current group has its [BL] already
    Word current_word;
    GroupEvent group;
    bool group_open = false;
    size_t group_first = 0;
    size_t pending_count = 0;
    bool any_tuple = false;
    size_t tuple_start = 0;
    bool tuple_open = false;

    auto begin_group = [&](size_t idx) {
        if (!group_open) {
            group = GroupEvent{};
            group_open = true;
            group_first = idx;
            pending_count = 0;
        }
        ++pending_count;
    };

    for (size_t i = 0; i < tokens.size(); ++i) {
        const Token &t = tokens[i];
        if (res.saw_eos) return fail(i, "token after [EOS]");

        if (t.kind == TokenKind::Piece) {
            begin_group(i);
            if (t.word_begin) {
                if (slot == Slot::WordBegun)
                    return fail(i, after_blank
                                       ? "second word in a target slot (expected a position token)"
                                       : "second word in the source slot (expected [BL])");
                if (slot != Slot::Empty)
                    return fail(i, "word piece after a [NO_SRC]/[NO_TGT] marker");
                current_word = Word(t.surface);
                slot = Slot::WordBegun;
            } else {
                if (slot != Slot::WordBegun)
                    return fail(i, "continuation piece without a word-initial piece");
                current_word.pieces.push_back(t.surface);
            }
            continue;
        }

        // Special tokens.
        if (t.surface == kBlank) {
            begin_group(i);
            if (after_blank) return fail(i, "duplicate [BL] inside one tuple group");
            if (slot == Slot::Empty) return fail(i, "[BL] without a source slot");
            if (slot == Slot::NoTgtMark) return fail(i, "[NO_TGT] cannot fill the source slot");
            group.new_tuple = true;
            group.src_is_word = (slot == Slot::WordBegun);
            if (group.src_is_word) group.src = current_word;
            after_blank = true;
            slot = Slot::Empty;
            continue;
        }
        if (t.surface == kNoSrc) {
            begin_group(i);
            if (slot != Slot::Empty || after_blank)
                return fail(i, "[NO_SRC] is only valid at the start of a tuple");
            slot = Slot::NoSrcMark;
            continue;
        }
        if (t.surface == kNoTgt) {
            begin_group(i);
            if (slot != Slot::Empty) return fail(i, "[NO_TGT] inside another slot");
            slot = Slot::NoTgtMark;
            continue;
        }
        if (auto n = position_value(t.surface); n.has_value() || t.surface == kSkipPos) {
            if (!group_open || (slot == Slot::Empty && !after_blank && !group.new_tuple))
                return fail(i, "position token without a target word");
            if (slot == Slot::NoSrcMark)
                return fail(i, "[NO_SRC] must be followed by [BL]");
            if (group.new_tuple) {
                // fine: first entry of the tuple
            } else if (!any_tuple) {
                return fail(i, "target entry before any tuple (missing [BL])");
            }
            if (t.surface == kSkipPos) {
                if (slot != Slot::NoTgtMark)
                    return fail(i, "[-1] must follow [NO_TGT]");
                group.tgt_is_word = false;
                group.position = -1;
            } else {
                if (slot == Slot::NoTgtMark)
                    return fail(i, "[NO_TGT] requires [-1], not a position");
                if (slot != Slot::WordBegun)
                    return fail(i, "position token without a target word");
                if (*n > opts.max_positions)
                    return fail(i, "position " + std::to_string(*n) + " exceeds cap " +
                                       std::to_string(opts.max_positions));
                group.tgt_is_word = true;
                group.tgt = current_word;
                group.position = *n;
            }
            group.first_index = group_first;
            if (group.new_tuple) {
                if (tuple_open) res.tuples.emplace_back(tuple_start, group_first);
                tuple_start = group_first;
                tuple_open = true;
                any_tuple = true;
            }
            sink(group);
            group_open = false;
            slot = Slot::Empty;
            after_blank = false;
            pending_count = 0;
            continue;
        }
        if (t.surface == kEos) {
            if (group_open) return fail(i, "unterminated group at [EOS]");
            res.saw_eos = true;
            if (tuple_open) {
                res.tuples.emplace_back(tuple_start, i);
                tuple_open = false;
            }
            continue;
        }
        return fail(i, "token '" + t.surface + "' is not part of the absolute grammar");
    }

    if (!res.saw_eos) {
        res.pending_tokens = group_open ? pending_count : 0;
        if (tuple_open) res.tuples.emplace_back(tuple_start, tokens.size() - res.pending_tokens);
    }
    return res;
}

}  // namespace

std::vector<Token> encode_absolute(const TupleSequence &tuples, const Options &opts) {
    std::vector<Token> out;
    for (const auto &t : tuples) {
        if (t.src.has_value()) {
            for (auto &tok : collapse(*t.src)) out.push_back(std::move(tok));
        } else {
            out.push_back(Token::special(kNoSrc));
        }
        out.push_back(Token::special(kBlank));
        for (const auto &e : t.targets) {
            if (e.word.has_value()) {
                for (auto &tok : collapse(*e.word)) out.push_back(std::move(tok));
                if (*e.final_pos > opts.max_positions)
                    throw IngestError("target position " + std::to_string(*e.final_pos) +
                                      " exceeds cap " + std::to_string(opts.max_positions));
                out.push_back(Token::position(*e.final_pos));
            } else {
                out.push_back(Token::special(kNoTgt));
                out.push_back(Token::special(kSkipPos));
            }
        }
    }
    out.push_back(Token::special(kEos));
    return out;
}

DecodeResult decode_absolute(const std::vector<Token> &tokens, const Options &opts) {
    DecodeResult result;
    std::vector<Word> s_buffer;
    std::vector<std::optional<std::pair<Word, int>>> t_buffer;  // word + write rank
    int rank = 0;

    auto apply = [&](const GroupEvent &g) {
        if (g.new_tuple && g.src_is_word) s_buffer.push_back(g.src);
        if (g.position < 0) return;  // [-1]: no translation write
        ++rank;
        const size_t idx = static_cast<size_t>(g.position);
        if (t_buffer.size() < idx) t_buffer.resize(idx);
        if (t_buffer[idx - 1].has_value())
            result.warnings.push_back("position [" + std::to_string(g.position) +
                                      "] rewritten; last write wins");
        t_buffer[idx - 1] = std::make_pair(g.tgt, rank);
    };

    WalkResult walk = walk_absolute(tokens, opts, apply);
    if (!walk.ok)
        throw DecodeError("token " + std::to_string(walk.error_index) + ": " + walk.message);
    if (!walk.saw_eos) {
        result.truncated = true;
        if (walk.pending_tokens > 0)
            result.warnings.push_back("incomplete tail of " +
                                      std::to_string(walk.pending_tokens) +
                                      " token(s) ignored (no [EOS])");
    }

    result.src = std::move(s_buffer);
    for (auto &cell : t_buffer) {
        if (!cell.has_value()) continue;
        result.tgt.push_back(std::move(cell->first));
        result.tgt_emission_ranks.push_back(cell->second);
    }
    return result;
}

ParseReport validate_absolute(const std::vector<Token> &tokens, const Options &opts) {
    WalkResult walk = walk_absolute(tokens, opts, [](const GroupEvent &) {});
    if (!walk.ok) return ParseReport::reject(walk.error_index, walk.message);
    if (!walk.saw_eos)
        return ParseReport::reject(tokens.size(), "stream ended without [EOS]");
    return ParseReport::accept(std::move(walk.tuples));
}

}  // namespace opseq

#include "relative.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

#include "errors.hpp"

namespace opseq {

std::string op_name(OpKind kind) {
    switch (kind) {
        case OpKind::SetMarker: return "SM";
        case OpKind::JmpFwd: return "JF";
        case OpKind::JmpBwd: return "JB";
        case OpKind::InsertTgt: return "INSERT-t";
        case OpKind::InsertSrc: return "INSERT-s";
        case OpKind::NoOp: return "NO_OPS";
    }
    return "?";
}

void BufferState::apply(const Op &op) {
    switch (op.kind) {
        case OpKind::SetMarker:
            set_marker();
            return;
        case OpKind::JmpBwd: {
            // Nearest marker slot strictly left of the head.
            for (size_t i = std::min(t_head_, t_cells_.size()); i-- > 0;) {
                if (t_cells_[i].marker && i + 1 < t_head_) {
                    t_head_ = i + 1;
                    return;
                }
            }
            throw InterpreterError("[JB] with no marker to the left of the head");
        }
        case OpKind::JmpFwd: {
            // Nearest marker slot strictly right of the head.
            for (size_t i = t_head_; i < t_cells_.size(); ++i) {
                if (t_cells_[i].marker && i + 1 > t_head_) {
                    t_head_ = i + 1;
                    return;
                }
            }
            throw InterpreterError("[JF] with no marker to the right of the head");
        }
        case OpKind::InsertTgt: {
            Cell cell;
            cell.piece = op.piece;
            cell.word_begin = op.word_begin;
            if (op.word_begin) ++emission_words_;
            cell.emission_seq = emission_words_;
            t_cells_.insert(t_cells_.begin() + static_cast<long>(t_head_), std::move(cell));
            ++t_head_;
            return;
        }
        case OpKind::InsertSrc: {
            Cell cell;
            cell.piece = op.piece;
            cell.word_begin = op.word_begin;
            s_pieces_.push_back(std::move(cell));
            return;
        }
        case OpKind::NoOp:
            return;
    }
}

int BufferState::set_marker() {
    Cell cell;
    cell.marker = true;
    cell.marker_id = next_marker_id_++;
    t_cells_.insert(t_cells_.begin() + static_cast<long>(t_head_), cell);
    ++t_head_;
    ++marker_count_;
    return next_marker_id_ - 1;
}

size_t BufferState::marker_slot(int marker_id) const {
    for (size_t i = 0; i < t_cells_.size(); ++i)
        if (t_cells_[i].marker && t_cells_[i].marker_id == marker_id) return i + 1;
    throw InterpreterError("unknown marker id " + std::to_string(marker_id));
}

namespace {

std::vector<Word> group_words(const std::vector<BufferState::Cell> &cells) {
    std::vector<Word> words;
    for (const auto &c : cells) {
        if (c.marker) continue;
        if (c.word_begin || words.empty())
            words.push_back(Word(c.piece));
        else
            words.back().pieces.push_back(c.piece);
    }
    return words;
}

}  // namespace

std::vector<Word> BufferState::s_words() const { return group_words(s_pieces_); }

std::vector<Word> BufferState::t_words() const { return group_words(t_cells_); }

std::string BufferState::t_display(bool keep_markers) const {
    std::string out;
    for (const auto &c : t_cells_) {
        if (c.marker && !keep_markers) continue;
        if (!out.empty()) out += ' ';
        out += c.marker ? "*" : c.piece;
    }
    return out;
}

std::string BufferState::s_display() const {
    std::string out;
    for (const auto &c : s_pieces_) {
        if (!out.empty()) out += ' ';
        out += c.piece;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Structural walk shared by decode and validate.

namespace {

struct RelEntry {
    std::vector<std::pair<Op, size_t>> ops;  // op + its token index
    bool has_word = false;                   // false => [NO_TGT]
    Word word;
};

struct RelTuple {
    bool src_is_word = false;  // false => [NO_SRC]
    Word src;
    size_t first_index = 0;
    size_t eop_index = 0;
    std::vector<RelEntry> entries;
};

struct RelWalkResult {
    bool ok = true;
    bool sink_failed = false;  // failure came from executing a tuple, not parsing
    size_t error_index = 0;
    std::string message;
    bool saw_eos = false;
    size_t pending_tokens = 0;
    std::vector<std::pair<size_t, size_t>> tuples;
};

bool is_rel_op(const Token &t, Op &out) {
    if (t.kind != TokenKind::Special) return false;
    if (t.surface == kSetMarker) { out = Op::set_marker(); return true; }
    if (t.surface == kJmpFwd) { out = Op::jmp_fwd(); return true; }
    if (t.surface == kJmpBwd) { out = Op::jmp_bwd(); return true; }
    if (t.surface == kNoOps) { out = Op::no_op(); return true; }
    return false;
}

RelWalkResult walk_relative(const std::vector<Token> &tokens,
                            const std::function<bool(const RelTuple &, size_t &, std::string &)> &sink) {
    RelWalkResult res;
    auto fail = [&](size_t idx, std::string msg) {
        res.ok = false;
        res.error_index = idx;
        res.message = std::move(msg);
        return res;
    };

    enum class St { TupleStart, SrcWord, SrcDone, Ops, TgtWord, EntryDone };
    St st = St::TupleStart;
    RelTuple tuple;
    RelEntry entry;
    size_t tuple_first = 0;

    auto flush_entry = [&]() {
        tuple.entries.push_back(std::move(entry));
        entry = RelEntry{};
    };
    auto deliver = [&](size_t eop_idx) -> bool {
        tuple.eop_index = eop_idx;
        res.tuples.emplace_back(tuple.first_index, eop_idx + 1);
        size_t err_idx = 0;
        std::string err_msg;
        if (!sink(tuple, err_idx, err_msg)) {
            res.ok = false;
            res.sink_failed = true;
            res.error_index = err_idx;
            res.message = std::move(err_msg);
            return false;
        }
        tuple = RelTuple{};
        return true;
    };

    for (size_t i = 0; i < tokens.size(); ++i) {
        const Token &t = tokens[i];
        if (res.saw_eos) return fail(i, "token after [EOS]");
        Op op{OpKind::NoOp, {}, true};

        switch (st) {
            case St::TupleStart:
                tuple_first = i;
                tuple.first_index = i;
                if (t.kind == TokenKind::Piece) {
                    if (!t.word_begin)
                        return fail(i, "continuation piece cannot start a tuple");
                    tuple.src_is_word = true;
                    tuple.src = Word(t.surface);
                    st = St::SrcWord;
                } else if (t.is(kNoSrc)) {
                    tuple.src_is_word = false;
                    st = St::SrcDone;
                } else if (t.is(kEos)) {
                    res.saw_eos = true;
                } else {
                    return fail(i, "expected a source word, [NO_SRC], or [EOS]");
                }
                break;

            case St::SrcWord:
                if (t.kind == TokenKind::Piece && !t.word_begin) {
                    tuple.src.pieces.push_back(t.surface);
                } else if (is_rel_op(t, op)) {
                    entry.ops.emplace_back(op, i);
                    st = St::Ops;
                } else if (t.kind == TokenKind::Piece) {
                    return fail(i, "target word without an operation list");
                } else {
                    return fail(i, "expected an operation token after the source word");
                }
                break;

            case St::SrcDone:
                if (is_rel_op(t, op)) {
                    entry.ops.emplace_back(op, i);
                    st = St::Ops;
                } else {
                    return fail(i, "expected an operation token after [NO_SRC]");
                }
                break;

            case St::Ops:
                if (is_rel_op(t, op)) {
                    const bool had_noop = entry.ops.front().first.kind == OpKind::NoOp;
                    if (had_noop || op.kind == OpKind::NoOp)
                        return fail(i, "[NO_OPS] must be the only operation of an entry");
                    entry.ops.emplace_back(op, i);
                } else if (t.kind == TokenKind::Piece) {
                    if (!t.word_begin)
                        return fail(i, "continuation piece cannot start a target word");
                    entry.has_word = true;
                    entry.word = Word(t.surface);
                    st = St::TgtWord;
                } else if (t.is(kNoTgt)) {
                    entry.has_word = false;
                    st = St::EntryDone;
                } else {
                    return fail(i, "expected a target word or [NO_TGT] after the operations");
                }
                break;

            case St::TgtWord:
                if (t.kind == TokenKind::Piece && !t.word_begin) {
                    entry.word.pieces.push_back(t.surface);
                } else if (is_rel_op(t, op)) {
                    flush_entry();
                    entry.ops.emplace_back(op, i);
                    st = St::Ops;
                } else if (t.is(kEop)) {
                    flush_entry();
                    if (!deliver(i)) return res;
                    st = St::TupleStart;
                } else if (t.kind == TokenKind::Piece) {
                    return fail(i, "second word in a target slot (expected an operation or [EOP])");
                } else {
                    return fail(i, "expected an operation, [EOP], or continuation pieces");
                }
                break;

            case St::EntryDone:
                if (is_rel_op(t, op)) {
                    flush_entry();
                    entry.ops.emplace_back(op, i);
                    st = St::Ops;
                } else if (t.is(kEop)) {
                    flush_entry();
                    if (!deliver(i)) return res;
                    st = St::TupleStart;
                } else {
                    return fail(i, "expected an operation token or [EOP] after [NO_TGT]");
                }
                break;
        }
    }

    if (!res.saw_eos) {
        if (st != St::TupleStart) res.pending_tokens = tokens.size() - tuple_first;
    }
    return res;
}

// Executes one parsed tuple against the machine. Returns false and fills
// err_* when a jump is unsatisfiable.
bool run_tuple(BufferState &machine, const RelTuple &tuple, size_t tuple_index,
               std::vector<std::string> *trace, size_t &err_idx, std::string &err_msg) {
    auto note = [&](const std::string &op) {
        if (!trace) return;
        trace->push_back("op=" + op + " s_head=" + std::to_string(machine.s_size()) +
                         " t_head=" + std::to_string(machine.t_head()) + " S=[" +
                         machine.s_display() + "] T=[" + machine.t_display(true) + "]");
    };
    if (tuple.src_is_word) {
        for (size_t i = 0; i < tuple.src.pieces.size(); ++i) {
            machine.apply(Op::insert_src(tuple.src.pieces[i], i == 0));
            note("INSERT-s(" + tuple.src.pieces[i] + ")");
        }
    }
    for (const auto &entry : tuple.entries) {
        for (const auto &[op, idx] : entry.ops) {
            try {
                machine.apply(op);
            } catch (const InterpreterError &e) {
                err_idx = idx;
                err_msg = e.what() + std::string(" (tuple ") + std::to_string(tuple_index) + ")";
                return false;
            }
            note(op_name(op.kind));
        }
        if (entry.has_word) {
            for (size_t i = 0; i < entry.word.pieces.size(); ++i) {
                machine.apply(Op::insert_tgt(entry.word.pieces[i], i == 0));
                note("INSERT-t(" + entry.word.pieces[i] + ")");
            }
        }
    }
    return true;
}

}  // namespace

DecodeResult decode_relative(const std::vector<Token> &tokens, const Options &opts) {
    DecodeResult result;
    BufferState machine;
    size_t tuple_no = 0;

    auto sink = [&](const RelTuple &tuple, size_t &err_idx, std::string &err_msg) {
        return run_tuple(machine, tuple, tuple_no++, opts.trace ? &result.trace : nullptr,
                         err_idx, err_msg);
    };
    RelWalkResult walk = walk_relative(tokens, sink);
    if (!walk.ok) {
        if (walk.sink_failed)
            throw InterpreterError("token " + std::to_string(walk.error_index) + ": " +
                                       walk.message,
                                   tuple_no == 0 ? 0 : tuple_no - 1);
        throw DecodeError("token " + std::to_string(walk.error_index) + ": " + walk.message);
    }
    if (!walk.saw_eos) {
        result.truncated = true;
        if (walk.pending_tokens > 0)
            result.warnings.push_back("incomplete tail of " +
                                      std::to_string(walk.pending_tokens) +
                                      " token(s) ignored (no [EOS])");
    }
    result.src = machine.s_words();
    result.tgt = machine.t_words();
    for (const auto &cell : machine.t_cells())
        if (!cell.marker && cell.word_begin)
            result.tgt_emission_ranks.push_back(cell.emission_seq);
    return result;
}

ParseReport validate_relative(const std::vector<Token> &tokens, const Options &opts) {
    (void)opts;
    BufferState machine;  // dry run for jump feasibility
    size_t tuple_no = 0;
    auto sink = [&](const RelTuple &tuple, size_t &err_idx, std::string &err_msg) {
        return run_tuple(machine, tuple, tuple_no++, nullptr, err_idx, err_msg);
    };
    RelWalkResult walk = walk_relative(tokens, sink);
    if (!walk.ok) return ParseReport::reject(walk.error_index, walk.message);
    if (!walk.saw_eos)
        return ParseReport::reject(tokens.size(), "stream ended without [EOS]");
    return ParseReport::accept(std::move(walk.tuples));
}

// ---------------------------------------------------------------------------
// Encoder: marker planning over the gap structure of the final order.

namespace {

struct PendingGap {
    int lo, hi;          // inclusive run of not-yet-written final positions
    int marker_id = -1;  // -1: unmarked, only legal for the gap at the head
};

struct EmissionItem {
    size_t tuple_index;
    size_t entry_index;
    int final_pos;
};

}  // namespace

std::vector<Token> encode_relative(const TupleSequence &tuples, const Options &opts) {
    check_tuple_sequence(tuples);

    int target_len = 0;
    for (const auto &t : tuples)
        for (const auto &e : t.targets)
            if (e.final_pos.has_value()) ++target_len;

    BufferState machine;
    std::vector<PendingGap> gaps;
    if (target_len > 0) gaps.push_back({1, target_len, -1});

    // ops planned for one entry, as tokens
    std::vector<Token> out;
    const bool eager = opts.marker_policy == MarkerPolicy::Eager;

    auto find_gap = [&](int p) {
        for (size_t i = 0; i < gaps.size(); ++i)
            if (gaps[i].lo <= p && p <= gaps[i].hi) return i;
        throw InterpreterError("position " + std::to_string(p) + " already written");
    };
    auto head_gap = [&]() -> PendingGap * {
        for (auto &g : gaps)
            if (g.marker_id < 0) return &g;
        return nullptr;
    };

    for (const auto &tuple : tuples) {
        if (tuple.src.has_value()) {
            for (auto &tok : collapse(*tuple.src)) out.push_back(std::move(tok));
            for (size_t i = 0; i < tuple.src->pieces.size(); ++i)
                machine.apply(Op::insert_src(tuple.src->pieces[i], i == 0));
        } else {
            out.push_back(Token::special(kNoSrc));
        }

        for (const auto &entry : tuple.targets) {
            if (!entry.word.has_value()) {
                out.push_back(Token::special(kNoOps));
                out.push_back(Token::special(kNoTgt));
                continue;
            }
            const int p = *entry.final_pos;
            size_t gi = find_gap(p);
            size_t ops_emitted = 0;

            // Entering a different gap: give the abandoned head gap its
            // marker, then jump marker slot by marker slot.
            if (gaps[gi].marker_id < 0 && eager && p == gaps[gi].lo) {
                gaps[gi].marker_id = machine.set_marker();
                out.push_back(Token::special(kSetMarker));
                ++ops_emitted;
            }
            if (gaps[gi].marker_id >= 0) {
                if (PendingGap *hg = head_gap(); hg != nullptr) {
                    hg->marker_id = machine.set_marker();
                    out.push_back(Token::special(kSetMarker));
                    ++ops_emitted;
                }
                const size_t target_slot = machine.marker_slot(gaps[gi].marker_id);
                while (machine.t_head() > target_slot) {
                    machine.apply(Op::jmp_bwd());
                    out.push_back(Token::special(kJmpBwd));
                    ++ops_emitted;
                }
                while (machine.t_head() < target_slot) {
                    machine.apply(Op::jmp_fwd());
                    out.push_back(Token::special(kJmpFwd));
                    ++ops_emitted;
                }
            }

            // Entering mid-gap: fence the pending left sub-gap.
            int left_marker = -1;
            if (p > gaps[gi].lo) {
                left_marker = machine.set_marker();
                out.push_back(Token::special(kSetMarker));
                ++ops_emitted;
            }
            if (ops_emitted == 0) out.push_back(Token::special(kNoOps));

            for (size_t i = 0; i < entry.word->pieces.size(); ++i) {
                out.push_back(Token::piece(entry.word->pieces[i], i == 0));
                machine.apply(Op::insert_tgt(entry.word->pieces[i], i == 0));
            }

            // Split the gap around p.
            const PendingGap old = gaps[gi];
            gaps.erase(gaps.begin() + static_cast<long>(gi));
            if (p > old.lo) gaps.push_back({old.lo, p - 1, left_marker});
            if (p < old.hi) gaps.push_back({p + 1, old.hi, -1});
        }
        out.push_back(Token::special(kEop));
    }
    out.push_back(Token::special(kEos));

    assert(gaps.empty());
    return out;
}

}  // namespace opseq

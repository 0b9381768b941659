#include "streaming.hpp"

#include "errors.hpp"

namespace opseq {

StreamSession::StreamSession(Variant variant, Options opts)
    : variant_(variant), opts_(opts) {}

FeedEvent StreamSession::fail(const std::string &message) {
    poisoned_ = true;
    error_message_ = message;
    return FeedEvent::Error;
}

FeedEvent StreamSession::feed(const Token &token) {
    if (poisoned_) return FeedEvent::Error;
    if (ended_) return fail("token fed after [EOS]");
    FeedEvent ev = variant_ == Variant::Absolute ? feed_absolute(token) : feed_relative(token);
    ++tokens_fed_;
    return ev;
}

FeedEvent StreamSession::feed(const Token &token, long timestamp_ms) {
    has_timestamps_ = true;
    timestamps_.push_back(timestamp_ms);
    return feed(token);
}

void StreamSession::take_snapshot() {
    Snapshot snap;
    snap.token_index = tokens_fed_;
    if (variant_ == Variant::Absolute) {
        snap.src = abs_s_;
        for (const auto &cell : abs_t_)
            if (cell.has_value()) snap.tgt.push_back(*cell);
    } else {
        snap.src = machine_.s_words();
        snap.tgt = machine_.t_words();
    }
    snapshots_.push_back(std::move(snap));
}

void StreamSession::record_target_word_delay() {
    if (has_timestamps_ && !timestamps_.empty()) {
        word_delays_.push_back(static_cast<double>(timestamps_.back()));
    } else {
        const size_t consumed = variant_ == Variant::Absolute
                                    ? abs_s_.size()
                                    : machine_.s_words().size();
        word_delays_.push_back(static_cast<double>(consumed));
    }
}

// --------------------------------------------------------------------------
// Absolute variant

FeedEvent StreamSession::feed_absolute(const Token &t) {
    const size_t idx = tokens_fed_;

    if (t.kind == TokenKind::Piece) {
        abs_group_open_ = true;
        if (t.word_begin) {
            if (abs_slot_ == AbsSlot::WordBegun)
                return fail("token " + std::to_string(idx) + ": second word in one slot");
            if (abs_slot_ != AbsSlot::Empty)
                return fail("token " + std::to_string(idx) + ": word piece after a marker");
            abs_word_ = Word(t.surface);
            abs_slot_ = AbsSlot::WordBegun;
        } else {
            if (abs_slot_ != AbsSlot::WordBegun)
                return fail("token " + std::to_string(idx) +
                            ": continuation piece without a word");
            abs_word_.pieces.push_back(t.surface);
        }
        return FeedEvent::None;
    }

    if (t.surface == kBlank) {
        abs_group_open_ = true;
        if (abs_after_blank_)
            return fail("token " + std::to_string(idx) + ": duplicate [BL]");
        if (abs_slot_ == AbsSlot::Empty)
            return fail("token " + std::to_string(idx) + ": [BL] without a source slot");
        if (abs_slot_ == AbsSlot::NoTgtMark)
            return fail("token " + std::to_string(idx) + ": [NO_TGT] in the source slot");
        abs_group_new_tuple_ = true;
        abs_src_is_word_ = abs_slot_ == AbsSlot::WordBegun;
        if (abs_src_is_word_) abs_src_ = abs_word_;
        abs_after_blank_ = true;
        abs_slot_ = AbsSlot::Empty;
        return FeedEvent::None;
    }
    if (t.surface == kNoSrc) {
        abs_group_open_ = true;
        if (abs_slot_ != AbsSlot::Empty || abs_after_blank_)
            return fail("token " + std::to_string(idx) + ": misplaced [NO_SRC]");
        abs_slot_ = AbsSlot::NoSrcMark;
        return FeedEvent::None;
    }
    if (t.surface == kNoTgt) {
        abs_group_open_ = true;
        if (abs_slot_ != AbsSlot::Empty)
            return fail("token " + std::to_string(idx) + ": misplaced [NO_TGT]");
        abs_slot_ = AbsSlot::NoTgtMark;
        return FeedEvent::None;
    }

    auto n = position_value(t.surface);
    if (n.has_value() || t.surface == kSkipPos) {
        if (!abs_group_open_)
            return fail("token " + std::to_string(idx) + ": position token without a group");
        if (abs_slot_ == AbsSlot::NoSrcMark)
            return fail("token " + std::to_string(idx) + ": [NO_SRC] must be followed by [BL]");
        if (!abs_group_new_tuple_ && !abs_any_tuple_)
            return fail("token " + std::to_string(idx) + ": entry before any tuple");
        if (t.surface == kSkipPos) {
            if (abs_slot_ != AbsSlot::NoTgtMark)
                return fail("token " + std::to_string(idx) + ": [-1] must follow [NO_TGT]");
        } else {
            if (abs_slot_ == AbsSlot::NoTgtMark)
                return fail("token " + std::to_string(idx) + ": [NO_TGT] requires [-1]");
            if (abs_slot_ != AbsSlot::WordBegun)
                return fail("token " + std::to_string(idx) + ": position without a target word");
            if (*n > opts_.max_positions)
                return fail("token " + std::to_string(idx) + ": position exceeds cap");
        }

        // Execute the group.
        if (abs_group_new_tuple_ && abs_src_is_word_) abs_s_.push_back(abs_src_);
        if (n.has_value()) {
            const size_t cell = static_cast<size_t>(*n);
            if (abs_t_.size() < cell) abs_t_.resize(cell);
            if (abs_t_[cell - 1].has_value())
                warnings_.push_back("position [" + std::to_string(*n) +
                                    "] rewritten at token " + std::to_string(idx));
            abs_t_[cell - 1] = abs_word_;
            record_target_word_delay();
        }
        abs_any_tuple_ = true;
        abs_group_open_ = false;
        abs_group_new_tuple_ = false;
        abs_slot_ = AbsSlot::Empty;
        abs_after_blank_ = false;
        take_snapshot();
        return FeedEvent::TupleCompleted;
    }

    if (t.surface == kEos) {
        if (abs_group_open_)
            return fail("token " + std::to_string(idx) + ": unterminated group at [EOS]");
        // snapshots fire at tuple boundaries only; [EOS] changes nothing
        ended_ = true;
        return FeedEvent::StreamEnded;
    }

    return fail("token " + std::to_string(idx) + ": '" + t.surface +
                "' is not part of the absolute grammar");
}

// --------------------------------------------------------------------------
// Relative variant

FeedEvent StreamSession::feed_relative(const Token &t) {
    const size_t idx = tokens_fed_;

    Op op{OpKind::NoOp, {}, true};
    auto as_op = [&](const Token &tok) {
        if (tok.kind != TokenKind::Special) return false;
        if (tok.surface == kSetMarker) { op = Op::set_marker(); return true; }
        if (tok.surface == kJmpFwd) { op = Op::jmp_fwd(); return true; }
        if (tok.surface == kJmpBwd) { op = Op::jmp_bwd(); return true; }
        if (tok.surface == kNoOps) { op = Op::no_op(); return true; }
        return false;
    };

    switch (rel_state_) {
        case RelSt::TupleStart:
            if (t.kind == TokenKind::Piece) {
                if (!t.word_begin)
                    return fail("token " + std::to_string(idx) +
                                ": continuation piece cannot start a tuple");
                rel_src_is_word_ = true;
                rel_src_ = Word(t.surface);
                rel_state_ = RelSt::SrcWord;
                return FeedEvent::None;
            }
            if (t.is(kNoSrc)) {
                rel_src_is_word_ = false;
                rel_state_ = RelSt::SrcDone;
                return FeedEvent::None;
            }
            if (t.is(kEos)) {
                ended_ = true;
                return FeedEvent::StreamEnded;
            }
            return fail("token " + std::to_string(idx) +
                        ": expected a source word, [NO_SRC], or [EOS]");

        case RelSt::SrcWord:
            if (t.kind == TokenKind::Piece && !t.word_begin) {
                rel_src_.pieces.push_back(t.surface);
                return FeedEvent::None;
            }
            if (as_op(t)) {
                rel_entry_.ops.push_back(op);
                rel_state_ = RelSt::Ops;
                return FeedEvent::None;
            }
            return fail("token " + std::to_string(idx) +
                        ": expected an operation token after the source word");

        case RelSt::SrcDone:
            if (as_op(t)) {
                rel_entry_.ops.push_back(op);
                rel_state_ = RelSt::Ops;
                return FeedEvent::None;
            }
            return fail("token " + std::to_string(idx) +
                        ": expected an operation token after [NO_SRC]");

        case RelSt::Ops:
            if (as_op(t)) {
                if (rel_entry_.ops.front().kind == OpKind::NoOp || op.kind == OpKind::NoOp)
                    return fail("token " + std::to_string(idx) +
                                ": [NO_OPS] must be the only operation of an entry");
                rel_entry_.ops.push_back(op);
                return FeedEvent::None;
            }
            if (t.kind == TokenKind::Piece) {
                if (!t.word_begin)
                    return fail("token " + std::to_string(idx) +
                                ": continuation piece cannot start a target word");
                rel_entry_.has_word = true;
                rel_entry_.word = Word(t.surface);
                rel_state_ = RelSt::TgtWord;
                return FeedEvent::None;
            }
            if (t.is(kNoTgt)) {
                rel_entry_.has_word = false;
                rel_state_ = RelSt::EntryDone;
                return FeedEvent::None;
            }
            return fail("token " + std::to_string(idx) +
                        ": expected a target word or [NO_TGT]");

        case RelSt::TgtWord:
            if (t.kind == TokenKind::Piece && !t.word_begin) {
                rel_entry_.word.pieces.push_back(t.surface);
                return FeedEvent::None;
            }
            [[fallthrough]];
        case RelSt::EntryDone:
            if (as_op(t)) {
                rel_entries_.push_back(std::move(rel_entry_));
                rel_entry_ = RelPendingEntry{};
                rel_entry_.ops.push_back(op);
                rel_state_ = RelSt::Ops;
                return FeedEvent::None;
            }
            if (t.is(kEop)) {
                rel_entries_.push_back(std::move(rel_entry_));
                rel_entry_ = RelPendingEntry{};

                // Execute the queued tuple.
                if (rel_src_is_word_)
                    for (size_t i = 0; i < rel_src_.pieces.size(); ++i)
                        machine_.apply(Op::insert_src(rel_src_.pieces[i], i == 0));
                for (const auto &entry : rel_entries_) {
                    for (const auto &o : entry.ops) {
                        try {
                            machine_.apply(o);
                        } catch (const InterpreterError &e) {
                            return fail("token " + std::to_string(idx) + ": " + e.what());
                        }
                    }
                    if (entry.has_word) {
                        for (size_t i = 0; i < entry.word.pieces.size(); ++i)
                            machine_.apply(Op::insert_tgt(entry.word.pieces[i], i == 0));
                        record_target_word_delay();
                    }
                }
                rel_entries_.clear();
                rel_state_ = RelSt::TupleStart;
                take_snapshot();
                return FeedEvent::TupleCompleted;
            }
            if (rel_state_ == RelSt::TgtWord)
                return fail("token " + std::to_string(idx) +
                            ": expected an operation, [EOP], or continuation pieces");
            return fail("token " + std::to_string(idx) +
                        ": expected an operation token or [EOP] after [NO_TGT]");
    }
    return fail("unreachable");
}

std::vector<std::pair<size_t, std::string>> StreamSession::partial_hypotheses() const {
    std::vector<std::pair<size_t, std::string>> out;
    out.reserve(snapshots_.size());
    for (const auto &snap : snapshots_)
        out.emplace_back(snap.token_index, render_words_surface(snap.tgt));
    return out;
}

std::vector<Word> StreamSession::final_src() const {
    if (snapshots_.empty()) return {};
    return snapshots_.back().src;
}

std::vector<Word> StreamSession::final_tgt() const {
    if (snapshots_.empty()) return {};
    return snapshots_.back().tgt;
}

LatencyTrace StreamSession::latency_trace() const {
    if (!ended_) throw IngestError("latency trace requested before [EOS]");
    LatencyTrace trace;
    trace.delays = word_delays_;
    if (has_timestamps_)
        trace.src_len = timestamps_.empty() ? 0.0 : static_cast<double>(timestamps_.back());
    else
        trace.src_len = static_cast<double>(final_src().size());
    trace.tgt_len = static_cast<double>(word_delays_.size());
    return trace;
}

StreamSession replay(const std::vector<Token> &tokens,
                     const std::optional<std::vector<long>> &timestamps, Variant variant,
                     const Options &opts) {
    if (timestamps.has_value() && timestamps->size() != tokens.size())
        throw IngestError("timestamp count " + std::to_string(timestamps->size()) +
                          " does not match token count " + std::to_string(tokens.size()));
    StreamSession session(variant, opts);
    for (size_t i = 0; i < tokens.size(); ++i) {
        FeedEvent ev = timestamps.has_value() ? session.feed(tokens[i], (*timestamps)[i])
                                              : session.feed(tokens[i]);
        if (ev == FeedEvent::Error)
            throw DecodeError("feed error at token " + std::to_string(i) + ": " +
                              session.error_message());
    }
    return session;
}

}  // namespace opseq

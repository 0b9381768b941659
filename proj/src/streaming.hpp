#ifndef OPSEQ_STREAMING_HPP
#define OPSEQ_STREAMING_HPP

#include <optional>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "relative.hpp"
#include "types.hpp"

namespace opseq {

enum class FeedEvent { None, TupleCompleted, StreamEnded, Error };

struct Snapshot {
    size_t token_index;         // token that completed the group
    std::vector<Word> src;
    std::vector<Word> tgt;      // display form: markers and unwritten cells elided
};

// Token-at-a-time interpreter for either stream variant. Tokens queue up
// until a group boundary (a position token for the absolute variant, [EOP]
// for the relative one) executes the pending tuple and takes a snapshot.
// Any error poisons the session; subsequent feeds keep reporting Error.
class StreamSession {
public:
    explicit StreamSession(Variant variant, Options opts = {});

    FeedEvent feed(const Token &token);
    FeedEvent feed(const Token &token, long timestamp_ms);

    bool ended() const { return ended_; }
    bool poisoned() const { return poisoned_; }
    const std::string &error_message() const { return error_message_; }
    size_t tokens_fed() const { return tokens_fed_; }
    Variant variant() const { return variant_; }
    // duplicate-position rewrites and similar non-fatal events
    const std::vector<std::string> &warnings() const { return warnings_; }

    const std::vector<Snapshot> &snapshots() const { return snapshots_; }

    // Display-form partial translations, one per snapshot.
    std::vector<std::pair<size_t, std::string>> partial_hypotheses() const;

    // Final restored sentences; only meaningful once ended().
    std::vector<Word> final_src() const;
    std::vector<Word> final_tgt() const;

    // Emission-order delays for latency metrics: with timestamps, the time
    // each target word was written and the stream end time; without, source
    // words consumed at each write and the final source length.
    LatencyTrace latency_trace() const;

private:
    FeedEvent fail(const std::string &message);
    FeedEvent feed_absolute(const Token &token);
    FeedEvent feed_relative(const Token &token);
    void take_snapshot();
    void record_target_word_delay();

    Variant variant_;
    Options opts_;
    bool ended_ = false;
    bool poisoned_ = false;
    std::string error_message_;
    size_t tokens_fed_ = 0;
    std::vector<Snapshot> snapshots_;
    std::vector<std::string> warnings_;
    std::vector<long> timestamps_;
    bool has_timestamps_ = false;
    std::vector<double> word_delays_;

    // Relative state: grammar position + pending tuple + the machine.
    enum class RelSt { TupleStart, SrcWord, SrcDone, Ops, TgtWord, EntryDone };
    struct RelPendingEntry {
        std::vector<Op> ops;
        bool has_word = false;
        Word word;
    };
    RelSt rel_state_ = RelSt::TupleStart;
    bool rel_src_is_word_ = false;
    Word rel_src_;
    std::vector<RelPendingEntry> rel_entries_;
    RelPendingEntry rel_entry_;
    BufferState machine_;

    // Absolute state: pending group + restoration buffers.
    enum class AbsSlot { Empty, NoSrcMark, NoTgtMark, WordBegun };
    AbsSlot abs_slot_ = AbsSlot::Empty;
    bool abs_after_blank_ = false;
    bool abs_group_open_ = false;
    bool abs_group_new_tuple_ = false;
    bool abs_src_is_word_ = false;
    Word abs_src_;
    Word abs_word_;
    bool abs_any_tuple_ = false;
    std::vector<Word> abs_s_;
    std::vector<std::optional<Word>> abs_t_;
};

// Feeds a whole serialized stream; timestamp count must match token count
// when given. Feed errors propagate as IngestError tagged with the index.
StreamSession replay(const std::vector<Token> &tokens,
                     const std::optional<std::vector<long>> &timestamps = std::nullopt,
                     Variant variant = Variant::Relative, const Options &opts = {});

}  // namespace opseq

#endif

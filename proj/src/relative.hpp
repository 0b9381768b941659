#ifndef OPSEQ_RELATIVE_HPP
#define OPSEQ_RELATIVE_HPP

#include <string>
#include <vector>

#include "types.hpp"

namespace opseq {

enum class OpKind { SetMarker, JmpFwd, JmpBwd, InsertTgt, InsertSrc, NoOp };

struct Op {
    OpKind kind;
    std::string piece;  // InsertTgt / InsertSrc payload
    bool word_begin = true;

    static Op set_marker() { return {OpKind::SetMarker, {}, true}; }
    static Op jmp_fwd() { return {OpKind::JmpFwd, {}, true}; }
    static Op jmp_bwd() { return {OpKind::JmpBwd, {}, true}; }
    static Op no_op() { return {OpKind::NoOp, {}, true}; }
    static Op insert_tgt(std::string piece, bool begin) {
        return {OpKind::InsertTgt, std::move(piece), begin};
    }
    static Op insert_src(std::string piece, bool begin) {
        return {OpKind::InsertSrc, std::move(piece), begin};
    }
};

// The write-head buffer machine. S only ever appends; T is a cell sequence
// of word pieces and markers with a movable head. Jumps address marker
// slots: the slot of a marker cell m is the position just after it, [JB]
// moves to the nearest marker slot strictly left of the head, [JF] to the
// nearest strictly right. A marker at head-1 is the slot the head already
// occupies and is never a jump target.
class BufferState {
public:
    struct Cell {
        bool marker = false;
        int marker_id = -1;     // stable id for markers
        std::string piece;      // word piece otherwise
        bool word_begin = true;
        int emission_seq = 0;   // 1-based rank of the word this piece begins
    };

    // Applies one operation. Throws InterpreterError for unsatisfiable jumps.
    void apply(const Op &op);

    // set_marker via apply() works too; this variant reports the new id.
    int set_marker();

    size_t t_head() const { return t_head_; }
    size_t t_size() const { return t_cells_.size(); }
    size_t s_size() const { return s_pieces_.size(); }
    size_t marker_count() const { return marker_count_; }
    int words_inserted() const { return emission_words_; }

    // Slot just after the marker with the given id; throws if unknown.
    size_t marker_slot(int marker_id) const;

    const std::vector<Cell> &t_cells() const { return t_cells_; }

    std::vector<Word> s_words() const;
    // Final read-out: markers removed, pieces grouped into words.
    std::vector<Word> t_words() const;
    // T with markers shown as "*", for traces and partial displays.
    std::string t_display(bool keep_markers) const;
    std::string s_display() const;

private:
    std::vector<Cell> t_cells_;
    size_t t_head_ = 0;
    std::vector<Cell> s_pieces_;
    size_t marker_count_ = 0;
    int next_marker_id_ = 0;
    int emission_words_ = 0;
};

std::string op_name(OpKind kind);

// Compiles a tuple sequence into the relative shift stream. Markers are
// planned over the gap structure of the final target order: leaving a gap
// that still has pending words sets a marker there, entering a gap at a
// non-leftmost pending position sets a marker to fence the left sub-gap,
// and jumps are emitted one per marker slot crossed. Entries whose steps
// emit nothing get [NO_OPS]; [NO_TGT] entries always carry [NO_OPS].
// Eager policy additionally marks any unmarked gap before inserting into it.
std::vector<Token> encode_relative(const TupleSequence &tuples, const Options &opts = {});

// FIFO restoration per Fig-2 semantics: tokens queue up, [EOP] executes the
// queued tuple (source inserts, then per entry ops followed by target
// inserts), [EOS] reads the buffers out with markers stripped. Structural
// damage throws DecodeError; unsatisfiable jumps throw InterpreterError
// tagged with the tuple index. A missing [EOS] yields a truncated result.
DecodeResult decode_relative(const std::vector<Token> &tokens, const Options &opts = {});

// Grammar check plus a jump-feasibility pass (a dry run of the machine), so
// accepted streams never raise InterpreterError at decode. Never throws.
ParseReport validate_relative(const std::vector<Token> &tokens, const Options &opts = {});

}  // namespace opseq

#endif

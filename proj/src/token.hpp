#ifndef OPSEQ_TOKEN_HPP
#define OPSEQ_TOKEN_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace opseq {

// Reserved special-token surfaces. Position tokens [n] (n >= 1) are special
// as well but form an open family, see is_position_token().
inline constexpr std::string_view kBlank = "[BL]";
inline constexpr std::string_view kEos = "[EOS]";
inline constexpr std::string_view kEop = "[EOP]";
inline constexpr std::string_view kNoSrc = "[NO_SRC]";
inline constexpr std::string_view kNoTgt = "[NO_TGT]";
inline constexpr std::string_view kNoOps = "[NO_OPS]";
inline constexpr std::string_view kSetMarker = "[SM]";
inline constexpr std::string_view kJmpFwd = "[JF]";
inline constexpr std::string_view kJmpBwd = "[JB]";
inline constexpr std::string_view kSkipPos = "[-1]";

// Continuation prefix for non-initial pieces of a multi-piece word. A bare
// piece starts a word; a "##" piece extends the word before it. Single-piece
// words therefore serialize without any marker.
inline constexpr std::string_view kContinuationPrefix = "##";

enum class TokenKind { Piece, Special };

struct Token {
    std::string surface;           // special tokens keep brackets, pieces are bare
    TokenKind kind = TokenKind::Piece;
    bool word_begin = true;        // meaningful for Piece only

    static Token special(std::string_view s);
    static Token piece(std::string_view s, bool begin);
    static Token position(int n);  // [n], n >= 1

    bool is(std::string_view s) const { return kind == TokenKind::Special && surface == s; }

    friend bool operator==(const Token &, const Token &) = default;
};

// True iff the surface belongs to the reserved set (closed specials plus
// position tokens). Pure function of the surface form.
bool is_special(std::string_view surface);

// Parses "[n]" with n >= 1; nullopt for anything else (including "[-1]").
std::optional<int> position_value(std::string_view surface);

// True for any bracketed form "[...]"; such surfaces are reserved and may
// not appear as word pieces even when they are not recognized specials.
bool is_bracketed(std::string_view surface);

// One surface word as an ordered, non-empty piece sequence. The first piece
// is the word-initial one; the rest are continuations.
struct Word {
    std::vector<std::string> pieces;

    Word() = default;
    explicit Word(std::string piece) : pieces{std::move(piece)} {}
    Word(std::initializer_list<std::string> ps) : pieces(ps) {}

    std::string surface() const;  // pieces joined in order

    friend bool operator==(const Word &, const Word &) = default;
};

// Flattens a word to piece tokens; the first token carries the begin flag.
std::vector<Token> collapse(const Word &word);

// Serialized text form of one token (continuation pieces gain the "##"
// prefix, everything else is verbatim).
std::string token_text(const Token &token);

// Inverse of token_text. Throws IngestError on reserved/bracketed surfaces
// that are not recognized specials.
Token parse_token(std::string_view text);

// Whitespace-splits a serialized token line.
std::vector<Token> parse_token_line(std::string_view line);

std::string render_token_line(const std::vector<Token> &tokens);

// Sentence text <-> words. A "##" token continues the preceding word;
// anything else starts a new word. Reserved surfaces are rejected.
std::vector<Word> parse_words(std::string_view line);

// Piece-level text: every piece spelled as in a token stream ("tr ##ans").
std::string render_words_pieces(const std::vector<Word> &words);

// Surface-level text: pieces of each word joined, words space-separated.
std::string render_words_surface(const std::vector<Word> &words);

}  // namespace opseq

#endif

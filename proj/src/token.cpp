#include "token.hpp"

#include <array>
#include <sstream>

#include "errors.hpp"

namespace opseq {

namespace {

constexpr std::array<std::string_view, 10> kClosedSpecials = {
    kBlank, kEos, kEop, kNoSrc, kNoTgt, kNoOps, kSetMarker, kJmpFwd, kJmpBwd, kSkipPos,
};

bool in_closed_set(std::string_view s) {
    for (auto r : kClosedSpecials)
        if (s == r) return true;
    return false;
}

}  // namespace

Token Token::special(std::string_view s) {
    return Token{std::string(s), TokenKind::Special, true};
}

Token Token::piece(std::string_view s, bool begin) {
    return Token{std::string(s), TokenKind::Piece, begin};
}

Token Token::position(int n) {
    return Token::special("[" + std::to_string(n) + "]");
}

std::optional<int> position_value(std::string_view s) {
    if (s.size() < 3 || s.front() != '[' || s.back() != ']') return std::nullopt;
    std::string_view body = s.substr(1, s.size() - 2);
    if (body.empty() || body[0] == '0') return std::nullopt;
    long v = 0;
    for (char c : body) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
        if (v > 1'000'000'000) return std::nullopt;
    }
    return static_cast<int>(v);
}

bool is_special(std::string_view surface) {
    return in_closed_set(surface) || position_value(surface).has_value();
}

bool is_bracketed(std::string_view surface) {
    return surface.size() >= 2 && surface.front() == '[' && surface.back() == ']';
}

std::string Word::surface() const {
    std::string out;
    for (const auto &p : pieces) out += p;
    return out;
}

std::vector<Token> collapse(const Word &word) {
    std::vector<Token> out;
    out.reserve(word.pieces.size());
    for (size_t i = 0; i < word.pieces.size(); ++i)
        out.push_back(Token::piece(word.pieces[i], i == 0));
    return out;
}

std::string token_text(const Token &token) {
    if (token.kind == TokenKind::Special || token.word_begin) return token.surface;
    return std::string(kContinuationPrefix) + token.surface;
}

Token parse_token(std::string_view text) {
    if (is_special(text)) return Token::special(text);
    if (is_bracketed(text))
        throw IngestError("reserved bracketed surface is not a known special token: " +
                          std::string(text));
    if (text.substr(0, kContinuationPrefix.size()) == kContinuationPrefix) {
        std::string_view body = text.substr(kContinuationPrefix.size());
        if (body.empty()) throw IngestError("bare continuation marker");
        return Token::piece(body, false);
    }
    if (text.empty()) throw IngestError("empty token");
    return Token::piece(text, true);
}

std::vector<Token> parse_token_line(std::string_view line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(parse_token(line.substr(i, j - i)));
        i = j;
    }
    return out;
}

std::string render_token_line(const std::vector<Token> &tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += token_text(tokens[i]);
    }
    return out;
}

std::vector<Word> parse_words(std::string_view line) {
    std::vector<Word> words;
    for (const Token &t : parse_token_line(line)) {
        if (t.kind == TokenKind::Special)
            throw IngestError("reserved token surface in sentence text: " + t.surface);
        if (t.word_begin) {
            words.push_back(Word(t.surface));
        } else {
            if (words.empty())
                throw IngestError("continuation piece with no preceding word: " +
                                  std::string(kContinuationPrefix) + t.surface);
            words.back().pieces.push_back(t.surface);
        }
    }
    return words;
}

std::string render_words_pieces(const std::vector<Word> &words) {
    std::string out;
    bool first = true;
    for (const auto &w : words) {
        for (size_t i = 0; i < w.pieces.size(); ++i) {
            if (!first) out += ' ';
            first = false;
            if (i > 0) out += kContinuationPrefix;
            out += w.pieces[i];
        }
    }
    return out;
}

std::string render_words_surface(const std::vector<Word> &words) {
    std::string out;
    for (size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i].surface();
    }
    return out;
}

}  // namespace opseq

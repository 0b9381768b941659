#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "errors.hpp"
#include "testutil.hpp"
#include "token.hpp"
#include "types.hpp"

using namespace opseq;

TEST_CASE("special token registry") {
    CHECK(is_special("[EOS]"));
    CHECK(is_special("[BL]"));
    CHECK(is_special("[EOP]"));
    CHECK(is_special("[NO_SRC]"));
    CHECK(is_special("[NO_TGT]"));
    CHECK(is_special("[NO_OPS]"));
    CHECK(is_special("[SM]"));
    CHECK(is_special("[JF]"));
    CHECK(is_special("[JB]"));
    CHECK(is_special("[-1]"));
    CHECK(is_special("[17]"));
    CHECK(is_special("[1]"));
    CHECK(is_special("[512]"));

    CHECK_FALSE(is_special("cat"));
    CHECK_FALSE(is_special("[0]"));
    CHECK_FALSE(is_special("[01]"));
    CHECK_FALSE(is_special("[-2]"));
    CHECK_FALSE(is_special("[]"));
    CHECK_FALSE(is_special("[1"));
    CHECK_FALSE(is_special("EOS"));
}

TEST_CASE("position token values") {
    CHECK(position_value("[17]") == 17);
    CHECK(position_value("[1]") == 1);
    CHECK_FALSE(position_value("[-1]").has_value());
    CHECK_FALSE(position_value("[0]").has_value());
    CHECK_FALSE(position_value("cat").has_value());
    CHECK(Token::position(17).surface == "[17]");
}

TEST_CASE("collapse of words") {
    const Word cat("cat");
    auto toks = collapse(cat);
    REQUIRE(toks.size() == 1);
    CHECK(toks[0].surface == "cat");
    CHECK(toks[0].word_begin);

    const Word translation{"trans", "lation"};
    toks = collapse(translation);
    REQUIRE(toks.size() == 2);
    CHECK(toks[0].surface == "trans");
    CHECK(toks[0].word_begin);
    CHECK(toks[1].surface == "lation");
    CHECK_FALSE(toks[1].word_begin);
    CHECK(translation.surface() == "translation");
}

TEST_CASE("token text round trip") {
    CHECK(token_text(Token::piece("cat", true)) == "cat");
    CHECK(token_text(Token::piece("lation", false)) == "##lation");
    CHECK(token_text(Token::special(kEos)) == "[EOS]");

    Token t = parse_token("##lation");
    CHECK(t.kind == TokenKind::Piece);
    CHECK_FALSE(t.word_begin);
    CHECK(t.surface == "lation");

    CHECK(parse_token("[EOS]").kind == TokenKind::Special);
    CHECK(parse_token("[7]").kind == TokenKind::Special);
    CHECK_THROWS_AS(parse_token("[bogus]"), IngestError);
    CHECK_THROWS_AS(parse_token("[0]"), IngestError);
    CHECK_THROWS_AS(parse_token("##"), IngestError);
}

TEST_CASE("sentence text parsing") {
    auto words = parse_words("tr ##ans cat");
    REQUIRE(words.size() == 2);
    CHECK(words[0] == Word{"tr", "ans"});
    CHECK(words[1] == Word("cat"));
    CHECK(render_words_pieces(words) == "tr ##ans cat");
    CHECK(render_words_surface(words) == "trans cat");

    CHECK(parse_words("").empty());
    CHECK(parse_words("  ").empty());
    CHECK_THROWS_AS(parse_words("##orphan first"), IngestError);
    CHECK_THROWS_AS(parse_words("a [EOS] b"), IngestError);
    CHECK_THROWS_AS(parse_words("a [3]"), IngestError);
}

TEST_CASE("collapse of tuple sequences") {
    TupleSequence monotone = {
        {Word("a"), {{Word("x"), 1}}},
        {Word("b"), {{Word("y"), 2}}},
    };
    auto toks = collapse(monotone);
    REQUIRE(toks.size() == 4);
    CHECK(render_token_line(toks) == "a x b y");

    TupleSequence with_specials = {
        {std::nullopt, {{Word("x"), 1}}},
        {Word("a"), {{std::nullopt, std::nullopt}}},
    };
    CHECK(render_token_line(collapse(with_specials)) == "[NO_SRC] x a [NO_TGT]");
}

TEST_CASE("tuple sequence invariants") {
    TupleSequence good = {
        {Word("a"), {{Word("x"), 2}}},
        {Word("b"), {{Word("y"), 1}}},
    };
    CHECK_NOTHROW(check_tuple_sequence(good));

    TupleSequence bad_positions = {{Word("a"), {{Word("x"), 2}}}};
    CHECK_THROWS_AS(check_tuple_sequence(bad_positions), IngestError);

    TupleSequence no_tgt_with_pos = {{Word("a"), {{std::nullopt, 1}}}};
    CHECK_THROWS_AS(check_tuple_sequence(no_tgt_with_pos), IngestError);

    TupleSequence no_tgt_not_alone = {
        {Word("a"), {{std::nullopt, std::nullopt}, {Word("x"), 1}}}};
    CHECK_THROWS_AS(check_tuple_sequence(no_tgt_not_alone), IngestError);
}

TEST_CASE("collapse distinguishes word segmentations") {
    // "ab" as one word vs two pieces vs two words all serialize differently.
    CHECK(render_token_line(collapse(Word("ab"))) == "ab");
    CHECK(render_token_line(collapse(Word{"a", "b"})) == "a ##b");
    std::vector<Word> two = {Word("a"), Word("b")};
    CHECK(render_words_pieces(two) == "a b");
}

TEST_CASE("word list piece round trip property") {
    std::mt19937 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        auto pair = test::random_pair(rng);
        const std::string line = render_words_pieces(pair.src);
        CHECK(parse_words(line) == pair.src);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "absolute.hpp"
#include "errors.hpp"
#include "ingest.hpp"
#include "testutil.hpp"

using namespace opseq;

namespace {

std::vector<Token> toks(const std::string &line) { return parse_token_line(line); }

TupleSequence swap_tuples() {
    return {{Word("a"), {{Word("x"), 2}}}, {Word("b"), {{Word("y"), 1}}}};
}

}  // namespace

TEST_CASE("encode_absolute worked examples") {
    TupleSequence monotone = {{Word("a"), {{Word("x"), 1}}}, {Word("b"), {{Word("y"), 2}}}};
    CHECK(render_token_line(encode_absolute(monotone)) ==
          "a [BL] x [1] b [BL] y [2] [EOS]");

    CHECK(render_token_line(encode_absolute(swap_tuples())) ==
          "a [BL] x [2] b [BL] y [1] [EOS]");

    TupleSequence barren = {{Word("a"), {{std::nullopt, std::nullopt}}}};
    CHECK(render_token_line(encode_absolute(barren)) == "a [BL] [NO_TGT] [-1] [EOS]");

    TupleSequence no_src = {{std::nullopt, {{Word("x"), 1}}}};
    CHECK(render_token_line(encode_absolute(no_src)) == "[NO_SRC] [BL] x [1] [EOS]");
}

TEST_CASE("decode_absolute worked examples") {
    DecodeResult swapped = decode_absolute(toks("a [BL] x [2] b [BL] y [1] [EOS]"));
    CHECK(render_words_surface(swapped.src) == "a b");
    CHECK(render_words_surface(swapped.tgt) == "y x");
    CHECK_FALSE(swapped.truncated);
    CHECK(swapped.warnings.empty());

    DecodeResult skip = decode_absolute(toks("a [BL] [NO_TGT] [-1] [EOS]"));
    CHECK(render_words_surface(skip.src) == "a");
    CHECK(skip.tgt.empty());

    DecodeResult no_src = decode_absolute(toks("[NO_SRC] [BL] x [1] [EOS]"));
    CHECK(no_src.src.empty());
    CHECK(render_words_surface(no_src.tgt) == "x");
}

TEST_CASE("decode_absolute duplicate positions rewrite with warning") {
    DecodeResult r = decode_absolute(toks("a [BL] x [1] b [BL] y [1] [EOS]"));
    CHECK(render_words_surface(r.src) == "a b");
    CHECK(render_words_surface(r.tgt) == "y");  // last write wins
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("[1]") != std::string::npos);
}

TEST_CASE("decode_absolute truncated stream") {
    DecodeResult r = decode_absolute(toks("a [BL] x [1] b [BL] y"));
    CHECK(r.truncated);
    CHECK(render_words_surface(r.src) == "a");  // only the flushed group applied
    CHECK(render_words_surface(r.tgt) == "x");
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("incomplete tail") != std::string::npos);
}

TEST_CASE("decode_absolute structural errors") {
    CHECK_THROWS_AS(decode_absolute(toks("a x [1] [EOS]")), DecodeError);
    CHECK_THROWS_AS(decode_absolute(toks("a [BL] [1] [EOS]")), DecodeError);
    CHECK_THROWS_AS(decode_absolute(toks("a [BL] x [600] [EOS]")), DecodeError);
    CHECK_THROWS_AS(decode_absolute(toks("a [BL] x [1] [EOS] b")), DecodeError);
    CHECK_THROWS_AS(decode_absolute(toks("a [BL] x [-1] [EOS]")), DecodeError);
    CHECK_THROWS_AS(decode_absolute(toks("a [BL] [NO_TGT] [2] [EOS]")), DecodeError);
    CHECK_THROWS_AS(decode_absolute(toks("a [EOP] x [1] [EOS]")), DecodeError);
}

TEST_CASE("validate_absolute worked examples") {
    ParseReport ok = validate_absolute(toks("a [BL] x [1] [EOS]"));
    CHECK(ok.accepted);
    REQUIRE(ok.tuples.size() == 1);
    CHECK(ok.tuples[0] == std::pair<size_t, size_t>{0, 4});

    ParseReport missing_bl = validate_absolute(toks("a x [1] [EOS]"));
    CHECK_FALSE(missing_bl.accepted);
    CHECK(missing_bl.error_index == 1);

    ParseReport no_word = validate_absolute(toks("a [BL] [1] [EOS]"));
    CHECK_FALSE(no_word.accepted);
    CHECK(no_word.error_index == 2);

    CHECK_FALSE(validate_absolute(toks("a [BL] x [1]")).accepted);  // no [EOS]
    CHECK(validate_absolute(toks("[EOS]")).accepted);               // empty stream
    // "y" after entry-end legitimately starts the next tuple
    CHECK(validate_absolute(toks("a [BL] x [1] y [BL] z [2] [EOS]")).accepted);
    // but a second [BL] inside one group cannot
    ParseReport dup_bl = validate_absolute(toks("a [BL] x [BL] y [2] [EOS]"));
    CHECK_FALSE(dup_bl.accepted);
    CHECK(dup_bl.error_index == 3);
}

TEST_CASE("validate_absolute tuple boundaries") {
    ParseReport r = validate_absolute(toks("a [BL] x [2] y [1] b [BL] z [3] [EOS]"));
    REQUIRE(r.accepted);
    REQUIRE(r.tuples.size() == 2);
    CHECK(r.tuples[0] == std::pair<size_t, size_t>{0, 6});
    CHECK(r.tuples[1] == std::pair<size_t, size_t>{6, 10});
}

TEST_CASE("absolute round trip property") {
    std::mt19937 rng(42);
    for (int iter = 0; iter < 400; ++iter) {
        AlignedSentencePair pair = test::random_pair(rng);
        TupleSequence tuples = build_tuples(pair);
        std::vector<Token> stream = encode_absolute(tuples);

        // validator soundness: encoder output is always accepted
        ParseReport report = validate_absolute(stream);
        REQUIRE_MESSAGE(report.accepted, report.message);

        DecodeResult decoded = decode_absolute(stream);
        CHECK(decoded.src == test::expected_src(pair));
        CHECK(decoded.tgt == test::expected_tgt(pair));
        CHECK(decoded.warnings.empty());

        // permutation property: positions are exactly {1..Lt}
        std::map<int, int> seen;
        for (const auto &t : stream)
            if (auto n = position_value(t.surface);
                t.kind == TokenKind::Special && n.has_value())
                ++seen[*n];
        CHECK(seen.size() == pair.tgt.size());
        for (const auto &[pos, count] : seen) {
            CHECK(count == 1);
            CHECK(pos >= 1);
            CHECK(pos <= static_cast<int>(pair.tgt.size()));
        }

        // serialized text round-trips through parsing
        CHECK(parse_token_line(render_token_line(stream)) == stream);
    }
}

TEST_CASE("validator verdict predicts decoder behavior on random streams") {
    // Grammar-shaped streams with arbitrary (possibly duplicate or
    // out-of-range) positions: acceptance must imply a clean decode, and
    // out-of-range positions must be rejected and throw.
    std::mt19937 rng(777);
    std::uniform_int_distribution<int> tuples_dist(1, 5);
    std::uniform_int_distribution<int> entries_dist(1, 3);
    std::uniform_int_distribution<int> pos_dist(1, 12);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    int accepted = 0, rejected = 0;
    for (int iter = 0; iter < 3000; ++iter) {
        std::vector<Token> stream;
        const int n_tuples = tuples_dist(rng);
        int word_id = 0;
        for (int t = 0; t < n_tuples; ++t) {
            if (coin(rng) < 0.15)
                stream.push_back(Token::special(kNoSrc));
            else
                stream.push_back(Token::piece("s" + std::to_string(++word_id), true));
            stream.push_back(Token::special(kBlank));
            const int n_entries = entries_dist(rng);
            for (int e = 0; e < n_entries; ++e) {
                if (coin(rng) < 0.15) {
                    stream.push_back(Token::special(kNoTgt));
                    stream.push_back(Token::special(kSkipPos));
                } else {
                    stream.push_back(Token::piece("t" + std::to_string(++word_id), true));
                    // occasionally beyond the cap
                    if (coin(rng) < 0.05)
                        stream.push_back(Token::position(1000));
                    else
                        stream.push_back(Token::position(pos_dist(rng)));
                }
            }
        }
        stream.push_back(Token::special(kEos));

        ParseReport report = validate_absolute(stream);
        if (report.accepted) {
            ++accepted;
            CHECK_NOTHROW(decode_absolute(stream));
        } else {
            ++rejected;
            CHECK_THROWS_AS(decode_absolute(stream), Error);
        }
    }
    CHECK(accepted > 100);
    CHECK(rejected > 100);
}

TEST_CASE("accepted streams decode cleanly") {
    // beyond encoder outputs: a hand-built valid stream with fertility > 1
    auto stream = toks("[NO_SRC] [BL] x [2] a [BL] y [3] z [1] b [BL] [NO_TGT] [-1] [EOS]");
    ParseReport report = validate_absolute(stream);
    REQUIRE(report.accepted);
    DecodeResult r = decode_absolute(stream);
    CHECK(render_words_surface(r.src) == "a b");
    CHECK(render_words_surface(r.tgt) == "z x y");
}

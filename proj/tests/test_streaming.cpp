#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "absolute.hpp"
#include "errors.hpp"
#include "ingest.hpp"
#include "streaming.hpp"
#include "testutil.hpp"

using namespace opseq;

namespace {

std::vector<Token> toks(const std::string &line) { return parse_token_line(line); }

std::vector<FeedEvent> feed_all(StreamSession &session, const std::string &line) {
    std::vector<FeedEvent> events;
    for (const auto &t : toks(line)) events.push_back(session.feed(t));
    return events;
}

}  // namespace

TEST_CASE("relative session: tuple boundary snapshots") {
    StreamSession session(Variant::Relative);
    auto events = feed_all(session, "a [SM] x [EOP]");
    REQUIRE(events.size() == 4);
    CHECK(events[0] == FeedEvent::None);
    CHECK(events[1] == FeedEvent::None);
    CHECK(events[2] == FeedEvent::None);
    CHECK(events[3] == FeedEvent::TupleCompleted);

    auto partials = session.partial_hypotheses();
    REQUIRE(partials.size() == 1);
    CHECK(partials[0].second == "x");  // marker elided from the display form
}

TEST_CASE("swap session shows the reordered prefix early") {
    StreamSession session(Variant::Relative);
    feed_all(session, "a [SM] x [EOP] b [JB] y [EOP] [EOS]");
    REQUIRE(session.ended());

    auto partials = session.partial_hypotheses();
    REQUIRE(partials.size() == 2);  // snapshots fire at tuple boundaries only
    CHECK(partials[0].second == "x");
    CHECK(partials[1].second == "y x");

    DecodeResult offline = decode_relative(toks("a [SM] x [EOP] b [JB] y [EOP] [EOS]"));
    CHECK(session.final_src() == offline.src);
    CHECK(session.final_tgt() == offline.tgt);
}

TEST_CASE("feeding after the end or a bad jump poisons the session") {
    StreamSession session(Variant::Relative);
    FeedEvent ev = session.feed(Token::special(kJmpBwd));
    CHECK(ev == FeedEvent::Error);
    CHECK(session.poisoned());
    CHECK_FALSE(session.error_message().empty());
    CHECK(session.feed(Token::piece("a", true)) == FeedEvent::Error);

    StreamSession ended(Variant::Relative);
    feed_all(ended, "a [NO_OPS] x [EOP] [EOS]");
    CHECK(ended.ended());
    CHECK(ended.feed(Token::piece("b", true)) == FeedEvent::Error);
}

TEST_CASE("jump that the machine cannot satisfy raises an error event") {
    StreamSession session(Variant::Relative);
    auto events = feed_all(session, "a [JB] x [EOP]");
    CHECK(events.back() == FeedEvent::Error);
    CHECK(session.poisoned());
}

TEST_CASE("absolute session mirrors the offline decoder") {
    const std::string line = "a [BL] x [2] b [BL] y [1] [EOS]";
    StreamSession session(Variant::Absolute);
    auto events = feed_all(session, line);
    CHECK(events[3] == FeedEvent::TupleCompleted);
    CHECK(events.back() == FeedEvent::StreamEnded);

    auto partials = session.partial_hypotheses();
    REQUIRE(partials.size() == 2);
    CHECK(partials[0].second == "x");    // unwritten cells elided
    CHECK(partials[1].second == "y x");

    DecodeResult offline = decode_absolute(toks(line));
    CHECK(session.final_src() == offline.src);
    CHECK(session.final_tgt() == offline.tgt);
}

TEST_CASE("absolute session logs duplicate-position rewrites") {
    StreamSession session(Variant::Absolute);
    feed_all(session, "a [BL] x [1] b [BL] y [1] [EOS]");
    REQUIRE(session.warnings().size() == 1);
    CHECK(session.warnings()[0].find("[1]") != std::string::npos);
    CHECK(render_words_surface(session.final_tgt()) == "y");
}

TEST_CASE("replay") {
    StreamSession session = replay(toks("a [NO_OPS] x [EOP] b [NO_OPS] y [EOP] [EOS]"));
    CHECK(session.ended());
    CHECK(session.snapshots().size() == 2);

    // the worked monotone partials, exactly
    auto partials = session.partial_hypotheses();
    REQUIRE(partials.size() == 2);
    CHECK(partials[0].second == "x");
    CHECK(partials[1].second == "x y");

    StreamSession truncated = replay(toks("a [NO_OPS] x [EOP] b [NO_OPS]"));
    CHECK_FALSE(truncated.ended());
    CHECK(truncated.snapshots().size() == 1);  // only the complete tuple

    CHECK_THROWS_AS(replay(toks("a [JB] x [EOP] [EOS]")), DecodeError);
    CHECK_THROWS_AS(replay(toks("a [NO_OPS] x [EOP] [EOS]"),
                           std::vector<long>{1, 2, 3}),
                    IngestError);  // timestamp count mismatch

    StreamSession empty = replay({});
    CHECK(empty.snapshots().empty());
    CHECK(empty.partial_hypotheses().empty());
}

TEST_CASE("replay with timestamps drives the latency trace") {
    // tokens:      a   [NO_OPS] x  [EOP] b [NO_OPS] y [EOP] [EOS]
    std::vector<long> ts{10, 20, 30, 40, 50, 60, 70, 80, 90};
    StreamSession session =
        replay(toks("a [NO_OPS] x [EOP] b [NO_OPS] y [EOP] [EOS]"), ts);
    LatencyTrace trace = session.latency_trace();
    REQUIRE(trace.delays.size() == 2);
    CHECK(trace.delays[0] == doctest::Approx(40.0));  // x written at [EOP]
    CHECK(trace.delays[1] == doctest::Approx(80.0));
    CHECK(trace.src_len == doctest::Approx(90.0));
    CHECK(trace.tgt_len == doctest::Approx(2.0));
}

TEST_CASE("latency trace in source units without timestamps") {
    StreamSession session =
        replay(toks("a [NO_OPS] x [EOP] b [NO_OPS] y [EOP] [EOS]"));
    LatencyTrace trace = session.latency_trace();
    REQUIRE(trace.delays.size() == 2);
    CHECK(trace.delays[0] == doctest::Approx(1.0));
    CHECK(trace.delays[1] == doctest::Approx(2.0));
    CHECK(trace.src_len == doctest::Approx(2.0));
    CHECK(average_lagging(trace) == doctest::Approx(1.0));  // wait-1 policy
}

TEST_CASE("online equals offline for both variants") {
    std::mt19937 rng(31415);
    for (int iter = 0; iter < 300; ++iter) {
        AlignedSentencePair pair = test::random_pair(rng);
        TupleSequence tuples = build_tuples(pair);

        {
            std::vector<Token> stream = encode_relative(tuples);
            StreamSession session = replay(stream);
            DecodeResult offline = decode_relative(stream);
            REQUIRE(session.ended());
            CHECK(session.final_src() == offline.src);
            CHECK(session.final_tgt() == offline.tgt);
        }
        {
            std::vector<Token> stream = encode_absolute(tuples);
            StreamSession session = replay(stream, std::nullopt, Variant::Absolute);
            DecodeResult offline = decode_absolute(stream);
            REQUIRE(session.ended());
            CHECK(session.final_src() == offline.src);
            CHECK(session.final_tgt() == offline.tgt);
        }
    }
}

TEST_CASE("transcription snapshots only ever grow") {
    std::mt19937 rng(161803);
    for (int iter = 0; iter < 150; ++iter) {
        AlignedSentencePair pair = test::random_pair(rng);
        std::vector<Token> stream = encode_relative(build_tuples(pair));
        StreamSession session = replay(stream);
        const auto &snaps = session.snapshots();
        for (size_t i = 1; i < snaps.size(); ++i) {
            REQUIRE(snaps[i].src.size() >= snaps[i - 1].src.size());
            for (size_t k = 0; k < snaps[i - 1].src.size(); ++k)
                CHECK(snaps[i].src[k] == snaps[i - 1].src[k]);
        }
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <opseq/opseq.h>

#include <string>

namespace {

struct OwnedString {
    char *ptr = nullptr;
    ~OwnedString() { opseq_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

}  // namespace

TEST_CASE("options defaults") {
    opseq_options opts;
    opseq_options_init(&opts);
    CHECK(opts.max_positions == 512);
    CHECK(opts.marker_policy == OPSEQ_MARKER_LAZY);
    CHECK(opts.trace == 0);
    CHECK(opseq_abi_version() == 1);
}

TEST_CASE("encode, validate, decode round trip over the C surface") {
    OwnedString line;
    REQUIRE(opseq_encode_line(OPSEQ_VARIANT_RELATIVE, "a b", "y x", "0-1 1-0", nullptr,
                              &line.ptr) == OPSEQ_OK);
    CHECK(line.str() == "a [SM] x [EOP] b [JB] y [EOP] [EOS]");

    int accepted = 0;
    REQUIRE(opseq_validate_line(OPSEQ_VARIANT_RELATIVE, line.ptr, nullptr, &accepted,
                                nullptr, nullptr) == OPSEQ_OK);
    CHECK(accepted == 1);

    OwnedString src, tgt;
    REQUIRE(opseq_decode_line(OPSEQ_VARIANT_RELATIVE, line.ptr, nullptr, &src.ptr, &tgt.ptr,
                              nullptr) == OPSEQ_OK);
    CHECK(src.str() == "a b");
    CHECK(tgt.str() == "y x");
}

TEST_CASE("absolute variant over the C surface") {
    OwnedString line;
    REQUIRE(opseq_encode_line(OPSEQ_VARIANT_ABSOLUTE, "a b", "y x", "0-1 1-0", nullptr,
                              &line.ptr) == OPSEQ_OK);
    CHECK(line.str() == "a [BL] x [2] b [BL] y [1] [EOS]");

    OwnedString src, tgt;
    REQUIRE(opseq_decode_line(OPSEQ_VARIANT_ABSOLUTE, line.ptr, nullptr, &src.ptr, &tgt.ptr,
                              nullptr) == OPSEQ_OK);
    CHECK(src.str() == "a b");
    CHECK(tgt.str() == "y x");
}

TEST_CASE("validation failures carry index and message") {
    int accepted = 1;
    size_t index = 999;
    OwnedString message;
    REQUIRE(opseq_validate_line(OPSEQ_VARIANT_ABSOLUTE, "a x [1] [EOS]", nullptr, &accepted,
                                &index, &message.ptr) == OPSEQ_OK);
    CHECK(accepted == 0);
    CHECK(index == 1);
    CHECK_FALSE(message.str().empty());
}

TEST_CASE("error codes and last_error") {
    CHECK(opseq_encode_line(OPSEQ_VARIANT_RELATIVE, nullptr, "x", "", nullptr, nullptr) ==
          OPSEQ_ERR_INVALID_ARG);

    OwnedString src, tgt;
    CHECK(opseq_decode_line(OPSEQ_VARIANT_RELATIVE, "a [JB] x [EOP] [EOS]", nullptr,
                            &src.ptr, &tgt.ptr, nullptr) == OPSEQ_ERR_INTERPRETER);
    CHECK(std::string(opseq_last_error()).find("[JB]") != std::string::npos);

    CHECK(opseq_decode_line(OPSEQ_VARIANT_RELATIVE, "a x [EOP] [EOS]", nullptr, &src.ptr,
                            &tgt.ptr, nullptr) == OPSEQ_ERR_DECODE);

    OwnedString out;
    CHECK(opseq_encode_line(OPSEQ_VARIANT_RELATIVE, "a", "x", "0-7", nullptr, &out.ptr) ==
          OPSEQ_ERR_PARSE);

    CHECK(std::string(opseq_status_name(OPSEQ_ERR_PARSE)) == "parse-error");
}

TEST_CASE("decode diagnostics carry warnings and trace") {
    opseq_options opts;
    opseq_options_init(&opts);
    opts.trace = 1;
    OwnedString src, tgt, diag;
    REQUIRE(opseq_decode_line(OPSEQ_VARIANT_RELATIVE, "a [SM] x [EOP] b [JB] y [EOP] [EOS]",
                              &opts, &src.ptr, &tgt.ptr, &diag.ptr) == OPSEQ_OK);
    REQUIRE(diag.ptr != nullptr);
    CHECK(diag.str().find("op=SM") != std::string::npos);
    CHECK(diag.str().find("op=JB") != std::string::npos);
}

TEST_CASE("filter checks") {
    int keep = 0;
    OwnedString reason;
    REQUIRE(opseq_filter_check("a b", "x y", 5.0, 150, &keep, &reason.ptr) == OPSEQ_OK);
    CHECK(keep == 1);
    CHECK(reason.ptr == nullptr);

    REQUIRE(opseq_filter_check("a b", "1 2 3 4 5 6 7 8 9 10 11", 5.0, 150, &keep,
                               &reason.ptr) == OPSEQ_OK);
    CHECK(keep == 0);
    CHECK_FALSE(reason.str().empty());
}

TEST_CASE("stats over the C surface") {
    opseq_stream_stats stats;
    REQUIRE(opseq_stats_line(OPSEQ_VARIANT_RELATIVE, "a [SM] x [EOP] b [JB] y [EOP] [EOS]",
                             nullptr, &stats) == OPSEQ_OK);
    CHECK(stats.count_sm == 1);
    CHECK(stats.count_jb == 1);
    CHECK(stats.reorder_distance == 2);
}

TEST_CASE("session lifecycle") {
    opseq_session *session = nullptr;
    REQUIRE(opseq_session_new(OPSEQ_VARIANT_RELATIVE, nullptr, &session) == OPSEQ_OK);

    int event = -1;
    for (const char *tok : {"a", "[SM]", "x", "[EOP]"})
        REQUIRE(opseq_session_feed(session, tok, &event) == OPSEQ_OK);
    CHECK(event == OPSEQ_EVENT_TUPLE_COMPLETED);
    for (const char *tok : {"b", "[JB]", "y", "[EOP]", "[EOS]"})
        REQUIRE(opseq_session_feed(session, tok, &event) == OPSEQ_OK);
    CHECK(event == OPSEQ_EVENT_STREAM_ENDED);
    CHECK(opseq_session_ended(session) == 1);
    CHECK(opseq_session_snapshot_count(session) == 2);

    size_t token_index = 0;
    OwnedString partial;
    REQUIRE(opseq_session_partial(session, 0, &token_index, &partial.ptr) == OPSEQ_OK);
    CHECK(partial.str() == "x");
    OwnedString partial2;
    REQUIRE(opseq_session_partial(session, 1, nullptr, &partial2.ptr) == OPSEQ_OK);
    CHECK(partial2.str() == "y x");

    OwnedString src, tgt;
    REQUIRE(opseq_session_final(session, &src.ptr, &tgt.ptr) == OPSEQ_OK);
    CHECK(src.str() == "a b");
    CHECK(tgt.str() == "y x");

    CHECK(opseq_session_feed(session, "a", &event) == OPSEQ_ERR_STATE);
    opseq_session_free(session);
}

TEST_CASE("session error poisons the handle") {
    opseq_session *session = nullptr;
    REQUIRE(opseq_session_new(OPSEQ_VARIANT_RELATIVE, nullptr, &session) == OPSEQ_OK);
    int event = -1;
    CHECK(opseq_session_feed(session, "[JB]", &event) != OPSEQ_OK);
    CHECK(event == OPSEQ_EVENT_ERROR);
    CHECK(opseq_session_poisoned(session) == 1);
    CHECK(opseq_session_feed(session, "a", &event) == OPSEQ_ERR_STATE);
    opseq_session_free(session);
}

TEST_CASE("metrics over the C surface") {
    double value = -1;
    int convention = -1;
    REQUIRE(opseq_wer("a b", "a b", &value, &convention) == OPSEQ_OK);
    CHECK(value == doctest::Approx(0.0));
    CHECK(convention == 0);
    REQUIRE(opseq_wer("a", "a b", &value, nullptr) == OPSEQ_OK);
    CHECK(value == doctest::Approx(0.5));

    opseq_bleu *bleu = opseq_bleu_new();
    REQUIRE(bleu != nullptr);
    REQUIRE(opseq_bleu_add(bleu, "the cat sat on the mat", "the cat sat on the mat") ==
            OPSEQ_OK);
    double score = 0;
    REQUIRE(opseq_bleu_score(bleu, 0, &score) == OPSEQ_OK);
    CHECK(score == 100.0);
    opseq_bleu_free(bleu);

    const double delays[] = {1.0, 2.0};
    double al = 0;
    REQUIRE(opseq_average_lagging(delays, 2, 2.0, 2.0, &al) == OPSEQ_OK);
    CHECK(al == doctest::Approx(1.0));
    CHECK(opseq_average_lagging(delays, 0, 2.0, 2.0, &al) == OPSEQ_ERR_PARSE);
}

TEST_CASE("session latency over the C surface") {
    opseq_session *session = nullptr;
    REQUIRE(opseq_session_new(OPSEQ_VARIANT_RELATIVE, nullptr, &session) == OPSEQ_OK);
    int event = -1;
    long ts = 0;
    for (const char *tok : {"a", "[NO_OPS]", "x", "[EOP]", "b", "[NO_OPS]", "y", "[EOP]",
                            "[EOS]"}) {
        ts += 10;
        REQUIRE(opseq_session_feed_timed(session, tok, ts, &event) == OPSEQ_OK);
    }
    double al = 0;
    REQUIRE(opseq_session_average_lagging(session, &al) == OPSEQ_OK);
    // delays 40/80 ms over a 90 ms stream, 2 target words
    CHECK(al == doctest::Approx((40.0 - 0.0 + 80.0 - 45.0) / 2.0));
    opseq_session_free(session);
}

#include "opseq/opseq.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "absolute.hpp"
#include "errors.hpp"
#include "ingest.hpp"
#include "metrics.hpp"
#include "relative.hpp"
#include "streaming.hpp"
#include "token.hpp"

namespace {

thread_local std::string g_last_error = "ok";

char *dup_string(const std::string &s) {
    char *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

opseq_status set_error(opseq_status status, const std::string &message) {
    g_last_error = message;
    return status;
}

template <typename F>
opseq_status guarded(F &&f) {
    try {
        return f();
    } catch (const opseq::InterpreterError &e) {
        return set_error(OPSEQ_ERR_INTERPRETER, e.what());
    } catch (const opseq::DecodeError &e) {
        return set_error(OPSEQ_ERR_DECODE, e.what());
    } catch (const opseq::IngestError &e) {
        return set_error(OPSEQ_ERR_PARSE, e.what());
    } catch (const std::exception &e) {
        return set_error(OPSEQ_ERR_INTERNAL, e.what());
    }
}

opseq::Options to_options(const opseq_options *opts) {
    opseq::Options out;
    if (opts) {
        out.max_positions = opts->max_positions;
        out.marker_policy = opts->marker_policy == OPSEQ_MARKER_EAGER
                                ? opseq::MarkerPolicy::Eager
                                : opseq::MarkerPolicy::Lazy;
        out.trace = opts->trace != 0;
    }
    return out;
}

bool valid_variant(int v) {
    return v == OPSEQ_VARIANT_ABSOLUTE || v == OPSEQ_VARIANT_RELATIVE;
}

opseq::Variant to_variant(opseq_variant v) {
    return v == OPSEQ_VARIANT_ABSOLUTE ? opseq::Variant::Absolute : opseq::Variant::Relative;
}

}  // namespace

struct opseq_session {
    opseq::StreamSession impl;
};

struct opseq_bleu {
    opseq::BleuAccumulator impl;
};

namespace {

opseq_status feed_common(opseq_session *session, const char *token, const long *timestamp,
                         int *out_event) {
    if (!session || !token)
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_session_feed: bad argument");
    if (session->impl.poisoned())
        return set_error(OPSEQ_ERR_STATE, "session is poisoned");
    if (session->impl.ended())
        return set_error(OPSEQ_ERR_STATE, "session already saw [EOS]");
    return guarded([&] {
        opseq::Token tok = opseq::parse_token(token);
        opseq::FeedEvent ev = timestamp ? session->impl.feed(tok, *timestamp)
                                        : session->impl.feed(tok);
        if (out_event) *out_event = static_cast<int>(ev);
        if (ev == opseq::FeedEvent::Error)
            return set_error(OPSEQ_ERR_DECODE, session->impl.error_message());
        return OPSEQ_OK;
    });
}

}  // namespace

extern "C" {

void opseq_options_init(opseq_options *opts) {
    if (!opts) return;
    opts->max_positions = 512;
    opts->marker_policy = OPSEQ_MARKER_LAZY;
    opts->trace = 0;
}

unsigned opseq_abi_version(void) { return 1; }

const char *opseq_status_name(opseq_status status) {
    switch (status) {
        case OPSEQ_OK: return "ok";
        case OPSEQ_ERR_INVALID_ARG: return "invalid-argument";
        case OPSEQ_ERR_PARSE: return "parse-error";
        case OPSEQ_ERR_GRAMMAR: return "grammar-rejected";
        case OPSEQ_ERR_DECODE: return "decode-error";
        case OPSEQ_ERR_INTERPRETER: return "interpreter-error";
        case OPSEQ_ERR_STATE: return "bad-state";
        case OPSEQ_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

const char *opseq_last_error(void) { return g_last_error.c_str(); }

void opseq_string_free(char *s) { std::free(s); }

opseq_status opseq_encode_line(opseq_variant variant, const char *src_line,
                               const char *tgt_line, const char *align_line,
                               const opseq_options *opts, char **out_line) {
    if (!src_line || !tgt_line || !align_line || !out_line || !valid_variant(variant))
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_encode_line: bad argument");
    return guarded([&] {
        const opseq::Options options = to_options(opts);
        opseq::AlignedSentencePair pair =
            opseq::parse_record({src_line, tgt_line, align_line});
        opseq::TupleSequence tuples = opseq::build_tuples(pair);
        std::vector<opseq::Token> tokens = variant == OPSEQ_VARIANT_ABSOLUTE
                                               ? opseq::encode_absolute(tuples, options)
                                               : opseq::encode_relative(tuples, options);
        *out_line = dup_string(opseq::render_token_line(tokens));
        return OPSEQ_OK;
    });
}

opseq_status opseq_decode_line(opseq_variant variant, const char *line,
                               const opseq_options *opts, char **out_src, char **out_tgt,
                               char **out_diag) {
    if (!line || !out_src || !out_tgt || !valid_variant(variant))
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_decode_line: bad argument");
    if (out_diag) *out_diag = nullptr;
    return guarded([&] {
        const opseq::Options options = to_options(opts);
        std::vector<opseq::Token> tokens = opseq::parse_token_line(line);
        opseq::DecodeResult result = variant == OPSEQ_VARIANT_ABSOLUTE
                                         ? opseq::decode_absolute(tokens, options)
                                         : opseq::decode_relative(tokens, options);
        *out_src = dup_string(opseq::render_words_pieces(result.src));
        *out_tgt = dup_string(opseq::render_words_pieces(result.tgt));
        if (out_diag) {
            std::string diag;
            for (const auto &w : result.warnings) diag += "warning: " + w + "\n";
            for (const auto &t : result.trace) diag += t + "\n";
            if (result.truncated) diag += "warning: stream truncated (no [EOS])\n";
            if (!diag.empty()) *out_diag = dup_string(diag);
        }
        return OPSEQ_OK;
    });
}

opseq_status opseq_validate_line(opseq_variant variant, const char *line,
                                 const opseq_options *opts, int *out_accepted,
                                 size_t *out_error_index, char **out_message) {
    if (!line || !out_accepted || !valid_variant(variant))
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_validate_line: bad argument");
    if (out_message) *out_message = nullptr;
    return guarded([&] {
        const opseq::Options options = to_options(opts);
        std::vector<opseq::Token> tokens = opseq::parse_token_line(line);
        opseq::ParseReport report = variant == OPSEQ_VARIANT_ABSOLUTE
                                        ? opseq::validate_absolute(tokens, options)
                                        : opseq::validate_relative(tokens, options);
        *out_accepted = report.accepted ? 1 : 0;
        if (!report.accepted) {
            if (out_error_index) *out_error_index = report.error_index;
            if (out_message) *out_message = dup_string(report.message);
        }
        return OPSEQ_OK;
    });
}

opseq_status opseq_filter_check(const char *src_line, const char *tgt_line, double max_ratio,
                                int max_tgt_len, int *out_keep, char **out_reason) {
    if (!src_line || !tgt_line || !out_keep)
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_filter_check: bad argument");
    if (out_reason) *out_reason = nullptr;
    return guarded([&] {
        opseq::AlignedSentencePair pair;
        pair.src = opseq::parse_words(src_line);
        pair.tgt = opseq::parse_words(tgt_line);
        opseq::FilterDecision decision = opseq::filter_record(pair, max_ratio, max_tgt_len);
        *out_keep = decision.keep ? 1 : 0;
        if (!decision.keep && out_reason) *out_reason = dup_string(decision.reason);
        return OPSEQ_OK;
    });
}

opseq_status opseq_stats_line(opseq_variant variant, const char *line,
                              const opseq_options *opts, opseq_stream_stats *out_stats) {
    if (!line || !out_stats || !valid_variant(variant))
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_stats_line: bad argument");
    return guarded([&] {
        const opseq::Options options = to_options(opts);
        std::vector<opseq::Token> tokens = opseq::parse_token_line(line);
        opseq::StreamStats stats = opseq::opseq_stats(tokens, to_variant(variant), options);
        out_stats->count_sm = stats.count_sm;
        out_stats->count_jb = stats.count_jb;
        out_stats->count_jf = stats.count_jf;
        out_stats->count_no_ops = stats.count_no_ops;
        out_stats->reorder_distance = stats.reorder_distance;
        return OPSEQ_OK;
    });
}

opseq_status opseq_session_new(opseq_variant variant, const opseq_options *opts,
                               opseq_session **out_session) {
    if (!out_session || !valid_variant(variant))
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_session_new: bad argument");
    return guarded([&] {
        *out_session = new opseq_session{
            opseq::StreamSession(to_variant(variant), to_options(opts))};
        return OPSEQ_OK;
    });
}

void opseq_session_free(opseq_session *session) { delete session; }

opseq_status opseq_session_feed(opseq_session *session, const char *token, int *out_event) {
    return feed_common(session, token, nullptr, out_event);
}

opseq_status opseq_session_feed_timed(opseq_session *session, const char *token,
                                      long timestamp_ms, int *out_event) {
    return feed_common(session, token, &timestamp_ms, out_event);
}

int opseq_session_ended(const opseq_session *session) {
    return session && session->impl.ended() ? 1 : 0;
}

int opseq_session_poisoned(const opseq_session *session) {
    return session && session->impl.poisoned() ? 1 : 0;
}

size_t opseq_session_snapshot_count(const opseq_session *session) {
    return session ? session->impl.snapshots().size() : 0;
}

opseq_status opseq_session_snapshot(const opseq_session *session, size_t index,
                                    size_t *out_token_index, char **out_src, char **out_tgt) {
    if (!session || !out_src || !out_tgt)
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_session_snapshot: bad argument");
    if (index >= session->impl.snapshots().size())
        return set_error(OPSEQ_ERR_INVALID_ARG, "snapshot index out of range");
    const opseq::Snapshot &snap = session->impl.snapshots()[index];
    if (out_token_index) *out_token_index = snap.token_index;
    *out_src = dup_string(opseq::render_words_pieces(snap.src));
    *out_tgt = dup_string(opseq::render_words_pieces(snap.tgt));
    return OPSEQ_OK;
}

opseq_status opseq_session_partial(const opseq_session *session, size_t index,
                                   size_t *out_token_index, char **out_text) {
    if (!session || !out_text)
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_session_partial: bad argument");
    if (index >= session->impl.snapshots().size())
        return set_error(OPSEQ_ERR_INVALID_ARG, "snapshot index out of range");
    const opseq::Snapshot &snap = session->impl.snapshots()[index];
    if (out_token_index) *out_token_index = snap.token_index;
    *out_text = dup_string(opseq::render_words_surface(snap.tgt));
    return OPSEQ_OK;
}

opseq_status opseq_session_final(const opseq_session *session, char **out_src,
                                 char **out_tgt) {
    if (!session || !out_src || !out_tgt)
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_session_final: bad argument");
    if (!session->impl.ended())
        return set_error(OPSEQ_ERR_STATE, "stream has not ended");
    *out_src = dup_string(opseq::render_words_pieces(session->impl.final_src()));
    *out_tgt = dup_string(opseq::render_words_pieces(session->impl.final_tgt()));
    return OPSEQ_OK;
}

opseq_status opseq_session_average_lagging(const opseq_session *session, double *out_al) {
    if (!session || !out_al)
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_session_average_lagging: bad argument");
    return guarded([&] {
        *out_al = opseq::average_lagging(session->impl.latency_trace());
        return OPSEQ_OK;
    });
}

opseq_status opseq_wer(const char *hyp_line, const char *ref_line, double *out_wer,
                       int *out_convention) {
    if (!hyp_line || !ref_line || !out_wer)
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_wer: bad argument");
    return guarded([&] {
        opseq::EvalPair pair;
        pair.hypothesis = opseq::eval_tokens(hyp_line);
        pair.reference = opseq::eval_tokens(ref_line);
        bool convention = false;
        *out_wer = opseq::wer(pair, &convention);
        if (out_convention) *out_convention = convention ? 1 : 0;
        return OPSEQ_OK;
    });
}

opseq_bleu *opseq_bleu_new(void) { return new (std::nothrow) opseq_bleu{}; }

void opseq_bleu_free(opseq_bleu *bleu) { delete bleu; }

opseq_status opseq_bleu_add(opseq_bleu *bleu, const char *hyp_line, const char *ref_line) {
    if (!bleu || !hyp_line || !ref_line)
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_bleu_add: bad argument");
    return guarded([&] {
        opseq::EvalPair pair;
        pair.hypothesis = opseq::eval_tokens(hyp_line);
        pair.reference = opseq::eval_tokens(ref_line);
        bleu->impl.add(pair);
        return OPSEQ_OK;
    });
}

opseq_status opseq_bleu_score(const opseq_bleu *bleu, int smooth, double *out_score) {
    if (!bleu || !out_score)
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_bleu_score: bad argument");
    *out_score = bleu->impl.score(smooth != 0);
    return OPSEQ_OK;
}

opseq_status opseq_average_lagging(const double *delays, size_t delay_count, double src_len,
                                   double tgt_len, double *out_al) {
    if (!delays || !out_al)
        return set_error(OPSEQ_ERR_INVALID_ARG, "opseq_average_lagging: bad argument");
    return guarded([&] {
        opseq::LatencyTrace trace;
        trace.delays.assign(delays, delays + delay_count);
        trace.src_len = src_len;
        trace.tgt_len = tgt_len;
        *out_al = opseq::average_lagging(trace);
        return OPSEQ_OK;
    });
}

}  // extern "C"

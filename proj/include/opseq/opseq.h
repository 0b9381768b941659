/*
 * opseq -- operation-sequence transduction for word-aligned sentence pairs.
 *
 * C interface to the opseq shared library. All functions return an
 * opseq_status; OPSEQ_OK means success and anything else leaves a
 * human-readable explanation in opseq_last_error() (thread-local). Strings
 * returned through char** out-parameters are heap-allocated and must be
 * released with opseq_string_free(). Handles are opaque and single-owner.
 *
 * Lines are UTF-8, tokens space-separated. Special tokens keep their
 * bracketed spelling ([BL], [EOS], [EOP], [NO_SRC], [NO_TGT], [NO_OPS],
 * [SM], [JF], [JB], [-1], and positions [n] with n >= 1). A word piece
 * prefixed with "##" continues the word before it; bracketed surfaces are
 * reserved and rejected in sentence text.
 */

#ifndef OPSEQ_OPSEQ_H
#define OPSEQ_OPSEQ_H

#include <stddef.h>

#if defined(_WIN32)
#  define OPSEQ_API __declspec(dllexport)
#else
#  define OPSEQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum opseq_status {
    OPSEQ_OK = 0,
    OPSEQ_ERR_INVALID_ARG = 1, /* null pointer / bad enum value */
    OPSEQ_ERR_PARSE = 2,       /* malformed input line or alignment */
    OPSEQ_ERR_GRAMMAR = 3,     /* stream rejected by the validator */
    OPSEQ_ERR_DECODE = 4,      /* structural damage found while decoding */
    OPSEQ_ERR_INTERPRETER = 5, /* unsatisfiable jump in the buffer machine */
    OPSEQ_ERR_STATE = 6,       /* handle in the wrong state (ended/poisoned) */
    OPSEQ_ERR_INTERNAL = 7
} opseq_status;

typedef enum opseq_variant {
    OPSEQ_VARIANT_ABSOLUTE = 0,
    OPSEQ_VARIANT_RELATIVE = 1
} opseq_variant;

typedef enum opseq_marker_policy {
    OPSEQ_MARKER_LAZY = 0, /* mark only gaps that get abandoned */
    OPSEQ_MARKER_EAGER = 1 /* mark every gap before inserting into it */
} opseq_marker_policy;

typedef struct opseq_options {
    int max_positions;  /* cap for [n] tokens and buffer growth (default 512) */
    int marker_policy;  /* opseq_marker_policy (default lazy) */
    int trace;          /* collect a per-op interpreter trace during decode */
} opseq_options;

/* Fills in the defaults. */
OPSEQ_API void opseq_options_init(opseq_options *opts);

OPSEQ_API unsigned opseq_abi_version(void);
OPSEQ_API const char *opseq_status_name(opseq_status status);
/* Message for the most recent failure on this thread; never NULL. */
OPSEQ_API const char *opseq_last_error(void);
OPSEQ_API void opseq_string_free(char *s);

/* ------------------------------------------------------------------ codec */

/* Compiles one corpus record (source text, target text, Pharaoh alignment)
 * into a serialized operation sequence line. */
OPSEQ_API opseq_status opseq_encode_line(opseq_variant variant, const char *src_line,
                                         const char *tgt_line, const char *align_line,
                                         const opseq_options *opts, char **out_line);

/* Restores transcription and translation from one stream line. Outputs are
 * piece-level text (word-continuation "##" markers preserved), so that
 * encode -> decode reproduces the input lines exactly. out_diag (optional)
 * receives warnings plus the op trace when opts->trace is set; it is left
 * NULL when there is nothing to report. */
OPSEQ_API opseq_status opseq_decode_line(opseq_variant variant, const char *line,
                                         const opseq_options *opts, char **out_src,
                                         char **out_tgt, char **out_diag);

/* Grammar check. Returns OPSEQ_OK with *out_accepted = 0 for a well-formed
 * call whose stream is rejected; out_error_index/out_message then describe
 * the first offending token. */
OPSEQ_API opseq_status opseq_validate_line(opseq_variant variant, const char *line,
                                           const opseq_options *opts, int *out_accepted,
                                           size_t *out_error_index, char **out_message);

/* Corpus filter: keep unless the word-length ratio exceeds max_ratio, the
 * target piece count exceeds max_tgt_len, or a side is empty. */
OPSEQ_API opseq_status opseq_filter_check(const char *src_line, const char *tgt_line,
                                          double max_ratio, int max_tgt_len, int *out_keep,
                                          char **out_reason);

typedef struct opseq_stream_stats {
    unsigned long long count_sm;
    unsigned long long count_jb;
    unsigned long long count_jf;
    unsigned long long count_no_ops;
    long long reorder_distance; /* sum |finalPos - emissionRank| over tgt words */
} opseq_stream_stats;

OPSEQ_API opseq_status opseq_stats_line(opseq_variant variant, const char *line,
                                        const opseq_options *opts,
                                        opseq_stream_stats *out_stats);

/* -------------------------------------------------------------- streaming */

typedef struct opseq_session opseq_session;

typedef enum opseq_event {
    OPSEQ_EVENT_NONE = 0,
    OPSEQ_EVENT_TUPLE_COMPLETED = 1,
    OPSEQ_EVENT_STREAM_ENDED = 2,
    OPSEQ_EVENT_ERROR = 3
} opseq_event;

OPSEQ_API opseq_status opseq_session_new(opseq_variant variant, const opseq_options *opts,
                                         opseq_session **out_session);
OPSEQ_API void opseq_session_free(opseq_session *session);

/* Feeds one token. A feed error poisons the session (status
 * OPSEQ_ERR_DECODE/INTERPRETER, *out_event = OPSEQ_EVENT_ERROR); feeding a
 * poisoned or ended session yields OPSEQ_ERR_STATE. */
OPSEQ_API opseq_status opseq_session_feed(opseq_session *session, const char *token,
                                          int *out_event);
/* Same, recording a per-token timestamp for latency metrics. */
OPSEQ_API opseq_status opseq_session_feed_timed(opseq_session *session, const char *token,
                                                long timestamp_ms, int *out_event);

OPSEQ_API int opseq_session_ended(const opseq_session *session);
OPSEQ_API int opseq_session_poisoned(const opseq_session *session);
OPSEQ_API size_t opseq_session_snapshot_count(const opseq_session *session);

/* Snapshot taken at each tuple boundary: piece-level S and T (markers and
 * unwritten cells elided from T). */
OPSEQ_API opseq_status opseq_session_snapshot(const opseq_session *session, size_t index,
                                              size_t *out_token_index, char **out_src,
                                              char **out_tgt);

/* Display-form partial translation (surface words) at a snapshot. */
OPSEQ_API opseq_status opseq_session_partial(const opseq_session *session, size_t index,
                                             size_t *out_token_index, char **out_text);

/* Final restored sentences (piece-level); OPSEQ_ERR_STATE before [EOS]. */
OPSEQ_API opseq_status opseq_session_final(const opseq_session *session, char **out_src,
                                           char **out_tgt);

/* Average Lagging over the session's per-word emission delays: timestamps
 * when the stream was fed with opseq_session_feed_timed, source words
 * consumed otherwise. */
OPSEQ_API opseq_status opseq_session_average_lagging(const opseq_session *session,
                                                     double *out_al);

/* ---------------------------------------------------------------- metrics */

/* Word error rate between whitespace-tokenized lines (case-sensitive).
 * out_convention (optional) is set to 1 when the empty-reference convention
 * (rate = hypothesis length) was applied. */
OPSEQ_API opseq_status opseq_wer(const char *hyp_line, const char *ref_line, double *out_wer,
                                 int *out_convention);

typedef struct opseq_bleu opseq_bleu;

OPSEQ_API opseq_bleu *opseq_bleu_new(void);
OPSEQ_API void opseq_bleu_free(opseq_bleu *bleu);
OPSEQ_API opseq_status opseq_bleu_add(opseq_bleu *bleu, const char *hyp_line,
                                      const char *ref_line);
/* Corpus-level case-insensitive BLEU-4 in [0, 100]. */
OPSEQ_API opseq_status opseq_bleu_score(const opseq_bleu *bleu, int smooth, double *out_score);

/* AL over emission delays in source units; delays must be non-decreasing
 * and bounded by src_len. */
OPSEQ_API opseq_status opseq_average_lagging(const double *delays, size_t delay_count,
                                             double src_len, double tgt_len, double *out_al);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OPSEQ_OPSEQ_H */

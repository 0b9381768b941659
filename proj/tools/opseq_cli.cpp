// opseq command line: corpus encoding/decoding, grammar validation,
// round-trip checking, streaming replay, and evaluation reports, all built
// on the opseq C API.

#include <CLI11.hpp>
#include <json.hpp>
#include <opseq/opseq.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "line_pipeline.hpp"

using nlohmann::json;

namespace {

struct Owned {
    char *ptr = nullptr;
    ~Owned() { opseq_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

std::string rtrim(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ' ||
                          s.back() == '\t'))
        s.pop_back();
    return s;
}

std::vector<std::string> split_ws(const std::string &s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

struct CommonOpts {
    std::string variant = "rel";
    int max_positions = 512;
    std::string marker_policy = "lazy";
    bool trace = false;
    unsigned jobs = std::thread::hardware_concurrency();
    bool strict = false;
};

opseq_variant variant_of(const CommonOpts &c) {
    return c.variant == "abs" ? OPSEQ_VARIANT_ABSOLUTE : OPSEQ_VARIANT_RELATIVE;
}

opseq_options options_of(const CommonOpts &c) {
    opseq_options opts;
    opseq_options_init(&opts);
    opts.max_positions = c.max_positions;
    opts.marker_policy = c.marker_policy == "eager" ? OPSEQ_MARKER_EAGER : OPSEQ_MARKER_LAZY;
    opts.trace = c.trace ? 1 : 0;
    return opts;
}

void add_common(CLI::App *cmd, CommonOpts &c, bool with_variant = true) {
    if (with_variant)
        cmd->add_option("--variant", c.variant, "stream variant")
            ->check(CLI::IsMember({"abs", "rel"}))
            ->required();
    cmd->add_option("--max-positions", c.max_positions,
                    "cap for [n] tokens and buffer growth");
    cmd->add_option("--jobs", c.jobs, "worker threads (default: cores)");
    cmd->add_flag("--strict", c.strict, "stop at the first per-line error");
    cmd->add_flag("--trace", c.trace, "dump per-op interpreter traces to stderr");
}

std::ifstream open_in(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("cannot read " + path);
    return f;
}

std::ofstream open_out(const std::string &path) {
    std::ofstream f(path);
    if (!f) throw CLI::ValidationError("cannot write " + path);
    return f;
}

struct StrictStop {
    int line;
    std::string message;
};

// ------------------------------------------------------------------ encode

int cmd_encode(const CommonOpts &common, const std::string &src_path,
               const std::string &tgt_path, const std::string &align_path,
               const std::string &tsv_path, const std::string &out_path,
               const std::string &drop_log_path, double max_ratio, int max_tgt_len) {
    const opseq_options opts = options_of(common);
    const opseq_variant variant = variant_of(common);

    std::ostream *out = &std::cout;
    std::ofstream out_file;
    if (!out_path.empty()) {
        out_file = open_out(out_path);
        out = &out_file;
    }
    std::ofstream drop_log;
    if (!drop_log_path.empty()) drop_log = open_out(drop_log_path);
    auto log_drop = [&](size_t line_no, const std::string &kind, const std::string &why) {
        if (drop_log.is_open())
            drop_log << line_no + 1 << "\t" << kind << "\t" << why << "\n";
        else
            std::cerr << "line " << line_no + 1 << " " << kind << ": " << why << "\n";
    };

    // Record source: either the TSV file directly, or the three parallel
    // files zipped into src<TAB>tgt<TAB>align records.
    std::optional<std::ifstream> tsv;
    std::optional<std::ifstream> fs, ft, fa;
    if (!tsv_path.empty()) {
        tsv = open_in(tsv_path);
    } else {
        fs = open_in(src_path);
        ft = open_in(tgt_path);
        fa = open_in(align_path);
    }
    bool misaligned = false;
    auto next_record = [&](std::string &record) {
        if (tsv.has_value()) return static_cast<bool>(std::getline(*tsv, record));
        std::string ls, lt, la;
        if (!std::getline(*fs, ls)) return false;
        if (!std::getline(*ft, lt) || !std::getline(*fa, la)) {
            misaligned = true;
            return false;
        }
        record = rtrim(ls) + "\t" + rtrim(lt) + "\t" + rtrim(la);
        return true;
    };

    struct Row {
        enum { Keep, Drop, Error } kind = Error;
        std::string text;  // encoded line or drop/error reason
    };
    size_t dropped = 0, errors = 0, kept = 0;
    bool stop = false;

    cli::for_each_record_ordered<Row>(
        next_record, common.jobs,
        [&](size_t, const std::string &raw) {
            Row row;
            const std::string record = rtrim(raw);
            const size_t t1 = record.find('\t');
            const size_t t2 =
                t1 == std::string::npos ? std::string::npos : record.find('\t', t1 + 1);
            if (t2 == std::string::npos) {
                row.text = "expected src<TAB>tgt<TAB>align";
                return row;
            }
            const std::string src = record.substr(0, t1);
            const std::string tgt = record.substr(t1 + 1, t2 - t1 - 1);
            const std::string align = record.substr(t2 + 1);

            int keep = 1;
            Owned reason;
            opseq_status st = opseq_filter_check(src.c_str(), tgt.c_str(), max_ratio,
                                                 max_tgt_len, &keep, &reason.ptr);
            if (st == OPSEQ_OK && keep == 0) {
                row.kind = Row::Drop;
                row.text = reason.str();
                return row;
            }
            Owned line;
            if (st == OPSEQ_OK)
                st = opseq_encode_line(variant, src.c_str(), tgt.c_str(), align.c_str(),
                                       &opts, &line.ptr);
            if (st != OPSEQ_OK) {
                row.text = opseq_last_error();
                return row;
            }
            row.kind = Row::Keep;
            row.text = line.str();
            return row;
        },
        [&](size_t index, Row &row) {
            if (stop) return;
            switch (row.kind) {
                case Row::Keep:
                    ++kept;
                    (*out) << row.text << "\n";
                    break;
                case Row::Drop:
                    ++dropped;
                    log_drop(index, "dropped", row.text);
                    break;
                case Row::Error:
                    ++errors;
                    log_drop(index, "error", row.text);
                    if (common.strict) stop = true;
                    break;
            }
        });

    if (misaligned) {
        std::cerr << "input files are not line-aligned\n";
        return 2;
    }
    std::cerr << "encoded " << kept << " line(s), dropped " << dropped << ", errors "
              << errors << "\n";
    if (common.strict && stop) return 1;
    return 0;
}

// ------------------------------------------------------------------ decode

int cmd_decode(const CommonOpts &common, const std::string &in_path,
               const std::string &out_src_path, const std::string &out_tgt_path) {
    const opseq_options opts = options_of(common);
    const opseq_variant variant = variant_of(common);

    std::ifstream in = open_in(in_path);
    std::ofstream out_src = open_out(out_src_path);
    std::ofstream out_tgt = open_out(out_tgt_path);

    struct Row {
        std::string src, tgt, err, diag;
        bool ok = false;
    };
    size_t errors = 0;
    bool stopped = false;

    cli::for_each_line_ordered<Row>(
        in, common.jobs,
        [&](size_t, const std::string &raw) {
            Row row;
            Owned src, tgt, diag;
            opseq_status st = opseq_decode_line(variant, rtrim(raw).c_str(), &opts, &src.ptr,
                                                &tgt.ptr, &diag.ptr);
            if (st == OPSEQ_OK) {
                row.ok = true;
                row.src = src.str();
                row.tgt = tgt.str();
                row.diag = diag.str();
            } else {
                row.err = opseq_last_error();
            }
            return row;
        },
        [&](size_t index, Row &row) {
            if (stopped) return;
            if (row.ok) {
                out_src << row.src << "\n";
                out_tgt << row.tgt << "\n";
                if (!row.diag.empty()) std::cerr << "line " << index + 1 << ":\n" << row.diag;
            } else {
                ++errors;
                out_src << "\n";  // placeholder keeps line alignment
                out_tgt << "\n";
                std::cerr << "line " << index + 1 << " error: " << row.err << "\n";
                if (common.strict) stopped = true;
            }
        });

    std::cerr << "decode finished, " << errors << " error line(s)\n";
    return (common.strict && stopped) ? 1 : 0;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const CommonOpts &common, const std::string &in_path) {
    const opseq_options opts = options_of(common);
    const opseq_variant variant = variant_of(common);
    std::ifstream in = open_in(in_path);

    struct Row {
        bool accepted = false;
        size_t error_index = 0;
        std::string message;
    };
    size_t accepted = 0, rejected = 0;

    cli::for_each_line_ordered<Row>(
        in, common.jobs,
        [&](size_t, const std::string &raw) {
            Row row;
            int ok = 0;
            size_t index = 0;
            Owned message;
            if (opseq_validate_line(variant, rtrim(raw).c_str(), &opts, &ok, &index,
                                    &message.ptr) == OPSEQ_OK &&
                ok == 1) {
                row.accepted = true;
            } else {
                row.error_index = index;
                row.message = message.ptr ? message.str() : opseq_last_error();
            }
            return row;
        },
        [&](size_t index, Row &row) {
            if (row.accepted) {
                ++accepted;
            } else {
                ++rejected;
                std::cout << "line " << index + 1 << ": token " << row.error_index << ": "
                          << row.message << "\n";
            }
        });

    std::cout << "accepted " << accepted << ", rejected " << rejected << "\n";
    return rejected == 0 ? 0 : 1;
}

// --------------------------------------------------------------- roundtrip

struct GenRecord {
    std::string src, tgt, align;
};

// Seeded random corpus record mirroring the library's documented limits:
// short sentences, small fertilities, occasional unaligned words and
// multi-piece words.
GenRecord generate_record(std::mt19937 &rng) {
    std::uniform_int_distribution<int> len_dist(1, 20);
    std::uniform_int_distribution<int> fert_dist(1, 3);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    const int src_len = len_dist(rng);
    std::vector<std::string> src_words;
    struct Slot {
        int src;  // 0 = unaligned
        int id;
    };
    std::vector<Slot> slots;
    int id = 0;
    for (int i = 1; i <= src_len; ++i) {
        std::string w = "s" + std::to_string(i);
        if (coin(rng) < 0.2) w += " ##" + std::to_string(i % 7);
        src_words.push_back(w);
        if (coin(rng) < 0.1) {
            if (coin(rng) < 0.1) slots.push_back({0, id++});
            continue;
        }
        const int fertility = fert_dist(rng);
        for (int k = 0; k < fertility; ++k) slots.push_back({i, id++});
        if (coin(rng) < 0.1) slots.push_back({0, id++});
    }

    std::vector<int> order(slots.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::string> tgt_words(slots.size());
    std::vector<std::string> aligns;
    for (size_t s = 0; s < slots.size(); ++s) {
        const int pos = order[s];  // 0-based target position of slot s
        std::string w = "t" + std::to_string(slots[s].id + 1);
        if (coin(rng) < 0.2) w += " ##q";
        tgt_words[static_cast<size_t>(pos)] = w;
        if (slots[s].src > 0)
            aligns.push_back(std::to_string(slots[s].src - 1) + "-" + std::to_string(pos));
    }

    GenRecord rec;
    for (size_t i = 0; i < src_words.size(); ++i)
        rec.src += (i ? " " : "") + src_words[i];
    for (size_t j = 0; j < tgt_words.size(); ++j)
        rec.tgt += (j ? " " : "") + tgt_words[j];
    for (size_t a = 0; a < aligns.size(); ++a) rec.align += (a ? " " : "") + aligns[a];
    return rec;
}

int cmd_roundtrip(const CommonOpts &common, unsigned seed, int count, bool both_variants,
                  bool sabotage) {
    const opseq_options opts = options_of(common);
    std::mt19937 rng(seed);
    long failures = 0, checked = 0;

    std::vector<opseq_variant> variants;
    if (both_variants) {
        variants = {OPSEQ_VARIANT_ABSOLUTE, OPSEQ_VARIANT_RELATIVE};
    } else {
        variants = {variant_of(common)};
    }

    for (int i = 0; i < count; ++i) {
        GenRecord rec = generate_record(rng);
        for (opseq_variant variant : variants) {
            ++checked;
            Owned line, src, tgt;
            opseq_status st = opseq_encode_line(variant, rec.src.c_str(), rec.tgt.c_str(),
                                                rec.align.c_str(), &opts, &line.ptr);
            if (st == OPSEQ_OK)
                st = opseq_decode_line(variant, line.ptr, &opts, &src.ptr, &tgt.ptr, nullptr);
            std::string got_tgt = st == OPSEQ_OK ? tgt.str() : "";
            if (sabotage && !got_tgt.empty()) {
                auto words = split_ws(got_tgt);
                if (words.size() >= 2) std::swap(words[0], words[1]);
                got_tgt.clear();
                for (size_t w = 0; w < words.size(); ++w)
                    got_tgt += (w ? " " : "") + words[w];
            }
            if (st != OPSEQ_OK || src.str() != rec.src || got_tgt != rec.tgt) {
                ++failures;
                std::cerr << "FAIL instance " << i << " variant "
                          << (variant == OPSEQ_VARIANT_ABSOLUTE ? "abs" : "rel") << "\n"
                          << "  src:   " << rec.src << "\n"
                          << "  tgt:   " << rec.tgt << "\n"
                          << "  align: " << rec.align << "\n";
                if (st != OPSEQ_OK)
                    std::cerr << "  error: " << opseq_last_error() << "\n";
                else
                    std::cerr << "  stream: " << line.str() << "\n  got src: " << src.str()
                              << "\n  got tgt: " << got_tgt << "\n";
            }
        }
    }

    std::cout << "roundtrip: " << (checked - failures) << "/" << checked << " passed, "
              << failures << " failed (seed " << seed << ")\n";
    return failures == 0 ? 0 : 1;
}

// ------------------------------------------------------------------ replay

int cmd_replay(const CommonOpts &common, const std::string &in_path,
               const std::string &ts_path, const std::string &out_path) {
    const opseq_options opts = options_of(common);
    const opseq_variant variant = variant_of(common);

    std::ifstream in = open_in(in_path);
    std::optional<std::ifstream> ts_file;
    if (!ts_path.empty()) ts_file = open_in(ts_path);

    std::ostream *out = &std::cout;
    std::ofstream out_file;
    if (!out_path.empty()) {
        out_file = open_out(out_path);
        out = &out_file;
    }

    std::string line, ts_line;
    size_t line_no = 0;
    int errors = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> tokens = split_ws(rtrim(line));
        std::vector<long> stamps;
        if (ts_file.has_value()) {
            if (!std::getline(*ts_file, ts_line)) {
                std::cerr << "timestamp file shorter than token file\n";
                return 2;
            }
            for (const auto &t : split_ws(rtrim(ts_line))) stamps.push_back(std::stol(t));
            if (stamps.size() != tokens.size()) {
                std::cerr << "line " << line_no + 1 << ": timestamp count "
                          << stamps.size() << " != token count " << tokens.size() << "\n";
                return 2;
            }
        }

        opseq_session *session = nullptr;
        if (opseq_session_new(variant, &opts, &session) != OPSEQ_OK) {
            std::cerr << "session: " << opseq_last_error() << "\n";
            return 2;
        }
        bool failed = false;
        for (size_t i = 0; i < tokens.size() && !failed; ++i) {
            int event = 0;
            opseq_status st = ts_file.has_value()
                                  ? opseq_session_feed_timed(session, tokens[i].c_str(),
                                                             stamps[i], &event)
                                  : opseq_session_feed(session, tokens[i].c_str(), &event);
            if (st != OPSEQ_OK) {
                std::cerr << "line " << line_no + 1 << " token " << i << ": "
                          << opseq_last_error() << "\n";
                failed = true;
                ++errors;
            }
        }
        if (!failed) {
            const size_t snaps = opseq_session_snapshot_count(session);
            for (size_t s = 0; s < snaps; ++s) {
                size_t token_index = 0;
                Owned snap_src, snap_tgt;
                if (opseq_session_snapshot(session, s, &token_index, &snap_src.ptr,
                                           &snap_tgt.ptr) == OPSEQ_OK) {
                    json record = {{"line", line_no + 1},
                                   {"index", token_index},
                                   {"S", snap_src.str()},
                                   {"T", snap_tgt.str()}};
                    (*out) << record.dump() << "\n";
                }
            }
            if (ts_file.has_value() && opseq_session_ended(session)) {
                double al = 0;
                if (opseq_session_average_lagging(session, &al) == OPSEQ_OK)
                    std::cerr << "line " << line_no + 1 << " AL: " << al << "\n";
            }
        }
        opseq_session_free(session);
        if (failed && common.strict) return 1;
        ++line_no;
    }
    return errors == 0 ? 0 : 1;
}

// ------------------------------------------------------------ eval-partial

int cmd_eval_partial(const CommonOpts &common, const std::string &in_path,
                     const std::string &refs_path, int bins, const std::string &out_path,
                     const std::string &diff_against) {
    const opseq_options opts = options_of(common);
    const opseq_variant variant = variant_of(common);

    std::ifstream in = open_in(in_path);
    std::ifstream refs = open_in(refs_path);

    std::vector<std::string> references;
    std::string line;
    while (std::getline(refs, line)) references.push_back(rtrim(line));
    if (references.empty()) {
        std::cerr << "reference file is empty\n";
        return 2;
    }

    // partials[b][i]: display-form partial translation of sentence i at the
    // progress fraction (b+1)/bins.
    std::vector<std::vector<std::string>> partials(static_cast<size_t>(bins));
    size_t line_no = 0;
    while (std::getline(in, line)) {
        if (line_no >= references.size()) {
            std::cerr << "more hypothesis lines than references\n";
            return 2;
        }
        opseq_session *session = nullptr;
        if (opseq_session_new(variant, &opts, &session) != OPSEQ_OK) return 2;
        bool failed = false;
        for (const auto &tok : split_ws(rtrim(line))) {
            int event = 0;
            if (opseq_session_feed(session, tok.c_str(), &event) != OPSEQ_OK) {
                std::cerr << "line " << line_no + 1 << ": " << opseq_last_error() << "\n";
                failed = true;
                break;
            }
        }
        const size_t snaps = opseq_session_snapshot_count(session);
        for (int b = 0; b < bins; ++b) {
            std::string text;
            if (!failed && snaps > 0) {
                // snapshot closest to this progress fraction
                size_t idx = static_cast<size_t>(
                    std::max(0.0, std::ceil(static_cast<double>(b + 1) / bins *
                                            static_cast<double>(snaps)) -
                                      1.0));
                if (idx >= snaps) idx = snaps - 1;
                Owned text_owned;
                if (opseq_session_partial(session, idx, nullptr, &text_owned.ptr) ==
                    OPSEQ_OK)
                    text = text_owned.str();
            }
            partials[static_cast<size_t>(b)].push_back(text);
        }
        opseq_session_free(session);
        ++line_no;
    }
    if (line_no != references.size()) {
        std::cerr << "hypothesis and reference files are not line-aligned\n";
        return 2;
    }

    // optional baseline curve to diff against (a CSV produced by this command)
    std::vector<double> baseline;
    if (!diff_against.empty()) {
        std::ifstream base = open_in(diff_against);
        std::string row;
        std::getline(base, row);  // header
        while (std::getline(base, row)) {
            const size_t c1 = row.find(',');
            const size_t c2 = row.find(',', c1 + 1);
            if (c2 != std::string::npos)
                baseline.push_back(std::stod(row.substr(c2 + 1)));
        }
    }

    std::ostream *out = &std::cout;
    std::ofstream out_file;
    if (!out_path.empty()) {
        out_file = open_out(out_path);
        out = &out_file;
    }
    out->precision(12);
    (*out) << "bin,fraction,bleu";
    if (!baseline.empty()) (*out) << ",baseline_bleu,diff";
    (*out) << "\n";
    for (int b = 0; b < bins; ++b) {
        opseq_bleu *acc = opseq_bleu_new();
        for (size_t i = 0; i < references.size(); ++i)
            opseq_bleu_add(acc, partials[static_cast<size_t>(b)][i].c_str(),
                           references[i].c_str());
        double score = 0;
        opseq_bleu_score(acc, 0, &score);
        opseq_bleu_free(acc);
        (*out) << b + 1 << "," << static_cast<double>(b + 1) / bins << "," << score;
        if (!baseline.empty()) {
            const double base_score =
                static_cast<size_t>(b) < baseline.size() ? baseline[static_cast<size_t>(b)] : 0.0;
            (*out) << "," << base_score << "," << score - base_score;
        }
        (*out) << "\n";
    }
    return 0;
}

// --------------------------------------------------------------- eval-text

int cmd_eval_text(const std::string &hyp_path, const std::string &ref_path, bool smooth) {
    std::ifstream hyp_file = open_in(hyp_path);
    std::ifstream ref_file = open_in(ref_path);

    opseq_bleu *acc = opseq_bleu_new();
    double wer_sum = 0;
    size_t lines = 0;
    std::string hyp, ref;
    while (std::getline(hyp_file, hyp)) {
        if (!std::getline(ref_file, ref)) {
            std::cerr << "hypothesis and reference files are not line-aligned\n";
            opseq_bleu_free(acc);
            return 2;
        }
        hyp = rtrim(hyp);
        ref = rtrim(ref);
        double w = 0;
        int convention = 0;
        if (opseq_wer(hyp.c_str(), ref.c_str(), &w, &convention) != OPSEQ_OK) {
            std::cerr << "wer: " << opseq_last_error() << "\n";
            opseq_bleu_free(acc);
            return 2;
        }
        if (convention)
            std::cerr << "line " << lines + 1 << ": empty reference, wer = |hyp|\n";
        wer_sum += w;
        opseq_bleu_add(acc, hyp.c_str(), ref.c_str());
        ++lines;
    }
    double bleu_score = 0;
    opseq_bleu_score(acc, smooth ? 1 : 0, &bleu_score);
    opseq_bleu_free(acc);

    json report = {{"lines", lines},
                   {"wer_mean", lines ? wer_sum / static_cast<double>(lines) : 0.0},
                   {"bleu", bleu_score},
                   {"smooth", smooth}};
    std::cout << report.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------ eval-latency

int cmd_eval_latency(const std::string &in_path, const std::string &in2_path,
                     const std::string &aggregate) {
    std::ifstream f1 = open_in(in_path);
    std::optional<std::ifstream> f2;
    if (!in2_path.empty()) f2 = open_in(in2_path);

    auto parse_line = [](const std::string &raw, double &src_len, double &tgt_len,
                         std::vector<double> &delays) {
        std::istringstream is(raw);
        std::string src_s, tgt_s, rest;
        if (!std::getline(is, src_s, '\t') || !std::getline(is, tgt_s, '\t') ||
            !std::getline(is, rest))
            return false;
        src_len = std::stod(src_s);
        tgt_len = std::stod(tgt_s);
        delays.clear();
        for (const auto &d : split_ws(rest)) delays.push_back(std::stod(d));
        return true;
    };

    json lines = json::array();
    double sum = 0;
    size_t count = 0;
    std::string l1, l2;
    while (std::getline(f1, l1)) {
        double src1 = 0, tgt1 = 0;
        std::vector<double> d1;
        if (!parse_line(rtrim(l1), src1, tgt1, d1)) {
            std::cerr << "line " << count + 1 << ": expected srcLen<TAB>tgtLen<TAB>delays\n";
            return 2;
        }
        double al = 0;
        if (opseq_average_lagging(d1.data(), d1.size(), src1, tgt1, &al) != OPSEQ_OK) {
            std::cerr << "line " << count + 1 << ": " << opseq_last_error() << "\n";
            return 2;
        }
        double combined = al;
        json entry = {{"line", count + 1}, {"al", al}};
        if (f2.has_value()) {
            if (!std::getline(*f2, l2)) {
                std::cerr << "second latency file is shorter\n";
                return 2;
            }
            double src2 = 0, tgt2 = 0, al2 = 0;
            std::vector<double> d2;
            if (!parse_line(rtrim(l2), src2, tgt2, d2) ||
                opseq_average_lagging(d2.data(), d2.size(), src2, tgt2, &al2) != OPSEQ_OK) {
                std::cerr << "line " << count + 1 << ": bad second trace\n";
                return 2;
            }
            combined = aggregate == "max" ? std::max(al, al2) : al + al2;
            entry["al_second"] = al2;
            entry["combined"] = combined;
        }
        lines.push_back(entry);
        sum += combined;
        ++count;
    }

    json report = {{"lines", count},
                   {"aggregate", aggregate},
                   {"mean_al", count ? sum / static_cast<double>(count) : 0.0},
                   {"per_line", lines}};
    std::cout << report.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------------- stats

int cmd_stats(const CommonOpts &common, const std::string &in_path) {
    const opseq_options opts = options_of(common);
    const opseq_variant variant = variant_of(common);
    std::ifstream in = open_in(in_path);

    opseq_stream_stats total{};
    size_t lines = 0, errors = 0;
    std::string line;
    while (std::getline(in, line)) {
        opseq_stream_stats s{};
        if (opseq_stats_line(variant, rtrim(line).c_str(), &opts, &s) != OPSEQ_OK) {
            std::cerr << "line " << lines + errors + 1 << ": " << opseq_last_error() << "\n";
            ++errors;
            if (common.strict) return 1;
            continue;
        }
        total.count_sm += s.count_sm;
        total.count_jb += s.count_jb;
        total.count_jf += s.count_jf;
        total.count_no_ops += s.count_no_ops;
        total.reorder_distance += s.reorder_distance;
        ++lines;
    }

    json report = {{"lines", lines},
                   {"errors", errors},
                   {"count_sm", total.count_sm},
                   {"count_jb", total.count_jb},
                   {"count_jf", total.count_jf},
                   {"count_no_ops", total.count_no_ops},
                   {"reorder_distance", total.reorder_distance}};
    std::cout << report.dump(2) << "\n";
    return errors == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"operation-sequence transduction for word-aligned sentence pairs"};
    app.require_subcommand(1);

    // encode
    CommonOpts enc_common;
    std::string enc_src, enc_tgt, enc_align, enc_tsv, enc_out, enc_drop_log;
    double enc_max_ratio = 5.0;
    int enc_max_tgt_len = 150;
    std::string enc_marker = "lazy";
    auto *enc = app.add_subcommand("encode", "compile corpus records into operation sequences");
    add_common(enc, enc_common);
    enc->add_option("--src", enc_src, "source text file");
    enc->add_option("--tgt", enc_tgt, "target text file");
    enc->add_option("--align", enc_align, "Pharaoh alignment file");
    enc->add_option("--in", enc_tsv, "combined TSV (src<TAB>tgt<TAB>align)");
    enc->add_option("--out", enc_out, "output stream file (default stdout)");
    enc->add_option("--drop-log", enc_drop_log, "log file for dropped/error lines");
    enc->add_option("--max-ratio", enc_max_ratio, "length-ratio filter bound");
    enc->add_option("--max-tgt-len", enc_max_tgt_len, "target piece-count filter bound");
    enc->add_option("--marker-policy", enc_common.marker_policy, "lazy or eager markers")
        ->check(CLI::IsMember({"lazy", "eager"}));
    enc->callback([&]() {
        if (enc_tsv.empty() && (enc_src.empty() || enc_tgt.empty() || enc_align.empty()))
            throw CLI::ValidationError("encode needs --in or all of --src/--tgt/--align");
    });

    // decode
    CommonOpts dec_common;
    std::string dec_in, dec_out_src, dec_out_tgt;
    auto *dec = app.add_subcommand("decode", "restore transcription and translation");
    add_common(dec, dec_common);
    dec->add_option("--in", dec_in, "operation sequence file")->required();
    dec->add_option("--out-src", dec_out_src, "transcription output file")->required();
    dec->add_option("--out-tgt", dec_out_tgt, "translation output file")->required();

    // validate
    CommonOpts val_common;
    std::string val_in;
    auto *val = app.add_subcommand("validate", "grammar-check a stream file");
    add_common(val, val_common);
    val->add_option("--in", val_in, "operation sequence file")->required();

    // roundtrip
    CommonOpts rt_common;
    unsigned rt_seed = 0;
    int rt_count = 1000;
    bool rt_sabotage = false;
    std::string rt_variant = "both";
    auto *rt = app.add_subcommand("roundtrip", "encode/decode self-check on random corpora");
    rt->add_option("--seed", rt_seed, "random seed")->required();
    rt->add_option("--count", rt_count, "number of random records");
    rt->add_option("--variant", rt_variant, "abs, rel, or both")
        ->check(CLI::IsMember({"abs", "rel", "both"}));
    rt->add_option("--max-positions", rt_common.max_positions, "position cap");
    rt->add_option("--marker-policy", rt_common.marker_policy, "lazy or eager markers")
        ->check(CLI::IsMember({"lazy", "eager"}));
    rt->add_flag("--sabotage", rt_sabotage,
                 "corrupt decoder output to prove the harness detects failures");

    // replay
    CommonOpts rep_common;
    std::string rep_in, rep_ts, rep_out;
    auto *rep = app.add_subcommand("replay", "incremental interpretation with snapshots");
    add_common(rep, rep_common);
    rep->add_option("--in", rep_in, "token stream file (one stream per line)")->required();
    rep->add_option("--timestamps", rep_ts, "per-token millisecond file, line-aligned");
    rep->add_option("--out", rep_out, "snapshot JSONL output (default stdout)");

    // eval-partial
    CommonOpts ep_common;
    std::string ep_in, ep_refs, ep_out, ep_diff;
    int ep_bins = 10;
    auto *ep = app.add_subcommand("eval-partial",
                                  "BLEU of streaming partial hypotheses per progress bin");
    add_common(ep, ep_common);
    ep->add_option("--in", ep_in, "operation sequence file")->required();
    ep->add_option("--refs", ep_refs, "reference translation file")->required();
    ep->add_option("--bins", ep_bins, "number of progress bins");
    ep->add_option("--out", ep_out, "CSV output (default stdout)");
    ep->add_option("--diff-against", ep_diff, "baseline CSV from a previous run");

    // eval-text
    std::string et_hyp, et_ref;
    bool et_smooth = false;
    auto *et = app.add_subcommand("eval-text", "WER and BLEU of plain text files");
    et->add_option("--hyp", et_hyp, "hypothesis file")->required();
    et->add_option("--ref", et_ref, "reference file")->required();
    et->add_flag("--smooth", et_smooth, "add-one smoothing for higher BLEU orders");

    // eval-latency
    std::string el_in, el_in2, el_aggregate = "sum";
    auto *el = app.add_subcommand("eval-latency",
                                  "Average Lagging from delay traces "
                                  "(srcLen<TAB>tgtLen<TAB>delays per line)");
    el->add_option("--in", el_in, "delay trace file")->required();
    el->add_option("--in2", el_in2, "second task's delay traces (combined per --aggregate)");
    el->add_option("--aggregate", el_aggregate, "sum or max")
        ->check(CLI::IsMember({"sum", "max"}));

    // stats
    CommonOpts st_common;
    std::string st_in;
    auto *st = app.add_subcommand("stats", "operation counts and reorder distance");
    add_common(st, st_common);
    st->add_option("--in", st_in, "operation sequence file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (enc->parsed())
            return cmd_encode(enc_common, enc_src, enc_tgt, enc_align, enc_tsv, enc_out,
                              enc_drop_log, enc_max_ratio, enc_max_tgt_len);
        if (dec->parsed()) return cmd_decode(dec_common, dec_in, dec_out_src, dec_out_tgt);
        if (val->parsed()) return cmd_validate(val_common, val_in);
        if (rt->parsed()) {
            rt_common.variant = rt_variant == "both" ? "rel" : rt_variant;
            return cmd_roundtrip(rt_common, rt_seed, rt_count, rt_variant == "both",
                                 rt_sabotage);
        }
        if (rep->parsed()) return cmd_replay(rep_common, rep_in, rep_ts, rep_out);
        if (ep->parsed())
            return cmd_eval_partial(ep_common, ep_in, ep_refs, ep_bins, ep_out, ep_diff);
        if (et->parsed()) return cmd_eval_text(et_hyp, et_ref, et_smooth);
        if (el->parsed()) return cmd_eval_latency(el_in, el_in2, el_aggregate);
        if (st->parsed()) return cmd_stats(st_common, st_in);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

// Command-line front end: train-cascade, detect, enroll, attend, eval, report.
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "facekit/attendance.hpp"
#include "facekit/boosting.hpp"
#include "facekit/config.hpp"
#include "facekit/detector.hpp"
#include "facekit/errors.hpp"
#include "facekit/image.hpp"
#include "facekit/recognizer.hpp"
#include "facekit/subspace.hpp"
#include "facekit/util.hpp"

namespace fs = std::filesystem;
using namespace facekit;

namespace {

struct CliError {
    int code;
    std::string message;
};

// Per-option precedence: command-line flag > config file > built-in default.
struct Settings {
    Config file;

    double num(const CLI::Option* opt, double flag_value, const std::string& key,
               double fallback) const {
        if (opt->count() > 0) return flag_value;
        return file.get_double(key, fallback);
    }
    long integer(const CLI::Option* opt, long flag_value, const std::string& key,
                 long fallback) const {
        if (opt->count() > 0) return flag_value;
        return file.get_int(key, fallback);
    }
    bool boolean(const CLI::Option* opt, bool flag_value, const std::string& key,
                 bool fallback) const {
        if (opt->count() > 0) return flag_value;
        return file.get_bool(key, fallback);
    }
    std::string str(const CLI::Option* opt, const std::string& flag_value,
                    const std::string& key, const std::string& fallback) const {
        if (opt->count() > 0) return flag_value;
        return file.get_string(key, fallback);
    }
};

std::vector<fs::path> list_images_sorted(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        fs::path p = e.path();
        if (p.extension() == ".png" || p.extension() == ".pgm") out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void load_training_dir(const fs::path& dir, int label, TrainingSet* set) {
    for (const fs::path& p : list_images_sorted(dir)) set->add(load_gray(p), label);
}

std::vector<HaarFeature> strided_pool(int base, long stride) {
    std::vector<HaarFeature> all = enumerate_features(base);
    if (stride <= 1) return all;
    std::vector<HaarFeature> out;
    for (size_t i = 0; i < all.size(); i += static_cast<size_t>(stride))
        out.push_back(all[i]);
    return out;
}

void write_table_csv(const fs::path& path, const std::string& header,
                     const std::vector<std::string>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write CSV table: " + path.string());
    out << header << "\r\n";
    for (const auto& r : rows) out << r << "\r\n";
    if (!out.flush()) throw IoError("failed writing CSV table: " + path.string());
}

std::string sheet_timestamp(int64_t ts_ms) {
    CivilTime c = civil_from_epoch_ms(ts_ms);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%d/%d/%04d %d:%02d", c.month, c.day, c.year,
                  c.hour, c.minute);
    return buf;
}

int64_t parse_session_start(const std::string& s) {
    size_t sep = s.find_first_of("T ");
    if (sep == std::string::npos)
        return parse_iso_datetime(s, "00:00:00.000");
    return parse_iso_datetime(s.substr(0, sep), s.substr(sep + 1));
}

int64_t now_epoch_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

// ---------------------------------------------------------------- commands

int cmd_train_cascade(const Settings& st, const std::string& pos_dir,
                      const std::string& neg_dir, const std::string& out_file,
                      const CLI::Option* o_d, double d, const CLI::Option* o_f,
                      double f, const CLI::Option* o_fp, double fp_target,
                      const CLI::Option* o_base, long base,
                      const CLI::Option* o_stride, long pool_stride,
                      const std::string& csv_path) {
    CascadeParams params;
    params.min_detection = st.num(o_d, d, "trainer.min_detection", 0.995);
    params.max_stage_fp = st.num(o_f, f, "trainer.max_stage_fp", 0.5);
    params.overall_fp_target = st.num(o_fp, fp_target, "trainer.overall_fp_target", 1e-3);
    params.max_weaks_per_stage =
        static_cast<int>(st.file.get_int("trainer.max_weaks_per_stage", 200));
    params.max_stages = static_cast<int>(st.file.get_int("trainer.max_stages", 50));
    const int window = static_cast<int>(st.integer(o_base, base, "trainer.base", 24));
    const long stride = st.integer(o_stride, pool_stride, "trainer.pool_stride", 1);
    const bool norm = st.file.get_bool("trainer.normalize", true);

    TrainingSet pos(window, norm), neg(window, norm);
    load_training_dir(pos_dir, 1, &pos);
    load_training_dir(neg_dir, -1, &neg);
    if (pos.size() == 0) throw CliError{2, "positive directory has no samples"};
    if (neg.size() == 0) throw CliError{2, "negative directory has no samples"};

    std::vector<HaarFeature> pool = strided_pool(window, stride);
    std::printf("training on %d positives, %d negatives, %zu features\n", pos.size(),
                neg.size(), pool.size());

    CascadeTraining result = train_cascade(pos, neg, pool, params);
    save_cascade(result.cascade, out_file);

    std::printf("%-6s %-6s %-12s %-10s %-10s %s\n", "stage", "weaks", "threshold",
                "detection", "fp_rate", "negatives_left");
    std::vector<std::string> rows;
    for (size_t i = 0; i < result.stages.size(); ++i) {
        const StageReport& s = result.stages[i];
        std::printf("%-6zu %-6d %-12.5f %-10.4f %-10.4f %d\n", i + 1, s.weak_count,
                    s.threshold, s.detection, s.fp_rate, s.negatives_left);
        char row[160];
        std::snprintf(row, sizeof(row), "%zu,%d,%s,%s,%s,%d", i + 1, s.weak_count,
                      format_double(s.threshold).c_str(),
                      format_double(s.detection).c_str(),
                      format_double(s.fp_rate).c_str(), s.negatives_left);
        rows.emplace_back(row);
    }
    std::printf("cumulative_fp=%g\n", result.cumulative_fp);
    std::printf("cascade=%s stages=%zu\n", out_file.c_str(),
                result.cascade.stages.size());
    if (!csv_path.empty())
        write_table_csv(csv_path, "stage,weaks,threshold,detection,fp_rate,negatives_left",
                        rows);
    return 0;
}

int cmd_detect(const Settings& st, const std::string& input,
               const std::string& cascade_file, const std::string& chips_dir,
               const CLI::Option* o_step, double scale_step,
               const CLI::Option* o_strf, double stride_factor,
               const CLI::Option* o_iou, double nms_iou, const std::string& csv_path) {
    Cascade cascade = load_cascade(cascade_file);
    DetectParams params;
    params.scale_step = st.num(o_step, scale_step, "detector.scale_step", 1.25);
    params.stride_factor = st.num(o_strf, stride_factor, "detector.stride_factor", 0.05);
    params.nms_iou = st.num(o_iou, nms_iou, "detector.nms_iou", 0.3);

    std::vector<fs::path> frames;
    if (fs::is_directory(input)) {
        for (const NumberedFile& nf : numbered_files(input, {".png", ".pgm"}))
            frames.push_back(nf.path);
    } else {
        frames.push_back(input);
    }
    if (frames.empty()) {
        std::printf("no frames found in %s\n", input.c_str());
        return 0;
    }

    fs::create_directories(chips_dir);
    long next_chip = highest_numbered_file(chips_dir) + 1;

    int failures = 0;
    std::vector<std::string> rows;
    for (const fs::path& frame_path : frames) {
        GrayImage frame(1, 1);
        try {
            frame = load_gray(frame_path);
        } catch (const Error& e) {
            std::fprintf(stderr, "warning: skipping %s: %s\n",
                         frame_path.string().c_str(), e.what());
            ++failures;
            continue;
        }
        auto t0 = std::chrono::steady_clock::now();
        std::vector<Detection> dets = detect(frame, cascade, params);
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        for (const Detection& d : dets) {
            GrayImage chip = extract_chip(frame, d);
            fs::path chip_path = fs::path(chips_dir) / (std::to_string(next_chip) + ".png");
            save_png(chip, chip_path);
            ++next_chip;
        }
        std::printf("%s: %zu faces, Detection Time: %.3fmsec\n",
                    frame_path.filename().string().c_str(), dets.size(), ms);
        char row[512];
        std::snprintf(row, sizeof(row), "%s,%zu,%s",
                      csv_escape(frame_path.filename().string()).c_str(), dets.size(),
                      format_double(ms).c_str());
        rows.emplace_back(row);
    }
    if (!csv_path.empty()) write_table_csv(csv_path, "frame,faces,detection_ms", rows);
    return failures == static_cast<int>(frames.size()) ? 1 : 0;
}

int cmd_enroll(const Settings& st, const std::string& training_dir,
               const std::string& roster_file, const std::string& model_file,
               const CLI::Option* o_seed, long seed) {
    Roster roster = load_roster(roster_file);
    Gallery gallery = build_gallery(training_dir, roster);
    uint64_t use_seed = static_cast<uint64_t>(st.integer(o_seed, seed, "recognizer.seed", 1));
    SubspaceModel model = train(gallery, use_seed);
    save_model(model, model_file);

    int iter_total = 0, iter_max = 0;
    for (int it : model.pca_iterations) {
        iter_total += it;
        iter_max = std::max(iter_max, it);
    }
    std::printf("n=%d\nN=%d\nC=%d\nK=%d\n", model.n, model.N, model.C, model.C - 1);
    std::printf("pca_iterations: total=%d max=%d\n", iter_total, iter_max);
    std::printf("tau=%s\n", format_double(model.tau).c_str());
    if (model.ridge_applied)
        std::printf("note: within-class scatter was regularized\n");
    std::printf("model=%s\n", model_file.c_str());
    return 0;
}

int cmd_attend(const Settings& st, const std::string& frames_dir,
               const std::string& cascade_file, const std::string& model_file,
               const std::string& roster_file, const std::string& log_file,
               const std::string& chips_dir, const std::string& review_dir,
               const std::string& session_start, long session_step_ms,
               const CLI::Option* o_tau, double tau_flag,
               const CLI::Option* o_cooldown, long cooldown_s) {
    Cascade cascade = load_cascade(cascade_file);
    SubspaceModel model = load_model(model_file);
    Roster roster = load_roster(roster_file);

    DetectParams dparams;
    dparams.scale_step = st.file.get_double("detector.scale_step", 1.25);
    dparams.stride_factor = st.file.get_double("detector.stride_factor", 0.05);
    dparams.nms_iou = st.file.get_double("detector.nms_iou", 0.3);

    RecognizeOptions ropts;
    ropts.tau = st.num(o_tau, tau_flag, "recognizer.tau", 0.0);
    ropts.use_lda = st.file.get_bool("recognizer.use_lda", true);
    ropts.centroids = st.file.get_bool("recognizer.centroids", false);

    int64_t cooldown_ms =
        1000 * st.integer(o_cooldown, cooldown_s, "attendance.cooldown_s", 60);
    AttendanceLog log(log_file, cooldown_ms);

    // Model class ids are roster row positions (build_gallery contract).
    fs::create_directories(chips_dir);
    fs::create_directories(review_dir);
    long next_chip = highest_numbered_file(chips_dir) + 1;
    long next_review = highest_numbered_file(review_dir) + 1;

    const bool synthetic_clock = !session_start.empty();
    int64_t ts = synthetic_clock ? parse_session_start(session_start) : 0;

    int frames = 0, detections = 0, logged = 0, suppressed = 0, unknown = 0;
    for (const NumberedFile& nf : numbered_files(frames_dir, {".png", ".pgm"})) {
        GrayImage frame(1, 1);
        try {
            frame = load_gray(nf.path);
        } catch (const Error& e) {
            std::fprintf(stderr, "warning: skipping %s: %s\n",
                         nf.path.string().c_str(), e.what());
            continue;
        }
        ++frames;
        int64_t frame_ts = synthetic_clock ? ts : now_epoch_ms();
        if (synthetic_clock) ts += session_step_ms;

        auto t0 = std::chrono::steady_clock::now();
        std::vector<Detection> dets = detect(frame, cascade, dparams);
        double detect_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
        detections += static_cast<int>(dets.size());

        for (const Detection& d : dets) {
            GrayImage chip = extract_chip(frame, d);
            MatchResult match = recognize(model, chip, ropts);
            if (match.class_id == kUnknown) {
                fs::path p = fs::path(review_dir) / (std::to_string(next_review) + ".png");
                save_png(chip, p);
                ++next_review;
                ++unknown;
                continue;
            }
            fs::path chip_path = fs::path(chips_dir) / (std::to_string(next_chip) + ".png");
            save_png(chip, chip_path);
            ++next_chip;

            if (match.class_id >= static_cast<int>(roster.entries.size()))
                throw StateError("model classes exceed roster rows");
            const RosterEntry& subject = roster.entries[match.class_id];
            AttendanceRecord rec;
            rec.source_image = chip_path.filename().string();
            rec.name = subject.name;
            rec.enrollment_no = subject.enrollment_no;
            rec.timestamp_ms = frame_ts;
            rec.detection_ms = detect_ms + match.elapsed_ms;
            if (log.log_sighting(rec))
                ++logged;
            else
                ++suppressed;
        }
    }
    std::printf("frames=%d detections=%d logged=%d suppressed=%d unknown=%d\n", frames,
                detections, logged, suppressed, unknown);
    return 0;
}

int cmd_eval(const Settings& st, const std::string& model_file,
             const std::string& test_dir, const std::string& roster_file,
             bool centroids, const std::string& csv_path) {
    SubspaceModel model = load_model(model_file);
    Roster roster = load_roster(roster_file);

    // Model class ids are roster row positions (build_gallery contract).
    if (static_cast<int>(roster.entries.size()) != model.C)
        throw ValueError("roster rows do not match model classes");

    std::map<int, int> dense_of_subject;
    for (size_t i = 0; i < roster.entries.size(); ++i)
        dense_of_subject[roster.entries[i].subject_id] = static_cast<int>(i);

    RecognizeOptions base_opts;
    base_opts.tau = std::numeric_limits<double>::max();
    base_opts.centroids = centroids;

    int total = 0, skipped = 0, correct_lda = 0, correct_pca = 0;
    double dist_lda = 0, dist_pca = 0;
    std::map<std::pair<int, int>, int> confusion;
    std::vector<std::string> rows;

    for (const NumberedFile& nf : numbered_files(test_dir, {".png", ".pgm"})) {
        const RosterEntry* e = roster.find_by_file(nf.number);
        if (!e) {
            std::fprintf(stderr, "warning: probe %s outside roster, skipped\n",
                         nf.path.filename().string().c_str());
            ++skipped;
            continue;
        }
        GrayImage probe = load_gray(nf.path);
        int truth = dense_of_subject.at(e->subject_id);

        RecognizeOptions lda = base_opts;
        lda.use_lda = true;
        MatchResult r_lda = recognize(model, probe, lda);
        RecognizeOptions pca = base_opts;
        pca.use_lda = false;
        MatchResult r_pca = recognize(model, probe, pca);

        ++total;
        if (r_lda.class_id == truth) ++correct_lda;
        else ++confusion[{truth, r_lda.class_id}];
        if (r_pca.class_id == truth) ++correct_pca;
        dist_lda += r_lda.distance;
        dist_pca += r_pca.distance;

        char row[256];
        std::snprintf(row, sizeof(row), "%ld,%d,%d,%s,%d,%s", nf.number, truth,
                      r_lda.class_id, format_double(r_lda.distance).c_str(),
                      r_pca.class_id, format_double(r_pca.distance).c_str());
        rows.emplace_back(row);
    }
    if (total == 0) throw ValueError("no labeled probes found in " + test_dir);

    std::printf("probes=%d skipped=%d\n", total, skipped);
    std::printf("%-9s %-9s %s\n", "method", "rank1", "mean_dist");
    std::printf("%-9s %-9.4f %.6g\n", "PCA", static_cast<double>(correct_pca) / total,
                dist_pca / total);
    std::printf("%-9s %-9.4f %.6g\n", "PCA+LDA",
                static_cast<double>(correct_lda) / total, dist_lda / total);
    std::printf("confusions (PCA+LDA): %d\n", total - correct_lda);
    int shown = 0;
    for (const auto& [pair, count] : confusion) {
        if (shown++ >= 5) break;
        std::printf("  true %d -> predicted %d: %d\n", pair.first, pair.second, count);
    }
    if (!csv_path.empty())
        write_table_csv(csv_path, "file,truth,lda_class,lda_dist,pca_class,pca_dist",
                        rows);
    return 0;
}

int cmd_report(const std::string& log_file, const std::string& csv_path) {
    AttendanceLog log(log_file);
    for (const AttendanceRecord& r : log.records()) {
        std::printf("%ld | %s | %s (%s) | Date and Time: %s | Detection Time: %.3fmsec | %s\n",
                    r.seq, r.source_image.c_str(), r.name.c_str(),
                    r.enrollment_no.c_str(),
                    sheet_timestamp(r.timestamp_ms).c_str(), r.detection_ms,
                    event_name(r.event));
    }
    std::printf("total=%zu\n", log.records().size());
    if (!csv_path.empty()) export_csv(log.records(), csv_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"face-attendance pipeline: cascade detection, subspace "
                 "recognition, attendance logging"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "config file (overrides FACEKIT_CONFIG environment variable)");

    // train-cascade ---------------------------------------------------------
    auto* sc_train = app.add_subcommand("train-cascade", "train a detection cascade");
    std::string pos_dir, neg_dir, cascade_out, train_csv;
    double opt_d = 0.995, opt_f = 0.5, opt_fp = 1e-3;
    long opt_base = 24, opt_pool_stride = 1;
    sc_train->add_option("--positives", pos_dir, "directory of positive samples")->required();
    sc_train->add_option("--negatives", neg_dir, "directory of negative samples")->required();
    sc_train->add_option("--out", cascade_out, "output cascade JSON")->required();
    auto* o_d = sc_train->add_option("--min-detection", opt_d, "per-stage detection floor");
    auto* o_f = sc_train->add_option("--max-stage-fp", opt_f, "per-stage FP ceiling");
    auto* o_fp = sc_train->add_option("--overall-fp", opt_fp, "cumulative FP target");
    auto* o_base = sc_train->add_option("--base", opt_base, "base window side");
    auto* o_pool = sc_train->add_option("--pool-stride", opt_pool_stride,
                                        "keep every k-th enumerated feature");
    sc_train->add_option("--csv", train_csv, "also write the stage table as CSV");

    // detect ----------------------------------------------------------------
    auto* sc_detect = app.add_subcommand("detect", "detect faces and export chips");
    std::string det_input, det_cascade, det_chips = "chips", det_csv;
    double opt_step = 1.25, opt_stridef = 0.05, opt_iou = 0.3;
    sc_detect->add_option("--input", det_input, "image file or frames directory")->required();
    sc_detect->add_option("--cascade", det_cascade, "cascade JSON")->required();
    sc_detect->add_option("--chips", det_chips, "output chip directory");
    auto* o_step = sc_detect->add_option("--scale-step", opt_step, "scale pyramid step");
    auto* o_strf = sc_detect->add_option("--stride-factor", opt_stridef, "stride/side ratio");
    auto* o_iou = sc_detect->add_option("--nms-iou", opt_iou, "NMS overlap threshold");
    sc_detect->add_option("--csv", det_csv, "also write per-frame results as CSV");

    // enroll ----------------------------------------------------------------
    auto* sc_enroll = app.add_subcommand("enroll", "train the recognition model");
    std::string enr_dir, enr_roster, enr_model;
    long opt_seed = 1;
    sc_enroll->add_option("--training", enr_dir, "TRAININGDATABASE directory")->required();
    sc_enroll->add_option("--roster", enr_roster, "roster CSV")->required();
    sc_enroll->add_option("--out", enr_model, "output model JSON")->required();
    auto* o_seed = sc_enroll->add_option("--seed", opt_seed, "PCA initialization seed");

    // attend ----------------------------------------------------------------
    auto* sc_attend = app.add_subcommand("attend", "run the full attendance pipeline");
    std::string att_frames, att_cascade, att_model, att_roster, att_log,
        att_chips = "chips", att_review = "review", att_start;
    long att_step_ms = 1000, att_cooldown = 60;
    double att_tau = 0.0;
    sc_attend->add_option("--frames", att_frames, "frames directory")->required();
    sc_attend->add_option("--cascade", att_cascade, "cascade JSON")->required();
    sc_attend->add_option("--model", att_model, "model JSON")->required();
    sc_attend->add_option("--roster", att_roster, "roster CSV")->required();
    sc_attend->add_option("--log", att_log, "attendance log (NDJSON)")->required();
    sc_attend->add_option("--chips", att_chips, "accepted-chip directory");
    sc_attend->add_option("--review", att_review, "unknown-face directory");
    sc_attend->add_option("--session-start", att_start,
                          "synthetic clock start (ISO date[-time]); default real time");
    sc_attend->add_option("--session-step-ms", att_step_ms,
                          "synthetic clock step per frame");
    auto* o_tau = sc_attend->add_option("--tau", att_tau, "rejection threshold override");
    auto* o_cool = sc_attend->add_option("--cooldown", att_cooldown,
                                         "cool-down in seconds");

    // eval ------------------------------------------------------------------
    auto* sc_eval = app.add_subcommand("eval", "evaluate recognition accuracy");
    std::string ev_model, ev_dir, ev_roster, ev_csv;
    bool ev_centroids = false;
    sc_eval->add_option("--model", ev_model, "model JSON")->required();
    sc_eval->add_option("--test", ev_dir, "TESTDATABASE directory")->required();
    sc_eval->add_option("--roster", ev_roster, "roster CSV")->required();
    sc_eval->add_flag("--centroids", ev_centroids, "match class centroids, not 1-NN");
    sc_eval->add_option("--csv", ev_csv, "also write per-probe results as CSV");

    // report ----------------------------------------------------------------
    auto* sc_report = app.add_subcommand("report", "print the attendance sheet");
    std::string rep_log, rep_csv;
    sc_report->add_option("--log", rep_log, "attendance log (NDJSON)")->required();
    sc_report->add_option("--csv", rep_csv, "also export the sheet as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Settings st;
        if (config_path.empty()) {
            const char* env = std::getenv("FACEKIT_CONFIG");
            if (env && *env) config_path = env;
        }
        if (!config_path.empty()) st.file = Config::parse_file(config_path);

        if (sc_train->parsed())
            return cmd_train_cascade(st, pos_dir, neg_dir, cascade_out, o_d, opt_d, o_f,
                                     opt_f, o_fp, opt_fp, o_base, opt_base, o_pool,
                                     opt_pool_stride, train_csv);
        if (sc_detect->parsed())
            return cmd_detect(st, det_input, det_cascade, det_chips, o_step, opt_step,
                              o_strf, opt_stridef, o_iou, opt_iou, det_csv);
        if (sc_enroll->parsed())
            return cmd_enroll(st, enr_dir, enr_roster, enr_model, o_seed, opt_seed);
        if (sc_attend->parsed())
            return cmd_attend(st, att_frames, att_cascade, att_model, att_roster,
                              att_log, att_chips, att_review, att_start, att_step_ms,
                              o_tau, att_tau, o_cool, att_cooldown);
        if (sc_eval->parsed())
            return cmd_eval(st, ev_model, ev_dir, ev_roster, ev_centroids, ev_csv);
        if (sc_report->parsed()) return cmd_report(rep_log, rep_csv);
        return 2;
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.code;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

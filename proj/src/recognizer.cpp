#include "facekit/recognizer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "facekit/errors.hpp"
#include "facekit/util.hpp"

namespace facekit {

const RosterEntry* Roster::find_by_file(long number) const {
    for (const RosterEntry& e : entries)
        if (number >= e.first_file && number <= e.last_file) return &e;
    return nullptr;
}

Roster load_roster(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open roster file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    size_t pos = 0;
    Roster r;
    bool header = true;
    while (pos < text.size()) {
        std::vector<std::string> f = csv_parse_record(text, &pos);
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != 5) throw FormatError("roster rows must have 5 fields");
        if (header) {
            if (f[0] != "subject_id") throw FormatError("roster header mismatch");
            header = false;
            continue;
        }
        RosterEntry e;
        try {
            e.subject_id = std::stoi(f[0]);
            e.first_file = std::stol(f[3]);
            e.last_file = std::stol(f[4]);
        } catch (const std::exception&) {
            throw FormatError("roster numeric field is not a number");
        }
        e.name = f[1];
        e.enrollment_no = f[2];
        if (e.first_file > e.last_file)
            throw FormatError("roster range is inverted for subject " + f[0]);
        r.entries.push_back(std::move(e));
    }
    if (header) throw FormatError("roster file is missing its header");
    for (size_t i = 0; i < r.entries.size(); ++i)
        for (size_t j = i + 1; j < r.entries.size(); ++j) {
            const auto &a = r.entries[i], &b = r.entries[j];
            if (a.subject_id == b.subject_id)
                throw FormatError("duplicate roster subject_id");
            if (a.first_file <= b.last_file && b.first_file <= a.last_file)
                throw FormatError("overlapping roster file ranges");
        }
    return r;
}

void save_roster(const Roster& r, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write roster file: " + path.string());
    out << "subject_id,name,enrollment_no,first_file,last_file\r\n";
    for (const RosterEntry& e : r.entries)
        out << e.subject_id << ',' << csv_escape(e.name) << ','
            << csv_escape(e.enrollment_no) << ',' << e.first_file << ','
            << e.last_file << "\r\n";
    if (!out.flush()) throw IoError("failed writing roster file: " + path.string());
}

Gallery build_gallery(const std::filesystem::path& dir, const Roster& roster) {
    std::vector<NumberedFile> files = numbered_files(dir, {".png", ".pgm"});
    if (files.empty()) throw ValueError("gallery directory has no images: " + dir.string());

    // Dense class ids are roster row positions, so model labels and roster
    // rows stay aligned across tools.
    Gallery g;
    g.subjects = roster.entries;
    g.data.columns = Matrix(kFaceVectorLength, static_cast<int>(files.size()));
    std::vector<int> images_per_class(roster.entries.size(), 0);
    for (size_t i = 0; i < files.size(); ++i) {
        const RosterEntry* e = roster.find_by_file(files[i].number);
        if (!e)
            throw ValueError("file outside every roster range: " +
                             files[i].path.filename().string());
        int dense = static_cast<int>(e - roster.entries.data());
        ++images_per_class[dense];
        GrayImage img = load_gray(files[i].path);
        if (img.width() != kChipSide || img.height() != kChipSide)
            throw DimensionError("gallery chip is not 100x100: " +
                                 files[i].path.filename().string());
        FaceVector v = flatten(img);
        for (int row = 0; row < kFaceVectorLength; ++row)
            g.data.columns(row, static_cast<int>(i)) = v[row];
        g.data.labels.push_back(dense);
        g.entries.push_back({files[i].path, files[i].number, dense});
    }
    for (size_t c = 0; c < images_per_class.size(); ++c)
        if (images_per_class[c] == 0)
            throw ValueError("roster subject " +
                             std::to_string(roster.entries[c].subject_id) +
                             " has no gallery images");
    g.data.validate();
    return g;
}

SubspaceModel train(const Gallery& g, uint64_t seed) {
    LdaOptions opts;
    opts.pca.seed = seed;
    return lda_train(g.data, opts);
}

namespace {

struct Nearest {
    int index = -1;
    double dist = std::numeric_limits<double>::infinity();
    double runner_up = std::numeric_limits<double>::infinity();
};

Nearest nearest_column(const Matrix& w, std::span<const double> q) {
    Nearest n;
    for (int j = 0; j < w.cols(); ++j) {
        double s = 0;
        for (int i = 0; i < w.rows(); ++i) {
            double d = w(i, j) - q[i];
            s += d * d;
        }
        if (s < n.dist) {
            n.runner_up = n.dist;
            n.dist = s;
            n.index = j;
        } else if (s < n.runner_up) {
            n.runner_up = s;
        }
    }
    n.dist = std::sqrt(n.dist);
    n.runner_up = std::sqrt(n.runner_up);
    return n;
}

}  // namespace

MatchResult recognize(const SubspaceModel& m, const GrayImage& probe,
                      const RecognizeOptions& opts) {
    if (m.N == 0 || m.gallery_weights.cols() == 0)
        throw StateError("model has no gallery weights");
    const auto t0 = std::chrono::steady_clock::now();

    FaceVector v = flatten(probe);
    std::vector<double> q = opts.use_lda ? project(m, v) : project_pca(m, v);
    const Matrix& bank = opts.use_lda ? m.gallery_weights : m.gallery_weights_pca;

    MatchResult r;
    int cls = kUnknown;
    Nearest n;
    if (!opts.centroids) {
        n = nearest_column(bank, q);
        cls = m.gallery_labels[n.index];
        r.gallery_index = n.index;
    } else {
        Matrix centroids(bank.rows(), m.C, 0.0);
        std::vector<int> counts(m.C, 0);
        for (int j = 0; j < bank.cols(); ++j) {
            ++counts[m.gallery_labels[j]];
            for (int i = 0; i < bank.rows(); ++i)
                centroids(i, m.gallery_labels[j]) += bank(i, j);
        }
        for (int c = 0; c < m.C; ++c)
            for (int i = 0; i < bank.rows(); ++i) centroids(i, c) /= counts[c];
        n = nearest_column(centroids, q);
        cls = n.index;
    }

    double tau = opts.tau > 0 ? opts.tau : (opts.use_lda ? m.tau : m.tau_pca);
    r.distance = n.dist;
    r.runner_up = n.runner_up;
    r.class_id = n.dist <= tau ? cls : kUnknown;
    r.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    return r;
}

}  // namespace facekit

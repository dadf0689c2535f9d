#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "facekit/image.hpp"
#include "facekit/subspace.hpp"

namespace facekit {

struct RosterEntry {
    int subject_id = 0;
    std::string name;
    std::string enrollment_no;
    long first_file = 0;  // inclusive numeric-filename range
    long last_file = 0;
};

// CSV with header subject_id,name,enrollment_no,first_file,last_file.
struct Roster {
    std::vector<RosterEntry> entries;
    const RosterEntry* find_by_file(long number) const;
};
Roster load_roster(const std::filesystem::path& path);
void save_roster(const Roster& r, const std::filesystem::path& path);

struct GalleryEntry {
    std::filesystem::path path;
    long file_number = 0;
    int class_id = 0;  // dense 0..C-1, indexes Gallery::subjects
};

struct Gallery {
    DataMatrix data;
    std::vector<GalleryEntry> entries;
    std::vector<RosterEntry> subjects;  // dense class id -> roster row
};

// Loads numerically named 100x100 chips in numeric order and assigns classes
// through the roster ranges.
Gallery build_gallery(const std::filesystem::path& dir, const Roster& roster);

SubspaceModel train(const Gallery& g, uint64_t seed = 1);

constexpr int kUnknown = -1;

struct RecognizeOptions {
    double tau = 0.0;        // <= 0: use the model's stored threshold
    bool use_lda = true;     // false: match in the PCA-only space
    bool centroids = false;  // match class centroids instead of 1-NN
};

struct MatchResult {
    int class_id = kUnknown;
    int gallery_index = -1;  // matched column (-1 for centroid matching)
    double distance = 0.0;
    double runner_up = 0.0;
    double elapsed_ms = 0.0;
};

// Projects the probe into face space and takes the nearest gallery column
// (ties to the lower index); distances beyond tau come back Unknown.
MatchResult recognize(const SubspaceModel& m, const GrayImage& probe,
                      const RecognizeOptions& opts = {});

}  // namespace facekit

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "facekit/haar.hpp"
#include "facekit/image.hpp"

namespace facekit {

// Decision stump over one Haar feature: predicts +1 iff
// polarity*value < polarity*threshold.
struct WeakClassifier {
    HaarFeature feature;
    double threshold = 0.0;
    int polarity = 1;
    double alpha = 0.0;
};

inline int weak_predict(const WeakClassifier& w, double value) {
    return w.polarity * value < w.polarity * w.threshold ? 1 : -1;
}

// A boosted stage accepts a window iff sum(alpha_t h_t) >= threshold.
struct Stage {
    std::vector<WeakClassifier> weaks;
    double threshold = 0.0;
};

struct Cascade {
    int base = kDefaultBaseWindow;
    bool normalize_variance = true;  // divide feature values by window stddev
    std::vector<Stage> stages;
};

// Base-window-sized training sample with its normalization factor baked in.
struct Sample {
    IntegralImage ii;
    double inv_norm = 0.0;  // 1 / (area * sigma), or 1 / area when unnormalized
    int label = 0;          // +1 face, -1 non-face
};

class TrainingSet {
  public:
    explicit TrainingSet(int base = kDefaultBaseWindow, bool normalize_variance = true)
        : base_(base), normalize_(normalize_variance) {}

    void add(const GrayImage& img, int label);
    void add(Sample s) { samples_.push_back(std::move(s)); }

    int size() const { return static_cast<int>(samples_.size()); }
    const Sample& sample(int i) const { return samples_[i]; }
    int base() const { return base_; }
    bool normalize_variance() const { return normalize_; }
    int count_label(int label) const;

    double feature_value(const HaarFeature& f, int i) const;

  private:
    int base_;
    bool normalize_;
    std::vector<Sample> samples_;
};

struct ThresholdChoice {
    double threshold = 0.0;
    int polarity = 1;
    double error = 0.0;
};

// Optimal stump for pre-computed 1-D values under sample weights: sort once,
// sweep every split boundary for both polarities. Ties keep the earliest
// boundary with polarity +1 preferred.
ThresholdChoice sweep_threshold(std::span<const double> values,
                                std::span<const int> labels,
                                std::span<const double> weights);

struct WeakSearchResult {
    WeakClassifier weak;
    double error = 0.0;
    int feature_index = -1;
};

// Best stump over the whole feature pool; parallel over features with a
// deterministic (error, pool index) merge.
WeakSearchResult train_weak(std::span<const HaarFeature> pool, const TrainingSet& set,
                            std::span<const double> weights);
namespace serial {
WeakSearchResult train_weak(std::span<const HaarFeature> pool, const TrainingSet& set,
                            std::span<const double> weights);
}

struct RoundReport {
    int feature_index = -1;
    double error = 0.0;       // epsilon_t
    double alpha = 0.0;
    double bound = 1.0;       // running product of 2*sqrt(eps(1-eps))
    double train_error = 0.0; // empirical error of the strong classifier so far
};

// Discrete AdaBoost, one round per step(); weights start class-balanced
// (1/2 mass per label). A round with error >= 0.5 adds nothing and stops;
// a perfect round is added with a capped alpha and then stops.
class AdaBoostTrainer {
  public:
    AdaBoostTrainer(const TrainingSet& set, std::span<const HaarFeature> pool);

    bool step();  // returns true if a weak classifier was added
    bool stopped() const { return stopped_; }

    const std::vector<WeakClassifier>& weaks() const { return weaks_; }
    const std::vector<RoundReport>& rounds() const { return rounds_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& scores() const { return scores_; }  // per sample
    double train_error() const;

    static constexpr double kMinError = 1e-10;  // alpha cap for perfect rounds

  private:
    const TrainingSet& set_;
    std::span<const HaarFeature> pool_;
    std::vector<double> weights_;
    std::vector<double> scores_;
    std::vector<WeakClassifier> weaks_;
    std::vector<RoundReport> rounds_;
    bool stopped_ = false;
};

std::vector<WeakClassifier> adaboost(const TrainingSet& set,
                                     std::span<const HaarFeature> pool, int rounds,
                                     std::vector<RoundReport>* reports = nullptr);

struct CascadeParams {
    double min_detection = 0.995;   // per-stage detection floor d
    double max_stage_fp = 0.5;      // per-stage false-positive ceiling f
    double overall_fp_target = 1e-3;
    int max_weaks_per_stage = 200;
    int max_stages = 50;
};

struct StageReport {
    int weak_count = 0;
    double threshold = 0.0;
    double detection = 0.0;
    double fp_rate = 0.0;
    int negatives_left = 0;
};

struct CascadeTraining {
    Cascade cascade;
    std::vector<StageReport> stages;
    double cumulative_fp = 1.0;
};

// Grows stages until the false-positive product meets the target or the
// negative pool is exhausted. Each stage adds stumps until, with its
// threshold lowered along sorted positive scores to reach detection >= d,
// its false-positive rate on surviving negatives is <= f.
CascadeTraining train_cascade(const TrainingSet& pos, const TrainingSet& neg,
                              std::span<const HaarFeature> pool,
                              const CascadeParams& params);

struct WindowDecision {
    bool is_face = false;
    int stages_evaluated = 0;
    double score = 0.0;  // margin of the last evaluated stage
};

double window_inv_norm(const Cascade& c, const IntegralImage& ii,
                       const IntegralImage& ii_sq, const Rect& window);

// Early-exit evaluation: stages run in order, first rejection returns.
WindowDecision classify_window(const Cascade& c, const IntegralImage& ii,
                               const IntegralImage& ii_sq, const Rect& window,
                               double scale);

void save_cascade(const Cascade& c, const std::filesystem::path& path);
Cascade load_cascade(const std::filesystem::path& path);

}  // namespace facekit

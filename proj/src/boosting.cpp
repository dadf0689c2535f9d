#include "facekit/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "facekit/errors.hpp"
#include "json.hpp"

namespace facekit {

void TrainingSet::add(const GrayImage& img, int label) {
    if (label != 1 && label != -1) throw ValueError("sample label must be +1 or -1");
    if (img.width() != base_ || img.height() != base_)
        throw DimensionError("training sample is not base-window sized");
    Sample s;
    s.ii = integral(img);
    IntegralImage sq = integral_squared(img);
    const Rect full{0, 0, base_, base_};
    const double area = static_cast<double>(base_) * base_;
    double denom = area;
    if (normalize_) {
        double m = static_cast<double>(rect_sum(s.ii, full)) / area;
        double var = static_cast<double>(rect_sum(sq, full)) / area - m * m;
        denom *= var > 0.0 ? std::sqrt(var) : 1.0;
    }
    s.inv_norm = 1.0 / denom;
    s.label = label;
    samples_.push_back(std::move(s));
}

int TrainingSet::count_label(int label) const {
    int c = 0;
    for (const auto& s : samples_)
        if (s.label == label) ++c;
    return c;
}

double TrainingSet::feature_value(const HaarFeature& f, int i) const {
    const Sample& s = samples_[i];
    const Rect full{0, 0, base_, base_};
    return static_cast<double>(eval_feature_raw(s.ii, f, full, 1.0)) * s.inv_norm;
}

ThresholdChoice sweep_threshold(std::span<const double> values,
                                std::span<const int> labels,
                                std::span<const double> weights) {
    const int m = static_cast<int>(values.size());
    if (m == 0 || labels.size() != values.size() || weights.size() != values.size())
        throw DimensionError("values, labels and weights must have equal nonzero size");

    double total_pos = 0, total_neg = 0;
    for (int i = 0; i < m; ++i) {
        if (weights[i] < 0) throw ValueError("negative sample weight");
        (labels[i] > 0 ? total_pos : total_neg) += weights[i];
    }
    if (total_pos <= 0 || total_neg <= 0)
        throw ValueError("weight mass concentrated on a single label");

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });

    // Boundary k puts the k smallest values on the "<" side. Thresholds are
    // taken from the data itself (strict-less semantics) so no rounding can
    // move a sample across the boundary.
    ThresholdChoice best;
    best.error = 2.0;
    auto consider = [&](double err, double thr, int pol) {
        if (err < best.error) best = {thr, pol, err};
    };
    double prefix_pos = 0, prefix_neg = 0;
    for (int k = 0; k <= m; ++k) {
        if (k > 0) {
            int i = order[k - 1];
            (labels[i] > 0 ? prefix_pos : prefix_neg) += weights[i];
        }
        if (k > 0 && k < m && values[order[k - 1]] == values[order[k]]) continue;
        double below = k == 0 ? values[order[0]] : values[order[k - 1]];
        double thr_plus = k == m ? values[order[m - 1]] + 1.0 : values[order[k]];
        double thr_minus = k == 0 ? values[order[0]] - 1.0 : below;
        consider(prefix_neg + (total_pos - prefix_pos), thr_plus, 1);
        consider(prefix_pos + (total_neg - prefix_neg), thr_minus, -1);
    }
    return best;
}

namespace {

WeakSearchResult search_range(std::span<const HaarFeature> pool, const TrainingSet& set,
                              std::span<const double> weights, int first, int last) {
    const int m = set.size();
    std::vector<double> values(m);
    std::vector<int> labels(m);
    for (int i = 0; i < m; ++i) labels[i] = set.sample(i).label;

    WeakSearchResult best;
    best.error = 2.0;
    for (int fi = first; fi < last; ++fi) {
        for (int i = 0; i < m; ++i) values[i] = set.feature_value(pool[fi], i);
        ThresholdChoice c = sweep_threshold(values, labels, weights);
        if (c.error < best.error) {
            best.weak = {pool[fi], c.threshold, c.polarity, 0.0};
            best.error = c.error;
            best.feature_index = fi;
        }
    }
    return best;
}

void check_search_inputs(std::span<const HaarFeature> pool, const TrainingSet& set,
                         std::span<const double> weights) {
    if (pool.empty()) throw ConfigError("empty feature pool");
    if (static_cast<int>(weights.size()) != set.size())
        throw DimensionError("one weight per sample required");
    if (set.count_label(1) == 0 || set.count_label(-1) == 0)
        throw ValueError("training set must contain both labels");
}

}  // namespace

namespace serial {
WeakSearchResult train_weak(std::span<const HaarFeature> pool, const TrainingSet& set,
                            std::span<const double> weights) {
    check_search_inputs(pool, set, weights);
    return search_range(pool, set, weights, 0, static_cast<int>(pool.size()));
}
}  // namespace serial

WeakSearchResult train_weak(std::span<const HaarFeature> pool, const TrainingSet& set,
                            std::span<const double> weights) {
    check_search_inputs(pool, set, weights);
    const int nf = static_cast<int>(pool.size());
    WeakSearchResult best;
    best.error = 2.0;
#pragma omp parallel
    {
        WeakSearchResult local;
        local.error = 2.0;
#pragma omp for schedule(dynamic, 64) nowait
        for (int fi = 0; fi < nf; ++fi) {
            WeakSearchResult r = search_range(pool, set, weights, fi, fi + 1);
            if (r.error < local.error ||
                (r.error == local.error && r.feature_index < local.feature_index))
                local = r;
        }
#pragma omp critical
        {
            if (local.error < best.error ||
                (local.error == best.error && local.feature_index < best.feature_index))
                best = local;
        }
    }
    return best;
}

AdaBoostTrainer::AdaBoostTrainer(const TrainingSet& set, std::span<const HaarFeature> pool)
    : set_(set), pool_(pool) {
    if (pool.empty()) throw ConfigError("empty feature pool");
    const int m = set.size();
    const int npos = set.count_label(1), nneg = set.count_label(-1);
    if (npos == 0 || nneg == 0) throw ValueError("training set must contain both labels");
    weights_.resize(m);
    for (int i = 0; i < m; ++i)
        weights_[i] = set.sample(i).label > 0 ? 0.5 / npos : 0.5 / nneg;
    scores_.assign(m, 0.0);
}

bool AdaBoostTrainer::step() {
    if (stopped_) return false;
    WeakSearchResult r = train_weak(pool_, set_, weights_);
    double eps = r.error;
    if (eps >= 0.5) {  // no stump beats chance on this distribution
        stopped_ = true;
        return false;
    }
    double eps_c = std::max(eps, kMinError);
    double alpha = 0.5 * std::log((1.0 - eps_c) / eps_c);
    r.weak.alpha = alpha;
    weaks_.push_back(r.weak);

    const int m = set_.size();
    double wsum = 0;
    for (int i = 0; i < m; ++i) {
        int h = weak_predict(r.weak, set_.feature_value(r.weak.feature, i));
        scores_[i] += alpha * h;
        weights_[i] *= std::exp(-alpha * set_.sample(i).label * h);
        wsum += weights_[i];
    }
    for (auto& w : weights_) w /= wsum;

    RoundReport rep;
    rep.feature_index = r.feature_index;
    rep.error = eps;
    rep.alpha = alpha;
    rep.bound = (rounds_.empty() ? 1.0 : rounds_.back().bound) *
                2.0 * std::sqrt(eps_c * (1.0 - eps_c));
    rep.train_error = train_error();
    rounds_.push_back(rep);

    if (eps == 0.0) stopped_ = true;  // weights degenerate to a no-op update
    return true;
}

double AdaBoostTrainer::train_error() const {
    const int m = set_.size();
    int wrong = 0;
    for (int i = 0; i < m; ++i) {
        int pred = scores_[i] >= 0.0 ? 1 : -1;
        if (pred != set_.sample(i).label) ++wrong;
    }
    return static_cast<double>(wrong) / m;
}

std::vector<WeakClassifier> adaboost(const TrainingSet& set,
                                     std::span<const HaarFeature> pool, int rounds,
                                     std::vector<RoundReport>* reports) {
    if (rounds < 1) throw ValueError("round count must be >= 1");
    AdaBoostTrainer t(set, pool);
    for (int r = 0; r < rounds && t.step(); ++r) {}
    if (reports) *reports = t.rounds();
    return t.weaks();
}

namespace {

std::vector<double> scores_for(const AdaBoostTrainer& t, const TrainingSet& set,
                               int label, int* count) {
    std::vector<double> out;
    for (int i = 0; i < set.size(); ++i)
        if (set.sample(i).label == label) out.push_back(t.scores()[i]);
    *count = static_cast<int>(out.size());
    return out;
}

}  // namespace

CascadeTraining train_cascade(const TrainingSet& pos, const TrainingSet& neg,
                              std::span<const HaarFeature> pool,
                              const CascadeParams& params) {
    if (params.min_detection <= 0 || params.min_detection > 1)
        throw ConfigError("min_detection outside (0,1]");
    if (params.max_stage_fp <= 0 || params.max_stage_fp >= 1)
        throw ConfigError("max_stage_fp outside (0,1)");
    if (pos.size() == 0 || neg.size() == 0)
        throw ValueError("need both positive and negative samples");
    if (pos.base() != neg.base() || pos.normalize_variance() != neg.normalize_variance())
        throw ConfigError("positive and negative sets disagree on window setup");

    TrainingSet survivors(neg.base(), neg.normalize_variance());
    for (int i = 0; i < neg.size(); ++i) survivors.add(neg.sample(i));

    CascadeTraining out;
    out.cascade.base = pos.base();
    out.cascade.normalize_variance = pos.normalize_variance();

    const int npos = pos.size();
    const int need = static_cast<int>(std::ceil(params.min_detection * npos));

    while (out.cumulative_fp > params.overall_fp_target && survivors.size() > 0 &&
           static_cast<int>(out.cascade.stages.size()) < params.max_stages) {
        const int stage_idx = static_cast<int>(out.cascade.stages.size());
        TrainingSet stage_set(pos.base(), pos.normalize_variance());
        for (int i = 0; i < pos.size(); ++i) stage_set.add(pos.sample(i));
        for (int i = 0; i < survivors.size(); ++i) stage_set.add(survivors.sample(i));

        AdaBoostTrainer trainer(stage_set, pool);
        double threshold = 0, detection = 0, fp = 1;
        for (;;) {
            bool added = trainer.step();
            if (!added && trainer.weaks().empty())
                throw TrainingError("no stump beats chance", stage_idx);

            double alpha_sum = 0;
            for (const auto& w : trainer.weaks()) alpha_sum += w.alpha;
            int cp = 0, cn = 0;
            std::vector<double> ps = scores_for(trainer, stage_set, 1, &cp);
            std::vector<double> ns = scores_for(trainer, stage_set, -1, &cn);
            std::sort(ps.begin(), ps.end(), std::greater<>());

            threshold = std::min(0.5 * alpha_sum, ps[need - 1]);
            int hit = 0;
            for (double s : ps)
                if (s >= threshold) ++hit;
            detection = static_cast<double>(hit) / cp;
            int fps = 0;
            for (double s : ns)
                if (s >= threshold) ++fps;
            fp = static_cast<double>(fps) / cn;

            if (fp <= params.max_stage_fp) break;
            if (trainer.stopped() ||
                static_cast<int>(trainer.weaks().size()) >= params.max_weaks_per_stage)
                throw TrainingError("stage cannot reach its target rates", stage_idx);
        }

        out.cascade.stages.push_back({trainer.weaks(), threshold});
        out.cumulative_fp *= fp;

        TrainingSet next(neg.base(), neg.normalize_variance());
        for (int i = 0; i < survivors.size(); ++i) {
            int idx = pos.size() + i;  // survivor order inside stage_set
            if (trainer.scores()[idx] >= threshold) next.add(survivors.sample(i));
        }
        survivors = std::move(next);

        out.stages.push_back({static_cast<int>(trainer.weaks().size()), threshold,
                              detection, fp, survivors.size()});
    }
    return out;
}

double window_inv_norm(const Cascade& c, const IntegralImage& ii,
                       const IntegralImage& ii_sq, const Rect& window) {
    const double area = static_cast<double>(window.w) * window.h;
    double denom = area;
    if (c.normalize_variance) {
        double m = static_cast<double>(rect_sum(ii, window)) / area;
        double var = static_cast<double>(rect_sum(ii_sq, window)) / area - m * m;
        denom *= var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return 1.0 / denom;
}

WindowDecision classify_window(const Cascade& c, const IntegralImage& ii,
                               const IntegralImage& ii_sq, const Rect& window,
                               double scale) {
    if (c.stages.empty()) throw StateError("cascade has no stages");
    const double inv_norm = window_inv_norm(c, ii, ii_sq, window);
    WindowDecision d;
    for (const Stage& st : c.stages) {
        double sum = 0;
        for (const WeakClassifier& w : st.weaks) {
            double v = static_cast<double>(eval_feature_raw(ii, w.feature, window, scale)) *
                       inv_norm;
            sum += w.alpha * weak_predict(w, v);
        }
        ++d.stages_evaluated;
        d.score = sum - st.threshold;
        if (sum < st.threshold) return d;
    }
    d.is_face = true;
    return d;
}

void save_cascade(const Cascade& c, const std::filesystem::path& path) {
    if (c.stages.empty()) throw StateError("refusing to save an empty cascade");
    nlohmann::json j;
    j["version"] = 1;
    j["base"] = c.base;
    j["normalization"] = c.normalize_variance;
    j["stages"] = nlohmann::json::array();
    for (const Stage& st : c.stages) {
        nlohmann::json js;
        js["threshold"] = st.threshold;
        js["weaks"] = nlohmann::json::array();
        for (const WeakClassifier& w : st.weaks) {
            js["weaks"].push_back({{"kind", haar_kind_name(w.feature.kind)},
                                   {"x", w.feature.rect.x},
                                   {"y", w.feature.rect.y},
                                   {"w", w.feature.rect.w},
                                   {"h", w.feature.rect.h},
                                   {"threshold", w.threshold},
                                   {"polarity", w.polarity},
                                   {"alpha", w.alpha}});
        }
        j["stages"].push_back(std::move(js));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write cascade file: " + path.string());
    out << j.dump(2) << '\n';
    if (!out.flush()) throw IoError("failed writing cascade file: " + path.string());
}

Cascade load_cascade(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open cascade file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("cascade file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("version").get<int>() != 1)
            throw FormatError("unsupported cascade version");
        Cascade c;
        c.base = j.at("base").get<int>();
        c.normalize_variance = j.at("normalization").get<bool>();
        if (c.base < 8) throw FormatError("cascade base window too small");
        for (const auto& js : j.at("stages")) {
            Stage st;
            st.threshold = js.at("threshold").get<double>();
            for (const auto& jw : js.at("weaks")) {
                WeakClassifier w;
                w.feature.kind = haar_kind_from_name(jw.at("kind").get<std::string>());
                w.feature.rect = {jw.at("x").get<int>(), jw.at("y").get<int>(),
                                  jw.at("w").get<int>(), jw.at("h").get<int>()};
                w.threshold = jw.at("threshold").get<double>();
                w.polarity = jw.at("polarity").get<int>();
                w.alpha = jw.at("alpha").get<double>();
                if (w.polarity != 1 && w.polarity != -1)
                    throw FormatError("weak polarity must be +1 or -1");
                if (w.alpha < 0) throw FormatError("weak alpha must be non-negative");
                const Rect& r = w.feature.rect;
                int kw = 0, kh = 0;
                haar_splits(w.feature.kind, &kw, &kh);
                if (r.x < 0 || r.y < 0 || r.w < kw || r.h < kh ||
                    r.x + r.w > c.base || r.y + r.h > c.base ||
                    r.w % kw != 0 || r.h % kh != 0)
                    throw FormatError("weak feature does not fit the base window");
                st.weaks.push_back(w);
            }
            if (st.weaks.empty()) throw FormatError("stage without weak classifiers");
            c.stages.push_back(std::move(st));
        }
        if (c.stages.empty()) throw FormatError("cascade without stages");
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("cascade file missing field: ") + e.what());
    }
}

}  // namespace facekit

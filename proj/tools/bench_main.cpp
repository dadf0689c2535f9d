// Compares the OpenMP kernels against their serial reference twins and
// verifies that both produce identical results while timing them.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "facekit/boosting.hpp"
#include "facekit/detector.hpp"
#include "facekit/haar.hpp"
#include "facekit/image.hpp"
#include "facekit/linalg.hpp"

using namespace facekit;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = Clock::now();
        fn();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-22s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   %s\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "identical" : "MISMATCH");
}

GrayImage random_image(int w, int h, std::mt19937_64& rng) {
    GrayImage img(w, h);
    std::uniform_int_distribution<int> d(0, 255);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<uint8_t>(d(rng));
    return img;
}

void bench_integral(std::mt19937_64& rng) {
    GrayImage img = random_image(1920, 1080, rng);
    IntegralImage a(1, 1), b(1, 1);
    double ts = time_best_of(5, [&] { a = serial::integral(img); });
    double tp = time_best_of(5, [&] { b = integral(img); });
    bool same = true;
    for (int y = 0; y < img.height() && same; ++y)
        for (int x = 0; x < img.width(); ++x)
            if (a.at(x, y) != b.at(x, y)) {
                same = false;
                break;
            }
    report("integral 1920x1080", ts, tp, same);
}

void bench_gram(std::mt19937_64& rng) {
    Matrix c(2000, 300);
    std::uniform_real_distribution<double> d(-1, 1);
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) c(i, j) = d(rng);
    Matrix a(1, 1), b(1, 1);
    double ts = time_best_of(3, [&] { a = serial::gram(c, 1.0 / c.cols()); });
    double tp = time_best_of(3, [&] { b = gram(c, 1.0 / c.cols()); });
    bool same = std::memcmp(a.data(), b.data(),
                            sizeof(double) * a.rows() * a.cols()) == 0;
    report("gram 2000x300", ts, tp, same);
}

void bench_weak_search(std::mt19937_64& rng) {
    TrainingSet set(24, true);
    std::uniform_int_distribution<int> shade(0, 255);
    for (int s = 0; s < 200; ++s) {
        GrayImage img = random_image(24, 24, rng);
        if (s % 2 == 0)  // brighten the left half of "positives"
            for (int y = 0; y < 24; ++y)
                for (int x = 0; x < 12; ++x)
                    img.at(x, y) = static_cast<uint8_t>(std::min(255, img.at(x, y) + 60));
        set.add(img, s % 2 == 0 ? 1 : -1);
    }
    std::vector<HaarFeature> pool = enumerate_features(24);
    pool.resize(20000);
    std::vector<double> weights(set.size(), 1.0 / set.size());

    WeakSearchResult a, b;
    double ts = time_best_of(3, [&] { a = serial::train_weak(pool, set, weights); });
    double tp = time_best_of(3, [&] { b = train_weak(pool, set, weights); });
    bool same = a.feature_index == b.feature_index && a.error == b.error &&
                a.weak.threshold == b.weak.threshold &&
                a.weak.polarity == b.weak.polarity;
    report("weak search 20k feat", ts, tp, same);
}

void bench_detect(std::mt19937_64& rng) {
    // Hand-built cascade: thresholds low enough that scanning does real work.
    Cascade c;
    c.base = 24;
    std::vector<HaarFeature> pool = enumerate_features(24);
    std::mt19937_64 pick(7);
    for (int s = 0; s < 3; ++s) {
        Stage st;
        for (int w = 0; w < 4 + 4 * s; ++w) {
            WeakClassifier wk;
            wk.feature = pool[pick() % pool.size()];
            wk.threshold = 0.0;
            wk.polarity = pick() % 2 == 0 ? 1 : -1;
            wk.alpha = 1.0;
            st.weaks.push_back(wk);
        }
        st.threshold = -1.0;
        c.stages.push_back(st);
    }
    GrayImage frame = random_image(640, 480, rng);
    std::vector<Detection> a, b;
    double ts = time_best_of(3, [&] { a = serial::detect(frame, c); });
    double tp = time_best_of(3, [&] { b = detect(frame, c); });
    bool same = a.size() == b.size();
    for (size_t i = 0; same && i < a.size(); ++i)
        same = a[i].rect == b[i].rect && a[i].score == b[i].score;
    report("detect 640x480", ts, tp, same);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP\n");
#endif
    std::mt19937_64 rng(42);
    bench_integral(rng);
    bench_gram(rng);
    bench_weak_search(rng);
    bench_detect(rng);
    return 0;
}

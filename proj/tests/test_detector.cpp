#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "facekit/detector.hpp"
#include "facekit/errors.hpp"
#include "testutil.hpp"

using namespace facekit;

namespace {

// Naive re-statement of greedy suppression for cross-checking.
std::vector<Detection> nms_reference(const std::vector<Detection>& dets, double thr) {
    std::vector<int> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dets[a].score > dets[b].score; });
    std::vector<Detection> kept;
    for (int i : order) {
        bool ok = true;
        for (const Detection& k : kept)
            ok = ok && iou(dets[i].rect, k.rect) <= thr;
        if (ok) kept.push_back(dets[i]);
    }
    return kept;
}

int count_overlapping(const std::vector<Detection>& dets, const Rect& target,
                      double min_iou) {
    int n = 0;
    for (const Detection& d : dets) n += iou(d.rect, target) >= min_iou;
    return n;
}

// One cascade shared by the planting tests; training it once keeps the
// binary quick.
const Cascade& box_cascade() {
    static const Cascade c = testutil::plant_recovery_cascade(97);
    return c;
}

bool same_detections(const std::vector<Detection>& a, const std::vector<Detection>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (!(a[i].rect.x == b[i].rect.x && a[i].rect.y == b[i].rect.y &&
              a[i].rect.w == b[i].rect.w && a[i].rect.h == b[i].rect.h))
            return false;
        if (a[i].score != b[i].score || a[i].scale != b[i].scale) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("iou hand cases") {
    Rect a{0, 0, 10, 10};
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, {20, 20, 10, 10}) == 0.0);
    CHECK(iou(a, {10, 0, 10, 10}) == 0.0);  // edge contact is not overlap
    CHECK(iou(a, {5, 0, 10, 10}) == doctest::Approx(50.0 / 150.0));
    CHECK(iou(a, {2, 2, 5, 5}) == doctest::Approx(25.0 / 100.0));
    CHECK(iou({0, 0, 0, 0}, {0, 0, 0, 0}) == 0.0);  // degenerate area
    CHECK(iou(a, {5, 5, 10, 10}) == doctest::Approx(25.0 / 175.0));
}

TEST_CASE("suppression matches the naive reference on random candidate sets") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> pos(0, 150), sz(10, 50);
    std::uniform_real_distribution<double> sc(0.0, 1.0);
    for (double thr : {0.2, 0.3, 0.5, 0.8}) {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<Detection> dets;
            for (int i = 0; i < 60; ++i)
                dets.push_back({{pos(rng), pos(rng), sz(rng), sz(rng)}, sc(rng), 1.0});
            std::vector<Detection> got = nms(dets, thr);
            std::vector<Detection> want = nms_reference(dets, thr);
            CHECK(same_detections(got, want));
            // survivors are mutually compatible...
            for (size_t i = 0; i < got.size(); ++i)
                for (size_t j = i + 1; j < got.size(); ++j)
                    CHECK(iou(got[i].rect, got[j].rect) <= thr);
            // ...and every dropped candidate conflicts with a better survivor
            for (const Detection& d : dets) {
                bool kept = false;
                for (const Detection& k : got)
                    kept = kept || (k.rect.x == d.rect.x && k.rect.y == d.rect.y &&
                                    k.rect.w == d.rect.w && k.rect.h == d.rect.h &&
                                    k.score == d.score);
                if (kept) continue;
                bool conflicted = false;
                for (const Detection& k : got)
                    conflicted = conflicted ||
                                 (iou(k.rect, d.rect) > thr && k.score >= d.score);
                CHECK(conflicted);
            }
        }
    }
}

TEST_CASE("suppression keeps the best of a cluster plus isolated candidates") {
    std::vector<Detection> dets = {
        {{0, 0, 20, 20}, 0.5, 1.0},
        {{2, 2, 20, 20}, 0.9, 1.0},  // cluster winner
        {{4, 0, 20, 20}, 0.7, 1.0},
        {{100, 100, 20, 20}, 0.1, 1.0},  // far away, survives on its own
    };
    std::vector<Detection> kept = nms(dets, 0.3);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].score == 0.9);
    CHECK(kept[0].rect.x == 2);
    CHECK(kept[1].score == 0.1);
}

TEST_CASE("suppression validates its threshold and passes empty sets through") {
    CHECK_THROWS_AS(nms({}, 0.0), ValueError);
    CHECK_THROWS_AS(nms({}, 1.0), ValueError);
    CHECK_THROWS_AS(nms({}, -0.5), ValueError);
    CHECK(nms({}, 0.3).empty());
}

TEST_CASE("a planted pattern is recovered as a single detection") {
    const Cascade& c = box_cascade();
    std::mt19937_64 rng(103);
    GrayImage frame = testutil::noise_image(320, 240, rng);
    GrayImage target = testutil::box_pattern(48);
    testutil::plant(&frame, target, 100, 60);
    Rect truth{100, 60, 48, 48};

    std::vector<Detection> dets = detect(frame, c);
    CHECK(count_overlapping(dets, truth, 0.5) == 1);
    for (const Detection& d : dets) {
        CHECK(d.rect.x >= 0);
        CHECK(d.rect.y >= 0);
        CHECK(d.rect.x + d.rect.w <= frame.width());
        CHECK(d.rect.y + d.rect.h <= frame.height());
        CHECK(d.rect.w == d.rect.h);
    }
}

TEST_CASE("two separated plants are both recovered") {
    const Cascade& c = box_cascade();
    std::mt19937_64 rng(107);
    GrayImage frame = testutil::noise_image(320, 240, rng);
    testutil::plant(&frame, testutil::box_pattern(24), 20, 20);
    testutil::plant(&frame, testutil::box_pattern(48), 200, 140);

    std::vector<Detection> dets = detect(frame, c);
    CHECK(count_overlapping(dets, {20, 20, 24, 24}, 0.5) == 1);
    CHECK(count_overlapping(dets, {200, 140, 48, 48}, 0.5) == 1);
}

TEST_CASE("detection geometry follows the scale ladder and stride grid") {
    const Cascade& c = box_cascade();
    std::mt19937_64 rng(109);
    GrayImage frame = testutil::noise_image(320, 240, rng);
    testutil::plant(&frame, testutil::box_pattern(48), 64, 64);

    DetectParams p;
    std::vector<Detection> dets = detect(frame, c, p);
    REQUIRE(!dets.empty());
    for (const Detection& d : dets) {
        // the window side must come from base * step^k
        double scale = 1.0;
        int side = c.base;
        while (side < d.rect.w) {
            scale *= p.scale_step;
            side = static_cast<int>(std::lround(c.base * scale));
        }
        CHECK(side == d.rect.w);
        CHECK(d.scale == doctest::Approx(scale));
        int stride = std::max(1, static_cast<int>(std::lround(p.stride_factor * side)));
        CHECK(d.rect.x % stride == 0);
        CHECK(d.rect.y % stride == 0);
    }
}

TEST_CASE("detection is deterministic and the serial scan agrees") {
    const Cascade& c = box_cascade();
    std::mt19937_64 rng(113);
    GrayImage frame = testutil::noise_image(200, 160, rng);
    testutil::plant(&frame, testutil::box_pattern(30), 50, 40);

    std::vector<Detection> a = detect(frame, c);
    std::vector<Detection> b = detect(frame, c);
    CHECK(same_detections(a, b));
    std::vector<Detection> s = serial::detect(frame, c);
    CHECK(same_detections(a, s));
}

TEST_CASE("detect validates frame size and scan parameters") {
    const Cascade& c = box_cascade();
    std::mt19937_64 rng(127);
    GrayImage tiny = testutil::noise_image(23, 100, rng);
    CHECK_THROWS_AS(detect(tiny, c), DimensionError);
    GrayImage ok = testutil::noise_image(64, 64, rng);
    DetectParams p;
    p.scale_step = 1.0;
    CHECK_THROWS_AS(detect(ok, c, p), ValueError);
    p = {};
    p.nms_iou = 1.5;
    CHECK_THROWS_AS(detect(ok, c, p), ValueError);
}

TEST_CASE("chip extraction resamples the detection rectangle to the face size") {
    std::mt19937_64 rng(131);
    GrayImage frame = testutil::noise_image(160, 120, rng);
    Detection d{{30, 20, 48, 48}, 1.0, 2.0};
    GrayImage chip = extract_chip(frame, d);
    REQUIRE(chip.width() == kChipSide);
    REQUIRE(chip.height() == kChipSide);
    GrayImage want = crop_resize(frame, d.rect, kChipSide, kChipSide);
    bool equal = true;
    for (int y = 0; y < chip.height(); ++y)
        for (int x = 0; x < chip.width(); ++x)
            equal = equal && chip.at(x, y) == want.at(x, y);
    CHECK(equal);
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "facekit/image.hpp"

namespace facekit {

// The five upright rectangle features. Layout conventions (b = black, w = white):
//   EdgeVertical    [b|w]      two columns
//   EdgeHorizontal  [b/w]      two rows
//   LineVertical    [w|b|w]    three columns
//   LineHorizontal  [w/b/w]    three rows
//   FourSquare      [b|w / w|b]
enum class HaarKind : uint8_t {
    EdgeHorizontal,
    EdgeVertical,
    LineHorizontal,
    LineVertical,
    FourSquare,
};

const char* haar_kind_name(HaarKind k);
HaarKind haar_kind_from_name(const std::string& name);

// Number of equal splits along x and y for each kind.
void haar_splits(HaarKind k, int* kw, int* kh);

struct HaarFeature {
    HaarKind kind;
    Rect rect;  // window-relative, at the base scale
    bool operator==(const HaarFeature&) const = default;
};

// Black-rect sum minus white-rect sum, exact integer arithmetic. The feature
// is placed inside `window` scaled by `scale` (>= 1); sub-rectangle units are
// floor-scaled so the equal-area splits survive rounding.
int64_t eval_feature_raw(const IntegralImage& ii, const HaarFeature& f,
                         const Rect& window, double scale);

// Raw value divided by the window area, so thresholds transfer across scales.
double eval_feature(const IntegralImage& ii, const HaarFeature& f,
                    const Rect& window, double scale);

// Every feature of every kind/position/size fitting the base window,
// ordered by (kind, y, x, h, w).
std::vector<HaarFeature> enumerate_features(int base);

constexpr int kDefaultBaseWindow = 24;

}  // namespace facekit

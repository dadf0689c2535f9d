#include "facekit/haar.hpp"

#include <cmath>

#include "facekit/errors.hpp"

namespace facekit {

const char* haar_kind_name(HaarKind k) {
    switch (k) {
        case HaarKind::EdgeHorizontal: return "edge-horizontal";
        case HaarKind::EdgeVertical: return "edge-vertical";
        case HaarKind::LineHorizontal: return "line-horizontal";
        case HaarKind::LineVertical: return "line-vertical";
        case HaarKind::FourSquare: return "four-square";
    }
    throw ValueError("unknown HaarKind");
}

HaarKind haar_kind_from_name(const std::string& name) {
    for (HaarKind k : {HaarKind::EdgeHorizontal, HaarKind::EdgeVertical,
                       HaarKind::LineHorizontal, HaarKind::LineVertical,
                       HaarKind::FourSquare})
        if (name == haar_kind_name(k)) return k;
    throw FormatError("unknown Haar kind name: '" + name + "'");
}

void haar_splits(HaarKind k, int* kw, int* kh) {
    switch (k) {
        case HaarKind::EdgeHorizontal: *kw = 1; *kh = 2; return;
        case HaarKind::EdgeVertical: *kw = 2; *kh = 1; return;
        case HaarKind::LineHorizontal: *kw = 1; *kh = 3; return;
        case HaarKind::LineVertical: *kw = 3; *kh = 1; return;
        case HaarKind::FourSquare: *kw = 2; *kh = 2; return;
    }
    throw ValueError("unknown HaarKind");
}

int64_t eval_feature_raw(const IntegralImage& ii, const HaarFeature& f,
                         const Rect& window, double scale) {
    int kw, kh;
    haar_splits(f.kind, &kw, &kh);
    // floor(x*s) + k*floor(u*s) <= floor((x + k*u)*s) <= floor(base*s), so a
    // feature that fits the base window fits every upscaled window.
    const int uw = (int)std::floor((f.rect.w / kw) * scale);
    const int uh = (int)std::floor((f.rect.h / kh) * scale);
    const int fx = window.x + (int)std::floor(f.rect.x * scale);
    const int fy = window.y + (int)std::floor(f.rect.y * scale);
    if (uw < 1 || uh < 1 || fx + kw * uw > window.x + window.w ||
        fy + kh * uh > window.y + window.h)
        throw GeometryError("scaled feature exceeds window");

    auto sum = [&ii](int x, int y, int w, int h) {
        return rect_sum(ii, Rect{x, y, w, h});
    };

    switch (f.kind) {
        case HaarKind::EdgeVertical:
            return sum(fx, fy, uw, uh) - sum(fx + uw, fy, uw, uh);
        case HaarKind::EdgeHorizontal:
            return sum(fx, fy, uw, uh) - sum(fx, fy + uh, uw, uh);
        case HaarKind::LineVertical:
            return sum(fx + uw, fy, uw, uh) - sum(fx, fy, uw, uh) -
                   sum(fx + 2 * uw, fy, uw, uh);
        case HaarKind::LineHorizontal:
            return sum(fx, fy + uh, uw, uh) - sum(fx, fy, uw, uh) -
                   sum(fx, fy + 2 * uh, uw, uh);
        case HaarKind::FourSquare:
            return sum(fx, fy, uw, uh) + sum(fx + uw, fy + uh, uw, uh) -
                   sum(fx + uw, fy, uw, uh) - sum(fx, fy + uh, uw, uh);
    }
    throw ValueError("unknown HaarKind");
}

double eval_feature(const IntegralImage& ii, const HaarFeature& f,
                    const Rect& window, double scale) {
    return (double)eval_feature_raw(ii, f, window, scale) /
           ((double)window.w * window.h);
}

std::vector<HaarFeature> enumerate_features(int base) {
    if (base < 8) throw ValueError("base window must be at least 8");
    std::vector<HaarFeature> out;
    for (HaarKind kind : {HaarKind::EdgeHorizontal, HaarKind::EdgeVertical,
                          HaarKind::LineHorizontal, HaarKind::LineVertical,
                          HaarKind::FourSquare}) {
        int kw, kh;
        haar_splits(kind, &kw, &kh);
        for (int y = 0; y < base; ++y)
            for (int x = 0; x < base; ++x)
                for (int h = kh; y + h <= base; h += kh)
                    for (int w = kw; x + w <= base; w += kw)
                        out.push_back({kind, Rect{x, y, w, h}});
    }
    return out;
}

}  // namespace facekit

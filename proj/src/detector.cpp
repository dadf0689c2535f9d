#include "facekit/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "facekit/errors.hpp"

namespace facekit {

double iou(const Rect& a, const Rect& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.x + a.w, b.x + b.w);
    const int y1 = std::min(a.y + a.h, b.y + b.h);
    const double inter = x1 > x0 && y1 > y0
                             ? static_cast<double>(x1 - x0) * (y1 - y0)
                             : 0.0;
    const double uni =
        static_cast<double>(a.w) * a.h + static_cast<double>(b.w) * b.h - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
    if (iou_threshold <= 0.0 || iou_threshold >= 1.0)
        throw ValueError("iou threshold outside (0,1)");
    std::vector<int> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return dets[a].score > dets[b].score;
    });
    std::vector<Detection> kept;
    for (int i : order) {
        bool drop = false;
        for (const Detection& k : kept)
            if (iou(dets[i].rect, k.rect) > iou_threshold) {
                drop = true;
                break;
            }
        if (!drop) kept.push_back(dets[i]);
    }
    return kept;
}

namespace {

struct ScalePlan {
    double scale;
    int side;
    int stride;
};

std::vector<ScalePlan> plan_scales(const GrayImage& frame, const Cascade& c,
                                   const DetectParams& p) {
    if (p.scale_step <= 1.0) throw ValueError("scale_step must be > 1");
    if (frame.width() < c.base || frame.height() < c.base)
        throw DimensionError("frame smaller than the base window");
    std::vector<ScalePlan> plans;
    const int limit = std::min(frame.width(), frame.height());
    for (double scale = 1.0;; scale *= p.scale_step) {
        int side = static_cast<int>(std::lround(c.base * scale));
        if (side > limit) break;
        int stride = std::max(1, static_cast<int>(std::lround(p.stride_factor * side)));
        plans.push_back({scale, side, stride});
    }
    return plans;
}

std::vector<Detection> scan_row(const Cascade& c, const IntegralImage& ii,
                                const IntegralImage& ii_sq, const ScalePlan& sp,
                                int y, int frame_w) {
    std::vector<Detection> out;
    for (int x = 0; x + sp.side <= frame_w; x += sp.stride) {
        Rect win{x, y, sp.side, sp.side};
        WindowDecision d = classify_window(c, ii, ii_sq, win, sp.scale);
        if (d.is_face) out.push_back({win, d.score, sp.scale});
    }
    return out;
}

}  // namespace

std::vector<Detection> detect(const GrayImage& frame, const Cascade& c,
                              const DetectParams& params) {
    const std::vector<ScalePlan> plans = plan_scales(frame, c, params);
    const IntegralImage ii = integral(frame);
    const IntegralImage ii_sq = integral_squared(frame);

    std::vector<Detection> all;
    for (const ScalePlan& sp : plans) {
        std::vector<int> ys;
        for (int y = 0; y + sp.side <= frame.height(); y += sp.stride) ys.push_back(y);
        std::vector<std::vector<Detection>> rows(ys.size());
#pragma omp parallel for schedule(dynamic, 4)
        for (int i = 0; i < static_cast<int>(ys.size()); ++i)
            rows[i] = scan_row(c, ii, ii_sq, sp, ys[i], frame.width());
        for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
    }
    return nms(std::move(all), params.nms_iou);
}

namespace serial {
std::vector<Detection> detect(const GrayImage& frame, const Cascade& c,
                              const DetectParams& params) {
    const std::vector<ScalePlan> plans = plan_scales(frame, c, params);
    const IntegralImage ii = serial::integral(frame);
    const IntegralImage ii_sq = serial::integral_squared(frame);

    std::vector<Detection> all;
    for (const ScalePlan& sp : plans)
        for (int y = 0; y + sp.side <= frame.height(); y += sp.stride) {
            std::vector<Detection> row =
                scan_row(c, ii, ii_sq, sp, y, frame.width());
            all.insert(all.end(), row.begin(), row.end());
        }
    return nms(std::move(all), params.nms_iou);
}
}  // namespace serial

GrayImage extract_chip(const GrayImage& frame, const Detection& d) {
    return crop_resize(frame, d.rect);
}

}  // namespace facekit

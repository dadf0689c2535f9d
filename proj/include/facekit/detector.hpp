#pragma once

#include <vector>

#include "facekit/boosting.hpp"
#include "facekit/image.hpp"

namespace facekit {

struct DetectParams {
    double scale_step = 1.25;
    double stride_factor = 0.05;  // stride = max(1, round(factor * window side))
    double nms_iou = 0.3;
};

struct Detection {
    Rect rect;
    double score = 0.0;  // final-stage margin
    double scale = 1.0;
};

double iou(const Rect& a, const Rect& b);

// Greedy suppression: sort by score descending (earlier candidate wins ties),
// keep the head, drop followers overlapping it above the threshold.
std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold);

// Multi-scale sliding-window scan. Candidates are gathered in (scale, y, x)
// order regardless of thread count, then merged by NMS.
std::vector<Detection> detect(const GrayImage& frame, const Cascade& c,
                              const DetectParams& params = {});
namespace serial {
std::vector<Detection> detect(const GrayImage& frame, const Cascade& c,
                              const DetectParams& params = {});
}

GrayImage extract_chip(const GrayImage& frame, const Detection& d);

}  // namespace facekit

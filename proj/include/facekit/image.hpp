#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace facekit {

struct Rect {
    int x = 0, y = 0, w = 0, h = 0;
    bool operator==(const Rect&) const = default;
};

// 8-bit luminance raster, row-major, origin top-left.
class GrayImage {
  public:
    GrayImage() = default;
    GrayImage(int width, int height, uint8_t fill = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    uint8_t at(int x, int y) const { return data_[(size_t)y * width_ + x]; }
    uint8_t& at(int x, int y) { return data_[(size_t)y * width_ + x]; }
    const std::vector<uint8_t>& data() const { return data_; }
    std::vector<uint8_t>& data() { return data_; }
    bool contains(const Rect& r) const;

    bool operator==(const GrayImage&) const = default;

  private:
    int width_ = 0, height_ = 0;
    std::vector<uint8_t> data_;
};

// Summed-area table, same dimensions as the source; lookups left/above the
// image substitute 0. 64-bit entries hold saturated 4096x4096 8-bit sums.
class IntegralImage {
  public:
    IntegralImage() = default;
    IntegralImage(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    int64_t at(int x, int y) const { return table_[(size_t)y * width_ + x]; }
    int64_t& at(int x, int y) { return table_[(size_t)y * width_ + x]; }

  private:
    int width_ = 0, height_ = 0;
    std::vector<int64_t> table_;
};

constexpr int kChipSide = 100;
constexpr int kFaceVectorLength = kChipSide * kChipSide;

// Column-major scan of a 100x100 chip, intensities as reals.
using FaceVector = std::vector<double>;

GrayImage load_gray(const std::filesystem::path& path);
void save_pgm(const GrayImage& img, const std::filesystem::path& path);
void save_png(const GrayImage& img, const std::filesystem::path& path);

uint8_t rgb_to_luma(uint8_t r, uint8_t g, uint8_t b);

// Crop r out of img and bilinearly resample to out_w x out_h (face chip size
// by default). An exact-size rect copies pixels unchanged.
GrayImage crop_resize(const GrayImage& img, const Rect& r,
                      int out_w = kChipSide, int out_h = kChipSide);

IntegralImage integral(const GrayImage& img);
IntegralImage integral_squared(const GrayImage& img);
int64_t rect_sum(const IntegralImage& ii, const Rect& r);

FaceVector flatten(const GrayImage& img);
GrayImage reshape(const FaceVector& v, int width = kChipSide, int height = kChipSide);

GrayImage equalize_hist(const GrayImage& img);

namespace serial {
// Single-pass recurrence kept as the reference for the parallel two-pass table.
IntegralImage integral(const GrayImage& img);
IntegralImage integral_squared(const GrayImage& img);
}  // namespace serial

}  // namespace facekit

#include "facekit/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "facekit/errors.hpp"

namespace facekit {

GrayImage::GrayImage(int width, int height, uint8_t fill)
    : width_(width), height_(height) {
    if (width <= 0 || height <= 0)
        throw DimensionError("image dimensions must be positive");
    data_.assign((size_t)width * height, fill);
}

bool GrayImage::contains(const Rect& r) const {
    return r.w >= 1 && r.h >= 1 && r.x >= 0 && r.y >= 0 && r.x + r.w <= width_ &&
           r.y + r.h <= height_;
}

IntegralImage::IntegralImage(int width, int height)
    : width_(width), height_(height) {
    table_.assign((size_t)width * height, 0);
}

uint8_t rgb_to_luma(uint8_t r, uint8_t g, uint8_t b) {
    return (uint8_t)std::lround(0.299 * r + 0.587 * g + 0.114 * b);
}

namespace {

GrayImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5") throw FormatError("not a binary PGM (P5): " + path.string());
    auto next_int = [&in, &path]() {
        // Skip whitespace and '#' comment lines between header tokens.
        int c = in.get();
        while (c != EOF && (std::isspace(c) || c == '#')) {
            if (c == '#')
                while (c != EOF && c != '\n') c = in.get();
            c = in.get();
        }
        if (c == EOF) throw FormatError("truncated PGM header: " + path.string());
        in.unget();
        long v;
        in >> v;
        if (!in) throw FormatError("bad PGM header: " + path.string());
        return v;
    };
    long w = next_int(), h = next_int(), maxval = next_int();
    if (w <= 0 || h <= 0) throw FormatError("bad PGM dimensions: " + path.string());
    if (maxval <= 0 || maxval > 255)
        throw FormatError("unsupported PGM maxval: " + path.string());
    in.get();  // single whitespace after maxval
    GrayImage img((int)w, (int)h);
    in.read(reinterpret_cast<char*>(img.data().data()), (std::streamsize)(w * h));
    if (in.gcount() != (std::streamsize)(w * h))
        throw FormatError("truncated PGM data: " + path.string());
    return img;
}

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

GrayImage load_png_file(const std::filesystem::path& path) {
    PngReadCloser ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) throw IoError("cannot open " + path.string());
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, ctx.fp) != 8 || png_sig_cmp(sig, 0, 8))
        throw FormatError("not a PNG file: " + path.string());
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("libpng init failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("libpng init failed");
    if (setjmp(png_jmpbuf(ctx.png)))
        throw FormatError("corrupt PNG: " + path.string());
    png_init_io(ctx.png, ctx.fp);
    png_set_sig_bytes(ctx.png, 8);
    png_read_info(ctx.png, ctx.info);

    png_uint_32 w, h;
    int bit_depth, color_type;
    png_get_IHDR(ctx.png, ctx.info, &w, &h, &bit_depth, &color_type, nullptr,
                 nullptr, nullptr);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (bit_depth == 16) png_set_strip_16(ctx.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    int channels = png_get_channels(ctx.png, ctx.info);
    std::vector<unsigned char> row((size_t)w * channels);
    GrayImage img((int)w, (int)h);
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(ctx.png, row.data(), nullptr);
        for (png_uint_32 x = 0; x < w; ++x) {
            const unsigned char* px = &row[(size_t)x * channels];
            uint8_t v;
            switch (channels) {
                case 1: v = px[0]; break;
                case 2: v = px[0]; break;  // gray + alpha
                case 3:
                case 4: v = rgb_to_luma(px[0], px[1], px[2]); break;
                default:
                    throw FormatError("unsupported PNG channel count: " + path.string());
            }
            img.at((int)x, (int)y) = v;
        }
    }
    return img;
}

}  // namespace

GrayImage load_gray(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm") return load_pgm(path);
    if (ext == ".png") return load_png_file(path);
    throw FormatError("unsupported raster format: " + path.string());
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data().data()),
              (std::streamsize)img.data().size());
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {
struct PngWriteCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriteCloser() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};
}  // namespace

void save_png(const GrayImage& img, const std::filesystem::path& path) {
    PngWriteCloser ctx;
    ctx.fp = std::fopen(path.c_str(), "wb");
    if (!ctx.fp) throw IoError("cannot write " + path.string());
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("libpng init failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("libpng init failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw IoError("PNG write failed: " + path.string());
    png_init_io(ctx.png, ctx.fp);
    png_set_IHDR(ctx.png, ctx.info, (png_uint_32)img.width(),
                 (png_uint_32)img.height(), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    for (int y = 0; y < img.height(); ++y)
        png_write_row(ctx.png, const_cast<png_bytep>(&img.data()[(size_t)y * img.width()]));
    png_write_end(ctx.png, nullptr);
}

GrayImage crop_resize(const GrayImage& img, const Rect& r, int out_w, int out_h) {
    if (!img.contains(r))
        throw BoundsError("crop rect out of image bounds");
    GrayImage out(out_w, out_h);
    if (r.w == out_w && r.h == out_h) {
        for (int y = 0; y < out_h; ++y)
            for (int x = 0; x < out_w; ++x) out.at(x, y) = img.at(r.x + x, r.y + y);
        return out;
    }
    const double sx = (double)r.w / out_w;
    const double sy = (double)r.h / out_h;
    for (int oy = 0; oy < out_h; ++oy) {
        // Pixel-center mapping; degenerates to identity when sizes match.
        double fy = (oy + 0.5) * sy - 0.5;
        double cy = std::clamp(fy, 0.0, (double)(r.h - 1));
        int y0 = (int)cy;
        int y1 = std::min(y0 + 1, r.h - 1);
        double wy = cy - y0;
        for (int ox = 0; ox < out_w; ++ox) {
            double fx = (ox + 0.5) * sx - 0.5;
            double cx = std::clamp(fx, 0.0, (double)(r.w - 1));
            int x0 = (int)cx;
            int x1 = std::min(x0 + 1, r.w - 1);
            double wx = cx - x0;
            double v = (1 - wy) * ((1 - wx) * img.at(r.x + x0, r.y + y0) +
                                   wx * img.at(r.x + x1, r.y + y0)) +
                       wy * ((1 - wx) * img.at(r.x + x0, r.y + y1) +
                             wx * img.at(r.x + x1, r.y + y1));
            out.at(ox, oy) = (uint8_t)std::clamp(std::lround(v), 0L, 255L);
        }
    }
    return out;
}

namespace {

template <typename PixelFn>
IntegralImage integral_two_pass(const GrayImage& img, PixelFn px) {
    const int w = img.width(), h = img.height();
    IntegralImage ii(w, h);
    // Pass 1: per-row prefix sums, rows independent.
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        int64_t run = 0;
        for (int x = 0; x < w; ++x) {
            run += px(img.at(x, y));
            ii.at(x, y) = run;
        }
    }
    // Pass 2: per-column accumulation, columns independent.
#pragma omp parallel for schedule(static)
    for (int x = 0; x < w; ++x) {
        int64_t run = 0;
        for (int y = 0; y < h; ++y) {
            run += ii.at(x, y);
            ii.at(x, y) = run;
        }
    }
    return ii;
}

template <typename PixelFn>
IntegralImage integral_recurrence(const GrayImage& img, PixelFn px) {
    const int w = img.width(), h = img.height();
    IntegralImage ii(w, h);
    for (int y = 0; y < h; ++y) {
        int64_t row = 0;
        for (int x = 0; x < w; ++x) {
            row += px(img.at(x, y));
            ii.at(x, y) = row + (y > 0 ? ii.at(x, y - 1) : 0);
        }
    }
    return ii;
}

}  // namespace

IntegralImage integral(const GrayImage& img) {
    return integral_two_pass(img, [](uint8_t v) { return (int64_t)v; });
}

IntegralImage integral_squared(const GrayImage& img) {
    return integral_two_pass(img, [](uint8_t v) { return (int64_t)v * v; });
}

namespace serial {
IntegralImage integral(const GrayImage& img) {
    return integral_recurrence(img, [](uint8_t v) { return (int64_t)v; });
}
IntegralImage integral_squared(const GrayImage& img) {
    return integral_recurrence(img, [](uint8_t v) { return (int64_t)v * v; });
}
}  // namespace serial

int64_t rect_sum(const IntegralImage& ii, const Rect& r) {
    if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x + r.w > ii.width() ||
        r.y + r.h > ii.height())
        throw BoundsError("rect_sum rect out of bounds");
    const int x0 = r.x - 1, y0 = r.y - 1;
    const int x1 = r.x + r.w - 1, y1 = r.y + r.h - 1;
    int64_t a = (x0 >= 0 && y0 >= 0) ? ii.at(x0, y0) : 0;
    int64_t b = (y0 >= 0) ? ii.at(x1, y0) : 0;
    int64_t c = (x0 >= 0) ? ii.at(x0, y1) : 0;
    int64_t d = ii.at(x1, y1);
    return d + a - b - c;
}

FaceVector flatten(const GrayImage& img) {
    if (img.width() != kChipSide || img.height() != kChipSide)
        throw DimensionError("flatten expects a 100x100 chip");
    FaceVector v((size_t)kFaceVectorLength);
    size_t i = 0;
    for (int x = 0; x < kChipSide; ++x)
        for (int y = 0; y < kChipSide; ++y) v[i++] = img.at(x, y);
    return v;
}

GrayImage reshape(const FaceVector& v, int width, int height) {
    if ((size_t)width * height != v.size())
        throw DimensionError("reshape length mismatch");
    GrayImage img(width, height);
    size_t i = 0;
    for (int x = 0; x < width; ++x)
        for (int y = 0; y < height; ++y)
            img.at(x, y) = (uint8_t)std::clamp(std::lround(v[i++]), 0L, 255L);
    return img;
}

GrayImage equalize_hist(const GrayImage& img) {
    size_t hist[256] = {0};
    for (uint8_t v : img.data()) ++hist[v];
    const double total = (double)img.data().size();
    uint8_t lut[256];
    size_t cum = 0;
    for (int i = 0; i < 256; ++i) {
        cum += hist[i];
        lut[i] = (uint8_t)std::clamp(std::lround(255.0 * (double)cum / total), 0L, 255L);
    }
    GrayImage out(img.width(), img.height());
    for (size_t i = 0; i < img.data().size(); ++i) out.data()[i] = lut[img.data()[i]];
    return out;
}

}  // namespace facekit

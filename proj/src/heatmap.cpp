#include "sasa/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sasa {
namespace {

constexpr int kCell = 24;
constexpr int kMargin = 16;
constexpr int kGlyphW = 3;
constexpr int kGlyphH = 5;
constexpr int kScale = 2;

// 3x5 digit bitmaps, rows top to bottom, 3 bits per row (msb left).
constexpr std::uint8_t kDigits[10][5] = {
    {0b111, 0b101, 0b101, 0b101, 0b111}, // 0
    {0b010, 0b110, 0b010, 0b010, 0b111}, // 1
    {0b111, 0b001, 0b111, 0b100, 0b111}, // 2
    {0b111, 0b001, 0b111, 0b001, 0b111}, // 3
    {0b101, 0b101, 0b111, 0b001, 0b001}, // 4
    {0b111, 0b100, 0b111, 0b001, 0b111}, // 5
    {0b111, 0b100, 0b111, 0b101, 0b111}, // 6
    {0b111, 0b001, 0b010, 0b010, 0b010}, // 7
    {0b111, 0b101, 0b111, 0b101, 0b111}, // 8
    {0b111, 0b101, 0b111, 0b001, 0b111}, // 9
};

void fill_rect(Image& img, int x0, int y0, int w, int h, std::uint8_t r,
               std::uint8_t g, std::uint8_t b) {
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
            std::uint8_t* px = img.at(x, y);
            px[0] = r;
            px[1] = g;
            px[2] = b;
        }
    }
}

void draw_number(Image& img, int value, int cx, int cy) {
    std::string text = std::to_string(value);
    int tw = static_cast<int>(text.size()) * (kGlyphW + 1) * kScale - kScale;
    int x = cx - tw / 2;
    int y = cy - (kGlyphH * kScale) / 2;
    for (char c : text) {
        const std::uint8_t* rows = kDigits[c - '0'];
        for (int gy = 0; gy < kGlyphH; ++gy) {
            for (int gx = 0; gx < kGlyphW; ++gx) {
                if (!(rows[gy] & (1 << (kGlyphW - 1 - gx)))) continue;
                fill_rect(img, x + gx * kScale, y + gy * kScale, kScale, kScale,
                          40, 40, 40);
            }
        }
        x += (kGlyphW + 1) * kScale;
    }
}

} // namespace

Image render_heatmap(const Mat& values, double vmax) {
    const int rows = static_cast<int>(values.rows());
    const int cols = static_cast<int>(values.cols());
    if (rows < 1 || cols < 1) throw SemanticError("heatmap: empty matrix");
    if (!values.allFinite()) throw NumericError("heatmap: non-finite values");
    if (vmax <= 0.0) {
        vmax = values.maxCoeff();
        if (vmax <= 0.0) vmax = 1.0;
    }

    Image img;
    img.width = kMargin + cols * kCell + 1;
    img.height = kMargin + rows * kCell + 1;
    img.rgb.assign(static_cast<std::size_t>(img.width) * img.height * 3, 255);

    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            double u = std::clamp(values(i, j) / vmax, 0.0, 1.0);
            auto ch = [u](double span) {
                return static_cast<std::uint8_t>(std::lround(255.0 - span * u));
            };
            fill_rect(img, kMargin + j * kCell + 1, kMargin + i * kCell + 1,
                      kCell - 1, kCell - 1, ch(205.0), ch(155.0), ch(55.0));
        }
    }
    // Grid lines around cells keep adjacent equal colours distinguishable.
    for (int i = 0; i <= rows; ++i) {
        fill_rect(img, kMargin, kMargin + i * kCell, cols * kCell + 1, 1, 180,
                  180, 180);
    }
    for (int j = 0; j <= cols; ++j) {
        fill_rect(img, kMargin + j * kCell, kMargin, 1, rows * kCell + 1, 180,
                  180, 180);
    }
    for (int i = 0; i < rows; ++i) {
        draw_number(img, i, kMargin / 2, kMargin + i * kCell + kCell / 2);
    }
    for (int j = 0; j < cols; ++j) {
        draw_number(img, j, kMargin + j * kCell + kCell / 2, kMargin / 2);
    }
    return img;
}

void write_ppm(const std::string& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write image: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
    if (!out) throw IoError("failed writing image: " + path);
}

} // namespace sasa

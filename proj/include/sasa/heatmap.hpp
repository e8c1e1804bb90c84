#pragma once

#include "sasa/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sasa {

/// RGB raster, row-major, 3 bytes per pixel.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    std::uint8_t* at(int x, int y) { return rgb.data() + 3 * (y * width + x); }
};

/// Renders a matrix as a cell grid with row/column indices in the margins.
/// Cell colour interpolates white (0) to blue (vmax); values are clamped.
/// vmax <= 0 picks the matrix maximum (or 1 when the matrix is nonpositive).
/// Output bytes are a pure function of the inputs.
Image render_heatmap(const Mat& values, double vmax = 0.0);

/// Binary PPM (P6). Throws IoError when the file cannot be written.
void write_ppm(const std::string& path, const Image& img);

} // namespace sasa

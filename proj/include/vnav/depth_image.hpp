#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vnav/error.hpp"

namespace vnav {

enum class DepthKind { relative_inverse, metric };

// Row-major scalar field. Invalid pixels are non-finite; `valid()` is the
// implied mask.
struct DepthImage {
    int width = 0;
    int height = 0;
    DepthKind kind = DepthKind::metric;
    std::vector<double> data; // width * height, row-major, row 0 at the top

    static DepthImage constant(int width, int height, double value,
                               DepthKind kind = DepthKind::metric);

    double at(int u, int v) const { return data[static_cast<size_t>(v) * width + u]; }
    double& at(int u, int v) { return data[static_cast<size_t>(v) * width + u]; }
    bool valid(int u, int v) const { return std::isfinite(at(u, v)); }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    size_t valid_count() const;

    void validate() const;
};

// Synthetic affine disparity distortion standing in for a relative-depth
// model: d_rel = ((1/Z) - s2_true) / s1_true, then per-pixel multiplicative
// Gaussian noise (1 + sigma * xi).
struct DisparityDistortion {
    double s1_true = 1.0;
    double s2_true = 0.0;
    double noise_sigma = 0.0; // relative, unitless
    uint64_t seed = 0;

    void validate() const;
};

DepthImage distort_to_relative(const DepthImage& metric, const DisparityDistortion& d);

// Portable float map, grayscale ("Pf"), float32 payload. Invalid pixels
// round-trip as NaN.
DepthImage load_pfm(const std::string& path, DepthKind kind = DepthKind::metric);
void save_pfm(const std::string& path, const DepthImage& img);

struct DepthErrors {
    double mae = 0.0;
    double rmse = 0.0;
    size_t pixel_count = 0;
};

// MAE / RMSE over pixels valid in both images.
DepthErrors eval_depth(const DepthImage& pred, const DepthImage& gt);

} // namespace vnav

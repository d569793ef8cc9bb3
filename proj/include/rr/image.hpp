#pragma once

#include <cstddef>
#include <vector>

namespace rr {

// Row-major 2-D array of real intensities. Pixel (r, c) maps to v[r * cols + c].
struct Image {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Image() = default;
    Image(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}

    static Image zeros(int r, int c) { return Image(r, c, 0.0); }

    double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

    size_t size() const { return v.size(); }
    bool same_shape(const Image& o) const { return rows == o.rows && cols == o.cols; }

    bool operator==(const Image& o) const = default;
};

// Time-ordered grayscale frames sampled at fs_hz. All frames share one geometry
// and intensities live in [0, 1].
struct FrameSequence {
    double fs_hz = 0.0;
    std::vector<Image> frames;

    int rows() const { return frames.empty() ? 0 : frames.front().rows; }
    int cols() const { return frames.empty() ? 0 : frames.front().cols; }
    int size() const { return static_cast<int>(frames.size()); }
    double sample_period_s() const { return 1.0 / fs_hz; }
};

} // namespace rr

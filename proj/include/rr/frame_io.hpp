#pragma once

#include <string>

#include "rr/image.hpp"

namespace rr {

// Load a frame sequence from either
//  (a) a directory of .pgm / .png frames in strict lexicographic filename order, or
//  (b) a raw 8-bit grayscale file `<name>.y8` with sidecar `<name>.y8.meta`
//      holding the ASCII lines width=<int>, height=<int>, fps=<real>.
// 8-bit intensities are normalized to [0,1] by division by 255.
// fs_hz <= 0 takes the rate from the .y8 sidecar (directories then require an
// explicit rate).
FrameSequence load_sequence(const std::string& path, double fs_hz = 0.0);

// Rec.601 luma from three equally sized planes.
Image to_grayscale(const Image& r, const Image& g, const Image& b);

// Single-frame readers, exposed for tools and tests.
Image load_pgm(const std::string& path);
Image load_png_gray(const std::string& path);

void save_pgm(const Image& img, const std::string& path);

// Raw Y8 writer; quantizes with round(v * 255) clamped to [0,255] and emits
// the sidecar meta file.
void save_y8(const FrameSequence& seq, const std::string& path);

} // namespace rr

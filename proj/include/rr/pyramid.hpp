#pragma once

#include <vector>

#include "rr/image.hpp"

namespace rr {

// Separable low-pass kernel for the reduce / expand pair. weights() gives the
// full (2R+1)x(2R+1) mask; the 1-D taps sum to one and are symmetric.
struct PyramidKernel {
    std::vector<double> taps; // 2R+1 entries
    int radius = 0;

    // Burt-Adelson 5-tap kernel, a = 0.375.
    static PyramidKernel burt_adelson();

    Image weights() const;
};

// Band-pass detail levels p_0..p_{M-2} plus the low-pass residual p_{M-1}.
// Level m has size ceil(U1/2^m) x ceil(U2/2^m).
struct LaplacianStack {
    std::vector<Image> levels;

    int level_count() const { return static_cast<int>(levels.size()); }
};

// Monogenic triple per band-pass level; the residual passes through untouched.
struct RieszLevel {
    Image p, r1, r2;
};

struct RieszStack {
    std::vector<RieszLevel> bands; // levels 0..M-2
    Image residual;                // level M-1
};

// Halve (ceiling) with the kernel; borders replicate the edge sample.
Image reduce(const Image& level, const PyramidKernel& kernel);

// Upsample to target_dims; target must halve (ceiling) back to the input dims.
// Only even source offsets contribute; the factor 4 restores unit DC gain.
Image expand(const Image& level, int target_rows, int target_cols, const PyramidKernel& kernel);

LaplacianStack build_laplacian(const Image& frame, int levels, const PyramidKernel& kernel);

// Inverse of build_laplacian; reconstruction is exact up to rounding.
Image collapse(const LaplacianStack& stack, const PyramidKernel& kernel);

// Frequency-domain Riesz transform: R_i = F^-1(-j w_i / |w| . F(level)) with
// the DC bin zeroed. Periodic extension; the imaginary residue of the inverse
// transform is checked against Tol::riesz_imag_residual_rel and discarded.
std::pair<Image, Image> riesz_transform(const Image& level);

RieszStack build_riesz(const LaplacianStack& stack);

// Whole-sequence builders; parallel across frames.
std::vector<LaplacianStack> laplacian_sequence(const std::vector<Image>& frames, int levels,
                                               const PyramidKernel& kernel);
std::vector<RieszStack> riesz_sequence(const std::vector<LaplacianStack>& stacks);

} // namespace rr

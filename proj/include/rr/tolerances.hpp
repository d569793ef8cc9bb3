#pragma once

namespace rr {

// Numeric tolerance constants shared across the library.
struct Tol {
    // Unit-quaternion check before taking the quaternionic log.
    static constexpr double unit_norm = 1e-9;
    // Vector parts below this are treated as zero (log of +/- identity).
    static constexpr double tiny_vector = 1e-12;
    // Relative amplitude floor: pyramid coefficients with norm below
    // amplitude_mask_rel * max-level-amplitude carry no usable phase.
    static constexpr double amplitude_mask_rel = 1e-4;
    // Noise-adaptive part of the floor: multiples of the level's median
    // amplitude, capped so densely textured levels keep their phase pixels.
    static constexpr double amplitude_mask_median = 3.0;
    static constexpr double amplitude_mask_rel_cap = 0.25;
    // Absolute amplitude floor for degenerate (all-zero) levels.
    static constexpr double amplitude_mask_abs = 1e-12;
    // Allowed imaginary residue of the inverse FFT in the Riesz transform,
    // relative to the input level norm.
    static constexpr double riesz_imag_residual_rel = 1e-8;
};

} // namespace rr

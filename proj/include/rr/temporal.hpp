#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rr/pyramid.hpp"

namespace rr {

// Second-order Butterworth band-pass, bilinear transform of the analog
// prototype with prewarped cutoffs. One zero at DC, one at Nyquist, one
// conjugate pole pair:
//   H(z) = K (1 + z^-1)(1 - z^-1) / ((1 - p z^-1)(1 - p* z^-1))
struct BandpassDesign {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0; // numerator (b1 == 0, b2 == -b0)
    double a1 = 0.0, a2 = 0.0;           // denominator, a0 == 1
    double gain = 0.0;                   // K == b0
    std::complex<double> pole;           // p (conjugate implied)
    double f_lo_hz = 0.0, f_hi_hz = 0.0, fs_hz = 0.0;
};

BandpassDesign design_bandpass(double f_lo_hz, double f_hi_hz, double fs_hz);

// H(e^{j 2 pi f / fs}) of the realized coefficients.
std::complex<double> frequency_response(const BandpassDesign& d, double f_hz);

// Causal IIR pass, zero initial state, direct-form transposed II.
void filter_signal_inplace(std::span<double> x, const BandpassDesign& d);
std::vector<double> filter_signal(std::span<const double> x, const BandpassDesign& d);

// Strided variant for pixel series stored across frames.
void filter_strided(double* x, int n, size_t stride, const BandpassDesign& d);

// Per-pixel, per-level temporal filtering of a stack sequence, in place.
// Parallel across pixels. All stacks must share geometry.
void filter_stack_sequence(std::vector<LaplacianStack>& stacks, const BandpassDesign& d);

// Samples before ceil(fs / f_lo) are still dominated by the zero-state
// transient of the filter.
int warmup_samples(const BandpassDesign& d);

} // namespace rr

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rr/image.hpp"

namespace rr {

// Observation matrix x[m, c, n]: M level rows, C components per level
// (1 for the amplitude path, 2 for the phase path), N frames at fs_hz.
struct MotionMatrix {
    int levels = 0;   // M
    int comps = 0;    // C
    int frames = 0;   // N
    double fs_hz = 0.0;
    std::vector<double> x; // ((m * C) + c) * N + n

    MotionMatrix() = default;
    MotionMatrix(int m, int c, int n, double fs)
        : levels(m), comps(c), frames(n), fs_hz(fs),
          x(static_cast<size_t>(m) * c * n, 0.0) {}

    int channels() const { return levels * comps; }
    double* channel(int m, int c) { return x.data() + (static_cast<size_t>(m) * comps + c) * frames; }
    const double* channel(int m, int c) const {
        return x.data() + (static_cast<size_t>(m) * comps + c) * frames;
    }

    MotionMatrix slice(int start, int end) const;
};

// Concatenate the level rows of several matrices sharing C, N and fs.
MotionMatrix concat_channels(const std::vector<const MotionMatrix*>& parts);

struct EstimatorConfig {
    double f_min_hz = 0.0;
    double f_max_hz = 0.0;
    double grid_step_hz = 0.005;
    double eta = 0.0; // periodicity threshold
};

struct F0Search {
    double f0_hz = 0.0;      // grid argmax after parabolic refinement
    double f0_grid_hz = 0.0; // raw grid argmax
    int grid_index = 0;
    bool degenerate = false;   // all-zero observation
    bool short_window = false; // fewer than two periods of f_min in the window
};

// Subtract the sample mean of every (m, c) channel; the ML estimate of the
// constant term in the observation model.
void remove_channel_means(MotionMatrix& x);

// Sum over channels of |DTFT at f|^2. Assumes channel means already removed.
double periodogram_objective(const MotionMatrix& x, double f_hz);

// Grid argmax of the periodogram objective over [f_min, f_max], ties toward
// the lower frequency, then 3-point parabolic refinement on the log-objective.
// Means are removed internally. Parallel across grid frequencies.
F0Search estimate_f0(const MotionMatrix& x, const EstimatorConfig& cfg);

// a_hat[m*C + c] = (2/N) |sum_n x[m,c,n] e^{-j 2 pi f0 n Ts}| on mean-removed
// channels. f0 must stay 1/(N Ts) away from 0 and fs/2.
std::vector<double> estimate_amplitudes(const MotionMatrix& x, double f0_hz);

struct PeriodicityResult {
    double stat = 0.0;
    bool periodic = false; // stat strictly above eta
};

PeriodicityResult periodicity_test(std::span<const double> a_hat, int frames, int levels,
                                   int comps, double eta);

struct WindowingConfig {
    double window_s = 20.0;
    double rho = 0.5; // interlacing factor in [0, 1)
};

struct WindowSpan {
    int start = 0; // first frame, inclusive
    int end = 0;   // last frame, exclusive
    bool warmup = false;
};

// Fully contained windows of round(window_s * fs) frames at hop
// round(N (1 - rho)), minimum one frame. The leading windows that overlap the
// span covered by the interlaced partial windows (start + hop < N) are
// flagged warmup.
std::vector<WindowSpan> window_slicer(int total_frames, const WindowingConfig& cfg, double fs_hz);

// 95th percentile of the periodicity statistic over `trials` windows of pure
// Gaussian noise with RMS noise_sigma; the default eta when none is
// configured. When `coloring` is given the trial noise is shaped by that
// band-pass first (the motion channels are band-passed by construction, so
// their noise is concentrated in-band) and normalized back to noise_sigma.
struct BandpassDesign;
double calibrate_eta(int levels, int comps, int frames, double fs_hz, const EstimatorConfig& cfg,
                     double noise_sigma, int trials, uint64_t seed,
                     const BandpassDesign* coloring = nullptr);

} // namespace rr

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rr/estimator.hpp"
#include "rr/pyramid.hpp"
#include "rr/temporal.hpp"

namespace rr {

// One frame-to-frame quaternionic phase step of a monogenic level:
// the (i, j) components of log(qbar_n * qbar_{n-1}^-1), plus the validity
// mask (amplitude above the masking floor on both frames, not antipodal).
struct StepField {
    Image dci, dcj;
    std::vector<uint8_t> valid;
};

// Amplitude A = |q| per pixel with the level's masking floor
// max(amplitude_mask_rel * max A, amplitude_mask_abs).
Image level_amplitude(const RieszLevel& level, double* mask_floor = nullptr);

// Step at n >= 1 between consecutive frames of one level.
StepField phase_step(const RieszLevel& prev, const RieszLevel& curr);

// Initial step (n = 0): vector part of log(qbar_0).
StepField phase_step_initial(const RieszLevel& curr);

// Running sums ci[n] = sum_{k<=n} dci[k] per pixel (cj analogously).
void accumulate_steps(const StepField& step, Image& ci, Image& cj);

// Spatially averaged, amplified and filtered phase components
// y^(i)_m[n], y^(j)_m[n] for the band-pass levels m = 0..M-2.
struct PhaseSignals {
    int levels = 0; // band-pass levels only; the residual carries no phase
    int frames = 0;
    double fs_hz = 0.0;
    std::vector<double> yi, yj; // m * frames + n

    double i_at(int m, int n) const { return yi[static_cast<size_t>(m) * frames + n]; }
    double j_at(int m, int n) const { return yj[static_cast<size_t>(m) * frames + n]; }
    // Magnitude of the filtered component pair; diagnostic only.
    double magnitude_at(int m, int n) const { return std::hypot(i_at(m, n), j_at(m, n)); }
};

// Full phase path over unfiltered Laplacian stacks: per level, Riesz
// transform, phase steps, cumulative sum, temporal band-pass, amplification
// and masked spatial averaging. Levels are processed one at a time; the
// per-pixel work is parallel.
PhaseSignals extract_phase_signals(const std::vector<LaplacianStack>& stacks,
                                   const BandpassDesign& design,
                                   const std::vector<double>& alphas);

// Stack level components as an (M-1) x 2 x N observation.
MotionMatrix to_motion_matrix(const PhaseSignals& s);

// Debug dump, columns n,t_s,m,comp,value.
void dump_phase_signals(const PhaseSignals& s, const std::string& path);

} // namespace rr

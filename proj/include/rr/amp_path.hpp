#pragma once

#include <string>
#include <vector>

#include "rr/estimator.hpp"
#include "rr/pyramid.hpp"

namespace rr {

// Per-level amplification schedule plus the shared binarization threshold.
// alphas[0] == 1 anchors the scale; alphas[M-1] == 0 drops the residual.
struct AmpConfig {
    std::vector<double> alphas;
    double gamma_th = 0.0;
};

// Geometric ramp 1 .. alpha_top over levels 0..M-2, residual 0.
std::vector<double> default_alpha_schedule(int levels, double alpha_top);

// b = 1 where |gamma * alpha| >= gamma_th, else 0.
Image binarize_level(const Image& gamma_level, double alpha, double gamma_th);

// Spatially averaged binarized levels: lbar[m*N + n] in [0, 1].
struct LevelSignals {
    int levels = 0;
    int frames = 0;
    double fs_hz = 0.0;
    std::vector<double> lbar;
    std::vector<std::pair<int, int>> level_dims;

    double at(int m, int n) const { return lbar[static_cast<size_t>(m) * frames + n]; }
};

// Amplify, binarize and average every filtered level; parallel across frames.
LevelSignals extract_amp_signals(const std::vector<LaplacianStack>& filtered, const AmpConfig& cfg,
                                 double fs_hz);

// 3 x median |gamma| over detail levels of the calibration frame range
// [calib_start, calib_end).
double auto_gamma_th(const std::vector<LaplacianStack>& filtered, int calib_start, int calib_end);

// Stack levels as an M x 1 x N observation.
MotionMatrix to_motion_matrix(const LevelSignals& s);

// Debug dump, columns n,t_s,m,value.
void dump_level_signals(const LevelSignals& s, const std::string& path);

} // namespace rr

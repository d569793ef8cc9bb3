#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rr/amp_path.hpp"
#include "rr/estimator.hpp"
#include "rr/phase_path.hpp"
#include "rr/roi.hpp"

namespace rr {

enum class Method { amplitude, phase };
enum class Profile { adult, newborn };

Method method_from_string(const std::string& s);
Profile profile_from_string(const std::string& s);

// Resolved run parameters. Profile defaults:
//   adult   : band [0.19, 0.9] Hz, M = 4, W = 41, R = 3, alpha = 20
//   newborn : band [0.30, 1.1] Hz, M = 3, W = 21, R = 4, alpha = 25
// both with 20 s windows at rho = 0.5.
struct RunConfig {
    Method method = Method::phase;
    Profile profile = Profile::adult;

    double fs_hz = 0.0; // 0 = from input metadata
    int levels = 4;     // M
    double f_lo_hz = 0.19, f_hi_hz = 0.9;
    double alpha = 20.0;
    double gamma_binarize = 0.0; // amp-path threshold; 0 = auto (3 x median |gamma|)

    bool use_roi = true;
    int rois = 3;      // R
    int roi_size = 41; // W
    int downsample = 4;
    int calib_frames = 0; // 0 = one window
    int calib_offset = 0;
    int reselect_every = 0; // re-run ROI selection every K windows; 0 = once per run
    double gamma_bin = 0.05;
    double gamma_th = 0.10;

    double window_s = 20.0;
    double rho = 0.5;

    double grid_step_hz = 0.005;
    double f_min_hz = 0.0, f_max_hz = 0.0; // 0 = band edges
    double eta = -1.0;                     // < 0 = auto-calibrate
    uint64_t seed = 12345;

    void apply_profile(Profile p);
    EstimatorConfig estimator_config() const;
    WindowingConfig windowing_config() const;
    RoiConfig roi_config() const;
};

// Per-window output row.
struct RREstimate {
    int window_index = 0;
    double t_start_s = 0.0, t_end_s = 0.0;
    double f0_hat_hz = 0.0;
    double rr_bpm = 0.0;
    std::vector<double> a_hat;
    double periodicity_stat = 0.0;
    bool periodic = false;
    bool warmup = false;
    bool valid = true;            // false when every ROI is gated
    std::vector<int> kappa;       // per-ROI gate decisions (empty in full-frame mode)
};

struct RunResult {
    std::vector<RREstimate> windows;
    RoiSet rois;                      // first selection; empty in full-frame mode
    std::vector<RoiSet> roi_history;  // one entry per selection block
    double resolved_eta = 0.0;
    int invalid_windows = 0;
};

// One motion matrix per ROI (or one full-frame matrix) over the whole
// sequence, sliced and fused per window.
RunResult run_pipeline(const FrameSequence& seq, const RunConfig& cfg,
                       const std::optional<RoiSet>& fixed_rois = std::nullopt);

// Motion extraction only, full frame; used by tools and tests.
MotionMatrix extract_motion_matrix(const FrameSequence& seq, const RunConfig& cfg);

void write_results_csv(const std::vector<RREstimate>& rows, const std::string& path);

// Flat key=value config file; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);
void apply_config_entries(RunConfig& cfg, const std::map<std::string, std::string>& entries);
void write_config_echo(const RunConfig& cfg, double fs_hz, const std::string& path);

} // namespace rr

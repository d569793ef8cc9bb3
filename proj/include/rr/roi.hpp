#pragma once

#include <array>
#include <string>
#include <vector>

#include "rr/estimator.hpp"
#include "rr/image.hpp"

namespace rr {

struct RoiConfig {
    int count = 3;              // R
    int size = 41;              // W, odd
    int downsample = 4;         // D
    int calib_frames = 0;       // L; 0 = one window worth of frames
    int calib_offset = 0;       // first calibration frame
    int min_separation_px = 0;  // 0 = W
    double gamma_bin = 0.05;    // frame-difference binarization threshold
    double gamma_th = 0.10;     // average-motion gate threshold
};

struct RoiSet {
    std::vector<std::array<int, 2>> centers; // (row, col)
    Image amplitude_map;                     // interpolated per-pixel amplitude
    int size = 0;                            // W
};

// Per-pixel ML amplitude map of the first L calibration frames, downsampled by
// D (D x D block mean), interpolated back bilinearly, and peak-picked with
// non-maximum suppression. Centers are constrained so every W x W box fits.
RoiSet select_rois(const FrameSequence& seq, const RoiConfig& cfg, const EstimatorConfig& est);

// Per-pixel ML amplitude map of a calibration block: one shared f0 from the
// fused objective over all pixel channels, then per-pixel amplitudes at f0.
// Parallel across grid frequencies and pixels.
Image amplitude_map(const std::vector<Image>& frames, double fs_hz, const EstimatorConfig& est);

// Block-mean downsample to ceil(rows/D) x ceil(cols/D).
Image downsample_block_mean(const Image& img, int d);

// Bilinear interpolation of a D-downsampled map back to rows x cols,
// sample positions at block centers.
Image upsample_bilinear(const Image& small, int rows, int cols, int d);

struct GateDecision {
    std::vector<double> ibar; // average motion signal per frame of the window
    int kappa = 1;            // 0 when any ibar exceeds gamma_th
};

// Large-motion gate on raw ROI intensities over frames [start, end).
// Differences are taken inside the window only.
GateDecision gate_roi(const FrameSequence& roi_frames, int start, int end, double gamma_bin,
                      double gamma_th);

// W x W sub-video around a center.
FrameSequence extract_roi(const FrameSequence& seq, std::array<int, 2> center, int size);

struct FusedEstimate {
    F0Search search;
    std::vector<double> a_hat; // amplitudes of the admitted channels
    double stat = 0.0;
    bool periodic = false;
};

// Sum of the admitted ROIs' periodogram objectives; realized by concatenating
// the admitted observation matrices. Throws all_rois_gated when every kappa
// is zero.
FusedEstimate fused_estimate(const std::vector<const MotionMatrix*>& roi_matrices,
                             const std::vector<int>& kappas, const EstimatorConfig& cfg);

// Manifest lines r,cx,cy,W (cx = column, cy = row).
void write_roi_manifest(const RoiSet& rois, const std::string& path);
RoiSet read_roi_manifest(const std::string& path);

} // namespace rr

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rr/estimator.hpp"
#include "rr/image.hpp"

namespace rr {

enum class Pattern { gradient, gabor, blob };

Pattern pattern_from_string(const std::string& s);
const char* pattern_name(Pattern p);

// Large-motion event: the affected content shifts by +/- magnitude_px on
// alternating frames while onset_s <= t < onset_s + duration_s.
struct Distractor {
    double onset_s = 0.0;
    double duration_s = 0.0;
    double magnitude_px = 0.0;
};

struct MotionRegion {
    int x = 0, y = 0, w = 0, h = 0; // x = column, y = row
    Pattern pattern = Pattern::gabor;
    double f0_hz = 0.25;
    double amplitude_px = 1.0; // breathing displacement amplitude, <= 5
    std::optional<Distractor> distractor;
};

struct SynthSpec {
    int width = 64, height = 64;
    double fs_hz = 30.0;
    double duration_s = 60.0;
    double noise_sigma = 0.0;
    std::vector<MotionRegion> regions; // one region for generate()
};

struct GroundTruth {
    double fs_hz = 0.0;
    int frames = 0;
    std::vector<double> region_f0_hz;
    // Frame ranges [first, last] with large inter-frame motion (the jitter
    // interval plus its entry/exit transitions).
    std::vector<std::pair<int, int>> distractor_frames;
    std::vector<std::array<int, 2>> region_centers; // (row, col)
};

// Single-region generator; the pattern inside the region translates by
// d[n] = A sin(2 pi f0 n Ts) with subpixel bilinear resampling, i.i.d.
// Gaussian noise is added per pixel and the distractor, when present, shifts
// the whole frame. Bit-deterministic under a fixed seed.
FrameSequence generate(const SynthSpec& spec, uint64_t seed, GroundTruth* gt = nullptr);

// Multi-region composition on one canvas; distractors act on their own region
// only. Regions must not overlap.
FrameSequence generate_multiroi(const SynthSpec& spec, uint64_t seed, GroundTruth* gt = nullptr);

// Noise sigma hitting the requested SNR, with signal power defined as the
// mean temporal variance of the clean moving pattern over its region.
double noise_sigma_for_snr_db(const SynthSpec& spec, double snr_db);

// Flat key=value spec file plus one `region=` line per motion region:
//   region=x,y,w,h,pattern,f0_hz,amplitude_px[,onset_s,duration_s,magnitude_px]
SynthSpec read_synth_spec(const std::string& path);

// Ground-truth rows (window, f0_hz, distractor_flag) for a window slicing.
struct TruthRow {
    int window = 0;
    double f0_hz = 0.0;
    int distractor = 0;
};
std::vector<TruthRow> truth_rows(const GroundTruth& gt, const std::vector<WindowSpan>& windows);
void write_truth_csv(const std::vector<TruthRow>& rows, const std::string& path);

} // namespace rr

#pragma once

#include <vector>

#include "rr/amp_path.hpp"
#include "rr/estimator.hpp"
#include "rr/phase_path.hpp"
#include "rr/pyramid.hpp"
#include "rr/temporal.hpp"

// Serial reference implementations of the parallel kernels. Kept for
// correctness tests (results must match the OpenMP versions bit for bit)
// and as the baseline of the benchmark target. reduce() additionally uses a
// direct 2-D convolution instead of the separable passes.
namespace rr::ref {

Image reduce(const Image& level, const PyramidKernel& kernel);

std::vector<LaplacianStack> laplacian_sequence(const std::vector<Image>& frames, int levels,
                                               const PyramidKernel& kernel);

std::vector<RieszStack> riesz_sequence(const std::vector<LaplacianStack>& stacks);

void filter_stack_sequence(std::vector<LaplacianStack>& stacks, const BandpassDesign& d);

LevelSignals extract_amp_signals(const std::vector<LaplacianStack>& filtered, const AmpConfig& cfg,
                                 double fs_hz);

// Composed from the public per-step operations, one level at a time, serially.
PhaseSignals extract_phase_signals(const std::vector<LaplacianStack>& stacks,
                                   const BandpassDesign& design,
                                   const std::vector<double>& alphas);

F0Search estimate_f0(const MotionMatrix& x, const EstimatorConfig& cfg);

// Per-pixel ML amplitude map of a downsampled calibration block.
Image amplitude_map(const std::vector<Image>& frames, double fs_hz, const EstimatorConfig& cfg);

} // namespace rr::ref

// Kernel benchmark: OpenMP-parallel implementations against the serial
// reference. Usage: rr_bench [frames] [size] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rr/ref.hpp"
#include "rr/roi.hpp"
#include "rr/synth.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

template <typename F>
double time_best_ms(int repeats, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = clock_type::now();
        fn();
        const double ms = std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
        best = std::min(best, ms);
    }
    return best;
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s %10.1f ms %10.1f ms %8.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

} // namespace

int main(int argc, char** argv) {
    const int frames = argc > 1 ? std::atoi(argv[1]) : 240;
    const int size = argc > 2 ? std::atoi(argv[2]) : 96;
    const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;

#ifdef _OPENMP
    std::printf("threads: %d, video: %d frames of %dx%d, best of %d\n", omp_get_max_threads(),
                frames, size, size, repeats);
#else
    std::printf("OpenMP disabled, video: %d frames of %dx%d, best of %d\n", frames, size, size,
                repeats);
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    rr::SynthSpec spec;
    spec.width = spec.height = size;
    spec.fs_hz = 30.0;
    spec.duration_s = frames / 30.0;
    spec.noise_sigma = 0.01;
    const int margin = size / 6;
    spec.regions = {{margin, margin, size - 2 * margin, size - 2 * margin, rr::Pattern::gabor,
                     0.25, 1.0, std::nullopt}};
    const rr::FrameSequence video = rr::generate(spec, 7);

    const rr::PyramidKernel kernel = rr::PyramidKernel::burt_adelson();
    const rr::BandpassDesign design = rr::design_bandpass(0.19, 0.9, 30.0);
    const std::vector<double> alphas(2, 10.0);

    row("laplacian pyramid",
        time_best_ms(repeats, [&] { rr::ref::laplacian_sequence(video.frames, 3, kernel); }),
        time_best_ms(repeats, [&] { rr::laplacian_sequence(video.frames, 3, kernel); }));

    const auto stacks = rr::laplacian_sequence(video.frames, 3, kernel);

    row("riesz transform",
        time_best_ms(repeats, [&] { rr::ref::riesz_sequence(stacks); }),
        time_best_ms(repeats, [&] { rr::riesz_sequence(stacks); }));

    row("temporal band-pass",
        time_best_ms(repeats,
                     [&] {
                         auto copy = stacks;
                         rr::ref::filter_stack_sequence(copy, design);
                     }),
        time_best_ms(repeats, [&] {
            auto copy = stacks;
            rr::filter_stack_sequence(copy, design);
        }));

    auto filtered = stacks;
    rr::filter_stack_sequence(filtered, design);
    const rr::AmpConfig amp_cfg{rr::default_alpha_schedule(3, 20.0), 0.003};
    row("amplitude-path extraction",
        time_best_ms(repeats, [&] { rr::ref::extract_amp_signals(filtered, amp_cfg, 30.0); }),
        time_best_ms(repeats, [&] { rr::extract_amp_signals(filtered, amp_cfg, 30.0); }));

    row("phase-path extraction",
        time_best_ms(repeats, [&] { rr::ref::extract_phase_signals(stacks, design, alphas); }),
        time_best_ms(repeats, [&] { rr::extract_phase_signals(stacks, design, alphas); }));

    // per-pixel ML amplitude map on a downsampled calibration block
    std::vector<rr::Image> calib(video.frames.begin(),
                                 video.frames.begin() + std::min(video.size(), 300));
    for (rr::Image& f : calib) f = rr::downsample_block_mean(f, 2);
    const rr::EstimatorConfig est{0.19, 0.9, 0.005, 0.0};
    row("roi amplitude map",
        time_best_ms(repeats, [&] { rr::ref::amplitude_map(calib, 30.0, est); }),
        time_best_ms(repeats, [&] { rr::amplitude_map(calib, 30.0, est); }));

    const rr::MotionMatrix x = rr::to_motion_matrix(rr::extract_phase_signals(stacks, design,
                                                                              alphas));
    row("frequency grid search",
        time_best_ms(repeats, [&] { rr::ref::estimate_f0(x, est); }),
        time_best_ms(repeats, [&] { rr::estimate_f0(x, est); }));

    return 0;
}

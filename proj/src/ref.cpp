#include "rr/ref.hpp"

#include <algorithm>
#include <cmath>

#include "rr/error.hpp"

namespace rr::ref {

namespace {

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

} // namespace

Image reduce(const Image& level, const PyramidKernel& kernel) {
    // Direct 2-D convolution; the production kernel runs separable passes.
    const int out_rows = (level.rows + 1) / 2;
    const int out_cols = (level.cols + 1) / 2;
    const int R = kernel.radius;
    const Image w = kernel.weights();
    Image out(out_rows, out_cols);
    for (int r = 0; r < out_rows; ++r)
        for (int c = 0; c < out_cols; ++c) {
            double acc = 0.0;
            for (int k1 = -R; k1 <= R; ++k1)
                for (int k2 = -R; k2 <= R; ++k2)
                    acc += w.at(k1 + R, k2 + R) * level.at(clamp_index(2 * r - k1, level.rows),
                                                           clamp_index(2 * c - k2, level.cols));
            out.at(r, c) = acc;
        }
    return out;
}

std::vector<LaplacianStack> laplacian_sequence(const std::vector<Image>& frames, int levels,
                                               const PyramidKernel& kernel) {
    std::vector<LaplacianStack> out;
    out.reserve(frames.size());
    for (const Image& frame : frames) out.push_back(build_laplacian(frame, levels, kernel));
    return out;
}

std::vector<RieszStack> riesz_sequence(const std::vector<LaplacianStack>& stacks) {
    std::vector<RieszStack> out;
    out.reserve(stacks.size());
    for (const LaplacianStack& stack : stacks) out.push_back(build_riesz(stack));
    return out;
}

void filter_stack_sequence(std::vector<LaplacianStack>& stacks, const BandpassDesign& d) {
    if (stacks.empty()) return;
    const int n_frames = static_cast<int>(stacks.size());
    const int n_levels = stacks.front().level_count();
    for (int m = 0; m < n_levels; ++m) {
        const int n_pix = static_cast<int>(stacks.front().levels[m].size());
        for (int pix = 0; pix < n_pix; ++pix) {
            double s1 = 0.0, s2 = 0.0;
            for (int n = 0; n < n_frames; ++n) {
                double& xi = stacks[n].levels[m].v[pix];
                const double in = xi;
                const double y = d.b0 * in + s1;
                s1 = d.b1 * in - d.a1 * y + s2;
                s2 = d.b2 * in - d.a2 * y;
                xi = y;
            }
        }
    }
}

LevelSignals extract_amp_signals(const std::vector<LaplacianStack>& filtered, const AmpConfig& cfg,
                                 double fs_hz) {
    const int n_levels = filtered.front().level_count();
    const int n_frames = static_cast<int>(filtered.size());
    LevelSignals out;
    out.levels = n_levels;
    out.frames = n_frames;
    out.fs_hz = fs_hz;
    out.lbar.assign(static_cast<size_t>(n_levels) * n_frames, 0.0);
    for (int m = 0; m < n_levels; ++m) {
        const Image& first = filtered.front().levels[m];
        out.level_dims.emplace_back(first.rows, first.cols);
        for (int n = 0; n < n_frames; ++n) {
            const Image b = binarize_level(filtered[n].levels[m], cfg.alphas[m], cfg.gamma_th);
            double sum = 0.0;
            for (const double v : b.v) sum += v;
            out.lbar[static_cast<size_t>(m) * n_frames + n] = sum / static_cast<double>(b.size());
        }
    }
    return out;
}

PhaseSignals extract_phase_signals(const std::vector<LaplacianStack>& stacks,
                                   const BandpassDesign& design,
                                   const std::vector<double>& alphas) {
    const int n_frames = static_cast<int>(stacks.size());
    const int n_bands = stacks.front().level_count() - 1;

    PhaseSignals out;
    out.levels = n_bands;
    out.frames = n_frames;
    out.fs_hz = design.fs_hz;
    out.yi.assign(static_cast<size_t>(n_bands) * n_frames, 0.0);
    out.yj.assign(static_cast<size_t>(n_bands) * n_frames, 0.0);

    for (int m = 0; m < n_bands; ++m) {
        const int n_pix = static_cast<int>(stacks.front().levels[m].size());

        std::vector<RieszLevel> levels(n_frames);
        std::vector<std::vector<uint8_t>> valid(n_frames);
        for (int n = 0; n < n_frames; ++n) {
            auto [r1, r2] = riesz_transform(stacks[n].levels[m]);
            levels[n] = RieszLevel{stacks[n].levels[m], std::move(r1), std::move(r2)};
            double floor = 0.0;
            const Image amp = level_amplitude(levels[n], &floor);
            valid[n].assign(n_pix, 0);
            for (int pix = 0; pix < n_pix; ++pix) valid[n][pix] = amp.v[pix] >= floor ? 1 : 0;
        }

        Image ci(levels[0].p.rows, levels[0].p.cols);
        Image cj(levels[0].p.rows, levels[0].p.cols);
        std::vector<double> series_i(static_cast<size_t>(n_frames) * n_pix);
        std::vector<double> series_j(static_cast<size_t>(n_frames) * n_pix);
        for (int n = 0; n < n_frames; ++n) {
            const StepField step =
                n == 0 ? phase_step_initial(levels[0]) : phase_step(levels[n - 1], levels[n]);
            accumulate_steps(step, ci, cj);
            std::copy(ci.v.begin(), ci.v.end(), series_i.begin() + static_cast<size_t>(n) * n_pix);
            std::copy(cj.v.begin(), cj.v.end(), series_j.begin() + static_cast<size_t>(n) * n_pix);
        }

        for (int pix = 0; pix < n_pix; ++pix) {
            filter_strided(series_i.data() + pix, n_frames, n_pix, design);
            filter_strided(series_j.data() + pix, n_frames, n_pix, design);
        }

        for (int n = 0; n < n_frames; ++n) {
            double sum_i = 0.0, sum_j = 0.0;
            size_t count = 0;
            for (int pix = 0; pix < n_pix; ++pix) {
                if (!valid[n][pix]) continue;
                sum_i += series_i[static_cast<size_t>(n) * n_pix + pix];
                sum_j += series_j[static_cast<size_t>(n) * n_pix + pix];
                ++count;
            }
            const size_t idx = static_cast<size_t>(m) * n_frames + n;
            if (count > 0) {
                out.yi[idx] = alphas[m] * sum_i / static_cast<double>(count);
                out.yj[idx] = alphas[m] * sum_j / static_cast<double>(count);
            }
        }
    }
    return out;
}

F0Search estimate_f0(const MotionMatrix& x, const EstimatorConfig& cfg) {
    MotionMatrix centered = x;
    remove_channel_means(centered);

    F0Search res;
    res.short_window = x.frames / x.fs_hz * cfg.f_min_hz < 2.0;
    double peak = 0.0;
    for (const double v : centered.x) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) {
        res.degenerate = true;
        res.f0_hz = res.f0_grid_hz = cfg.f_min_hz;
        return res;
    }

    const int n_grid =
        static_cast<int>(std::floor((cfg.f_max_hz - cfg.f_min_hz) / cfg.grid_step_hz + 1e-9)) + 1;
    std::vector<double> obj(n_grid);
    for (int k = 0; k < n_grid; ++k)
        obj[k] = periodogram_objective(centered, cfg.f_min_hz + k * cfg.grid_step_hz);
    int best = 0;
    for (int k = 1; k < n_grid; ++k)
        if (obj[k] > obj[best]) best = k;

    res.grid_index = best;
    res.f0_grid_hz = cfg.f_min_hz + best * cfg.grid_step_hz;
    res.f0_hz = res.f0_grid_hz;
    if (best > 0 && best < n_grid - 1 && obj[best - 1] > 0.0 && obj[best + 1] > 0.0) {
        const double lm = std::log(obj[best - 1]);
        const double l0 = std::log(obj[best]);
        const double lp = std::log(obj[best + 1]);
        const double denom = lm - 2.0 * l0 + lp;
        if (denom < 0.0) {
            const double delta = std::clamp(0.5 * (lm - lp) / denom, -0.5, 0.5);
            res.f0_hz = std::clamp(res.f0_grid_hz + delta * cfg.grid_step_hz, cfg.f_min_hz,
                                   cfg.f_max_hz);
        }
    }
    return res;
}

Image amplitude_map(const std::vector<Image>& frames, double fs_hz, const EstimatorConfig& cfg) {
    const int n_frames = static_cast<int>(frames.size());
    const int n_pix = static_cast<int>(frames.front().size());
    MotionMatrix x(n_pix, 1, n_frames, fs_hz);
    for (int pix = 0; pix < n_pix; ++pix) {
        double* d = x.channel(pix, 0);
        for (int n = 0; n < n_frames; ++n) d[n] = frames[n].v[pix];
    }
    const F0Search f0 = ref::estimate_f0(x, cfg);

    remove_channel_means(x);
    Image amp(frames.front().rows, frames.front().cols);
    if (f0.degenerate) return amp;
    const double w = 2.0 * std::acos(-1.0) * f0.f0_hz / fs_hz;
    for (int pix = 0; pix < n_pix; ++pix) {
        const double* d = x.channel(pix, 0);
        double re = 0.0, im = 0.0;
        for (int n = 0; n < n_frames; ++n) {
            re += d[n] * std::cos(w * n);
            im -= d[n] * std::sin(w * n);
        }
        amp.v[pix] = 2.0 / n_frames * std::sqrt(re * re + im * im);
    }
    return amp;
}

} // namespace rr::ref

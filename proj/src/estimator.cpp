#include "rr/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rr/error.hpp"
#include "rr/temporal.hpp"
#include "gaussian.hpp"

namespace rr {

namespace {

constexpr double k_pi = 3.14159265358979323846;

void validate(const EstimatorConfig& cfg, double fs_hz) {
    if (!(cfg.f_min_hz < cfg.f_max_hz) || !(cfg.f_max_hz < fs_hz / 2.0) || !(cfg.f_min_hz > 0.0))
        throw Error(Errc::config_error, "need 0 < f_min < f_max < fs/2");
    if (!(cfg.grid_step_hz > 0.0) ||
        cfg.grid_step_hz > (cfg.f_max_hz - cfg.f_min_hz) / 10.0 + 1e-12)
        throw Error(Errc::config_error, "grid step must be positive and at most (f_max - f_min)/10");
}

int grid_size(const EstimatorConfig& cfg) {
    return static_cast<int>(std::floor((cfg.f_max_hz - cfg.f_min_hz) / cfg.grid_step_hz + 1e-9)) + 1;
}

// |sum_n d[n] e^{-j w n}|^2 via phasor rotation, re-synced periodically.
double channel_power(const double* d, int n, double w) {
    const double cw = std::cos(w), sw = std::sin(w);
    double pr = 1.0, pi = 0.0; // e^{-j w k}
    double re = 0.0, im = 0.0;
    for (int k = 0; k < n; ++k) {
        if ((k & 511) == 0) {
            pr = std::cos(w * k);
            pi = -std::sin(w * k);
        }
        re += d[k] * pr;
        im += d[k] * pi;
        const double next_r = pr * cw + pi * sw;
        pi = pi * cw - pr * sw;
        pr = next_r;
    }
    return re * re + im * im;
}

} // namespace

MotionMatrix MotionMatrix::slice(int start, int end) const {
    if (start < 0 || end > frames || start >= end)
        throw Error(Errc::geometry_mismatch, "bad slice range");
    MotionMatrix out(levels, comps, end - start, fs_hz);
    for (int m = 0; m < levels; ++m)
        for (int c = 0; c < comps; ++c) {
            const double* src = channel(m, c);
            std::copy(src + start, src + end, out.channel(m, c));
        }
    return out;
}

MotionMatrix concat_channels(const std::vector<const MotionMatrix*>& parts) {
    if (parts.empty()) throw Error(Errc::geometry_mismatch, "nothing to concatenate");
    const MotionMatrix& first = *parts.front();
    int total_levels = 0;
    for (const MotionMatrix* p : parts) {
        if (p->comps != first.comps || p->frames != first.frames || p->fs_hz != first.fs_hz)
            throw Error(Errc::geometry_mismatch, "observation matrices disagree in shape");
        total_levels += p->levels;
    }
    MotionMatrix out(total_levels, first.comps, first.frames, first.fs_hz);
    double* dst = out.x.data();
    for (const MotionMatrix* p : parts) {
        std::copy(p->x.begin(), p->x.end(), dst);
        dst += p->x.size();
    }
    return out;
}

void remove_channel_means(MotionMatrix& x) {
    for (int m = 0; m < x.levels; ++m)
        for (int c = 0; c < x.comps; ++c) {
            double* d = x.channel(m, c);
            double mean = 0.0;
            for (int n = 0; n < x.frames; ++n) mean += d[n];
            mean /= x.frames;
            for (int n = 0; n < x.frames; ++n) d[n] -= mean;
        }
}

double periodogram_objective(const MotionMatrix& x, double f_hz) {
    const double w = 2.0 * k_pi * f_hz / x.fs_hz;
    double total = 0.0;
    for (int m = 0; m < x.levels; ++m)
        for (int c = 0; c < x.comps; ++c) total += channel_power(x.channel(m, c), x.frames, w);
    return total;
}

F0Search estimate_f0(const MotionMatrix& x, const EstimatorConfig& cfg) {
    validate(cfg, x.fs_hz);
    if (x.frames < 2) throw Error(Errc::geometry_mismatch, "need at least 2 frames");

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

    const int n_grid = grid_size(cfg);
    std::vector<double> obj(n_grid);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n_grid; ++k)
        obj[k] = periodogram_objective(centered, cfg.f_min_hz + k * cfg.grid_step_hz);

    int best = 0;
    for (int k = 1; k < n_grid; ++k)
        if (obj[k] > obj[best]) best = k; // ties keep the lower frequency

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

std::vector<double> estimate_amplitudes(const MotionMatrix& x, double f0_hz) {
    const double edge = 1.0 / (x.frames / x.fs_hz);
    if (!(f0_hz >= edge) || !(f0_hz <= x.fs_hz / 2.0 - edge)) {
        std::ostringstream msg;
        msg << "f0 " << f0_hz << " Hz is within 1/(N Ts) of 0 or fs/2";
        throw Error(Errc::frequency_at_edge, msg.str());
    }
    MotionMatrix centered = x;
    remove_channel_means(centered);
    const double w = 2.0 * k_pi * f0_hz / x.fs_hz;
    std::vector<double> a_hat(static_cast<size_t>(x.levels) * x.comps);
    for (int m = 0; m < x.levels; ++m)
        for (int c = 0; c < x.comps; ++c)
            a_hat[static_cast<size_t>(m) * x.comps + c] =
                2.0 / x.frames * std::sqrt(channel_power(centered.channel(m, c), x.frames, w));
    return a_hat;
}

PeriodicityResult periodicity_test(std::span<const double> a_hat, int frames, int levels,
                                   int comps, double eta) {
    double sum_sq = 0.0;
    for (const double a : a_hat) sum_sq += a * a;
    PeriodicityResult r;
    r.stat = static_cast<double>(frames) / (static_cast<double>(levels) * comps) * sum_sq;
    r.periodic = r.stat > eta;
    return r;
}

std::vector<WindowSpan> window_slicer(int total_frames, const WindowingConfig& cfg, double fs_hz) {
    if (!(cfg.rho >= 0.0) || !(cfg.rho < 1.0))
        throw Error(Errc::config_error, "rho must be in [0, 1)");
    const int n_win = static_cast<int>(std::lround(cfg.window_s * fs_hz));
    if (n_win < 2) throw Error(Errc::config_error, "window shorter than 2 frames");
    if (n_win > total_frames) {
        std::ostringstream msg;
        msg << "window of " << n_win << " frames exceeds the " << total_frames << "-frame input";
        throw Error(Errc::window_too_long, msg.str());
    }
    const int hop = std::max(1, static_cast<int>(std::lround(n_win * (1.0 - cfg.rho))));
    std::vector<WindowSpan> out;
    for (int start = 0; start + n_win <= total_frames; start += hop) {
        // Windows overlapping the span of the interlaced partial leading
        // windows carry incomplete filter state.
        out.push_back({start, start + n_win, start + hop < n_win});
    }
    return out;
}

double calibrate_eta(int levels, int comps, int frames, double fs_hz, const EstimatorConfig& cfg,
                     double noise_sigma, int trials, uint64_t seed,
                     const BandpassDesign* coloring) {
    if (trials < 1) throw Error(Errc::config_error, "need at least one calibration trial");

    // Steady-state RMS gain of the coloring filter for unit white input.
    double gain = 1.0;
    int settle = 0;
    if (coloring) {
        settle = warmup_samples(*coloring);
        std::vector<double> impulse(10 * settle, 0.0);
        impulse[0] = 1.0;
        filter_signal_inplace(impulse, *coloring);
        double energy = 0.0;
        for (const double h : impulse) energy += h * h;
        gain = std::sqrt(energy);
    }

    std::vector<double> stats(trials);
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
        detail::Gaussian gauss(seed, static_cast<uint64_t>(t) + 1);
        MotionMatrix x(levels, comps, frames, fs_hz);
        if (coloring) {
            std::vector<double> white(static_cast<size_t>(frames) + settle);
            for (int m = 0; m < levels; ++m)
                for (int c = 0; c < comps; ++c) {
                    for (double& w : white) w = gauss();
                    filter_signal_inplace(white, *coloring);
                    double* d = x.channel(m, c);
                    const double scale = noise_sigma / gain;
                    for (int n = 0; n < frames; ++n) d[n] = scale * white[settle + n];
                }
        } else {
            for (double& v : x.x) v = noise_sigma * gauss();
        }
        const F0Search f0 = estimate_f0(x, cfg);
        const std::vector<double> a_hat = estimate_amplitudes(x, f0.f0_hz);
        stats[t] = periodicity_test(a_hat, frames, levels, comps, 0.0).stat;
    }
    std::sort(stats.begin(), stats.end());
    const int idx = std::min(trials - 1, static_cast<int>(std::ceil(0.95 * trials)) - 1);
    return stats[idx];
}

} // namespace rr

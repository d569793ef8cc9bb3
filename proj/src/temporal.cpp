#include "rr/temporal.hpp"

#include <cmath>
#include <sstream>

#include "rr/error.hpp"

namespace rr {

BandpassDesign design_bandpass(double f_lo_hz, double f_hi_hz, double fs_hz) {
    if (!(f_lo_hz > 0.0) || !(f_lo_hz < f_hi_hz) || !(f_hi_hz < fs_hz / 2.0)) {
        std::ostringstream msg;
        msg << "need 0 < f_lo < f_hi < fs/2, got [" << f_lo_hz << ", " << f_hi_hz << "] at fs "
            << fs_hz;
        throw Error(Errc::invalid_band, msg.str());
    }
    const double pi = std::acos(-1.0);
    // Prewarped analog cutoffs; the bilinear transform then lands the -3 dB
    // points exactly on f_lo and f_hi.
    const double k = 2.0 * fs_hz;
    const double w_lo = k * std::tan(pi * f_lo_hz / fs_hz);
    const double w_hi = k * std::tan(pi * f_hi_hz / fs_hz);
    const double bw = w_hi - w_lo;
    const double w0_sq = w_lo * w_hi;

    // H_a(s) = bw s / (s^2 + bw s + w0^2), s = k (1 - z^-1) / (1 + z^-1)
    const double a0 = k * k + bw * k + w0_sq;
    BandpassDesign d;
    d.b0 = bw * k / a0;
    d.b1 = 0.0;
    d.b2 = -d.b0;
    d.a1 = 2.0 * (w0_sq - k * k) / a0;
    d.a2 = (k * k - bw * k + w0_sq) / a0;
    d.gain = d.b0;
    d.f_lo_hz = f_lo_hz;
    d.f_hi_hz = f_hi_hz;
    d.fs_hz = fs_hz;

    const double disc = d.a1 * d.a1 - 4.0 * d.a2;
    if (disc < 0.0)
        d.pole = {-d.a1 / 2.0, std::sqrt(-disc) / 2.0};
    else
        d.pole = {(-d.a1 + std::sqrt(disc)) / 2.0, 0.0};
    return d;
}

std::complex<double> frequency_response(const BandpassDesign& d, double f_hz) {
    const double w = 2.0 * std::acos(-1.0) * f_hz / d.fs_hz;
    const std::complex<double> z1 = std::polar(1.0, -w);
    const std::complex<double> z2 = z1 * z1;
    return (d.b0 + d.b1 * z1 + d.b2 * z2) / (1.0 + d.a1 * z1 + d.a2 * z2);
}

void filter_signal_inplace(std::span<double> x, const BandpassDesign& d) {
    // Direct form transposed II, zero initial state.
    double s1 = 0.0, s2 = 0.0;
    for (double& xi : x) {
        const double in = xi;
        const double y = d.b0 * in + s1;
        s1 = d.b1 * in - d.a1 * y + s2;
        s2 = d.b2 * in - d.a2 * y;
        xi = y;
    }
}

std::vector<double> filter_signal(std::span<const double> x, const BandpassDesign& d) {
    std::vector<double> y(x.begin(), x.end());
    filter_signal_inplace(y, d);
    return y;
}

void filter_strided(double* x, int n, size_t stride, const BandpassDesign& d) {
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double& xi = x[static_cast<size_t>(i) * stride];
        const double in = xi;
        const double y = d.b0 * in + s1;
        s1 = d.b1 * in - d.a1 * y + s2;
        s2 = d.b2 * in - d.a2 * y;
        xi = y;
    }
}

void filter_stack_sequence(std::vector<LaplacianStack>& stacks, const BandpassDesign& d) {
    if (stacks.empty()) return;
    const int n_frames = static_cast<int>(stacks.size());
    const int n_levels = stacks.front().level_count();
    for (const LaplacianStack& s : stacks) {
        if (s.level_count() != n_levels)
            throw Error(Errc::geometry_mismatch, "level count changes mid-sequence");
        for (int m = 0; m < n_levels; ++m)
            if (!s.levels[m].same_shape(stacks.front().levels[m]))
                throw Error(Errc::geometry_mismatch, "level geometry changes mid-sequence");
    }

    for (int m = 0; m < n_levels; ++m) {
        const int n_pix = static_cast<int>(stacks.front().levels[m].size());
        // Per-frame base pointers let each pixel walk the series directly.
        std::vector<double*> frame_ptr(n_frames);
        for (int n = 0; n < n_frames; ++n) frame_ptr[n] = stacks[n].levels[m].v.data();
#pragma omp parallel for schedule(static)
        for (int pix = 0; pix < n_pix; ++pix) {
            double s1 = 0.0, s2 = 0.0;
            for (int n = 0; n < n_frames; ++n) {
                double& xi = frame_ptr[n][pix];
                const double in = xi;
                const double y = d.b0 * in + s1;
                s1 = d.b1 * in - d.a1 * y + s2;
                s2 = d.b2 * in - d.a2 * y;
                xi = y;
            }
        }
    }
}

int warmup_samples(const BandpassDesign& d) {
    return static_cast<int>(std::ceil(d.fs_hz / d.f_lo_hz));
}

} // namespace rr

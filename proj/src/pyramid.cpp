#include "rr/pyramid.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <fftw3.h>

#include "rr/error.hpp"
#include "rr/tolerances.hpp"

namespace rr {

namespace {

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

inline int half_up(int n) { return (n + 1) / 2; }

void check_dims(const Image& level) {
    if (level.rows < 2 || level.cols < 2) {
        std::ostringstream msg;
        msg << "level is " << level.rows << "x" << level.cols << ", need at least 2x2";
        throw Error(Errc::too_small, msg.str());
    }
}

} // namespace

PyramidKernel PyramidKernel::burt_adelson() {
    // a = 0.375: [1/4 - a/2, 1/4, a, 1/4, 1/4 - a/2]
    return PyramidKernel{{0.0625, 0.25, 0.375, 0.25, 0.0625}, 2};
}

Image PyramidKernel::weights() const {
    const int n = 2 * radius + 1;
    Image w(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) w.at(r, c) = taps[r] * taps[c];
    return w;
}

Image reduce(const Image& level, const PyramidKernel& kernel) {
    check_dims(level);
    const int out_rows = half_up(level.rows);
    const int out_cols = half_up(level.cols);
    const int R = kernel.radius;

    // Horizontal pass at full row resolution, then vertical pass.
    Image tmp(level.rows, out_cols);
    for (int r = 0; r < level.rows; ++r) {
        for (int c = 0; c < out_cols; ++c) {
            double acc = 0.0;
            for (int k = -R; k <= R; ++k)
                acc += kernel.taps[k + R] * level.at(r, clamp_index(2 * c - k, level.cols));
            tmp.at(r, c) = acc;
        }
    }
    Image out(out_rows, out_cols);
    for (int r = 0; r < out_rows; ++r) {
        for (int c = 0; c < out_cols; ++c) {
            double acc = 0.0;
            for (int k = -R; k <= R; ++k)
                acc += kernel.taps[k + R] * tmp.at(clamp_index(2 * r - k, level.rows), c);
            out.at(r, c) = acc;
        }
    }
    return out;
}

Image expand(const Image& level, int target_rows, int target_cols, const PyramidKernel& kernel) {
    if (half_up(target_rows) != level.rows || half_up(target_cols) != level.cols) {
        std::ostringstream msg;
        msg << "target " << target_rows << "x" << target_cols << " does not halve back to "
            << level.rows << "x" << level.cols;
        throw Error(Errc::dim_mismatch, msg.str());
    }
    const int R = kernel.radius;

    // Only even source offsets (u - k) contribute; the factor 2 per axis
    // restores unit gain for constant inputs.
    Image tmp(level.rows, target_cols);
    for (int r = 0; r < level.rows; ++r) {
        for (int c = 0; c < target_cols; ++c) {
            double acc = 0.0;
            for (int k = -R; k <= R; ++k) {
                const int num = c - k;
                if (num & 1) continue;
                acc += kernel.taps[k + R] * level.at(r, clamp_index(num / 2, level.cols));
            }
            tmp.at(r, c) = 2.0 * acc;
        }
    }
    Image out(target_rows, target_cols);
    for (int r = 0; r < target_rows; ++r) {
        for (int c = 0; c < target_cols; ++c) {
            double acc = 0.0;
            for (int k = -R; k <= R; ++k) {
                const int num = r - k;
                if (num & 1) continue;
                acc += kernel.taps[k + R] * tmp.at(clamp_index(num / 2, level.rows), c);
            }
            out.at(r, c) = 2.0 * acc;
        }
    }
    return out;
}

LaplacianStack build_laplacian(const Image& frame, int levels, const PyramidKernel& kernel) {
    if (levels < 2) throw Error(Errc::too_many_levels, "need at least 2 levels");
    int rows = frame.rows, cols = frame.cols;
    for (int m = 0; m < levels - 1; ++m) {
        rows = half_up(rows);
        cols = half_up(cols);
    }
    if (rows < 2 || cols < 2) {
        std::ostringstream msg;
        msg << levels << " levels leave a " << rows << "x" << cols << " residual";
        throw Error(Errc::too_many_levels, msg.str());
    }

    std::vector<Image> gaussian;
    gaussian.reserve(levels);
    gaussian.push_back(frame);
    for (int m = 1; m < levels; ++m) gaussian.push_back(reduce(gaussian.back(), kernel));

    LaplacianStack stack;
    stack.levels.reserve(levels);
    for (int m = 0; m < levels - 1; ++m) {
        Image up = expand(gaussian[m + 1], gaussian[m].rows, gaussian[m].cols, kernel);
        Image detail = gaussian[m];
        for (size_t i = 0; i < detail.v.size(); ++i) detail.v[i] -= up.v[i];
        stack.levels.push_back(std::move(detail));
    }
    stack.levels.push_back(std::move(gaussian.back()));
    return stack;
}

Image collapse(const LaplacianStack& stack, const PyramidKernel& kernel) {
    Image acc = stack.levels.back();
    for (int m = stack.level_count() - 2; m >= 0; --m) {
        const Image& detail = stack.levels[m];
        Image up = expand(acc, detail.rows, detail.cols, kernel);
        for (size_t i = 0; i < up.v.size(); ++i) up.v[i] += detail.v[i];
        acc = std::move(up);
    }
    return acc;
}

namespace {

// Signed angular frequency of FFT bin k; the Nyquist bin maps to +pi.
inline double bin_freq(int k, int n) {
    const int signed_k = k <= n / 2 ? k : k - n;
    return 2.0 * std::acos(-1.0) * signed_k / n;
}

struct RieszPlan {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    std::vector<double> m1, m2; // odd multipliers w_i / |w|, symmetry bins zeroed
};

// Planner access is serialized; execution on caller-owned arrays is not.
std::mutex g_plan_mutex;
std::map<std::pair<int, int>, RieszPlan>& plan_cache() {
    static std::map<std::pair<int, int>, RieszPlan> cache;
    return cache;
}

const RieszPlan& riesz_plan(int rows, int cols) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto& cache = plan_cache();
    const auto key = std::make_pair(rows, cols);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    RieszPlan plan;
    const size_t n = static_cast<size_t>(rows) * cols;
    std::vector<std::complex<double>> a(n), b(n);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plan.forward = fftw_plan_dft_2d(rows, cols, pa, pb, FFTW_FORWARD, flags);
    plan.inverse = fftw_plan_dft_2d(rows, cols, pa, pb, FFTW_BACKWARD, flags);

    plan.m1.resize(n);
    plan.m2.resize(n);
    for (int kr = 0; kr < rows; ++kr) {
        const double wr = bin_freq(kr, rows);
        const bool nyq_row = (rows % 2 == 0) && kr == rows / 2;
        for (int kc = 0; kc < cols; ++kc) {
            const double wc = bin_freq(kc, cols);
            const bool nyq_col = (cols % 2 == 0) && kc == cols / 2;
            const double norm = std::hypot(wr, wc);
            const size_t i = static_cast<size_t>(kr) * cols + kc;
            if (norm == 0.0) {
                plan.m1[i] = plan.m2[i] = 0.0;
                continue;
            }
            // The self-paired Nyquist bins cannot carry an odd (imaginary)
            // multiplier without breaking Hermitian symmetry of the output.
            plan.m1[i] = nyq_row ? 0.0 : wr / norm;
            plan.m2[i] = nyq_col ? 0.0 : wc / norm;
        }
    }
    return cache.emplace(key, std::move(plan)).first->second;
}

} // namespace

std::pair<Image, Image> riesz_transform(const Image& level) {
    check_dims(level);
    const int rows = level.rows, cols = level.cols;
    const RieszPlan& plan = riesz_plan(rows, cols);
    const size_t n = level.size();

    std::vector<std::complex<double>> input(n), spectrum(n), scratch(n), back(n);
    for (size_t i = 0; i < n; ++i) input[i] = level.v[i];
    fftw_execute_dft(plan.forward, reinterpret_cast<fftw_complex*>(input.data()),
                     reinterpret_cast<fftw_complex*>(spectrum.data()));

    const double inv_n = 1.0 / static_cast<double>(n);
    double level_sq = 0.0;
    for (size_t i = 0; i < n; ++i) level_sq += level.v[i] * level.v[i];
    const double level_norm = std::sqrt(level_sq);

    Image r1(rows, cols), r2(rows, cols);
    for (int comp = 0; comp < 2; ++comp) {
        const std::vector<double>& mult = comp == 0 ? plan.m1 : plan.m2;
        for (size_t i = 0; i < n; ++i)
            scratch[i] = std::complex<double>(0.0, -mult[i]) * spectrum[i];
        fftw_execute_dft(plan.inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                         reinterpret_cast<fftw_complex*>(back.data()));
        double imag_sq = 0.0;
        Image& out = comp == 0 ? r1 : r2;
        for (size_t i = 0; i < n; ++i) {
            out.v[i] = back[i].real() * inv_n;
            const double im = back[i].imag() * inv_n;
            imag_sq += im * im;
        }
        if (std::sqrt(imag_sq) > Tol::riesz_imag_residual_rel * level_norm + 1e-300)
            throw std::logic_error("riesz_transform: imaginary residue above tolerance");
    }
    return {std::move(r1), std::move(r2)};
}

RieszStack build_riesz(const LaplacianStack& stack) {
    RieszStack out;
    const int m_count = stack.level_count();
    out.bands.reserve(m_count - 1);
    for (int m = 0; m < m_count - 1; ++m) {
        auto [r1, r2] = riesz_transform(stack.levels[m]);
        out.bands.push_back(RieszLevel{stack.levels[m], std::move(r1), std::move(r2)});
    }
    out.residual = stack.levels.back();
    return out;
}

std::vector<LaplacianStack> laplacian_sequence(const std::vector<Image>& frames, int levels,
                                               const PyramidKernel& kernel) {
    std::vector<LaplacianStack> out(frames.size());
    const int n = static_cast<int>(frames.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) out[i] = build_laplacian(frames[i], levels, kernel);
    return out;
}

std::vector<RieszStack> riesz_sequence(const std::vector<LaplacianStack>& stacks) {
    std::vector<RieszStack> out(stacks.size());
    const int n = static_cast<int>(stacks.size());
    if (n == 0) return out;
    // Warm the plan cache before the parallel region.
    for (const Image& level : stacks.front().levels) riesz_plan(level.rows, level.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) out[i] = build_riesz(stacks[i]);
    return out;
}

} // namespace rr

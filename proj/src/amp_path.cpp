#include "rr/amp_path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rr/csv.hpp"
#include "rr/error.hpp"

namespace rr {

std::vector<double> default_alpha_schedule(int levels, double alpha_top) {
    if (levels < 2) throw Error(Errc::too_many_levels, "need at least 2 levels");
    std::vector<double> alphas(levels, 0.0);
    alphas[0] = 1.0;
    const int top = levels - 2; // last amplified level
    for (int m = 1; m <= top; ++m)
        alphas[m] = std::pow(alpha_top, static_cast<double>(m) / top);
    return alphas;
}

Image binarize_level(const Image& gamma_level, double alpha, double gamma_th) {
    Image b(gamma_level.rows, gamma_level.cols);
    for (size_t i = 0; i < b.v.size(); ++i)
        b.v[i] = std::abs(gamma_level.v[i] * alpha) >= gamma_th ? 1.0 : 0.0;
    return b;
}

LevelSignals extract_amp_signals(const std::vector<LaplacianStack>& filtered, const AmpConfig& cfg,
                                 double fs_hz) {
    if (filtered.empty()) throw Error(Errc::geometry_mismatch, "empty stack sequence");
    const int n_levels = filtered.front().level_count();
    const int n_frames = static_cast<int>(filtered.size());
    if (static_cast<int>(cfg.alphas.size()) != n_levels)
        throw Error(Errc::geometry_mismatch, "alpha schedule does not match level count");
    for (const LaplacianStack& s : filtered)
        if (s.level_count() != n_levels)
            throw Error(Errc::geometry_mismatch, "level count changes mid-sequence");

    LevelSignals out;
    out.levels = n_levels;
    out.frames = n_frames;
    out.fs_hz = fs_hz;
    out.lbar.assign(static_cast<size_t>(n_levels) * n_frames, 0.0);
    out.level_dims.reserve(n_levels);
    for (int m = 0; m < n_levels; ++m) {
        const Image& first = filtered.front().levels[m];
        out.level_dims.emplace_back(first.rows, first.cols);
    }

#pragma omp parallel for schedule(static)
    for (int n = 0; n < n_frames; ++n) {
        for (int m = 0; m < n_levels; ++m) {
            const Image& level = filtered[n].levels[m];
            const double alpha = cfg.alphas[m];
            size_t count = 0;
            for (const double g : level.v)
                if (std::abs(g * alpha) >= cfg.gamma_th) ++count;
            out.lbar[static_cast<size_t>(m) * n_frames + n] =
                static_cast<double>(count) / static_cast<double>(level.size());
        }
    }
    return out;
}

double auto_gamma_th(const std::vector<LaplacianStack>& filtered, int calib_start, int calib_end) {
    calib_start = std::max(0, calib_start);
    calib_end = std::min(calib_end, static_cast<int>(filtered.size()));
    if (calib_start >= calib_end)
        throw Error(Errc::insufficient_frames, "empty calibration range for gamma_th");
    std::vector<double> mags;
    const int n_levels = filtered.front().level_count();
    for (int n = calib_start; n < calib_end; ++n)
        for (int m = 0; m < n_levels - 1; ++m) // detail levels only
            for (const double g : filtered[n].levels[m].v) mags.push_back(std::abs(g));
    const size_t mid = mags.size() / 2;
    std::nth_element(mags.begin(), mags.begin() + mid, mags.end());
    return std::max(3.0 * mags[mid], 1e-9);
}

MotionMatrix to_motion_matrix(const LevelSignals& s) {
    MotionMatrix x(s.levels, 1, s.frames, s.fs_hz);
    std::copy(s.lbar.begin(), s.lbar.end(), x.x.begin());
    return x;
}

void dump_level_signals(const LevelSignals& s, const std::string& path) {
    std::ostringstream out;
    out << "n,t_s,m,value\n";
    for (int n = 0; n < s.frames; ++n)
        for (int m = 0; m < s.levels; ++m)
            out << n << ',' << csv::fmt(n / s.fs_hz, 4) << ',' << m << ','
                << csv::fmt(s.at(m, n)) << '\n';
    csv::write_text(path, out.str());
}

} // namespace rr

#include "rr/phase_path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rr/csv.hpp"
#include "rr/error.hpp"
#include "rr/quaternion.hpp"

namespace rr {

namespace {

struct PixStep {
    double di = 0.0, dj = 0.0;
    bool valid = false;
};

inline Quaternion normalized(double p, double r1, double r2, double norm) {
    return {p / norm, r1 / norm, r2 / norm, 0.0};
}

// Step between two unit coefficients; antipodal pairs are masked instead of
// propagating the +/- pi ambiguity.
inline PixStep step_between(const Quaternion& q_prev, const Quaternion& q_curr) {
    bool antipodal = false;
    const Quaternion d = q_log_unit(q_mul(q_curr, q_conj(q_prev)), &antipodal);
    if (antipodal) return {};
    return {d.x, d.y, true};
}

inline PixStep step_initial(const Quaternion& q_curr) {
    bool antipodal = false;
    const Quaternion d = q_log_unit(q_curr, &antipodal);
    if (antipodal) return {};
    return {d.x, d.y, true};
}

} // namespace

Image level_amplitude(const RieszLevel& level, double* mask_floor) {
    Image amp(level.p.rows, level.p.cols);
    double peak = 0.0;
    for (size_t i = 0; i < amp.v.size(); ++i) {
        const double a = std::sqrt(level.p.v[i] * level.p.v[i] + level.r1.v[i] * level.r1.v[i] +
                                   level.r2.v[i] * level.r2.v[i]);
        amp.v[i] = a;
        peak = std::max(peak, a);
    }
    if (mask_floor) {
        // Signal-free pixels sit near the level's median amplitude and their
        // phase steps are pure noise; the median term gates them out while
        // the cap keeps densely textured levels intact.
        std::vector<double> scratch(amp.v);
        const size_t mid = scratch.size() / 2;
        std::nth_element(scratch.begin(), scratch.begin() + mid, scratch.end());
        const double adaptive =
            std::min(Tol::amplitude_mask_median * scratch[mid], Tol::amplitude_mask_rel_cap * peak);
        *mask_floor =
            std::max({Tol::amplitude_mask_rel * peak, adaptive, Tol::amplitude_mask_abs});
    }
    return amp;
}

StepField phase_step(const RieszLevel& prev, const RieszLevel& curr) {
    if (!prev.p.same_shape(curr.p))
        throw Error(Errc::geometry_mismatch, "phase_step levels differ in size");
    double floor_prev = 0.0, floor_curr = 0.0;
    const Image amp_prev = level_amplitude(prev, &floor_prev);
    const Image amp_curr = level_amplitude(curr, &floor_curr);

    StepField out;
    out.dci = Image(curr.p.rows, curr.p.cols);
    out.dcj = Image(curr.p.rows, curr.p.cols);
    out.valid.assign(curr.p.size(), 0);
    for (size_t i = 0; i < curr.p.size(); ++i) {
        if (amp_prev.v[i] < floor_prev || amp_curr.v[i] < floor_curr) continue;
        const Quaternion qp = normalized(prev.p.v[i], prev.r1.v[i], prev.r2.v[i], amp_prev.v[i]);
        const Quaternion qc = normalized(curr.p.v[i], curr.r1.v[i], curr.r2.v[i], amp_curr.v[i]);
        const PixStep s = step_between(qp, qc);
        out.dci.v[i] = s.di;
        out.dcj.v[i] = s.dj;
        out.valid[i] = s.valid ? 1 : 0;
    }
    return out;
}

StepField phase_step_initial(const RieszLevel& curr) {
    double floor_curr = 0.0;
    const Image amp = level_amplitude(curr, &floor_curr);
    StepField out;
    out.dci = Image(curr.p.rows, curr.p.cols);
    out.dcj = Image(curr.p.rows, curr.p.cols);
    out.valid.assign(curr.p.size(), 0);
    for (size_t i = 0; i < curr.p.size(); ++i) {
        if (amp.v[i] < floor_curr) continue;
        const Quaternion qc = normalized(curr.p.v[i], curr.r1.v[i], curr.r2.v[i], amp.v[i]);
        const PixStep s = step_initial(qc);
        out.dci.v[i] = s.di;
        out.dcj.v[i] = s.dj;
        out.valid[i] = s.valid ? 1 : 0;
    }
    return out;
}

void accumulate_steps(const StepField& step, Image& ci, Image& cj) {
    if (!step.dci.same_shape(ci) || !step.dcj.same_shape(cj))
        throw Error(Errc::geometry_mismatch, "accumulator shape mismatch");
    for (size_t i = 0; i < ci.v.size(); ++i) {
        ci.v[i] += step.dci.v[i];
        cj.v[i] += step.dcj.v[i];
    }
}

PhaseSignals extract_phase_signals(const std::vector<LaplacianStack>& stacks,
                                   const BandpassDesign& design,
                                   const std::vector<double>& alphas) {
    if (stacks.empty()) throw Error(Errc::geometry_mismatch, "empty stack sequence");
    const int n_frames = static_cast<int>(stacks.size());
    const int n_levels = stacks.front().level_count();
    const int n_bands = n_levels - 1;
    if (static_cast<int>(alphas.size()) < n_bands)
        throw Error(Errc::geometry_mismatch, "alpha schedule shorter than band count");
    for (const LaplacianStack& s : stacks)
        if (s.level_count() != n_levels)
            throw Error(Errc::geometry_mismatch, "level count changes mid-sequence");

    PhaseSignals out;
    out.levels = n_bands;
    out.frames = n_frames;
    out.fs_hz = design.fs_hz;
    out.yi.assign(static_cast<size_t>(n_bands) * n_frames, 0.0);
    out.yj.assign(static_cast<size_t>(n_bands) * n_frames, 0.0);

    // One band at a time keeps the working set to a single level's series.
    for (int m = 0; m < n_bands; ++m) {
        const int n_pix = static_cast<int>(stacks.front().levels[m].size());

        std::vector<Image> r1s(n_frames), r2s(n_frames), amps(n_frames);
        std::vector<double> floors(n_frames);
#pragma omp parallel for schedule(static)
        for (int n = 0; n < n_frames; ++n) {
            auto [r1, r2] = riesz_transform(stacks[n].levels[m]);
            r1s[n] = std::move(r1);
            r2s[n] = std::move(r2);
            const RieszLevel view{stacks[n].levels[m], r1s[n], r2s[n]};
            amps[n] = level_amplitude(view, &floors[n]);
        }

        // Cumulative phase components, frame-major like the inputs.
        std::vector<double> ci(static_cast<size_t>(n_frames) * n_pix);
        std::vector<double> cj(static_cast<size_t>(n_frames) * n_pix);
        std::vector<const double*> p_ptr(n_frames);
        for (int n = 0; n < n_frames; ++n) p_ptr[n] = stacks[n].levels[m].v.data();

#pragma omp parallel for schedule(static)
        for (int pix = 0; pix < n_pix; ++pix) {
            double acc_i = 0.0, acc_j = 0.0;
            bool have_prev = false;
            Quaternion q_prev;
            for (int n = 0; n < n_frames; ++n) {
                const double amp = amps[n].v[pix];
                const bool valid_here = amp >= floors[n];
                PixStep s;
                if (valid_here) {
                    const Quaternion qc =
                        normalized(p_ptr[n][pix], r1s[n].v[pix], r2s[n].v[pix], amp);
                    if (n == 0)
                        s = step_initial(qc);
                    else if (have_prev)
                        s = step_between(q_prev, qc);
                    // a pixel re-entering validity mid-sequence contributes no step
                    q_prev = qc;
                    have_prev = true;
                } else {
                    have_prev = false;
                }
                acc_i += s.di;
                acc_j += s.dj;
                ci[static_cast<size_t>(n) * n_pix + pix] = acc_i;
                cj[static_cast<size_t>(n) * n_pix + pix] = acc_j;
            }
        }

#pragma omp parallel for schedule(static)
        for (int pix = 0; pix < n_pix; ++pix) {
            filter_strided(ci.data() + pix, n_frames, n_pix, design);
            filter_strided(cj.data() + pix, n_frames, n_pix, design);
        }

        const double alpha = alphas[m];
#pragma omp parallel for schedule(static)
        for (int n = 0; n < n_frames; ++n) {
            double sum_i = 0.0, sum_j = 0.0;
            size_t count = 0;
            const double* ci_row = ci.data() + static_cast<size_t>(n) * n_pix;
            const double* cj_row = cj.data() + static_cast<size_t>(n) * n_pix;
            for (int pix = 0; pix < n_pix; ++pix) {
                if (amps[n].v[pix] < floors[n]) continue;
                sum_i += ci_row[pix];
                sum_j += cj_row[pix];
                ++count;
            }
            const size_t idx = static_cast<size_t>(m) * n_frames + n;
            if (count > 0) {
                out.yi[idx] = alpha * sum_i / static_cast<double>(count);
                out.yj[idx] = alpha * sum_j / static_cast<double>(count);
            }
        }
    }
    return out;
}

MotionMatrix to_motion_matrix(const PhaseSignals& s) {
    MotionMatrix x(s.levels, 2, s.frames, s.fs_hz);
    for (int m = 0; m < s.levels; ++m)
        for (int n = 0; n < s.frames; ++n) {
            x.channel(m, 0)[n] = s.i_at(m, n);
            x.channel(m, 1)[n] = s.j_at(m, n);
        }
    return x;
}

void dump_phase_signals(const PhaseSignals& s, const std::string& path) {
    std::ostringstream out;
    out << "n,t_s,m,comp,value\n";
    for (int n = 0; n < s.frames; ++n)
        for (int m = 0; m < s.levels; ++m) {
            out << n << ',' << csv::fmt(n / s.fs_hz, 4) << ',' << m << ",i,"
                << csv::fmt(s.i_at(m, n)) << '\n';
            out << n << ',' << csv::fmt(n / s.fs_hz, 4) << ',' << m << ",j,"
                << csv::fmt(s.j_at(m, n)) << '\n';
        }
    csv::write_text(path, out.str());
}

} // namespace rr

#include "rr/roi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rr/csv.hpp"
#include "rr/error.hpp"

namespace rr {

Image downsample_block_mean(const Image& img, int d) {
    if (d < 1) throw Error(Errc::config_error, "downsample factor must be >= 1");
    if (d == 1) return img;
    const int out_rows = (img.rows + d - 1) / d;
    const int out_cols = (img.cols + d - 1) / d;
    Image out(out_rows, out_cols);
    for (int r = 0; r < out_rows; ++r) {
        const int r0 = r * d, r1 = std::min(r0 + d, img.rows);
        for (int c = 0; c < out_cols; ++c) {
            const int c0 = c * d, c1 = std::min(c0 + d, img.cols);
            double acc = 0.0;
            for (int rr = r0; rr < r1; ++rr)
                for (int cc = c0; cc < c1; ++cc) acc += img.at(rr, cc);
            out.at(r, c) = acc / ((r1 - r0) * (c1 - c0));
        }
    }
    return out;
}

Image upsample_bilinear(const Image& small, int rows, int cols, int d) {
    // Downsampled sample i sits at the block center i*d + (d-1)/2.
    Image out(rows, cols);
    const double offset = (d - 1) / 2.0;
    for (int r = 0; r < rows; ++r) {
        const double gr = std::clamp((r - offset) / d, 0.0, static_cast<double>(small.rows - 1));
        const int r0 = static_cast<int>(gr);
        const int r1 = std::min(r0 + 1, small.rows - 1);
        const double fr = gr - r0;
        for (int c = 0; c < cols; ++c) {
            const double gc =
                std::clamp((c - offset) / d, 0.0, static_cast<double>(small.cols - 1));
            const int c0 = static_cast<int>(gc);
            const int c1 = std::min(c0 + 1, small.cols - 1);
            const double fc = gc - c0;
            out.at(r, c) = (1.0 - fr) * ((1.0 - fc) * small.at(r0, c0) + fc * small.at(r0, c1)) +
                           fr * ((1.0 - fc) * small.at(r1, c0) + fc * small.at(r1, c1));
        }
    }
    return out;
}

Image amplitude_map(const std::vector<Image>& frames, double fs_hz, const EstimatorConfig& est) {
    if (frames.size() < 2) throw Error(Errc::insufficient_frames, "need at least 2 frames");
    const int n_frames = static_cast<int>(frames.size());
    const int n_pix = static_cast<int>(frames.front().size());

    // Pixels become channels of one observation matrix sharing a single f0.
    MotionMatrix x(n_pix, 1, n_frames, fs_hz);
    for (int pix = 0; pix < n_pix; ++pix) {
        double* d = x.channel(pix, 0);
        for (int n = 0; n < n_frames; ++n) d[n] = frames[n].v[pix];
    }
    const F0Search f0 = estimate_f0(x, est);

    remove_channel_means(x);
    Image amp(frames.front().rows, frames.front().cols);
    if (f0.degenerate) return amp;
    const double w = 2.0 * std::acos(-1.0) * f0.f0_hz / fs_hz;
#pragma omp parallel for schedule(static)
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

RoiSet select_rois(const FrameSequence& seq, const RoiConfig& cfg, const EstimatorConfig& est) {
    if (cfg.count < 1) throw Error(Errc::config_error, "need at least one ROI");
    if (cfg.size % 2 == 0) throw Error(Errc::config_error, "ROI size must be odd");
    if (cfg.size > std::min(seq.rows(), seq.cols())) {
        std::ostringstream msg;
        msg << cfg.size << "x" << cfg.size << " ROI does not fit a " << seq.rows() << "x"
            << seq.cols() << " frame";
        throw Error(Errc::frame_too_small, msg.str());
    }
    const int calib = cfg.calib_frames;
    if (calib < 2) throw Error(Errc::config_error, "need at least 2 calibration frames");
    if (cfg.calib_offset < 0 || cfg.calib_offset + calib > seq.size()) {
        std::ostringstream msg;
        msg << "calibration needs frames [" << cfg.calib_offset << ", " << cfg.calib_offset + calib
            << ") of " << seq.size();
        throw Error(Errc::insufficient_frames, msg.str());
    }

    std::vector<Image> down(calib);
    const int n_calib = calib;
#pragma omp parallel for schedule(static)
    for (int n = 0; n < n_calib; ++n)
        down[n] = downsample_block_mean(seq.frames[cfg.calib_offset + n], cfg.downsample);

    const Image amp_small = amplitude_map(down, seq.fs_hz, est);
    Image amp = upsample_bilinear(amp_small, seq.rows(), seq.cols(), cfg.downsample);

    const int half = cfg.size / 2;
    const int min_sep = cfg.min_separation_px > 0 ? cfg.min_separation_px : cfg.size;

    RoiSet rois;
    rois.size = cfg.size;
    rois.amplitude_map = amp;

    // Successive maxima over centers where the box fits, suppressing a
    // Chebyshev neighborhood so boxes stay disjoint at the default spacing.
    Image score = amp;
    const double gone = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < score.rows; ++r)
        for (int c = 0; c < score.cols; ++c)
            if (r < half || r >= score.rows - half || c < half || c >= score.cols - half)
                score.at(r, c) = gone;

    for (int picked = 0; picked < cfg.count; ++picked) {
        int best_r = -1, best_c = -1;
        double best = gone;
        for (int r = half; r < score.rows - half; ++r)
            for (int c = half; c < score.cols - half; ++c)
                if (score.at(r, c) > best) {
                    best = score.at(r, c);
                    best_r = r;
                    best_c = c;
                }
        if (best_r < 0) break; // every remaining center is suppressed
        rois.centers.push_back({best_r, best_c});
        const int r0 = std::max(0, best_r - min_sep + 1), r1 = std::min(score.rows, best_r + min_sep);
        const int c0 = std::max(0, best_c - min_sep + 1), c1 = std::min(score.cols, best_c + min_sep);
        for (int r = r0; r < r1; ++r)
            for (int c = c0; c < c1; ++c) score.at(r, c) = gone;
    }
    return rois;
}

FrameSequence extract_roi(const FrameSequence& seq, std::array<int, 2> center, int size) {
    const int half = size / 2;
    const int r0 = center[0] - half, c0 = center[1] - half;
    if (r0 < 0 || c0 < 0 || r0 + size > seq.rows() || c0 + size > seq.cols())
        throw Error(Errc::frame_too_small, "ROI does not fit inside the frame");
    FrameSequence out;
    out.fs_hz = seq.fs_hz;
    out.frames.reserve(seq.frames.size());
    for (const Image& frame : seq.frames) {
        Image roi(size, size);
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c) roi.at(r, c) = frame.at(r0 + r, c0 + c);
        out.frames.push_back(std::move(roi));
    }
    return out;
}

GateDecision gate_roi(const FrameSequence& roi_frames, int start, int end, double gamma_bin,
                      double gamma_th) {
    if (end - start < 2) throw Error(Errc::insufficient_frames, "gate needs at least 2 frames");
    GateDecision g;
    g.ibar.assign(end - start, 0.0);
    const double n_pix = static_cast<double>(roi_frames.frames.front().size());
    for (int n = start + 1; n < end; ++n) {
        const Image& a = roi_frames.frames[n - 1];
        const Image& b = roi_frames.frames[n];
        size_t moved = 0;
        for (size_t i = 0; i < b.v.size(); ++i)
            if (std::abs(b.v[i] - a.v[i]) >= gamma_bin) ++moved;
        const double ibar = moved / n_pix;
        g.ibar[n - start] = ibar;
        if (ibar > gamma_th) g.kappa = 0;
    }
    return g;
}

FusedEstimate fused_estimate(const std::vector<const MotionMatrix*>& roi_matrices,
                             const std::vector<int>& kappas, const EstimatorConfig& cfg) {
    if (roi_matrices.size() != kappas.size())
        throw Error(Errc::geometry_mismatch, "one gate decision per ROI required");
    std::vector<const MotionMatrix*> admitted;
    for (size_t r = 0; r < roi_matrices.size(); ++r)
        if (kappas[r] != 0) admitted.push_back(roi_matrices[r]);
    if (admitted.empty()) throw Error(Errc::all_rois_gated, "every ROI is gated out");

    const MotionMatrix fused = concat_channels(admitted);
    FusedEstimate out;
    out.search = estimate_f0(fused, cfg);
    if (out.search.degenerate) {
        out.a_hat.assign(static_cast<size_t>(fused.levels) * fused.comps, 0.0);
        return out;
    }
    out.a_hat = estimate_amplitudes(fused, out.search.f0_hz);
    const PeriodicityResult p =
        periodicity_test(out.a_hat, fused.frames, fused.levels, fused.comps, cfg.eta);
    out.stat = p.stat;
    out.periodic = p.periodic;
    return out;
}

void write_roi_manifest(const RoiSet& rois, const std::string& path) {
    std::ostringstream out;
    for (size_t r = 0; r < rois.centers.size(); ++r)
        out << r << ',' << rois.centers[r][1] << ',' << rois.centers[r][0] << ',' << rois.size
            << '\n';
    csv::write_text(path, out.str());
}

RoiSet read_roi_manifest(const std::string& path) {
    RoiSet rois;
    for (const auto& line : csv::read_lines(path)) {
        const auto fields = csv::split(line);
        if (fields.size() != 4) throw Error(Errc::io_error, path + ": expected r,cx,cy,W");
        rois.centers.push_back({csv::to_int(fields[2]), csv::to_int(fields[1])});
        rois.size = csv::to_int(fields[3]);
    }
    if (rois.centers.empty()) throw Error(Errc::io_error, path + ": empty manifest");
    return rois;
}

} // namespace rr

#include "rr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rr/csv.hpp"
#include "rr/error.hpp"
#include "rr/temporal.hpp"

namespace rr {

Method method_from_string(const std::string& s) {
    if (s == "amplitude" || s == "amp") return Method::amplitude;
    if (s == "phase") return Method::phase;
    throw Error(Errc::config_error, "unknown method '" + s + "'");
}

Profile profile_from_string(const std::string& s) {
    if (s == "adult") return Profile::adult;
    if (s == "newborn") return Profile::newborn;
    throw Error(Errc::config_error, "unknown profile '" + s + "'");
}

void RunConfig::apply_profile(Profile p) {
    profile = p;
    switch (p) {
    case Profile::adult:
        f_lo_hz = 0.19;
        f_hi_hz = 0.9;
        levels = 4;
        roi_size = 41;
        rois = 3;
        alpha = 20.0;
        break;
    case Profile::newborn:
        f_lo_hz = 0.3;
        f_hi_hz = 1.1;
        levels = 3;
        roi_size = 21;
        rois = 4;
        alpha = 25.0;
        break;
    }
    window_s = 20.0;
    rho = 0.5;
}

EstimatorConfig RunConfig::estimator_config() const {
    EstimatorConfig est;
    est.f_min_hz = f_min_hz > 0.0 ? f_min_hz : f_lo_hz;
    est.f_max_hz = f_max_hz > 0.0 ? f_max_hz : f_hi_hz;
    est.grid_step_hz = grid_step_hz;
    est.eta = eta >= 0.0 ? eta : 0.0;
    return est;
}

WindowingConfig RunConfig::windowing_config() const { return {window_s, rho}; }

RoiConfig RunConfig::roi_config() const {
    RoiConfig r;
    r.count = rois;
    r.size = roi_size;
    r.downsample = downsample;
    r.calib_frames = calib_frames;
    r.calib_offset = calib_offset;
    r.gamma_bin = gamma_bin;
    r.gamma_th = gamma_th;
    return r;
}

namespace {

MotionMatrix motion_from_frames(const FrameSequence& seq, const RunConfig& cfg,
                                const BandpassDesign& design, int window_frames) {
    const PyramidKernel kernel = PyramidKernel::burt_adelson();
    std::vector<LaplacianStack> stacks = laplacian_sequence(seq.frames, cfg.levels, kernel);

    if (cfg.method == Method::amplitude) {
        filter_stack_sequence(stacks, design);
        AmpConfig amp;
        amp.alphas = default_alpha_schedule(cfg.levels, cfg.alpha);
        if (cfg.gamma_binarize > 0.0) {
            amp.gamma_th = cfg.gamma_binarize;
        } else {
            int calib_start = warmup_samples(design);
            if (calib_start >= seq.size()) calib_start = 0;
            const int calib_end = std::min(seq.size(), calib_start + window_frames);
            amp.gamma_th = auto_gamma_th(stacks, calib_start, calib_end);
        }
        return to_motion_matrix(extract_amp_signals(stacks, amp, seq.fs_hz));
    }

    const std::vector<double> alphas(static_cast<size_t>(cfg.levels) - 1, cfg.alpha);
    return to_motion_matrix(extract_phase_signals(stacks, design, alphas));
}

// Median channel RMS after the warm-up stretch; the level the colored
// calibration trials are normalized to. Breath-bearing channels inflate it,
// which only makes the threshold conservative.
double channel_rms(const std::vector<MotionMatrix>& matrices, int skip) {
    std::vector<double> per_channel;
    for (const MotionMatrix& x : matrices) {
        const int start = std::min(skip, x.frames / 2);
        for (int m = 0; m < x.levels; ++m)
            for (int c = 0; c < x.comps; ++c) {
                const double* d = x.channel(m, c);
                double mean = 0.0;
                for (int n = start; n < x.frames; ++n) mean += d[n];
                mean /= x.frames - start;
                double var = 0.0;
                for (int n = start; n < x.frames; ++n) var += (d[n] - mean) * (d[n] - mean);
                per_channel.push_back(std::sqrt(var / (x.frames - start)));
            }
    }
    if (per_channel.empty()) return 0.0;
    const size_t mid = per_channel.size() / 2;
    std::nth_element(per_channel.begin(), per_channel.begin() + mid, per_channel.end());
    return per_channel[mid];
}

} // namespace

MotionMatrix extract_motion_matrix(const FrameSequence& seq, const RunConfig& cfg) {
    const BandpassDesign design = design_bandpass(cfg.f_lo_hz, cfg.f_hi_hz, seq.fs_hz);
    const int window_frames = static_cast<int>(std::lround(cfg.window_s * seq.fs_hz));
    return motion_from_frames(seq, cfg, design, window_frames);
}

RunResult run_pipeline(const FrameSequence& seq, const RunConfig& cfg,
                       const std::optional<RoiSet>& fixed_rois) {
    if (seq.frames.empty()) throw Error(Errc::empty_sequence, "no frames");
    const double fs = seq.fs_hz;
    const BandpassDesign design = design_bandpass(cfg.f_lo_hz, cfg.f_hi_hz, fs);
    EstimatorConfig est = cfg.estimator_config();

    const std::vector<WindowSpan> windows = window_slicer(seq.size(), cfg.windowing_config(), fs);
    const int window_frames = windows.front().end - windows.front().start;
    const size_t block_len = cfg.use_roi && !fixed_rois && cfg.reselect_every > 0
                                 ? static_cast<size_t>(cfg.reselect_every)
                                 : windows.size();

    RunResult result;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    bool eta_resolved = false;

    for (size_t block = 0; block * block_len < windows.size(); ++block) {
        const size_t first_w = block * block_len;
        const size_t last_w = std::min(first_w + block_len, windows.size());

        std::vector<FrameSequence> roi_videos;
        if (cfg.use_roi) {
            RoiSet rois;
            if (fixed_rois) {
                rois = *fixed_rois;
            } else {
                RoiConfig roi_cfg = cfg.roi_config();
                if (roi_cfg.calib_frames <= 0)
                    roi_cfg.calib_frames =
                        std::min(seq.size() - roi_cfg.calib_offset, window_frames);
                if (block > 0)
                    roi_cfg.calib_offset =
                        std::min(windows[first_w].start, seq.size() - roi_cfg.calib_frames);
                rois = select_rois(seq, roi_cfg, est);
            }
            for (const auto& center : rois.centers)
                roi_videos.push_back(extract_roi(seq, center, rois.size));
            if (roi_videos.empty()) throw Error(Errc::frame_too_small, "no ROI could be placed");
            result.roi_history.push_back(rois);
            if (block == 0) result.rois = std::move(rois);
        }

        std::vector<MotionMatrix> matrices;
        if (cfg.use_roi) {
            matrices.reserve(roi_videos.size());
            for (const FrameSequence& roi : roi_videos)
                matrices.push_back(motion_from_frames(roi, cfg, design, window_frames));
        } else {
            matrices.push_back(motion_from_frames(seq, cfg, design, window_frames));
        }

        if (!eta_resolved) {
            if (cfg.eta >= 0.0) {
                est.eta = cfg.eta;
            } else {
                const double sigma = channel_rms(matrices, warmup_samples(design));
                if (sigma > 0.0) {
                    int total_levels = 0;
                    for (const MotionMatrix& x : matrices) total_levels += x.levels;
                    est.eta = calibrate_eta(total_levels, matrices.front().comps, window_frames,
                                            fs, est, sigma, 200, cfg.seed, &design);
                }
                // Floor against filter-transient dust on noiseless inputs.
                est.eta = std::max(est.eta, 1e-12);
            }
            result.resolved_eta = est.eta;
            eta_resolved = true;
        }

        for (size_t w = first_w; w < last_w; ++w) {
            const WindowSpan& win = windows[w];
            RREstimate row;
            row.window_index = static_cast<int>(w);
            row.t_start_s = win.start / fs;
            row.t_end_s = win.end / fs;
            row.warmup = win.warmup;

            std::vector<int> kappas(matrices.size(), 1);
            if (cfg.use_roi)
                for (size_t r = 0; r < roi_videos.size(); ++r)
                    kappas[r] = gate_roi(roi_videos[r], win.start, win.end, cfg.gamma_bin,
                                         cfg.gamma_th)
                                    .kappa;
            row.kappa = cfg.use_roi ? kappas : std::vector<int>{};

            std::vector<MotionMatrix> slices;
            std::vector<const MotionMatrix*> parts;
            slices.reserve(matrices.size());
            for (const MotionMatrix& x : matrices) slices.push_back(x.slice(win.start, win.end));
            for (const MotionMatrix& x : slices) parts.push_back(&x);

            try {
                const FusedEstimate fused = fused_estimate(parts, kappas, est);
                row.f0_hat_hz = fused.search.f0_hz;
                row.rr_bpm = 60.0 * fused.search.f0_hz;
                row.a_hat = fused.a_hat;
                row.periodicity_stat = fused.stat;
                row.periodic = fused.periodic && !fused.search.degenerate;
            } catch (const Error& e) {
                if (e.code() != Errc::all_rois_gated) throw;
                row.valid = false;
                row.f0_hat_hz = nan;
                row.rr_bpm = nan;
                ++result.invalid_windows;
            }
            result.windows.push_back(std::move(row));
        }
    }
    return result;
}

void write_results_csv(const std::vector<RREstimate>& rows, const std::string& path) {
    std::ostringstream out;
    out << "window,t_start_s,t_end_s,f0_hz,rr_bpm,stat,periodic,warmup\n";
    for (const RREstimate& r : rows)
        out << r.window_index << ',' << csv::fmt(r.t_start_s, 3) << ',' << csv::fmt(r.t_end_s, 3)
            << ',' << csv::fmt(r.f0_hat_hz) << ',' << csv::fmt(r.rr_bpm, 4) << ','
            << csv::fmt(r.periodicity_stat) << ',' << (r.periodic ? 1 : 0) << ','
            << (r.warmup ? 1 : 0) << '\n';
    csv::write_text(path, out.str());
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::map<std::string, std::string> entries;
    for (const auto& raw : csv::read_lines(path)) {
        const std::string line = raw.substr(0, raw.find('#'));
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) entries[key] = val;
    }
    return entries;
}

void apply_config_entries(RunConfig& cfg, const std::map<std::string, std::string>& entries) {
    // Profile first so explicit keys override its defaults.
    if (const auto it = entries.find("profile"); it != entries.end())
        cfg.apply_profile(profile_from_string(it->second));
    for (const auto& [key, val] : entries) {
        if (key == "profile") continue;
        else if (key == "method") cfg.method = method_from_string(val);
        else if (key == "fps") cfg.fs_hz = csv::to_double(val);
        else if (key == "levels") cfg.levels = csv::to_int(val);
        else if (key == "f_lo_hz") cfg.f_lo_hz = csv::to_double(val);
        else if (key == "f_hi_hz") cfg.f_hi_hz = csv::to_double(val);
        else if (key == "alpha") cfg.alpha = csv::to_double(val);
        else if (key == "gamma_binarize") cfg.gamma_binarize = csv::to_double(val);
        else if (key == "use_roi") cfg.use_roi = csv::to_int(val) != 0;
        else if (key == "rois") cfg.rois = csv::to_int(val);
        else if (key == "roi_size") cfg.roi_size = csv::to_int(val);
        else if (key == "downsample") cfg.downsample = csv::to_int(val);
        else if (key == "calib_frames") cfg.calib_frames = csv::to_int(val);
        else if (key == "calib_offset") cfg.calib_offset = csv::to_int(val);
        else if (key == "reselect_every") cfg.reselect_every = csv::to_int(val);
        else if (key == "gamma_bin") cfg.gamma_bin = csv::to_double(val);
        else if (key == "gamma_th") cfg.gamma_th = csv::to_double(val);
        else if (key == "window_s") cfg.window_s = csv::to_double(val);
        else if (key == "rho") cfg.rho = csv::to_double(val);
        else if (key == "grid_step_hz") cfg.grid_step_hz = csv::to_double(val);
        else if (key == "f_min_hz") cfg.f_min_hz = csv::to_double(val);
        else if (key == "f_max_hz") cfg.f_max_hz = csv::to_double(val);
        else if (key == "eta") cfg.eta = csv::to_double(val);
        else if (key == "seed") cfg.seed = static_cast<uint64_t>(csv::to_double(val));
        else throw Error(Errc::config_error, "unknown config key '" + key + "'");
    }
}

void write_config_echo(const RunConfig& cfg, double fs_hz, const std::string& path) {
    std::ostringstream out;
    out << "method=" << (cfg.method == Method::amplitude ? "amplitude" : "phase") << '\n'
        << "profile=" << (cfg.profile == Profile::adult ? "adult" : "newborn") << '\n'
        << "fps=" << csv::fmt(fs_hz, 3) << '\n'
        << "levels=" << cfg.levels << '\n'
        << "f_lo_hz=" << csv::fmt(cfg.f_lo_hz, 3) << '\n'
        << "f_hi_hz=" << csv::fmt(cfg.f_hi_hz, 3) << '\n'
        << "alpha=" << csv::fmt(cfg.alpha, 3) << '\n'
        << "gamma_binarize=" << csv::fmt(cfg.gamma_binarize) << '\n'
        << "use_roi=" << (cfg.use_roi ? 1 : 0) << '\n'
        << "rois=" << cfg.rois << '\n'
        << "roi_size=" << cfg.roi_size << '\n'
        << "downsample=" << cfg.downsample << '\n'
        << "calib_frames=" << cfg.calib_frames << '\n'
        << "calib_offset=" << cfg.calib_offset << '\n'
        << "reselect_every=" << cfg.reselect_every << '\n'
        << "gamma_bin=" << csv::fmt(cfg.gamma_bin, 4) << '\n'
        << "gamma_th=" << csv::fmt(cfg.gamma_th, 4) << '\n'
        << "window_s=" << csv::fmt(cfg.window_s, 3) << '\n'
        << "rho=" << csv::fmt(cfg.rho, 4) << '\n'
        << "grid_step_hz=" << csv::fmt(cfg.grid_step_hz) << '\n'
        << "f_min_hz=" << csv::fmt(cfg.f_min_hz, 4) << '\n'
        << "f_max_hz=" << csv::fmt(cfg.f_max_hz, 4) << '\n'
        << "eta=" << csv::fmt(cfg.eta) << '\n'
        << "seed=" << cfg.seed << '\n';
    csv::write_text(path, out.str());
}

} // namespace rr

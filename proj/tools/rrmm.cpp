// rrmm — respiratory rate estimation from video via motion magnification.
// Subcommands: estimate, synth, eval, roi.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rr/csv.hpp"
#include "rr/error.hpp"
#include "rr/eval.hpp"
#include "rr/frame_io.hpp"
#include "rr/pipeline.hpp"
#include "rr/roi.hpp"
#include "rr/synth.hpp"

namespace {

struct EstimateFlags {
    std::string input;
    std::string config_file;
    std::string out = "results.csv";
    std::string method, profile;
    std::string roi_manifest;
    std::string dump_signals;
    bool no_roi = false;
    std::optional<double> fps, f_lo, f_hi, alpha, gamma_binarize, window_s, rho, grid_step, f_min,
        f_max, eta, gamma_bin, gamma_th;
    std::optional<int> levels, rois, roi_size, downsample, calib_frames, calib_offset,
        reselect_every;
    std::optional<uint64_t> seed;
};

void add_common_flags(CLI::App* cmd, EstimateFlags& f) {
    cmd->add_option("input", f.input, "video: .y8 file or directory of .pgm/.png frames")
        ->required();
    cmd->add_option("--config", f.config_file, "key=value config file");
    cmd->add_option("--fps", f.fps, "frame rate (required for directories, overrides .y8 meta)");
    cmd->add_option("--method", f.method, "amplitude | phase");
    cmd->add_option("--profile", f.profile, "adult | newborn");
    cmd->add_option("--levels", f.levels, "pyramid levels M");
    cmd->add_option("--f-lo", f.f_lo, "band low cutoff [Hz]");
    cmd->add_option("--f-hi", f.f_hi, "band high cutoff [Hz]");
    cmd->add_option("--alpha", f.alpha, "amplification factor");
    cmd->add_option("--gamma-binarize", f.gamma_binarize,
                    "amplitude-path binarization threshold (0 = auto)");
    cmd->add_flag("--no-roi", f.no_roi, "process the full frame without ROI selection");
    cmd->add_option("--rois", f.rois, "number of ROIs R");
    cmd->add_option("--roi-size", f.roi_size, "ROI side W [px], odd");
    cmd->add_option("--downsample", f.downsample, "ROI-selection spatial downsampling D");
    cmd->add_option("--calib-frames", f.calib_frames, "ROI calibration frames L (0 = one window)");
    cmd->add_option("--calib-offset", f.calib_offset, "first calibration frame");
    cmd->add_option("--reselect-every", f.reselect_every,
                    "re-run ROI selection every K windows (0 = once per run)");
    cmd->add_option("--gamma-bin", f.gamma_bin, "gate frame-difference threshold");
    cmd->add_option("--gamma-th", f.gamma_th, "gate average-motion threshold");
    cmd->add_option("--window-s", f.window_s, "estimation window length [s]");
    cmd->add_option("--rho", f.rho, "window interlacing factor in [0,1)");
    cmd->add_option("--grid-step", f.grid_step, "frequency grid step [Hz]");
    cmd->add_option("--f-min", f.f_min, "search band low edge [Hz] (0 = filter band)");
    cmd->add_option("--f-max", f.f_max, "search band high edge [Hz] (0 = filter band)");
    cmd->add_option("--eta", f.eta, "periodicity threshold (negative = auto-calibrate)");
    cmd->add_option("--seed", f.seed, "seed for auto-calibration");
    cmd->add_option("--out", f.out, "output path");
}

rr::RunConfig resolve_config(const EstimateFlags& f) {
    rr::RunConfig cfg;
    if (!f.profile.empty()) cfg.apply_profile(rr::profile_from_string(f.profile));
    if (!f.config_file.empty())
        rr::apply_config_entries(cfg, rr::read_config_file(f.config_file));
    if (!f.method.empty()) cfg.method = rr::method_from_string(f.method);
    if (f.fps) cfg.fs_hz = *f.fps;
    if (f.levels) cfg.levels = *f.levels;
    if (f.f_lo) cfg.f_lo_hz = *f.f_lo;
    if (f.f_hi) cfg.f_hi_hz = *f.f_hi;
    if (f.alpha) cfg.alpha = *f.alpha;
    if (f.gamma_binarize) cfg.gamma_binarize = *f.gamma_binarize;
    if (f.no_roi) cfg.use_roi = false;
    if (f.rois) cfg.rois = *f.rois;
    if (f.roi_size) cfg.roi_size = *f.roi_size;
    if (f.downsample) cfg.downsample = *f.downsample;
    if (f.calib_frames) cfg.calib_frames = *f.calib_frames;
    if (f.calib_offset) cfg.calib_offset = *f.calib_offset;
    if (f.reselect_every) cfg.reselect_every = *f.reselect_every;
    if (f.gamma_bin) cfg.gamma_bin = *f.gamma_bin;
    if (f.gamma_th) cfg.gamma_th = *f.gamma_th;
    if (f.window_s) cfg.window_s = *f.window_s;
    if (f.rho) cfg.rho = *f.rho;
    if (f.grid_step) cfg.grid_step_hz = *f.grid_step;
    if (f.f_min) cfg.f_min_hz = *f.f_min;
    if (f.f_max) cfg.f_max_hz = *f.f_max;
    if (f.eta) cfg.eta = *f.eta;
    if (f.seed) cfg.seed = *f.seed;
    return cfg;
}

int cmd_estimate(const EstimateFlags& f) {
    rr::RunConfig cfg = resolve_config(f);
    const rr::FrameSequence seq = rr::load_sequence(f.input, cfg.fs_hz);

    std::optional<rr::RoiSet> fixed;
    if (!f.roi_manifest.empty()) fixed = rr::read_roi_manifest(f.roi_manifest);

    const rr::RunResult result = rr::run_pipeline(seq, cfg, fixed);
    rr::write_results_csv(result.windows, f.out);
    rr::write_config_echo(cfg, seq.fs_hz, f.out + ".config");
    if (!result.rois.centers.empty()) rr::write_roi_manifest(result.rois, f.out + ".rois");

    if (!f.dump_signals.empty()) {
        const rr::MotionMatrix x = rr::extract_motion_matrix(seq, cfg);
        // Columns n,t_s,m[,comp],value depending on the method.
        std::string dump = cfg.method == rr::Method::amplitude ? "n,t_s,m,value\n"
                                                               : "n,t_s,m,comp,value\n";
        for (int n = 0; n < x.frames; ++n)
            for (int m = 0; m < x.levels; ++m)
                for (int c = 0; c < x.comps; ++c) {
                    dump += std::to_string(n) + ',' + rr::csv::fmt(n / seq.fs_hz, 4) + ',' +
                            std::to_string(m);
                    if (x.comps == 2) dump += c == 0 ? ",i" : ",j";
                    dump += ',' + rr::csv::fmt(x.channel(m, c)[n]) + '\n';
                }
        rr::csv::write_text(f.dump_signals, dump);
    }

    int periodic = 0, valid = 0;
    for (const rr::RREstimate& w : result.windows) {
        if (w.valid) ++valid;
        if (w.periodic) ++periodic;
    }
    std::printf("%zu windows (%d valid, %d periodic), eta=%g -> %s\n", result.windows.size(),
                valid, periodic, result.resolved_eta, f.out.c_str());
    if (valid == 0) return 2;
    return 0;
}

int cmd_synth(const std::string& spec_path, uint64_t seed, const std::string& out,
              const std::string& truth_path, double window_s, double rho) {
    const rr::SynthSpec spec = rr::read_synth_spec(spec_path);
    rr::GroundTruth gt;
    const rr::FrameSequence seq = spec.regions.size() == 1 ? rr::generate(spec, seed, &gt)
                                                           : rr::generate_multiroi(spec, seed, &gt);
    rr::save_y8(seq, out);
    const auto windows =
        rr::window_slicer(seq.size(), rr::WindowingConfig{window_s, rho}, seq.fs_hz);
    const std::string truth = truth_path.empty() ? out + ".truth.csv" : truth_path;
    rr::write_truth_csv(rr::truth_rows(gt, windows), truth);
    std::printf("%d frames %dx%d @ %g fps -> %s (+ %s)\n", seq.size(), seq.cols(), seq.rows(),
                seq.fs_hz, out.c_str(), truth.c_str());
    return 0;
}

int cmd_eval(const std::string& results_path, const std::string& ref_path,
             const rr::EvalOptions& opts, const std::string& out, const std::string& plot_path) {
    const auto est = rr::read_estimates_csv(results_path);
    const auto ref = rr::read_reference_csv(ref_path);
    const rr::EvalReport report = rr::evaluate(est, ref, opts);
    rr::write_report_csv(report, out + ".csv");
    rr::write_report_summary(report, out + ".txt");
    if (!plot_path.empty()) rr::write_plot_data(report, plot_path);
    std::printf("RMSE %s over %d windows, %.1f%% within +/-%.0f%% band%s\n",
                rr::format_rmse_db(report).c_str(), report.windows_scored,
                100.0 * report.in_band_fraction, 100.0 * opts.tolerance_pct,
                report.genie_applied ? " (genie)" : "");
    return 0;
}

int cmd_roi(const EstimateFlags& f, const std::string& heatmap_path) {
    rr::RunConfig cfg = resolve_config(f);
    const rr::FrameSequence seq = rr::load_sequence(f.input, cfg.fs_hz);
    rr::RoiConfig roi_cfg = cfg.roi_config();
    if (roi_cfg.calib_frames <= 0) {
        const int window_frames = static_cast<int>(std::lround(cfg.window_s * seq.fs_hz));
        roi_cfg.calib_frames = std::min(seq.size() - roi_cfg.calib_offset, window_frames);
    }
    const rr::RoiSet rois = rr::select_rois(seq, roi_cfg, cfg.estimator_config());
    rr::write_roi_manifest(rois, f.out);
    if (!heatmap_path.empty()) {
        // Min-max normalized amplitude map for visual inspection.
        rr::Image map = rois.amplitude_map;
        double lo = map.v[0], hi = map.v[0];
        for (const double v : map.v) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double span = hi > lo ? hi - lo : 1.0;
        for (double& v : map.v) v = (v - lo) / span;
        rr::save_pgm(map, heatmap_path);
    }
    for (size_t r = 0; r < rois.centers.size(); ++r)
        std::printf("roi %zu: center (x=%d, y=%d) size %d\n", r, rois.centers[r][1],
                    rois.centers[r][0], rois.size);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"respiratory rate estimation from video via motion magnification"};
    app.require_subcommand(1);

    EstimateFlags est_flags;
    CLI::App* est = app.add_subcommand("estimate", "run a pipeline and write per-window results");
    add_common_flags(est, est_flags);
    est->add_option("--roi-manifest", est_flags.roi_manifest, "reuse ROIs from a manifest file");
    est->add_option("--dump-signals", est_flags.dump_signals, "write extracted motion signals CSV");

    std::string synth_spec, synth_out = "synth.y8", synth_truth;
    uint64_t synth_seed = 1;
    double synth_window_s = 20.0, synth_rho = 0.5;
    CLI::App* synth = app.add_subcommand("synth", "generate a ground-truth video");
    synth->add_option("spec", synth_spec, "synthesis spec file")->required();
    synth->add_option("--seed", synth_seed, "noise seed");
    synth->add_option("--out", synth_out, "output .y8 path");
    synth->add_option("--truth", synth_truth, "ground-truth CSV path");
    synth->add_option("--window-s", synth_window_s, "window length for truth rows [s]");
    synth->add_option("--rho", synth_rho, "interlacing factor for truth rows");

    std::string eval_results, eval_ref, eval_out = "report", eval_plot;
    rr::EvalOptions eval_opts;
    CLI::App* eval = app.add_subcommand("eval", "score results against a reference");
    eval->add_option("results", eval_results, "per-window results CSV")->required();
    eval->add_option("reference", eval_ref, "reference CSV window,f0_hz")->required();
    eval->add_flag("--genie", eval_opts.genie, "apply genie-aided double-frequency correction");
    eval->add_option("--ref-offset", eval_opts.ref_offset, "window index offset of the reference");
    eval->add_option("--tolerance", eval_opts.tolerance_pct, "tolerance band fraction");
    eval->add_option("--db-base", eval_opts.db_factor, "dB convention factor (20 or 10)");
    eval->add_option("--out", eval_out, "report base path (.csv and .txt appended)");
    eval->add_option("--plot-data", eval_plot, "per-window plot data file");

    EstimateFlags roi_flags;
    roi_flags.out = "rois.txt";
    std::string roi_heatmap;
    CLI::App* roi = app.add_subcommand("roi", "select ROIs and write the manifest");
    add_common_flags(roi, roi_flags);
    roi->add_option("--heatmap", roi_heatmap, "write the amplitude map as a PGM heatmap");

    CLI11_PARSE(app, argc, argv);

    try {
        if (est->parsed()) return cmd_estimate(est_flags);
        if (synth->parsed())
            return cmd_synth(synth_spec, synth_seed, synth_out, synth_truth, synth_window_s,
                             synth_rho);
        if (eval->parsed())
            return cmd_eval(eval_results, eval_ref, eval_opts, eval_out, eval_plot);
        if (roi->parsed()) return cmd_roi(roi_flags, roi_heatmap);
    } catch (const rr::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

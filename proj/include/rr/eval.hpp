#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rr {

// sqrt( sum |est - ref|^2 / sum |ref|^2 ).
double normalized_rmse(std::span<const double> est, std::span<const double> ref);

// (1 - pct) f0 .. (1 + pct) f0, inclusive membership.
std::pair<double, double> tolerance_band(double f_ref, double pct = 0.15);
std::vector<uint8_t> in_band(std::span<const double> est, std::span<const double> ref,
                             double pct = 0.15);

// Benchmark-only correction: halve an estimate whenever the halved value is
// strictly closer to the reference.
std::vector<double> genie_correct(std::span<const double> est, std::span<const double> ref);

struct EvalOptions {
    bool genie = false;
    double tolerance_pct = 0.15;
    double db_factor = 20.0; // 20 log10 by default; the ratio is an RMS ratio
    int ref_offset = 0;      // est window w pairs ref window w - offset
    double db_floor = -60.0;
};

struct WindowScore {
    int window = 0;
    double t_s = 0.0;
    double f_est = 0.0;
    double f_ref = 0.0;
    double band_lo = 0.0, band_hi = 0.0;
    bool in_band = false;
};

struct EvalReport {
    double rmse = 0.0;
    double rmse_db = 0.0;
    bool rmse_below_floor = false;
    double in_band_fraction = 0.0;
    int windows_scored = 0;
    int excluded_warmup = 0;
    int excluded_invalid = 0; // windows without a usable estimate
    bool genie_applied = false;
    std::vector<WindowScore> rows;
};

struct EstimateRow {
    int window = 0;
    double t_start_s = 0.0, t_end_s = 0.0;
    double f0_hz = 0.0;
    double rr_bpm = 0.0;
    double stat = 0.0;
    int periodic = 0;
    int warmup = 0;
    bool valid = true;
};

struct TruthRowRef {
    int window = 0;
    double f0_hz = 0.0;
};

// Score an estimate CSV against a reference, aligned by window index.
// Warmup and invalid windows are excluded before the RMSE.
EvalReport evaluate(const std::vector<EstimateRow>& est, const std::vector<TruthRowRef>& ref,
                    const EvalOptions& opts);

std::vector<EstimateRow> read_estimates_csv(const std::string& path);
std::vector<TruthRowRef> read_reference_csv(const std::string& path);

void write_report_csv(const EvalReport& r, const std::string& path);
void write_report_summary(const EvalReport& r, const std::string& path);
void write_plot_data(const EvalReport& r, const std::string& path);

std::string format_rmse_db(const EvalReport& r);

} // namespace rr

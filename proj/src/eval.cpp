#include "rr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "rr/csv.hpp"
#include "rr/error.hpp"

namespace rr {

double normalized_rmse(std::span<const double> est, std::span<const double> ref) {
    if (est.size() != ref.size())
        throw Error(Errc::length_mismatch, "estimate and reference differ in length");
    if (est.empty()) throw Error(Errc::length_mismatch, "no windows to score");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < est.size(); ++i) {
        const double e = est[i] - ref[i];
        num += e * e;
        den += ref[i] * ref[i];
    }
    if (den == 0.0) throw Error(Errc::zero_reference, "reference is identically zero");
    return std::sqrt(num / den);
}

std::pair<double, double> tolerance_band(double f_ref, double pct) {
    return {(1.0 - pct) * f_ref, (1.0 + pct) * f_ref};
}

std::vector<uint8_t> in_band(std::span<const double> est, std::span<const double> ref, double pct) {
    if (est.size() != ref.size())
        throw Error(Errc::length_mismatch, "estimate and reference differ in length");
    std::vector<uint8_t> out(est.size());
    for (size_t i = 0; i < est.size(); ++i) {
        const auto [lo, hi] = tolerance_band(ref[i], pct);
        out[i] = est[i] >= lo && est[i] <= hi ? 1 : 0;
    }
    return out;
}

std::vector<double> genie_correct(std::span<const double> est, std::span<const double> ref) {
    if (est.size() != ref.size())
        throw Error(Errc::length_mismatch, "estimate and reference differ in length");
    std::vector<double> out(est.begin(), est.end());
    for (size_t i = 0; i < out.size(); ++i)
        if (std::abs(out[i] / 2.0 - ref[i]) < std::abs(out[i] - ref[i])) out[i] /= 2.0;
    return out;
}

EvalReport evaluate(const std::vector<EstimateRow>& est, const std::vector<TruthRowRef>& ref,
                    const EvalOptions& opts) {
    std::map<int, double> ref_by_window;
    for (const TruthRowRef& r : ref) ref_by_window[r.window] = r.f0_hz;

    EvalReport report;
    report.genie_applied = opts.genie;
    std::vector<double> f_est, f_ref;
    std::vector<const EstimateRow*> kept;
    for (const EstimateRow& row : est) {
        if (row.warmup) {
            ++report.excluded_warmup;
            continue;
        }
        if (!row.valid || std::isnan(row.f0_hz)) {
            ++report.excluded_invalid;
            continue;
        }
        const auto it = ref_by_window.find(row.window - opts.ref_offset);
        if (it == ref_by_window.end())
            throw Error(Errc::length_mismatch,
                        "no reference for window " + std::to_string(row.window));
        kept.push_back(&row);
        f_est.push_back(row.f0_hz);
        f_ref.push_back(it->second);
    }
    if (kept.empty()) throw Error(Errc::length_mismatch, "no scorable windows");

    if (opts.genie) f_est = genie_correct(f_est, f_ref);

    report.rmse = normalized_rmse(f_est, f_ref);
    const double floor_lin = std::pow(10.0, opts.db_floor / opts.db_factor);
    if (report.rmse < floor_lin) {
        report.rmse_below_floor = true;
        report.rmse_db = opts.db_floor;
    } else {
        report.rmse_db = opts.db_factor * std::log10(report.rmse);
    }

    const std::vector<uint8_t> band = in_band(f_est, f_ref, opts.tolerance_pct);
    size_t hits = 0;
    for (size_t i = 0; i < kept.size(); ++i) {
        WindowScore score;
        score.window = kept[i]->window;
        score.t_s = kept[i]->t_start_s;
        score.f_est = f_est[i];
        score.f_ref = f_ref[i];
        std::tie(score.band_lo, score.band_hi) = tolerance_band(f_ref[i], opts.tolerance_pct);
        score.in_band = band[i] != 0;
        if (score.in_band) ++hits;
        report.rows.push_back(score);
    }
    report.windows_scored = static_cast<int>(kept.size());
    report.in_band_fraction = static_cast<double>(hits) / kept.size();
    return report;
}

std::vector<EstimateRow> read_estimates_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw Error(Errc::io_error, path + " is empty");
    std::vector<EstimateRow> rows;
    for (size_t i = 1; i < lines.size(); ++i) { // skip header
        const auto f = csv::split(lines[i]);
        if (f.size() != 8) throw Error(Errc::io_error, path + ": expected 8 columns");
        EstimateRow row;
        row.window = csv::to_int(f[0]);
        row.t_start_s = csv::to_double(f[1]);
        row.t_end_s = csv::to_double(f[2]);
        row.f0_hz = csv::to_double(f[3]);
        row.rr_bpm = csv::to_double(f[4]);
        row.stat = csv::to_double(f[5]);
        row.periodic = csv::to_int(f[6]);
        row.warmup = csv::to_int(f[7]);
        row.valid = !std::isnan(row.f0_hz);
        rows.push_back(row);
    }
    return rows;
}

std::vector<TruthRowRef> read_reference_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    std::vector<TruthRowRef> rows;
    for (const auto& line : lines) {
        if (line.starts_with("window")) continue; // header
        const auto f = csv::split(line);
        if (f.size() < 2) throw Error(Errc::io_error, path + ": expected window,f0_hz[,...]");
        rows.push_back({csv::to_int(f[0]), csv::to_double(f[1])});
    }
    if (rows.empty()) throw Error(Errc::io_error, path + ": no reference rows");
    return rows;
}

std::string format_rmse_db(const EvalReport& r) {
    if (r.rmse_below_floor) return "< " + csv::fmt(r.rmse_db, 1) + " dB";
    return csv::fmt(r.rmse_db, 2) + " dB";
}

void write_report_csv(const EvalReport& r, const std::string& path) {
    std::ostringstream out;
    out << "window,t_s,f_est_hz,f_ref_hz,band_lo_hz,band_hi_hz,in_band\n";
    for (const WindowScore& s : r.rows)
        out << s.window << ',' << csv::fmt(s.t_s, 3) << ',' << csv::fmt(s.f_est) << ','
            << csv::fmt(s.f_ref) << ',' << csv::fmt(s.band_lo) << ',' << csv::fmt(s.band_hi) << ','
            << (s.in_band ? 1 : 0) << '\n';
    csv::write_text(path, out.str());
}

void write_report_summary(const EvalReport& r, const std::string& path) {
    std::ostringstream out;
    out << "windows_scored=" << r.windows_scored << "\n"
        << "excluded_warmup=" << r.excluded_warmup << "\n"
        << "excluded_invalid=" << r.excluded_invalid << "\n"
        << "genie=" << (r.genie_applied ? 1 : 0) << "\n"
        << "rmse=" << csv::fmt(r.rmse) << "\n"
        << "rmse_db=" << format_rmse_db(r) << "\n"
        << "in_band_fraction=" << csv::fmt(r.in_band_fraction, 4) << "\n";
    csv::write_text(path, out.str());
}

void write_plot_data(const EvalReport& r, const std::string& path) {
    std::ostringstream out;
    out << "t,f_est,f_ref,lo,hi\n";
    for (const WindowScore& s : r.rows)
        out << csv::fmt(s.t_s, 3) << ',' << csv::fmt(s.f_est) << ',' << csv::fmt(s.f_ref) << ','
            << csv::fmt(s.band_lo) << ',' << csv::fmt(s.band_hi) << '\n';
    csv::write_text(path, out.str());
}

} // namespace rr

#include "rr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rr/csv.hpp"
#include "rr/error.hpp"
#include "gaussian.hpp"

namespace rr {

namespace {

constexpr double k_pi = 3.14159265358979323846;

// Pattern samples on an integer grid extended along the translation axis
// (rows) so shifted lookups stay inside.
struct PatternGrid {
    int margin = 0;
    Image ext; // (h + 2*margin) x w
};

double pattern_value(Pattern p, double dr, double dc, int w, int h) {
    const double sigma = std::min(w, h) / 6.0;
    const double env = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
    switch (p) {
    case Pattern::gabor: {
        const double carrier_freq = 0.15; // cycles per pixel along the motion axis
        return 0.5 + 0.45 * env * std::cos(2.0 * k_pi * carrier_freq * dr);
    }
    case Pattern::blob:
        return 0.5 + 0.45 * env;
    case Pattern::gradient:
        return std::clamp(0.5 + 0.8 * dr / h, 0.05, 0.95);
    }
    return 0.5;
}

PatternGrid make_pattern(const MotionRegion& region, double max_shift) {
    PatternGrid grid;
    grid.margin = static_cast<int>(std::ceil(max_shift)) + 2;
    grid.ext = Image(region.h + 2 * grid.margin, region.w);
    const double cr = (region.h - 1) / 2.0;
    const double cc = (region.w - 1) / 2.0;
    for (int r = 0; r < grid.ext.rows; ++r)
        for (int c = 0; c < grid.ext.cols; ++c)
            grid.ext.at(r, c) =
                pattern_value(region.pattern, (r - grid.margin) - cr, c - cc, region.w, region.h);
    return grid;
}

// Bilinear lookup of the pattern translated down by d.
double sample_shifted(const PatternGrid& grid, int rp, int cp, double d) {
    const double src = rp - d + grid.margin;
    const int r0 = static_cast<int>(std::floor(src));
    const double f = src - r0;
    return (1.0 - f) * grid.ext.at(r0, cp) + f * grid.ext.at(r0 + 1, cp);
}

struct DistractorFrames {
    int first = 0, last = -1; // active frame range [first, last)
    double magnitude = 0.0;
};

DistractorFrames distractor_frames(const std::optional<Distractor>& d, double fs, int frames) {
    DistractorFrames out;
    if (!d) return out;
    out.first = static_cast<int>(std::ceil(d->onset_s * fs));
    out.last = std::min(frames, static_cast<int>(std::ceil((d->onset_s + d->duration_s) * fs)));
    out.magnitude = d->magnitude_px;
    return out;
}

// Alternating +/- magnitude while active: a shake the frame-difference gate
// sees on every frame of the interval while its band energy stays near fs/2.
double jitter_shift(const DistractorFrames& d, int n) {
    if (n < d.first || n >= d.last) return 0.0;
    return (n - d.first) % 2 == 0 ? d.magnitude : -d.magnitude;
}

void validate_spec(const SynthSpec& spec, bool multi) {
    if (spec.width < 2 || spec.height < 2 || !(spec.fs_hz > 0.0) || !(spec.duration_s > 0.0))
        throw Error(Errc::spec_invalid, "bad canvas, rate or duration");
    if (spec.noise_sigma < 0.0) throw Error(Errc::spec_invalid, "negative noise sigma");
    if (spec.regions.empty()) throw Error(Errc::spec_invalid, "no motion region");
    if (!multi && spec.regions.size() != 1)
        throw Error(Errc::spec_invalid, "single-region generator got several regions");
    for (const MotionRegion& r : spec.regions) {
        if (r.w < 2 || r.h < 2 || r.x < 0 || r.y < 0 || r.x + r.w > spec.width ||
            r.y + r.h > spec.height)
            throw Error(Errc::spec_invalid, "motion region outside the canvas");
        if (!(r.f0_hz > 0.0) || r.f0_hz >= spec.fs_hz / 2.0)
            throw Error(Errc::spec_invalid, "breathing frequency must stay below fs/2");
        if (std::abs(r.amplitude_px) > 5.0)
            throw Error(Errc::spec_invalid, "displacement amplitude must stay within 5 px");
    }
    for (size_t a = 0; a + 1 < spec.regions.size(); ++a)
        for (size_t b = a + 1; b < spec.regions.size(); ++b) {
            const MotionRegion& ra = spec.regions[a];
            const MotionRegion& rb = spec.regions[b];
            const bool disjoint = ra.x + ra.w <= rb.x || rb.x + rb.w <= ra.x ||
                                  ra.y + ra.h <= rb.y || rb.y + rb.h <= ra.y;
            if (!disjoint) throw Error(Errc::overlapping_regions, "motion regions overlap");
        }
}

FrameSequence render(const SynthSpec& spec, uint64_t seed, GroundTruth* gt, bool multi) {
    validate_spec(spec, multi);
    const int n_frames = static_cast<int>(std::lround(spec.duration_s * spec.fs_hz));
    if (n_frames < 2) throw Error(Errc::spec_invalid, "duration shorter than 2 frames");
    const double ts = 1.0 / spec.fs_hz;

    std::vector<PatternGrid> grids;
    std::vector<DistractorFrames> events;
    grids.reserve(spec.regions.size());
    for (const MotionRegion& region : spec.regions) {
        const DistractorFrames ev = distractor_frames(region.distractor, spec.fs_hz, n_frames);
        // The whole-frame shift of the single-region generator is applied to
        // the composed frame, not folded into the region pattern.
        const double event_mag = multi ? std::abs(ev.magnitude) : 0.0;
        grids.push_back(make_pattern(region, std::abs(region.amplitude_px) + event_mag));
        events.push_back(ev);
    }

    if (gt) {
        *gt = GroundTruth{};
        gt->fs_hz = spec.fs_hz;
        gt->frames = n_frames;
        for (size_t r = 0; r < spec.regions.size(); ++r) {
            const MotionRegion& region = spec.regions[r];
            gt->region_f0_hz.push_back(region.f0_hz);
            gt->region_centers.push_back(
                {region.y + (region.h - 1) / 2, region.x + (region.w - 1) / 2});
            if (events[r].last > events[r].first)
                gt->distractor_frames.emplace_back(events[r].first,
                                                   std::min(events[r].last, n_frames - 1));
        }
    }

    FrameSequence seq;
    seq.fs_hz = spec.fs_hz;
    seq.frames.assign(n_frames, Image());

#pragma omp parallel for schedule(static)
    for (int n = 0; n < n_frames; ++n) {
        Image frame(spec.height, spec.width, 0.5);
        for (size_t r = 0; r < spec.regions.size(); ++r) {
            const MotionRegion& region = spec.regions[r];
            double d = region.amplitude_px * std::sin(2.0 * k_pi * region.f0_hz * n * ts);
            if (multi) d += jitter_shift(events[r], n);
            for (int rp = 0; rp < region.h; ++rp)
                for (int cp = 0; cp < region.w; ++cp)
                    frame.at(region.y + rp, region.x + cp) = sample_shifted(grids[r], rp, cp, d);
        }
        if (!multi && !spec.regions.empty()) {
            const double shake = jitter_shift(events[0], n);
            if (shake != 0.0) {
                Image shifted(frame.rows, frame.cols);
                for (int rp = 0; rp < frame.rows; ++rp) {
                    const double src = std::clamp(rp - shake, 0.0, frame.rows - 1.0);
                    const int r0 = static_cast<int>(src);
                    const int r1 = std::min(r0 + 1, frame.rows - 1);
                    const double f = src - r0;
                    for (int cp = 0; cp < frame.cols; ++cp)
                        shifted.at(rp, cp) =
                            (1.0 - f) * frame.at(r0, cp) + f * frame.at(r1, cp);
                }
                frame = std::move(shifted);
            }
        }
        if (spec.noise_sigma > 0.0) {
            detail::Gaussian gauss(seed, static_cast<uint64_t>(n) + 1);
            for (double& v : frame.v) v = std::clamp(v + spec.noise_sigma * gauss(), 0.0, 1.0);
        }
        seq.frames[n] = std::move(frame);
    }
    return seq;
}

} // namespace

Pattern pattern_from_string(const std::string& s) {
    if (s == "gradient") return Pattern::gradient;
    if (s == "gabor") return Pattern::gabor;
    if (s == "blob") return Pattern::blob;
    throw Error(Errc::spec_invalid, "unknown pattern '" + s + "'");
}

const char* pattern_name(Pattern p) {
    switch (p) {
    case Pattern::gradient: return "gradient";
    case Pattern::gabor: return "gabor";
    case Pattern::blob: return "blob";
    }
    return "?";
}

FrameSequence generate(const SynthSpec& spec, uint64_t seed, GroundTruth* gt) {
    return render(spec, seed, gt, false);
}

FrameSequence generate_multiroi(const SynthSpec& spec, uint64_t seed, GroundTruth* gt) {
    return render(spec, seed, gt, true);
}

double noise_sigma_for_snr_db(const SynthSpec& spec, double snr_db) {
    validate_spec(spec, true);
    const MotionRegion& region = spec.regions.front();
    const PatternGrid grid = make_pattern(region, std::abs(region.amplitude_px));
    const int period = std::max(2, static_cast<int>(std::lround(spec.fs_hz / region.f0_hz)));
    const double ts = 1.0 / spec.fs_hz;

    // Mean temporal variance of the clean moving pattern over its region.
    const int n_pix = region.w * region.h;
    std::vector<double> sum(n_pix, 0.0), sum_sq(n_pix, 0.0);
    for (int n = 0; n < period; ++n) {
        const double d = region.amplitude_px * std::sin(2.0 * k_pi * region.f0_hz * n * ts);
        for (int rp = 0; rp < region.h; ++rp)
            for (int cp = 0; cp < region.w; ++cp) {
                const double v = sample_shifted(grid, rp, cp, d);
                sum[rp * region.w + cp] += v;
                sum_sq[rp * region.w + cp] += v * v;
            }
    }
    double power = 0.0;
    for (int i = 0; i < n_pix; ++i) {
        const double mean = sum[i] / period;
        power += sum_sq[i] / period - mean * mean;
    }
    power /= n_pix;
    return std::sqrt(std::max(power, 0.0) * std::pow(10.0, -snr_db / 10.0));
}

SynthSpec read_synth_spec(const std::string& path) {
    SynthSpec spec;
    spec.noise_sigma = 0.0;
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
        if (key.empty()) continue;
        if (key == "width") spec.width = csv::to_int(val);
        else if (key == "height") spec.height = csv::to_int(val);
        else if (key == "fps") spec.fs_hz = csv::to_double(val);
        else if (key == "duration_s") spec.duration_s = csv::to_double(val);
        else if (key == "noise_sigma") spec.noise_sigma = csv::to_double(val);
        else if (key == "region") {
            const auto f = csv::split(val);
            if (f.size() != 7 && f.size() != 10)
                throw Error(Errc::spec_invalid,
                            "region needs x,y,w,h,pattern,f0_hz,amplitude_px[,onset_s,duration_s,"
                            "magnitude_px]");
            MotionRegion region;
            region.x = csv::to_int(f[0]);
            region.y = csv::to_int(f[1]);
            region.w = csv::to_int(f[2]);
            region.h = csv::to_int(f[3]);
            region.pattern = pattern_from_string(f[4]);
            region.f0_hz = csv::to_double(f[5]);
            region.amplitude_px = csv::to_double(f[6]);
            if (f.size() == 10)
                region.distractor =
                    Distractor{csv::to_double(f[7]), csv::to_double(f[8]), csv::to_double(f[9])};
            spec.regions.push_back(region);
        } else {
            throw Error(Errc::spec_invalid, "unknown spec key '" + key + "'");
        }
    }
    if (spec.regions.empty()) throw Error(Errc::spec_invalid, path + ": no region line");
    return spec;
}

std::vector<TruthRow> truth_rows(const GroundTruth& gt, const std::vector<WindowSpan>& windows) {
    std::vector<TruthRow> rows;
    rows.reserve(windows.size());
    for (size_t w = 0; w < windows.size(); ++w) {
        TruthRow row;
        row.window = static_cast<int>(w);
        row.f0_hz = gt.region_f0_hz.empty() ? 0.0 : gt.region_f0_hz.front();
        // A window is marked only when its internal frame differences see the
        // event (entry transition through exit transition).
        const int lo = windows[w].start + 1, hi = windows[w].end - 1;
        for (const auto& [first, last] : gt.distractor_frames)
            if (std::max(first, lo) <= std::min(last, hi)) row.distractor = 1;
        rows.push_back(row);
    }
    return rows;
}

void write_truth_csv(const std::vector<TruthRow>& rows, const std::string& path) {
    std::ostringstream out;
    out << "window,f0_hz,distractor_flag\n";
    for (const TruthRow& r : rows)
        out << r.window << ',' << csv::fmt(r.f0_hz) << ',' << r.distractor << '\n';
    csv::write_text(path, out.str());
}

} // namespace rr

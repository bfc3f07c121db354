#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "restphase/core.hpp"
#include "restphase/errors.hpp"

namespace restphase {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Small deterministic RNG; identical streams across platforms.
struct Rng {
    std::uint64_t state;
    bool has_cached = false;
    double cached = 0.0;

    explicit Rng(std::uint64_t seed) : state(splitmix64(seed)) {}

    std::uint64_t next_u64() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (has_cached) {
            has_cached = false;
            return cached;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        cached = r * std::sin(a);
        has_cached = true;
        return r * std::cos(a);
    }
};

/// Smooth value noise over a lattice of cell_mm spacing, range [0, 1].
/// Continuous in its arguments, so a shifted sample field translates rigidly.
inline double value_noise(double u_mm, double v_mm, double cell_mm, std::uint64_t seed) {
    const double u = u_mm / cell_mm;
    const double v = v_mm / cell_mm;
    const double fu = u - std::floor(u);
    const double fv = v - std::floor(v);
    const auto iu = static_cast<std::int64_t>(std::floor(u));
    const auto iv = static_cast<std::int64_t>(std::floor(v));

    auto corner = [&](std::int64_t cx, std::int64_t cy) {
        std::uint64_t h = splitmix64(seed ^ static_cast<std::uint64_t>(cx) * 0xC2B2AE3D27D4EB4FULL);
        h = splitmix64(h ^ static_cast<std::uint64_t>(cy) * 0x165667B19E3779F9ULL);
        return static_cast<double>(h >> 11) * 0x1.0p-53;
    };
    auto fade = [](double t) { return t * t * (3.0 - 2.0 * t); };

    const double wu = fade(fu);
    const double wv = fade(fv);
    const double top = (1.0 - wu) * corner(iu, iv) + wu * corner(iu + 1, iv);
    const double bot = (1.0 - wu) * corner(iu, iv + 1) + wu * corner(iu + 1, iv + 1);
    return (1.0 - wv) * top + wv * bot;
}

}  // namespace detail

/// Half-open placement of a zero-motion plateau in the cycle, in ms.
struct RestInterval {
    double start_ms = 0.0;
    double end_ms = 0.0;
};

/// Optional independently moving structure: everything beyond inner_radius_mm
/// of the target's base position follows a constant-speed circular path
/// instead of the target trajectory. Used to probe how the target-centered
/// weighting reacts to motion that is not the target's.
struct DistractorConfig {
    bool enabled = false;
    double inner_radius_mm = 14.0;
    double blend_mm = 2.0;
    double orbit_radius_mm = 4.0;
    double phase_deg = 0.0;
};

struct PhantomConfig {
    int t = 25;
    int height = 96;
    int width = 96;
    Spacing pixel_spacing{1.0, 1.0};
    double rr_interval_ms = 1000.0;
    double target_radius_mm = 5.0;
    double motion_amplitude_mm = 6.0;
    double motion_angle_deg = 30.0;
    std::vector<RestInterval> rest_intervals;
    double noise_sigma = 0.0;
    double background_level = 0.2;
    double target_level = 0.9;
    double texture_amplitude = 0.25;
    double texture_cell_mm = 8.0;
    DistractorConfig distractor;
    std::uint64_t seed = 1;
};

/// Analytic ground truth: target center per frame, per-transition rest flags,
/// and the configured plateaus.
struct PhantomTruth {
    LandmarkTrack track;
    std::vector<bool> resting_frames;  // length T-1, one per frame transition
    std::vector<RestInterval> rest_intervals;
};

namespace detail {

/// Normalized displacement profile in [0, 1]: constant inside each plateau,
/// cosine ramps between them (cyclically across the cycle boundary). Plateau
/// levels alternate 0, 1, 0, ...; a ramp between equal levels becomes a
/// cosine bump of unit height so motion never vanishes outside plateaus.
inline double displacement_profile(double t_ms, double rr, const std::vector<RestInterval>& plateaus) {
    const double two_pi = 2.0 * std::numbers::pi;
    if (plateaus.empty()) return 0.5 * (1.0 - std::cos(two_pi * t_ms / rr));

    const auto level = [](std::size_t i) { return static_cast<double>(i % 2); };
    for (std::size_t i = 0; i < plateaus.size(); ++i)
        if (t_ms >= plateaus[i].start_ms && t_ms <= plateaus[i].end_ms) return level(i);

    // Locate the surrounding plateaus, wrapping across the cycle boundary.
    double prev_end = -1.0, next_start = -1.0;
    double prev_level = 0.0, next_level = 0.0;
    for (std::size_t i = 0; i < plateaus.size(); ++i) {
        if (plateaus[i].end_ms <= t_ms && (prev_end < 0.0 || plateaus[i].end_ms > prev_end)) {
            prev_end = plateaus[i].end_ms;
            prev_level = level(i);
        }
        if (plateaus[i].start_ms >= t_ms && (next_start < 0.0 || plateaus[i].start_ms < next_start)) {
            next_start = plateaus[i].start_ms;
            next_level = level(i);
        }
    }
    if (prev_end < 0.0) {  // before the first plateau: previous is the last one, shifted back
        prev_end = plateaus.back().end_ms - rr;
        prev_level = level(plateaus.size() - 1);
    }
    if (next_start < 0.0) {  // after the last plateau: next is the first one, shifted forward
        next_start = plateaus.front().start_ms + rr;
        next_level = level(0);
    }

    const double phase = (t_ms - prev_end) / (next_start - prev_end);
    if (prev_level == next_level)
        return prev_level + 0.5 * (1.0 - std::cos(two_pi * phase));
    return prev_level + (next_level - prev_level) * 0.5 * (1.0 - std::cos(std::numbers::pi * phase));
}

}  // namespace detail

inline void validate(const PhantomConfig& cfg) {
    if (cfg.t < 2 || cfg.height < 8 || cfg.width < 8)
        throw ConfigError("phantom dims too small");
    if (!(cfg.target_radius_mm > 0.0)) throw ConfigError("target radius must be positive");
    if (cfg.motion_amplitude_mm < 0.0) throw ConfigError("motion amplitude must be >= 0");
    if (!(cfg.rr_interval_ms > 0.0)) throw ConfigError("rr interval must be positive");
    if (!(cfg.pixel_spacing.row_mm > 0.0) || !(cfg.pixel_spacing.col_mm > 0.0))
        throw ConfigError("pixel spacing must be positive");
    double prev_end = -1.0;
    for (const auto& ri : cfg.rest_intervals) {
        if (!(ri.start_ms >= 0.0 && ri.end_ms > ri.start_ms && ri.end_ms < cfg.rr_interval_ms))
            throw ConfigError("rest interval outside [0, rr)");
        if (ri.start_ms <= prev_end) throw ConfigError("rest intervals must be disjoint and sorted");
        prev_end = ri.end_ms;
    }
}

/// Target center offset in mm at trigger time t.
inline std::pair<double, double> phantom_offset_mm(const PhantomConfig& cfg, double t_ms) {
    const double d = detail::displacement_profile(t_ms, cfg.rr_interval_ms, cfg.rest_intervals);
    const double ang = cfg.motion_angle_deg * std::numbers::pi / 180.0;
    return {cfg.motion_amplitude_mm * d * std::cos(ang),
            cfg.motion_amplitude_mm * d * std::sin(ang)};
}

/// Render the phantom series and produce its analytic truth.
///
/// The frame content is a smooth random texture that translates rigidly with
/// the target trajectory (stand-in for co-moving tissue), plus a bright
/// anti-aliased disk at the target position. With the distractor enabled, the
/// texture beyond inner_radius_mm follows the distractor orbit instead.
/// Deterministic for a given config.
inline std::pair<CineSeries, PhantomTruth> generate_phantom(const PhantomConfig& cfg) {
    validate(cfg);

    const double cx_px = (cfg.width - 1) / 2.0;
    const double cy_px = (cfg.height - 1) / 2.0;
    const double sx = cfg.pixel_spacing.col_mm;
    const double sy = cfg.pixel_spacing.row_mm;
    const double radius_px_x = cfg.target_radius_mm / sx;
    const double radius_px_y = cfg.target_radius_mm / sy;

    // The full trajectory excursion must keep the disk inside the frame.
    const double ang = cfg.motion_angle_deg * std::numbers::pi / 180.0;
    const double reach_x = std::abs(cfg.motion_amplitude_mm * std::cos(ang)) / sx + radius_px_x + 1.0;
    const double reach_y = std::abs(cfg.motion_amplitude_mm * std::sin(ang)) / sy + radius_px_y + 1.0;
    if (cx_px - reach_x < 0.0 || cx_px + reach_x > cfg.width - 1 ||
        cy_px - reach_y < 0.0 || cy_px + reach_y > cfg.height - 1)
        throw TrajectoryOutOfBounds("target trajectory leaves the frame");

    CineSeries series;
    series.pixel_spacing = cfg.pixel_spacing;
    series.rr_interval = cfg.rr_interval_ms;
    const double dt = cfg.rr_interval_ms / cfg.t;
    for (int k = 0; k < cfg.t; ++k) series.trigger_times.push_back(k * dt);

    PhantomTruth truth;
    truth.rest_intervals = cfg.rest_intervals;

    detail::Rng noise_rng(cfg.seed ^ 0xA02BDBF7BB3C0A7ULL);
    const std::uint64_t tex_seed = detail::splitmix64(cfg.seed ^ 0x7C0A0A93ULL);
    const double aa_mm = std::max(sx, sy);  // one-pixel anti-alias band

    std::vector<std::pair<double, double>> offsets(cfg.t);
    for (int k = 0; k < cfg.t; ++k) offsets[k] = phantom_offset_mm(cfg, series.trigger_times[k]);

    for (int k = 0; k < cfg.t; ++k) {
        const auto [off_x_mm, off_y_mm] = offsets[k];
        const double tcx = cx_px + off_x_mm / sx;
        const double tcy = cy_px + off_y_mm / sy;
        truth.track.points.push_back({tcx, tcy});

        double dist_off_x = 0.0, dist_off_y = 0.0;
        if (cfg.distractor.enabled) {
            const double phi = 2.0 * std::numbers::pi * series.trigger_times[k] / cfg.rr_interval_ms +
                               cfg.distractor.phase_deg * std::numbers::pi / 180.0;
            dist_off_x = cfg.distractor.orbit_radius_mm * std::cos(phi);
            dist_off_y = cfg.distractor.orbit_radius_mm * std::sin(phi);
        }

        Image frame(cfg.height, cfg.width);
        for (int y = 0; y < cfg.height; ++y) {
            for (int x = 0; x < cfg.width; ++x) {
                const double px_mm = x * sx;
                const double py_mm = y * sy;

                double tex;
                if (cfg.distractor.enabled) {
                    const double rx = (x - cx_px) * sx;
                    const double ry = (y - cy_px) * sy;
                    const double r = std::sqrt(rx * rx + ry * ry);
                    const double b = cfg.distractor.blend_mm;
                    double w = (r - (cfg.distractor.inner_radius_mm - b)) / (2.0 * b);
                    w = std::clamp(w, 0.0, 1.0);
                    w = w * w * (3.0 - 2.0 * w);
                    const double inner =
                        detail::value_noise(px_mm - off_x_mm, py_mm - off_y_mm, cfg.texture_cell_mm, tex_seed);
                    const double outer = detail::value_noise(px_mm - dist_off_x, py_mm - dist_off_y,
                                                             cfg.texture_cell_mm, tex_seed ^ 0x51ED270B);
                    tex = (1.0 - w) * inner + w * outer;
                } else {
                    tex = detail::value_noise(px_mm - off_x_mm, py_mm - off_y_mm, cfg.texture_cell_mm, tex_seed);
                }

                double val = cfg.background_level + cfg.texture_amplitude * (tex - 0.5);

                const double dx_mm = (x - tcx) * sx;
                const double dy_mm = (y - tcy) * sy;
                const double d_mm = std::sqrt(dx_mm * dx_mm + dy_mm * dy_mm);
                const double cov =
                    std::clamp((cfg.target_radius_mm + 0.5 * aa_mm - d_mm) / aa_mm, 0.0, 1.0);
                val += cov * (cfg.target_level - val);

                if (cfg.noise_sigma > 0.0) val += cfg.noise_sigma * noise_rng.gaussian();
                frame.at(y, x) = static_cast<float>(val);
            }
        }
        series.frames.push_back(std::move(frame));
    }

    truth.resting_frames.resize(cfg.t - 1);
    for (int k = 0; k + 1 < cfg.t; ++k) {
        const double dx = offsets[k + 1].first - offsets[k].first;
        const double dy = offsets[k + 1].second - offsets[k].second;
        truth.resting_frames[k] = std::sqrt(dx * dx + dy * dy) < 1e-12;
    }
    return {std::move(series), std::move(truth)};
}

/// Parameter ranges for randomized cohorts. Plateau placement keeps both rest
/// phases inside the usable classification window with at least two frame
/// intervals of ramp on each side.
struct CohortParams {
    int count = 20;
    std::uint64_t seed = 7;
    double rr_min_ms = 620.0;
    double rr_max_ms = 1710.0;
    int t_min = 25;
    int t_max = 32;
    double amplitude_min_mm = 4.0;
    double amplitude_max_mm = 8.0;
    double sys_start_frac_min = 0.20;
    double sys_start_frac_max = 0.28;
    double sys_duration_min_ms = 70.0;
    double sys_duration_max_ms = 130.0;
    double dia_start_frac_min = 0.52;
    double dia_start_frac_max = 0.62;
    double dia_duration_min_ms = 150.0;
    double dia_duration_max_ms = 300.0;
    double edge_margin_ms = 90.0;  // keep plateaus clear of the window edges
};

struct PhantomInstance {
    PhantomConfig config;
    CineSeries series;
    PhantomTruth truth;
};

/// Deterministically randomized cohort derived from a base config.
inline std::vector<PhantomInstance> generate_cohort(const PhantomConfig& base, const CohortParams& params) {
    if (params.count < 1) throw ConfigError("cohort count must be >= 1");
    std::vector<PhantomInstance> cohort;
    cohort.reserve(params.count);

    for (int i = 0; i < params.count; ++i) {
        detail::Rng rng(detail::splitmix64(params.seed) ^ detail::splitmix64(0x9E01F + i));
        PhantomConfig cfg = base;
        cfg.seed = rng.next_u64();
        cfg.rr_interval_ms = rng.uniform(params.rr_min_ms, params.rr_max_ms);
        cfg.t = rng.uniform_int(params.t_min, params.t_max);
        cfg.motion_amplitude_mm = rng.uniform(params.amplitude_min_mm, params.amplitude_max_mm);
        cfg.motion_angle_deg = rng.uniform(0.0, 90.0);

        const double rr = cfg.rr_interval_ms;
        const double dt = rr / cfg.t;
        const double lo = params.edge_margin_ms + dt;
        const double hi = rr - params.edge_margin_ms - dt;

        double sys_start = std::max(lo, rr * rng.uniform(params.sys_start_frac_min, params.sys_start_frac_max));
        double sys_end = sys_start + rng.uniform(params.sys_duration_min_ms, params.sys_duration_max_ms);
        double dia_start = std::max(sys_end + 2.0 * dt + 5.0,
                                    rr * rng.uniform(params.dia_start_frac_min, params.dia_start_frac_max));
        double dia_end = dia_start + rng.uniform(params.dia_duration_min_ms, params.dia_duration_max_ms);
        dia_end = std::min(dia_end, hi);
        if (!(dia_end > dia_start + dt))
            throw ConfigError("cohort parameters leave no room for the diastolic plateau");
        cfg.rest_intervals = {{sys_start, sys_end}, {dia_start, dia_end}};

        auto [series, truth] = generate_phantom(cfg);
        cohort.push_back({std::move(cfg), std::move(series), std::move(truth)});
    }
    return cohort;
}

inline std::vector<PhantomInstance> generate_cohort(const PhantomConfig& base, int n, std::uint64_t seed) {
    CohortParams params;
    params.count = n;
    params.seed = seed;
    return generate_cohort(base, params);
}

}  // namespace restphase

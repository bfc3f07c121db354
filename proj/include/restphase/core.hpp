#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "restphase/errors.hpp"
#include "restphase/image.hpp"

namespace restphase {

/// Pixel coordinate. x is the column, y the row; origin at the top-left
/// corner, pixel centers at integer coordinates. Fractional values allowed.
struct PixelPoint {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const PixelPoint&) const = default;
};

inline double distance(const PixelPoint& a, const PixelPoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Physical pixel size in mm, separate row and column pitch.
struct Spacing {
    double row_mm = 1.0;
    double col_mm = 1.0;

    bool operator==(const Spacing&) const = default;
};

/// Per-frame position of the tracked target.
struct LandmarkTrack {
    std::vector<PixelPoint> points;

    std::size_t size() const { return points.size(); }
};

/// Axis-aligned crop window, integer origin (top-left), fully inside the frame.
struct Roi {
    int x0 = 0;
    int y0 = 0;
    int height = 0;
    int width = 0;

    bool operator==(const Roi&) const = default;
};

/// Result of intensity rescaling; `constant` flags degenerate all-equal input.
struct NormalizationReport {
    double min = 0.0;
    double max = 0.0;
    bool constant = false;
};

/// One cardiac cycle of 2-D frames with physical spacing and per-frame
/// trigger times (ms after the R-wave).
struct CineSeries {
    std::vector<Image> frames;
    Spacing pixel_spacing;
    std::vector<double> trigger_times;
    double rr_interval = 0.0;

    int frame_count() const { return static_cast<int>(frames.size()); }
    int height() const { return frames.empty() ? 0 : frames.front().height; }
    int width() const { return frames.empty() ? 0 : frames.front().width; }
};

/// Check the series invariants; throws InvalidSeries describing the first violation.
inline void validate(const CineSeries& s) {
    if (s.frame_count() < 2) throw InvalidSeries("series needs at least 2 frames");
    if (s.height() < 8 || s.width() < 8) throw InvalidSeries("frames must be at least 8x8");
    for (const auto& f : s.frames) {
        if (f.height != s.height() || f.width != s.width())
            throw InvalidSeries("all frames must share dimensions");
        for (float v : f.px)
            if (!std::isfinite(v)) throw InvalidSeries("non-finite intensity");
    }
    if (static_cast<int>(s.trigger_times.size()) != s.frame_count())
        throw InvalidSeries("trigger_times length must equal frame count");
    if (s.trigger_times.front() != 0.0) throw InvalidSeries("first trigger time must be 0");
    for (std::size_t i = 1; i < s.trigger_times.size(); ++i)
        if (!(s.trigger_times[i] > s.trigger_times[i - 1]))
            throw InvalidSeries("trigger times must be strictly increasing");
    if (!(s.trigger_times.back() < s.rr_interval))
        throw InvalidSeries("last trigger time must precede the RR interval");
    if (!(s.pixel_spacing.row_mm > 0.0) || !(s.pixel_spacing.col_mm > 0.0))
        throw InvalidSeries("pixel spacing must be positive");
}

inline bool in_bounds(const PixelPoint& p, int height, int width) {
    return p.x >= 0.0 && p.x < width && p.y >= 0.0 && p.y < height &&
           std::isfinite(p.x) && std::isfinite(p.y);
}

/// Rescale intensities so the global minimum maps to 0 and the maximum to 1.
/// Constant input yields all-zero frames and a flagged report instead of an error.
inline std::pair<CineSeries, NormalizationReport> min_max_normalize(const CineSeries& series) {
    validate(series);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& f : series.frames) {
        for (float v : f.px) {
            lo = std::min(lo, static_cast<double>(v));
            hi = std::max(hi, static_cast<double>(v));
        }
    }
    NormalizationReport report{lo, hi, hi == lo};
    CineSeries out = series;
    if (report.constant) {
        for (auto& f : out.frames) std::fill(f.px.begin(), f.px.end(), 0.0f);
        return {std::move(out), report};
    }
    const double scale = 1.0 / (hi - lo);
    for (auto& f : out.frames)
        for (float& v : f.px) v = static_cast<float>((v - lo) * scale);
    return {std::move(out), report};
}

struct Dims2 {
    int height = 0;
    int width = 0;
};

struct Dims3 {
    int t = 0;
    int height = 0;
    int width = 0;
};

/// Trilinear resample over (t, y, x) to the target grid, align-corners
/// convention on every axis. Trigger times are linearly resampled and the
/// pixel spacing is rescaled by H/H' and W/W'.
inline CineSeries resample_series(const CineSeries& series, Dims3 target) {
    validate(series);
    if (target.t < 2 || target.height < 2 || target.width < 2)
        throw InvalidSeries("resample target dims must be >= 2");

    const int t_src = series.frame_count();
    const int h_src = series.height();
    const int w_src = series.width();
    const double st = static_cast<double>(t_src - 1) / (target.t - 1);
    const double sy = static_cast<double>(h_src - 1) / (target.height - 1);
    const double sx = static_cast<double>(w_src - 1) / (target.width - 1);

    CineSeries out;
    out.rr_interval = series.rr_interval;
    out.pixel_spacing = {series.pixel_spacing.row_mm * h_src / target.height,
                         series.pixel_spacing.col_mm * w_src / target.width};
    out.frames.reserve(target.t);
    out.trigger_times.reserve(target.t);

    for (int ti = 0; ti < target.t; ++ti) {
        const double tc = ti * st;
        const int t0 = static_cast<int>(tc);
        const int t1 = std::min(t0 + 1, t_src - 1);
        const double ft = tc - t0;

        out.trigger_times.push_back((1.0 - ft) * series.trigger_times[t0] +
                                    ft * series.trigger_times[t1]);

        Image frame(target.height, target.width);
        for (int y = 0; y < target.height; ++y) {
            for (int x = 0; x < target.width; ++x) {
                const double a = bilinear_sample(series.frames[t0], x * sx, y * sy);
                const double b = bilinear_sample(series.frames[t1], x * sx, y * sy);
                frame.at(y, x) = static_cast<float>((1.0 - ft) * a + ft * b);
            }
        }
        out.frames.push_back(std::move(frame));
    }
    return out;
}

/// Map a point between two grids of different size, align-corners scaling:
/// the coordinate scale per axis is (N_to - 1) / (N_from - 1).
inline PixelPoint map_point(const PixelPoint& p, Dims2 from, Dims2 to) {
    if (from.height < 1 || from.width < 1 || to.height < 1 || to.width < 1)
        throw DimensionMismatch("map_point requires dims >= 1");
    const double sx = from.width > 1 ? static_cast<double>(to.width - 1) / (from.width - 1) : 0.0;
    const double sy = from.height > 1 ? static_cast<double>(to.height - 1) / (from.height - 1) : 0.0;
    return {p.x * sx, p.y * sy};
}

/// Inverse of the resampling coordinate map: takes a point detected on the
/// resampled grid back to the original grid.
inline PixelPoint map_point_resampled_to_original(const PixelPoint& p,
                                                  Dims2 original, Dims2 resampled) {
    return map_point(p, resampled, original);
}

}  // namespace restphase

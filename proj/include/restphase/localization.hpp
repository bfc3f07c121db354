#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "restphase/core.hpp"
#include "restphase/errors.hpp"
#include "restphase/registration.hpp"

namespace restphase {

/// Behavioral contract for target localization: any callable producing one
/// in-bounds point per frame. Reference implementations below; a learned
/// localizer can be slotted in behind the same signature.
using Localizer = std::function<LandmarkTrack(const CineSeries&)>;

struct TemplateTrackerParams {
    int template_radius = 8;
    int search_radius = 6;
};

namespace detail {

/// Square window of side 2r+1 sampled bilinearly around a fractional center.
inline std::vector<double> sample_window(const Image& im, const PixelPoint& c, int r) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1));
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            out.push_back(bilinear_sample(im, c.x + dx, c.y + dy));
    return out;
}

inline double window_variance(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return var / static_cast<double>(v.size());
}

/// Zero-normalized cross-correlation of equally sized windows; -2 when either
/// window is flat (never wins the argmax).
inline double zncc(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double num = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        num += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va < 1e-12 || vb < 1e-12) return -2.0;
    return num / std::sqrt(va * vb);
}

/// Sub-pixel offset of a parabola through three equally spaced samples.
inline double parabolic_offset(double s_minus, double s_0, double s_plus) {
    const double denom = s_minus - 2.0 * s_0 + s_plus;
    if (denom >= -1e-12) return 0.0;  // not a strict maximum
    const double delta = 0.5 * (s_minus - s_plus) / denom;
    return std::clamp(delta, -1.0, 1.0);
}

}  // namespace detail

/// Frame-to-frame template matching: integer-pixel normalized cross
/// correlation within the search radius, refined by a three-point parabolic
/// fit per axis. The template is re-sampled from each newly matched frame.
inline LandmarkTrack ncc_template_track(const CineSeries& series, const PixelPoint& p0,
                                        const TemplateTrackerParams& params = {}) {
    validate(series);
    if (params.template_radius < 1 || params.search_radius < 1)
        throw ConfigError("template tracker radii must be >= 1");
    const int h = series.height();
    const int w = series.width();
    const int r = params.template_radius;
    const int s = params.search_radius;
    if (p0.x - r < 0 || p0.x + r > w - 1 || p0.y - r < 0 || p0.y + r > h - 1)
        throw PointOutOfBounds("template window around p0 leaves frame 0");

    auto clamp_center = [&](PixelPoint p) {
        return PixelPoint{std::clamp(p.x, static_cast<double>(r), static_cast<double>(w - 1 - r)),
                          std::clamp(p.y, static_cast<double>(r), static_cast<double>(h - 1 - r))};
    };

    LandmarkTrack track;
    track.points.push_back(p0);
    PixelPoint p = p0;
    std::vector<double> tmpl = detail::sample_window(series.frames[0], p, r);
    if (detail::window_variance(tmpl) < 1e-12)
        throw FlatTemplate("template window has zero variance");

    const int side = 2 * s + 1;
    std::vector<double> scores(static_cast<std::size_t>(side) * side);

    for (int t = 1; t < series.frame_count(); ++t) {
        const Image& frame = series.frames[t];
        int best_ox = 0, best_oy = 0;
        double best = -3.0;
        for (int oy = -s; oy <= s; ++oy) {
            for (int ox = -s; ox <= s; ++ox) {
                const auto patch = detail::sample_window(frame, {p.x + ox, p.y + oy}, r);
                const double score = detail::zncc(tmpl, patch);
                scores[static_cast<std::size_t>(oy + s) * side + (ox + s)] = score;
                if (score > best) {
                    best = score;
                    best_ox = ox;
                    best_oy = oy;
                }
            }
        }

        double delta_x = 0.0, delta_y = 0.0;
        auto score_at = [&](int ox, int oy) {
            return scores[static_cast<std::size_t>(oy + s) * side + (ox + s)];
        };
        if (best_ox > -s && best_ox < s)
            delta_x = detail::parabolic_offset(score_at(best_ox - 1, best_oy), best,
                                               score_at(best_ox + 1, best_oy));
        if (best_oy > -s && best_oy < s)
            delta_y = detail::parabolic_offset(score_at(best_ox, best_oy - 1), best,
                                               score_at(best_ox, best_oy + 1));

        p = clamp_center({p.x + best_ox + delta_x, p.y + best_oy + delta_y});
        track.points.push_back(p);
        tmpl = detail::sample_window(frame, p, r);
        if (detail::window_variance(tmpl) < 1e-12)
            throw FlatTemplate("re-sampled template has zero variance");
    }
    return track;
}

/// Localization by dense registration: the start point is chained through the
/// consecutive-pair deformation fields. This is the annotation-propagation
/// path used to seed ground truth from a single labeled frame.
inline LandmarkTrack propagation_localizer(const CineSeries& series, const PixelPoint& p0,
                                           const RegistrationParams& reg_params = {},
                                           int threads = 1) {
    const auto fields = register_series(series, reg_params, threads);
    return propagate_landmark(p0, fields).track;
}

inline Localizer make_ncc_localizer(PixelPoint p0, TemplateTrackerParams params = {}) {
    return [p0, params](const CineSeries& s) { return ncc_template_track(s, p0, params); };
}

inline Localizer make_propagation_localizer(PixelPoint p0, RegistrationParams params = {},
                                            int threads = 1) {
    return [p0, params, threads](const CineSeries& s) {
        return propagation_localizer(s, p0, params, threads);
    };
}

/// Localization accuracy over a set of datasets: per dataset the mean over
/// frames of the Euclidean distance in mm, then mean and population standard
/// deviation across datasets.
inline std::pair<double, double> distance_error(const std::vector<LandmarkTrack>& predicted,
                                                const std::vector<LandmarkTrack>& truth,
                                                const Spacing& spacing) {
    if (predicted.size() != truth.size() || predicted.empty())
        throw LengthMismatch("distance_error: dataset lists must be non-empty and equal length");
    std::vector<double> per_dataset;
    per_dataset.reserve(predicted.size());
    for (std::size_t n = 0; n < predicted.size(); ++n) {
        const auto& a = predicted[n].points;
        const auto& b = truth[n].points;
        if (a.size() != b.size() || a.empty())
            throw LengthMismatch("distance_error: track lengths differ");
        double acc = 0.0;
        for (std::size_t t = 0; t < a.size(); ++t) {
            const double dx_mm = (a[t].x - b[t].x) * spacing.col_mm;
            const double dy_mm = (a[t].y - b[t].y) * spacing.row_mm;
            acc += std::sqrt(dx_mm * dx_mm + dy_mm * dy_mm);
        }
        per_dataset.push_back(acc / static_cast<double>(a.size()));
    }
    double mean = 0.0;
    for (double v : per_dataset) mean += v;
    mean /= static_cast<double>(per_dataset.size());
    double var = 0.0;
    for (double v : per_dataset) var += (v - mean) * (v - mean);
    var /= static_cast<double>(per_dataset.size());
    return {mean, std::sqrt(var)};
}

}  // namespace restphase

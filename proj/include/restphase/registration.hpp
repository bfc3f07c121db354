#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "restphase/core.hpp"
#include "restphase/errors.hpp"
#include "restphase/image.hpp"
#include "restphase/parallel.hpp"

namespace restphase {

/// Dense displacement between one consecutive frame pair. d(x) points from a
/// pixel in the earlier frame to the matching content in the later frame, in
/// pixels; warping the later frame by d reproduces the earlier one.
struct DeformationField {
    int height = 0;
    int width = 0;
    std::vector<float> dx;
    std::vector<float> dy;
    std::pair<int, int> frame_pair{0, 1};

    DeformationField() = default;
    DeformationField(int h, int w)
        : height(h), width(w),
          dx(static_cast<std::size_t>(h) * w, 0.0f),
          dy(static_cast<std::size_t>(h) * w, 0.0f) {}

    std::size_t index(int y, int x) const { return static_cast<std::size_t>(y) * width + x; }
    std::size_t size() const { return dx.size(); }
};

struct RegistrationParams {
    int pyramid_levels = 3;
    int iterations_per_level = 50;
    double smoothing_sigma = 2.0;  // field regularization, pixels
    double update_step = 1.0;
    double convergence_tol = 1e-3;  // mean update magnitude, pixels
};

/// Bilinear field lookup at a fractional position (clamped to the border).
inline std::pair<double, double> field_at(const DeformationField& f, const PixelPoint& p) {
    const double x = std::clamp(p.x, 0.0, static_cast<double>(f.width - 1));
    const double y = std::clamp(p.y, 0.0, static_cast<double>(f.height - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, f.width - 1);
    const int y1 = std::min(y0 + 1, f.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    auto lerp2 = [&](const std::vector<float>& plane) {
        const double top = (1.0 - fx) * plane[f.index(y0, x0)] + fx * plane[f.index(y0, x1)];
        const double bot = (1.0 - fx) * plane[f.index(y1, x0)] + fx * plane[f.index(y1, x1)];
        return (1.0 - fy) * top + fy * bot;
    };
    return {lerp2(f.dx), lerp2(f.dy)};
}

/// Resample the moving frame at x + d(x), bilinear with clamp-to-edge.
inline Image warp_image(const Image& moving, const DeformationField& field) {
    if (moving.height != field.height || moving.width != field.width)
        throw DimensionMismatch("warp_image: field dims do not match the image");
    Image out(moving.height, moving.width);
    for (int y = 0; y < moving.height; ++y)
        for (int x = 0; x < moving.width; ++x)
            out.at(y, x) = static_cast<float>(
                bilinear_sample(moving, x + field.dx[field.index(y, x)], y + field.dy[field.index(y, x)]));
    return out;
}

inline double mean_ssd(const Image& a, const Image& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.px.size(); ++i) {
        const double d = static_cast<double>(a.px[i]) - b.px[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.px.size());
}

namespace detail {

inline DeformationField upsample_field(const DeformationField& coarse, int h, int w) {
    DeformationField fine(h, w);
    const double scale_x = coarse.width > 1 ? static_cast<double>(w - 1) / (coarse.width - 1) : 1.0;
    const double scale_y = coarse.height > 1 ? static_cast<double>(h - 1) / (coarse.height - 1) : 1.0;
    const double sx = coarse.width > 1 ? static_cast<double>(coarse.width - 1) / (w - 1) : 0.0;
    const double sy = coarse.height > 1 ? static_cast<double>(coarse.height - 1) / (h - 1) : 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto [cdx, cdy] = field_at(coarse, {x * sx, y * sy});
            fine.dx[fine.index(y, x)] = static_cast<float>(cdx * scale_x);
            fine.dy[fine.index(y, x)] = static_cast<float>(cdy * scale_y);
        }
    }
    return fine;
}

/// One demons pass at a single pyramid level. The update force is the
/// intensity-difference-driven step along the fixed-image gradient with the
/// usual (|J|^2 + diff^2) stabilizer; the accumulated field is smoothed with
/// a Gaussian after every iteration.
inline void demons_level(const Image& fixed, const Image& moving, DeformationField& field,
                         const RegistrationParams& params) {
    Image gx, gy;
    gradient(fixed, gx, gy);

    const int h = fixed.height;
    const int w = fixed.width;
    std::vector<float> ux(field.size()), uy(field.size());

    for (int iter = 0; iter < params.iterations_per_level; ++iter) {
        const Image warped = warp_image(moving, field);
        double mean_update = 0.0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = field.index(y, x);
                const double diff = static_cast<double>(warped.at(y, x)) - fixed.at(y, x);
                const double jx = gx.at(y, x);
                const double jy = gy.at(y, x);
                const double denom = jx * jx + jy * jy + diff * diff;
                if (denom < 1e-12) {
                    ux[i] = 0.0f;
                    uy[i] = 0.0f;
                    continue;
                }
                const double s = -params.update_step * diff / denom;
                ux[i] = static_cast<float>(s * jx);
                uy[i] = static_cast<float>(s * jy);
                mean_update += std::sqrt(static_cast<double>(ux[i]) * ux[i] +
                                         static_cast<double>(uy[i]) * uy[i]);
            }
        }
        mean_update /= static_cast<double>(field.size());

        for (std::size_t i = 0; i < field.size(); ++i) {
            field.dx[i] += ux[i];
            field.dy[i] += uy[i];
        }
        gaussian_blur_plane(field.dx, h, w, params.smoothing_sigma);
        gaussian_blur_plane(field.dy, h, w, params.smoothing_sigma);

        if (mean_update < params.convergence_tol) break;
    }
}

}  // namespace detail

/// Register a consecutive frame pair: SSD-driven demons iteration over a
/// coarse-to-fine pyramid. Deterministic. The returned field never increases
/// the mean residual SSD relative to the identity field.
inline DeformationField register_pair(const Image& fixed, const Image& moving,
                                      const RegistrationParams& params = {}) {
    if (!fixed.same_dims(moving))
        throw DimensionMismatch("register_pair: frames must share dimensions");
    if (params.pyramid_levels < 1) throw ConfigError("pyramid_levels must be >= 1");

    // Build pyramids, coarsest last; never shrink below 12 px on a side.
    std::vector<Image> fixed_pyr{fixed};
    std::vector<Image> moving_pyr{moving};
    for (int l = 1; l < params.pyramid_levels; ++l) {
        const Image& prev = fixed_pyr.back();
        if (prev.height / 2 < 12 || prev.width / 2 < 12) break;
        fixed_pyr.push_back(downsample_half(fixed_pyr.back()));
        moving_pyr.push_back(downsample_half(moving_pyr.back()));
    }

    DeformationField field(fixed_pyr.back().height, fixed_pyr.back().width);
    for (int l = static_cast<int>(fixed_pyr.size()) - 1; l >= 0; --l) {
        if (field.height != fixed_pyr[l].height || field.width != fixed_pyr[l].width)
            field = detail::upsample_field(field, fixed_pyr[l].height, fixed_pyr[l].width);
        detail::demons_level(fixed_pyr[l], moving_pyr[l], field, params);
    }

    if (mean_ssd(fixed, warp_image(moving, field)) > mean_ssd(fixed, moving))
        field = DeformationField(fixed.height, fixed.width);
    return field;
}

/// Register every consecutive pair; field k maps frame k onto frame k+1.
/// Pairs are independent and may run on several threads; the result order is
/// fixed by the frame index.
inline std::vector<DeformationField> register_series(const CineSeries& series,
                                                     const RegistrationParams& params = {},
                                                     int threads = 1) {
    validate(series);
    const int n = series.frame_count() - 1;
    std::vector<DeformationField> fields(n);
    detail::parallel_for(n, threads, [&](int k) {
        fields[k] = register_pair(series.frames[k], series.frames[k + 1], params);
        fields[k].frame_pair = {k, k + 1};
    });
    return fields;
}

/// Landmark propagation output; `clamped` is set when a propagated point had
/// to be pulled back inside the frame.
struct PropagationResult {
    LandmarkTrack track;
    bool clamped = false;
};

/// Chain a start point through the per-pair fields: p_{t+1} = p_t + d_t(p_t),
/// with bilinear field interpolation at fractional positions.
inline PropagationResult propagate_landmark(const PixelPoint& p0,
                                            const std::vector<DeformationField>& fields) {
    if (fields.empty()) throw EmptyInput("propagate_landmark: no fields");
    const int h = fields.front().height;
    const int w = fields.front().width;
    if (!in_bounds(p0, h, w)) throw PointOutOfBounds("propagate_landmark: start point outside frame");

    PropagationResult result;
    result.track.points.push_back(p0);
    PixelPoint p = p0;
    for (const auto& f : fields) {
        if (f.height != h || f.width != w)
            throw DimensionMismatch("propagate_landmark: inconsistent field dims");
        const auto [dx, dy] = field_at(f, p);
        p.x += dx;
        p.y += dy;
        const PixelPoint clamped{std::clamp(p.x, 0.0, static_cast<double>(w - 1)),
                                 std::clamp(p.y, 0.0, static_cast<double>(h - 1))};
        if (clamped.x != p.x || clamped.y != p.y) result.clamped = true;
        p = clamped;
        result.track.points.push_back(p);
    }
    return result;
}

}  // namespace restphase

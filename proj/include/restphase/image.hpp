#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "restphase/errors.hpp"

namespace restphase {

/// Single 2-D intensity frame, row-major float storage.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<float> px;

    Image() = default;
    Image(int h, int w, float fill = 0.0f)
        : height(h), width(w), px(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {}

    float& at(int y, int x) { return px[static_cast<std::size_t>(y) * width + x]; }
    float at(int y, int x) const { return px[static_cast<std::size_t>(y) * width + x]; }

    std::size_t size() const { return px.size(); }

    bool same_dims(const Image& other) const {
        return height == other.height && width == other.width;
    }

    bool operator==(const Image& other) const {
        return height == other.height && width == other.width && px == other.px;
    }
};

/// Bilinear sample at fractional (x, y); coordinates clamp to the image border.
/// Pixel centers sit at integer coordinates.
inline double bilinear_sample(const Image& im, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(im.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(im.height - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, im.width - 1);
    const int y1 = std::min(y0 + 1, im.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * im.at(y0, x0) + fx * im.at(y0, x1);
    const double bot = (1.0 - fx) * im.at(y1, x0) + fx * im.at(y1, x1);
    return (1.0 - fy) * top + fy * bot;
}

namespace detail {

/// Normalized 1-D Gaussian kernel with radius ceil(3*sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
        k[i + radius] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

/// Separable convolution of one float plane with a 1-D kernel, replicate borders.
inline void convolve_plane(const float* src, float* dst, int h, int w,
                           const std::vector<double>& kernel, bool horizontal) {
    const int radius = static_cast<int>(kernel.size() / 2);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                int sy = y, sx = x;
                if (horizontal) {
                    sx = std::clamp(x + i, 0, w - 1);
                } else {
                    sy = std::clamp(y + i, 0, h - 1);
                }
                acc += kernel[i + radius] * src[static_cast<std::size_t>(sy) * w + sx];
            }
            dst[static_cast<std::size_t>(y) * w + x] = static_cast<float>(acc);
        }
    }
}

inline void gaussian_blur_plane(std::vector<float>& plane, int h, int w, double sigma) {
    if (sigma <= 0.0) return;
    const auto kernel = gaussian_kernel(sigma);
    std::vector<float> tmp(plane.size());
    convolve_plane(plane.data(), tmp.data(), h, w, kernel, true);
    convolve_plane(tmp.data(), plane.data(), h, w, kernel, false);
}

}  // namespace detail

inline Image gaussian_blur(const Image& im, double sigma) {
    Image out = im;
    detail::gaussian_blur_plane(out.px, out.height, out.width, sigma);
    return out;
}

/// Halve resolution: blur with sigma=1, keep every second pixel.
inline Image downsample_half(const Image& im) {
    const Image blurred = gaussian_blur(im, 1.0);
    const int h = (im.height + 1) / 2;
    const int w = (im.width + 1) / 2;
    Image out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(y, x) = blurred.at(std::min(2 * y, im.height - 1), std::min(2 * x, im.width - 1));
    return out;
}

/// Bilinear resize with the align-corners convention: grid endpoints map onto
/// each other, so coordinate scale per axis is (N-1)/(N'-1).
inline Image resize_bilinear(const Image& im, int h, int w) {
    Image out(h, w);
    const double sy = h > 1 ? static_cast<double>(im.height - 1) / (h - 1) : 0.0;
    const double sx = w > 1 ? static_cast<double>(im.width - 1) / (w - 1) : 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(y, x) = static_cast<float>(bilinear_sample(im, x * sx, y * sy));
    return out;
}

/// Central-difference gradient; one-sided at the borders.
inline void gradient(const Image& im, Image& gx, Image& gy) {
    gx = Image(im.height, im.width);
    gy = Image(im.height, im.width);
    for (int y = 0; y < im.height; ++y) {
        for (int x = 0; x < im.width; ++x) {
            const int xm = std::max(x - 1, 0);
            const int xp = std::min(x + 1, im.width - 1);
            const int ym = std::max(y - 1, 0);
            const int yp = std::min(y + 1, im.height - 1);
            gx.at(y, x) = static_cast<float>((im.at(y, xp) - im.at(y, xm)) / (xp - xm == 0 ? 1 : xp - xm));
            gy.at(y, x) = static_cast<float>((im.at(yp, x) - im.at(ym, x)) / (yp - ym == 0 ? 1 : yp - ym));
        }
    }
}

}  // namespace restphase

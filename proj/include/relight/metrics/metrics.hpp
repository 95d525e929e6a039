// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/compose/compose.hpp>
#include <relight/core/error.hpp>
#include <relight/core/image.hpp>
#include <relight/envlight/envmap.hpp>
#include <relight/metrics/fft.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace relight {

struct MetricReport {
    double mse_scaled = 0;  // MSE x 10^3
    double psnr = 0;        // dB
    double ssim = 1;
    std::size_t pixel_count = 0;
    std::size_t clamped_values = 0;  // inputs outside [0,1] that were clamped
};

inline constexpr double kPsnrCap = 99.0;

namespace detail {

inline void check_pair(const ImageD &a, const ImageD &b) {
    if (!a.same_shape(b))
        fail(ErrorKind::Shape, "image shapes differ (" + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                   "x" + std::to_string(a.channels()) + " vs " + std::to_string(b.width()) + "x" +
                                   std::to_string(b.height()) + "x" + std::to_string(b.channels()) + ")");
}

// Foreground test: mask value > 0.5; no mask means every pixel.
inline std::vector<char> foreground(const ImageD &a, const ImageD *mask) {
    std::vector<char> fg(a.pixel_count(), 1);
    if (mask) {
        if (!mask->same_raster(a)) fail(ErrorKind::Shape, "mask dimensions do not match the images");
        for (int y = 0; y < a.height(); ++y)
            for (int x = 0; x < a.width(); ++x) fg[static_cast<std::size_t>(y) * a.width() + x] = (*mask)(x, y) > 0.5;
    }
    return fg;
}

inline double clamp01(double v, std::size_t &clamped) {
    if (v < 0 || v > 1 || !std::isfinite(v)) {
        ++clamped;
        return std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    }
    return v;
}

}  // namespace detail

// Foreground MSE (over pixels and channels) and PSNR for unit dynamic range.
inline MetricReport mse_psnr(const ImageD &a, const ImageD &b, const ImageD *mask = nullptr) {
    detail::check_pair(a, b);
    const auto fg = detail::foreground(a, mask);
    MetricReport r;
    double sum = 0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            if (!fg[static_cast<std::size_t>(y) * a.width() + x]) continue;
            ++r.pixel_count;
            for (int c = 0; c < a.channels(); ++c) {
                const double d = detail::clamp01(a(x, y, c), r.clamped_values) - detail::clamp01(b(x, y, c), r.clamped_values);
                sum += d * d;
            }
        }
    if (r.pixel_count == 0) fail(ErrorKind::DegenerateInput, "metric mask selects no pixels");
    const double mse = sum / (double(r.pixel_count) * a.channels());
    r.mse_scaled = mse * 1e3;
    r.psnr = mse < 1e-10 ? kPsnrCap : 10.0 * std::log10(1.0 / mse);
    return r;
}

struct SsimParams {
    int radius = 5;  // 11 x 11 window
    double sigma = 1.5;
    double k1 = 0.01, k2 = 0.03;
    double dynamic_range = 1.0;
};

// Mean SSIM over channels and over windows centered on foreground pixels. Windows are
// Gaussian-weighted; only in-image foreground pixels contribute and the weights are
// renormalized over them.
inline double ssim(const ImageD &a, const ImageD &b, const ImageD *mask = nullptr, const SsimParams &p = {}) {
    detail::check_pair(a, b);
    const auto fg = detail::foreground(a, mask);
    const int w = a.width(), h = a.height(), R = p.radius;
    std::vector<double> g(static_cast<std::size_t>(2 * R + 1));
    for (int k = -R; k <= R; ++k) g[k + R] = std::exp(-(k * k) / (2 * p.sigma * p.sigma));
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
    std::size_t clamped = 0;
    ImageD ca = a, cb = b;
    for (double &v : ca.data()) v = detail::clamp01(v, clamped);
    for (double &v : cb.data()) v = detail::clamp01(v, clamped);

    double total = 0;
    std::size_t windows = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!fg[static_cast<std::size_t>(y) * w + x]) continue;
            const int y0 = std::max(0, y - R), y1 = std::min(h - 1, y + R);
            const int x0 = std::max(0, x - R), x1 = std::min(w - 1, x + R);
            // Only foreground taps contribute, so background content never leaks into the score.
            auto tap = [&](int xx, int yy) {
                return fg[static_cast<std::size_t>(yy) * w + xx] ? g[yy - y + R] * g[xx - x + R] : 0.0;
            };
            double wsum = 0;
            for (int yy = y0; yy <= y1; ++yy)
                for (int xx = x0; xx <= x1; ++xx) wsum += tap(xx, yy);
            for (int c = 0; c < a.channels(); ++c) {
                double ma = 0, mb = 0;
                for (int yy = y0; yy <= y1; ++yy)
                    for (int xx = x0; xx <= x1; ++xx) {
                        const double wt = tap(xx, yy);
                        ma += wt * ca(xx, yy, c);
                        mb += wt * cb(xx, yy, c);
                    }
                ma /= wsum;
                mb /= wsum;
                double va = 0, vb = 0, cov = 0;
                for (int yy = y0; yy <= y1; ++yy)
                    for (int xx = x0; xx <= x1; ++xx) {
                        const double wt = tap(xx, yy);
                        const double da = ca(xx, yy, c) - ma, db = cb(xx, yy, c) - mb;
                        va += wt * da * da;
                        vb += wt * db * db;
                        cov += wt * da * db;
                    }
                va /= wsum;
                vb /= wsum;
                cov /= wsum;
                total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                ++windows;
            }
        }
    if (windows == 0) fail(ErrorKind::DegenerateInput, "metric mask selects no pixels");
    return total / double(windows);
}

// Full report: MSE x 10^3, PSNR and SSIM on the same foreground.
inline MetricReport evaluate(const ImageD &a, const ImageD &b, const ImageD *mask = nullptr) {
    MetricReport r = mse_psnr(a, b, mask);
    r.ssim = ssim(a, b, mask);
    return r;
}

enum class FftDistance { Complex, Magnitude };

// Mean L1 distance between the unnormalized 2D DFTs of a and b over all frequencies and channels.
// Complex: |Re| + |Im| of F(a) - F(b). Magnitude: ||F(a)| - |F(b)||, blind to circular shifts.
inline double fft_l1(const ImageD &a, const ImageD &b, FftDistance mode = FftDistance::Complex) {
    detail::check_pair(a, b);
    double sum = 0;
    for (int c = 0; c < a.channels(); ++c) {
        const auto fa = fft2(a, c);
        const auto fb = fft2(b, c);
        for (std::size_t i = 0; i < fa.size(); ++i) {
            if (mode == FftDistance::Complex) {
                const std::complex<double> d = fa[i] - fb[i];
                sum += std::abs(d.real()) + std::abs(d.imag());
            } else {
                sum += std::abs(std::abs(fa[i]) - std::abs(fb[i]));
            }
        }
    }
    return sum / (double(a.pixel_count()) * a.channels());
}

// Squared L2 norm of F(a) - F(b), summed over channels (no normalization).
inline double fft_l2_squared(const ImageD &a, const ImageD &b) {
    detail::check_pair(a, b);
    double sum = 0;
    for (int c = 0; c < a.channels(); ++c) {
        const auto fa = fft2(a, c);
        const auto fb = fft2(b, c);
        for (std::size_t i = 0; i < fa.size(); ++i) sum += std::norm(fa[i] - fb[i]);
    }
    return sum;
}

enum class LightLossForm { Symmetric, Asymmetric };

inline constexpr int kLightGridWidth = 32;
inline constexpr int kLightGridHeight = 16;

// Solid-angle weighted log-L2 distance between two panoramas after reducing both to 32 x 16.
// Symmetric:  sum_p sum_c w_p (log(1 + est) - log(1 + gt))^2
// Asymmetric: sum_p sum_c (w_p log(1 + est) - log(1 + gt))^2
inline double light_loss(const EnvironmentMap &est, const EnvironmentMap &gt,
                         LightLossForm form = LightLossForm::Symmetric) {
    const EnvironmentMap e = downsample_pyramid(est, kLightGridWidth, kLightGridHeight);
    const EnvironmentMap g = downsample_pyramid(gt, kLightGridWidth, kLightGridHeight);
    const SolidAngleWeights w(kLightGridWidth, kLightGridHeight);
    double loss = 0;
    for (int r = 0; r < kLightGridHeight; ++r)
        for (int c = 0; c < kLightGridWidth; ++c) {
            const Vec3 ev = e.at(c, r), gv = g.at(c, r);
            for (int k = 0; k < 3; ++k) {
                const double le = std::log1p(ev[k]), lg = std::log1p(gv[k]);
                if (form == LightLossForm::Symmetric) {
                    loss += w(r) * (le - lg) * (le - lg);
                } else {
                    const double d = w(r) * le - lg;
                    loss += d * d;
                }
            }
        }
    return loss;
}

}  // namespace relight

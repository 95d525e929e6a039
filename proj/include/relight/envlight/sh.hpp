// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/envlight/envmap.hpp>

#include <cmath>
#include <vector>

namespace relight {

// Real orthonormal spherical harmonics without the Condon-Shortley phase.
//
// The polar axis is the map's up axis (+Y) and the azimuth follows the lat-long convention
// (phi from +X toward +Z). With (x, y, z) a world direction this gives, for l = 1,
//   Y_{1,-1} = c z,  Y_{1,0} = c y,  Y_{1,1} = c x,   c = sqrt(3 / (4 pi)).
// Coefficients are stored at index l (l + 1) + m.

inline constexpr int sh_index(int l, int m) { return l * (l + 1) + m; }
inline constexpr int sh_count(int order) { return (order + 1) * (order + 1); }

// Evaluates all basis functions up to `order` at unit direction d into out[sh_count(order)].
inline void sh_evaluate(int order, const Vec3 &d, double *out) {
    const double ct = std::clamp(d.y, -1.0, 1.0);
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = std::atan2(d.z, d.x);

    // Associated Legendre P_l^m(ct) without the (-1)^m factor, via the standard recurrences.
    std::vector<double> p(static_cast<std::size_t>(sh_count(order)));
    auto P = [&](int l, int m) -> double & { return p[static_cast<std::size_t>(l * (order + 1) + m)]; };
    P(0, 0) = 1.0;
    for (int m = 1; m <= order; ++m) P(m, m) = P(m - 1, m - 1) * (2 * m - 1) * st;
    for (int m = 0; m < order; ++m) P(m + 1, m) = (2 * m + 1) * ct * P(m, m);
    for (int m = 0; m <= order; ++m)
        for (int l = m + 2; l <= order; ++l)
            P(l, m) = ((2 * l - 1) * ct * P(l - 1, m) - (l + m - 1) * P(l - 2, m)) / (l - m);

    for (int l = 0; l <= order; ++l) {
        for (int m = 0; m <= l; ++m) {
            // K = sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!)
            double ratio = 1.0;
            for (int k = l - m + 1; k <= l + m; ++k) ratio /= k;
            const double K = std::sqrt((2 * l + 1) / (4 * kPi) * ratio);
            if (m == 0) {
                out[sh_index(l, 0)] = K * P(l, 0);
            } else {
                out[sh_index(l, m)] = std::sqrt(2.0) * K * std::cos(m * phi) * P(l, m);
                out[sh_index(l, -m)] = std::sqrt(2.0) * K * std::sin(m * phi) * P(l, m);
            }
        }
    }
}

inline std::vector<double> sh_evaluate(int order, const Vec3 &d) {
    std::vector<double> out(static_cast<std::size_t>(sh_count(order)));
    sh_evaluate(order, d, out.data());
    return out;
}

// Per-channel SH projection of radiance: (order + 1)^2 RGB triples.
struct SHCoefficients {
    int order = 0;
    std::vector<Vec3> coeffs;

    SHCoefficients() = default;
    explicit SHCoefficients(int order_) : order(order_), coeffs(static_cast<std::size_t>(sh_count(order_))) {
        if (order_ < 0) fail(ErrorKind::Precondition, "SH order must be >= 0");
    }

    Vec3 &operator()(int l, int m) { return coeffs[static_cast<std::size_t>(sh_index(l, m))]; }
    const Vec3 &operator()(int l, int m) const { return coeffs[static_cast<std::size_t>(sh_index(l, m))]; }

    // First sh_count(lower) coefficients, e.g. the 9 order-2 terms of a 25-term projection.
    SHCoefficients truncated(int lower) const {
        if (lower > order) fail(ErrorKind::Precondition, "cannot truncate SH to a higher order");
        SHCoefficients out(lower);
        std::copy_n(coeffs.begin(), out.coeffs.size(), out.coeffs.begin());
        return out;
    }
};

// c_{l,m} = sum over pixels of radiance(p) Y_{l,m}(dir(p)) w(p), evaluated at pixel centers.
inline SHCoefficients sh_project(const EnvironmentMap &map, int order) {
    SHCoefficients out(order);
    const SolidAngleWeights w(map.width(), map.height());
    std::vector<double> basis(out.coeffs.size());
    for (int row = 0; row < map.height(); ++row) {
        std::vector<Vec3> row_acc(out.coeffs.size());
        for (int col = 0; col < map.width(); ++col) {
            sh_evaluate(order, direction_from_pixel(map, row, col), basis.data());
            const Vec3 L = map.at(col, row);
            for (std::size_t k = 0; k < basis.size(); ++k) row_acc[k] += basis[k] * L;
        }
        for (std::size_t k = 0; k < basis.size(); ++k) out.coeffs[k] += w.row_weight(row) * row_acc[k];
    }
    return out;
}

// Lambertian (clamped cosine) transfer per band, A_l. Zero for odd l > 1.
inline double lambertian_band(int l) {
    if (l == 0) return kPi;
    if (l == 1) return 2 * kPi / 3;
    if (l % 2 == 1) return 0.0;
    // A_l = 2 pi (-1)^(l/2 - 1) / ((l + 2)(l - 1)) * l! / (2^l ((l/2)!)^2)
    double fact_ratio = 1.0;  // l! / ((l/2)!)^2
    for (int k = 1; k <= l; ++k) fact_ratio *= k;
    double half = 1.0;
    for (int k = 1; k <= l / 2; ++k) half *= k;
    fact_ratio /= half * half;
    const double sign = ((l / 2 - 1) % 2 == 0) ? 1.0 : -1.0;
    return 2 * kPi * sign / ((l + 2.0) * (l - 1.0)) * fact_ratio / std::pow(2.0, l);
}

// Diffuse shading (irradiance / pi) at unit normal n, clamped at zero.
inline Vec3 sh_irradiance_shading(const SHCoefficients &sh, const Vec3 &n) {
    if (std::abs(length(n) - 1.0) > 1e-6) fail(ErrorKind::Precondition, "normal must be unit length");
    std::vector<double> basis(sh.coeffs.size());
    sh_evaluate(sh.order, n, basis.data());
    Vec3 e;
    for (int l = 0; l <= sh.order; ++l) {
        const double a = lambertian_band(l);
        if (a == 0) continue;
        for (int m = -l; m <= l; ++m) e += (a * basis[sh_index(l, m)]) * sh(l, m);
    }
    e *= kInvPi;
    return max(e, Vec3{});
}

}  // namespace relight

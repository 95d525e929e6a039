// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/envlight/envmap.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace relight {

struct EnvSample {
    Vec3 direction;
    double pdf;  // per steradian
    PixelCoord pixel;
};

// Importance sampler over lat-long pixels with P(pixel) proportional to luminance * solid angle.
// A pixel is chosen by marginal (row) / conditional (column) inversion, then a direction is drawn
// uniformly in solid angle inside it, so pdf(w) = luminance(pixel(w)) / sum_q luminance_q w_q.
// The map from [0,1)^2 is monotone in both coordinates, which keeps stratified inputs stratified.
class EnvSampler {
  public:
    explicit EnvSampler(const EnvironmentMap &map) : width_(map.width()), height_(map.height()) {
        const SolidAngleWeights w(width_, height_);
        lum_.resize(static_cast<std::size_t>(width_) * height_);
        col_cdf_.resize(static_cast<std::size_t>(width_ + 1) * height_);
        row_cdf_.assign(static_cast<std::size_t>(height_) + 1, 0.0);
        std::vector<double> row_mass(height_);
        for (int r = 0; r < height_; ++r) {
            double *cdf = &col_cdf_[static_cast<std::size_t>(r) * (width_ + 1)];
            cdf[0] = 0;
            for (int c = 0; c < width_; ++c) {
                const double l = luminance(map.at(c, r));
                lum_[static_cast<std::size_t>(r) * width_ + c] = l;
                cdf[c + 1] = cdf[c] + l;
            }
            const double row_sum = cdf[width_];
            if (row_sum > 0)
                for (int c = 1; c <= width_; ++c) cdf[c] /= row_sum;
            cdf[width_] = 1.0;
            row_mass[r] = row_sum * w.row_weight(r);
        }
        for (int r = 0; r < height_; ++r) row_cdf_[r + 1] = row_cdf_[r] + row_mass[r];
        total_ = row_cdf_[height_];
        if (!(total_ > 0)) fail(ErrorKind::DegenerateInput, "environment map has no positive luminance");
        for (double &v : row_cdf_) v /= total_;
        row_cdf_[height_] = 1.0;
        cos_top_.resize(static_cast<std::size_t>(height_) + 1);
        for (int r = 0; r <= height_; ++r) cos_top_[r] = std::cos(kPi * r / height_);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    // sum over pixels of luminance * solid angle.
    double normalization() const { return total_; }

    EnvSample sample(double u, double v) const {
        double du, dv;
        const int row = invert(row_cdf_.data(), height_, u, du);
        const int col = invert(&col_cdf_[static_cast<std::size_t>(row) * (width_ + 1)], width_, v, dv);
        const double ct = cos_top_[row] - du * (cos_top_[row] - cos_top_[row + 1]);
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        const double phi = 2 * kPi * (col + dv) / width_;
        return {{st * std::cos(phi), ct, st * std::sin(phi)}, pixel_pdf(row, col), {row, col}};
    }

    double pixel_pdf(int row, int col) const { return lum_[static_cast<std::size_t>(row) * width_ + col] / total_; }

    double pdf(const Vec3 &direction) const {
        const PixelCoord p = pixel_from_direction(width_, height_, direction);
        return pixel_pdf(p.row, p.col);
    }

    // Discrete probability of selecting a pixel.
    double pixel_probability(int row, int col) const {
        const SolidAngleWeights w(width_, height_);
        return pixel_pdf(row, col) * w.row_weight(row);
    }

  private:
    static int invert(const double *cdf, int n, double u, double &remapped) {
        u = std::clamp(u, 0.0, std::nextafter(1.0, 0.0));
        const int i = static_cast<int>(std::upper_bound(cdf, cdf + n + 1, u) - cdf) - 1;
        const int k = std::clamp(i, 0, n - 1);
        const double span = cdf[k + 1] - cdf[k];
        remapped = span > 0 ? std::clamp((u - cdf[k]) / span, 0.0, std::nextafter(1.0, 0.0)) : 0.5;
        return k;
    }

    int width_, height_;
    double total_ = 0;
    std::vector<double> lum_;
    std::vector<double> col_cdf_;
    std::vector<double> row_cdf_;
    std::vector<double> cos_top_;
};

inline EnvSampler build_luminance_sampler(const EnvironmentMap &map) { return EnvSampler(map); }

}  // namespace relight

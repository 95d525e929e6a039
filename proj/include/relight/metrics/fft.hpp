// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/image.hpp>

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

namespace relight {

namespace detail {
// FFTW planning is not thread-safe; execution of distinct plans is.
inline std::mutex &fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

// Unnormalized forward 2D DFT of one channel: X[k,l] = sum_{y,x} x[y,x] e^{-2 pi i (ky/H + lx/W)}.
// Output is row-major H x W.
inline std::vector<std::complex<double>> fft2(const ImageD &img, int channel = 0) {
    const int w = img.width(), h = img.height();
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) buf[static_cast<std::size_t>(y) * w + x] = img(x, y, channel);
    auto *data = reinterpret_cast<fftw_complex *>(buf.data());
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_2d(h, w, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    if (!plan) fail(ErrorKind::Numerical, "FFTW could not plan a " + std::to_string(w) + "x" + std::to_string(h) + " transform");
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return buf;
}

}  // namespace relight

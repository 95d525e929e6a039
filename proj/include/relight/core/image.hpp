// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/vec.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace relight {

// Row-major interleaved raster. Row 0 is the top of the image; x indexes columns.
template <typename T>
class Image {
  public:
    Image() = default;
    Image(int width, int height, int channels, T fill = T{})
        : width_(width), height_(height), channels_(channels) {
        if (width < 0 || height < 0 || channels <= 0)
            fail(ErrorKind::Shape, "invalid image dimensions " + std::to_string(width) + "x" +
                                       std::to_string(height) + "x" + std::to_string(channels));
        data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const { return data_.empty(); }

    bool same_shape(const Image &o) const {
        return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
    }
    template <typename U>
    bool same_raster(const Image<U> &o) const {
        return width_ == o.width() && height_ == o.height();
    }

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }
    T &operator()(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
    const T &operator()(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

    Vec3 rgb(int x, int y) const {
        const std::size_t i = index(x, y);
        return {double(data_[i]), double(data_[i + 1]), double(data_[i + 2])};
    }
    void set_rgb(int x, int y, const Vec3 &v) {
        const std::size_t i = index(x, y);
        data_[i] = T(v.x);
        data_[i + 1] = T(v.y);
        data_[i + 2] = T(v.z);
    }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }

    bool operator==(const Image &) const = default;

  private:
    int width_ = 0, height_ = 0, channels_ = 0;
    std::vector<T> data_;
};

using ImageD = Image<double>;
using Mask8 = Image<unsigned char>;

}  // namespace relight

// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/image.hpp>

#include <cmath>
#include <limits>

namespace relight {

// Pixel-aligned render planes. Depth is +inf and normal/ao/shading are zero where mask = 0.
struct GBuffer {
    int width = 0, height = 0;
    Mask8 mask;
    ImageD depth;
    ImageD normal;   // 3 channels
    ImageD ao;       // 1 channel
    ImageD shading;  // 3 channels

    GBuffer() = default;
    GBuffer(int w, int h)
        : width(w), height(h), mask(w, h, 1, 0), depth(w, h, 1, std::numeric_limits<double>::infinity()),
          normal(w, h, 3, 0.0), ao(w, h, 1, 0.0), shading(w, h, 3, 0.0) {}

    bool covered(int x, int y) const { return mask(x, y) != 0; }

    std::size_t coverage() const {
        std::size_t n = 0;
        for (unsigned char m : mask.data()) n += m != 0;
        return n;
    }

    bool operator==(const GBuffer &) const = default;
};

}  // namespace relight

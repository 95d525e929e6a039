// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/mesh/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace relight {

enum class SmoothingScheme { Uniform, Cotangent };

inline SmoothingScheme parse_smoothing_scheme(std::string_view s) {
    if (s == "uniform") return SmoothingScheme::Uniform;
    if (s == "cotangent" || s == "cot") return SmoothingScheme::Cotangent;
    fail(ErrorKind::Config, "unknown smoothing scheme '" + std::string(s) + "'");
}

struct SmoothingConfig {
    int steps = 10;
    SmoothingScheme scheme = SmoothingScheme::Cotangent;
    double lambda = 1.0;

    void validate() const {
        if (steps < 0) fail(ErrorKind::Config, "smoothing steps must be >= 0");
        if (!(lambda > 0.0 && lambda <= 1.0)) fail(ErrorKind::Config, "smoothing lambda must lie in (0, 1]");
    }
};

namespace detail {

struct Edge {
    std::uint32_t a, b;  // a < b
};

inline std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(a) << 32) | b;
}

// Cotangent of the angle at apex. Zero-area corners contribute nothing: on open meshes the
// unpinned boundary can collapse onto its neighbors and would otherwise yield infinities.
inline double cotangent(const Vec3 &apex, const Vec3 &p, const Vec3 &q) {
    const Vec3 u = p - apex, v = q - apex;
    const double s = length(cross(u, v));
    if (!(s > 1e-12 * length(u) * length(v))) return 0.0;
    return dot(u, v) / s;
}

}  // namespace detail

// Explicit Laplacian smoothing: p <- p + lambda * L(p), where L(p_i) is the normalized
// weighted mean of (p_j - p_i) over the one-ring. Cotangent weights (cot a + cot b)/2 are
// clamped at zero. Boundary vertices use whatever one-ring they have. Connectivity is untouched.
inline TriangleMesh laplacian_smooth(const TriangleMesh &mesh, const SmoothingConfig &cfg) {
    cfg.validate();
    TriangleMesh out = mesh;
    if (cfg.steps == 0) return out;

    // Unique undirected edges with a stable order.
    std::unordered_map<std::uint64_t, std::size_t> edge_index;
    std::vector<detail::Edge> edges;
    // For each triangle corner, the edge opposite to it.
    std::vector<std::array<std::size_t, 3>> opposite(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Triangle &tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
            const auto key = detail::edge_key(a, b);
            auto [it, inserted] = edge_index.try_emplace(key, edges.size());
            if (inserted) edges.push_back({std::min(a, b), std::max(a, b)});
            opposite[t][k] = it->second;
        }
    }

    const std::size_t n = mesh.positions.size();
    std::vector<double> weight(edges.size());
    std::vector<Vec3> sum(n);
    std::vector<double> total(n);
    std::vector<Vec3> &pos = out.positions;

    for (int step = 0; step < cfg.steps; ++step) {
        if (cfg.scheme == SmoothingScheme::Uniform) {
            std::fill(weight.begin(), weight.end(), 1.0);
        } else {
            std::fill(weight.begin(), weight.end(), 0.0);
            for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
                const Triangle &tri = mesh.triangles[t];
                for (int k = 0; k < 3; ++k)
                    weight[opposite[t][k]] +=
                        0.5 * detail::cotangent(pos[tri[k]], pos[tri[(k + 1) % 3]], pos[tri[(k + 2) % 3]]);
            }
            for (double &w : weight) w = std::max(w, 0.0);
        }

        std::fill(sum.begin(), sum.end(), Vec3{});
        std::fill(total.begin(), total.end(), 0.0);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto [a, b] = edges[e];
            const double w = weight[e];
            sum[a] += w * (pos[b] - pos[a]);
            sum[b] += w * (pos[a] - pos[b]);
            total[a] += w;
            total[b] += w;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (total[i] > 0) {
                const Vec3 p = pos[i] + (cfg.lambda / total[i]) * sum[i];
                if (!is_finite(p))
                    fail(ErrorKind::Numerical, "non-finite position at vertex " + std::to_string(i) + " in step " +
                                                   std::to_string(step + 1));
                pos[i] = p;
            } else if (!std::isfinite(total[i]) || !is_finite(pos[i])) {
                fail(ErrorKind::Numerical, "non-finite Laplacian weight at vertex " + std::to_string(i));
            }
        }
    }
    // Stored normals no longer describe the surface.
    out.vertex_normals.reset();
    return out;
}

}  // namespace relight

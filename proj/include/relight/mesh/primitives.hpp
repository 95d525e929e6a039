// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/mesh/mesh.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace relight {

// Unit-radius icosphere centered at the origin, counter-clockwise (outward) winding.
inline TriangleMesh make_icosphere(int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriangleMesh m;
    m.positions = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                   {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (Vec3 &p : m.positions) p = normalize(p);
    m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                   {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                   {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            const auto idx = static_cast<std::uint32_t>(m.positions.size());
            m.positions.push_back(normalize((m.positions[a] + m.positions[b]) * 0.5));
            mid.emplace(key, idx);
            return idx;
        };
        std::vector<Triangle> next;
        next.reserve(m.triangles.size() * 4);
        for (const Triangle &tri : m.triangles) {
            const std::uint32_t a = midpoint(tri[0], tri[1]);
            const std::uint32_t b = midpoint(tri[1], tri[2]);
            const std::uint32_t c = midpoint(tri[2], tri[0]);
            next.push_back({tri[0], a, c});
            next.push_back({tri[1], b, a});
            next.push_back({tri[2], c, b});
            next.push_back({a, b, c});
        }
        m.triangles = std::move(next);
    }
    return m;
}

// Regular (nx x nz)-cell grid in the y = 0 plane spanning [x0,x1] x [z0,z1], normals +Y.
inline TriangleMesh make_grid(int nx, int nz, double x0, double x1, double z0, double z1) {
    TriangleMesh m;
    for (int j = 0; j <= nz; ++j)
        for (int i = 0; i <= nx; ++i)
            m.positions.push_back({x0 + (x1 - x0) * i / nx, 0.0, z0 + (z1 - z0) * j / nz});
    auto id = [nx](int i, int j) { return static_cast<std::uint32_t>(j * (nx + 1) + i); };
    for (int j = 0; j < nz; ++j)
        for (int i = 0; i < nx; ++i) {
            m.triangles.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
        }
    return m;
}

// Planar quad from four corners in order; emits triangles (0,1,2),(0,2,3).
inline TriangleMesh make_quad(const Vec3 &a, const Vec3 &b, const Vec3 &c, const Vec3 &d) {
    TriangleMesh m;
    m.positions = {a, b, c, d};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    return m;
}

// Axis-aligned closed box with outward winding.
inline TriangleMesh make_box(const Vec3 &lo, const Vec3 &hi) {
    TriangleMesh m;
    for (int i = 0; i < 8; ++i)
        m.positions.push_back({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z});
    m.triangles = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                   {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
    return m;
}

inline TriangleMesh transformed(TriangleMesh m, const Vec3 &scale, const Vec3 &offset) {
    for (Vec3 &p : m.positions) p = mul(p, scale) + offset;
    if (m.vertex_normals) {
        const Vec3 inv{1 / scale.x, 1 / scale.y, 1 / scale.z};
        for (Vec3 &n : *m.vertex_normals) n = normalize(mul(n, inv));
    }
    return m;
}

// Concatenates meshes; normals and colors survive only if every part carries them.
inline TriangleMesh merge(const std::vector<TriangleMesh> &parts) {
    TriangleMesh out;
    bool normals = !parts.empty(), colors = !parts.empty();
    for (const auto &p : parts) {
        normals = normals && p.vertex_normals.has_value();
        colors = colors && p.vertex_colors.has_value();
    }
    if (normals) out.vertex_normals.emplace();
    if (colors) out.vertex_colors.emplace();
    for (const auto &p : parts) {
        const auto base = static_cast<std::uint32_t>(out.positions.size());
        out.positions.insert(out.positions.end(), p.positions.begin(), p.positions.end());
        for (Triangle t : p.triangles) out.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
        if (normals) out.vertex_normals->insert(out.vertex_normals->end(), p.vertex_normals->begin(), p.vertex_normals->end());
        if (colors) out.vertex_colors->insert(out.vertex_colors->end(), p.vertex_colors->begin(), p.vertex_colors->end());
    }
    return out;
}

inline TriangleMesh with_color(TriangleMesh m, const Vec3 &rgb) {
    m.vertex_colors = std::vector<Vec3>(m.positions.size(), rgb);
    return m;
}

// A standing figure built from overlapping ellipsoids: head, torso, arms and legs.
// Roughly 1.8 units tall with feet at y = 0, facing +Z. Carries per-part albedo colors.
inline TriangleMesh make_figure(int subdivisions = 3) {
    const TriangleMesh s = make_icosphere(subdivisions);
    auto part = [&](Vec3 radii, Vec3 center, Vec3 color) {
        return with_color(transformed(s, radii, center), color);
    };
    const Vec3 skin{0.80, 0.60, 0.48}, shirt{0.25, 0.40, 0.70}, pants{0.30, 0.28, 0.25};
    return merge({
        part({0.11, 0.13, 0.12}, {0.0, 1.66, 0.0}, skin),       // head
        part({0.05, 0.06, 0.05}, {0.0, 1.50, 0.0}, skin),       // neck
        part({0.20, 0.30, 0.12}, {0.0, 1.20, 0.0}, shirt),      // torso
        part({0.17, 0.14, 0.11}, {0.0, 0.90, 0.0}, pants),      // hips
        part({0.05, 0.30, 0.05}, {-0.26, 1.12, 0.0}, shirt),    // left arm
        part({0.05, 0.30, 0.05}, {0.26, 1.12, 0.0}, shirt),     // right arm
        part({0.07, 0.42, 0.07}, {-0.09, 0.44, 0.0}, pants),    // left leg
        part({0.07, 0.42, 0.07}, {0.09, 0.44, 0.0}, pants),     // right leg
        part({0.06, 0.03, 0.11}, {-0.09, 0.03, 0.04}, pants),   // left foot
        part({0.06, 0.03, 0.11}, {0.09, 0.03, 0.04}, pants),    // right foot
    });
}

}  // namespace relight

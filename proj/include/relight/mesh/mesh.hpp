// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/vec.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace relight {

using Triangle = std::array<std::uint32_t, 3>;

// Indexed triangle geometry. Values are treated as immutable once built;
// every mesh operation returns a new mesh.
struct TriangleMesh {
    std::vector<Vec3> positions;
    std::vector<Triangle> triangles;
    std::optional<std::vector<Vec3>> vertex_normals;
    // Linear RGB albedo per vertex ("v x y z r g b" in OBJ files).
    std::optional<std::vector<Vec3>> vertex_colors;

    std::size_t vertex_count() const { return positions.size(); }
    std::size_t triangle_count() const { return triangles.size(); }

    Bounds3 bounds() const {
        Bounds3 b;
        for (const Vec3 &p : positions) b.extend(p);
        return b;
    }

    Vec3 face_normal_unnormalized(std::size_t t) const {
        const Triangle &tri = triangles[t];
        return cross(positions[tri[1]] - positions[tri[0]], positions[tri[2]] - positions[tri[0]]);
    }

    // Throws ErrorKind::Structural on the first violated invariant.
    void validate() const {
        if (positions.empty() || triangles.empty()) fail(ErrorKind::Structural, "mesh is empty");
        for (std::size_t i = 0; i < positions.size(); ++i)
            if (!is_finite(positions[i]))
                fail(ErrorKind::Structural, "non-finite position at vertex " + std::to_string(i));
        for (std::size_t t = 0; t < triangles.size(); ++t)
            for (std::uint32_t idx : triangles[t])
                if (idx >= positions.size())
                    fail(ErrorKind::Structural, "triangle " + std::to_string(t) + " references vertex " +
                                                    std::to_string(idx) + " of " +
                                                    std::to_string(positions.size()));
        if (vertex_normals) {
            if (vertex_normals->size() != positions.size())
                fail(ErrorKind::Structural, "vertex normal count does not match position count");
            for (std::size_t i = 0; i < vertex_normals->size(); ++i)
                if (std::abs(length((*vertex_normals)[i]) - 1.0) > 1e-6)
                    fail(ErrorKind::Structural, "normal at vertex " + std::to_string(i) + " is not unit length");
        }
        if (vertex_colors && vertex_colors->size() != positions.size())
            fail(ErrorKind::Structural, "vertex color count does not match position count");
    }
};

// Area-weighted vertex normals. Vertices whose incident triangles are all degenerate
// (or that no triangle references) get (0,0,1) and are counted in *degenerate_count.
inline TriangleMesh compute_vertex_normals(const TriangleMesh &mesh, std::size_t *degenerate_count = nullptr) {
    TriangleMesh out = mesh;
    std::vector<Vec3> accum(mesh.positions.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        // |cross| is twice the triangle area, so summing raw cross products area-weights.
        const Vec3 n = mesh.face_normal_unnormalized(t);
        for (std::uint32_t v : mesh.triangles[t]) accum[v] += n;
    }
    std::size_t degenerate = 0;
    for (Vec3 &n : accum) {
        const double len = length(n);
        if (len > 0 && std::isfinite(len)) {
            n = n / len;
        } else {
            n = {0, 0, 1};
            ++degenerate;
        }
    }
    out.vertex_normals = std::move(accum);
    if (degenerate_count) *degenerate_count = degenerate;
    return out;
}

}  // namespace relight

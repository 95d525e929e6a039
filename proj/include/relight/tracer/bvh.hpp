// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/mesh/mesh.hpp>
#include <relight/tracer/camera.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace relight {

struct Hit {
    std::uint32_t triangle = 0;
    double t = 0;
    double b1 = 0, b2 = 0;  // barycentrics of vertices 1 and 2
};

struct TriangleData {
    Vec3 v0, e1, e2;
};

inline TriangleData triangle_data(const TriangleMesh &mesh, std::size_t t) {
    const Triangle &tri = mesh.triangles[t];
    const Vec3 &a = mesh.positions[tri[0]];
    return {a, mesh.positions[tri[1]] - a, mesh.positions[tri[2]] - a};
}

// Moller-Trumbore, two-sided. Accepts t in the open interval (tmin, tmax).
inline bool intersect_triangle(const TriangleData &tri, const Ray &ray, double tmin, double tmax, double &t,
                               double &b1, double &b2) {
    const Vec3 pvec = cross(ray.dir, tri.e2);
    const double det = dot(tri.e1, pvec);
    if (det == 0 || !std::isfinite(det)) return false;
    const double inv = 1.0 / det;
    const Vec3 tvec = ray.origin - tri.v0;
    const double u = dot(tvec, pvec) * inv;
    if (u < 0 || u > 1) return false;
    const Vec3 qvec = cross(tvec, tri.e1);
    const double v = dot(ray.dir, qvec) * inv;
    if (v < 0 || u + v > 1) return false;
    const double th = dot(tri.e2, qvec) * inv;
    if (!(th > tmin && th < tmax)) return false;
    t = th;
    b1 = u;
    b2 = v;
    return true;
}

// Nearest-hit ordering shared by every query: smaller t wins, ties go to the lower triangle id.
inline bool closer(double t, std::uint32_t id, const Hit &best) {
    return t < best.t || (t == best.t && id < best.triangle);
}

struct TraversalStats {
    std::size_t nodes_visited = 0;
    std::size_t triangle_tests = 0;
};

// Binary bounding-volume hierarchy over triangles, built with binned SAH and flattened in
// depth-first order. Leaves hold at most kMaxLeafSize triangles.
class BVHAccel {
  public:
    static constexpr int kMaxLeafSize = 4;

    struct Node {
        Bounds3 bounds;
        std::uint32_t offset = 0;  // leaf: first index into primitive order; interior: second child
        std::uint16_t count = 0;   // triangles in leaf, 0 for interior nodes
        std::uint8_t axis = 0;
        bool is_leaf() const { return count > 0; }
    };

    explicit BVHAccel(const TriangleMesh &mesh) {
        if (mesh.triangles.empty()) fail(ErrorKind::Structural, "cannot build a BVH over an empty mesh");
        const std::size_t n = mesh.triangles.size();
        std::vector<Bounds3> prim_bounds(n);
        std::vector<Vec3> centroids(n);
        for (std::size_t t = 0; t < n; ++t) {
            for (std::uint32_t v : mesh.triangles[t]) {
                if (v >= mesh.positions.size()) fail(ErrorKind::Structural, "triangle index out of range");
                prim_bounds[t].extend(mesh.positions[v]);
            }
            centroids[t] = prim_bounds[t].center();
        }
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), 0u);
        nodes_.reserve(2 * n);
        build(prim_bounds, centroids, 0, n);
        tris_.reserve(n);
        for (std::uint32_t t : order_) tris_.push_back(triangle_data(mesh, t));
    }

    const std::vector<Node> &nodes() const { return nodes_; }
    // Triangle ids in leaf order; leaf i covers order()[offset, offset + count).
    const std::vector<std::uint32_t> &order() const { return order_; }
    Bounds3 bounds() const { return nodes_.front().bounds; }

    std::optional<Hit> intersect(const Ray &ray, double tmin = 0, double tmax = INFINITY,
                                 TraversalStats *stats = nullptr) const {
        Hit best;
        best.t = tmax;
        bool found = false;
        traverse(ray, tmin, [&](std::size_t k, double &limit) {
            double t, b1, b2;
            if (stats) ++stats->triangle_tests;
            if (intersect_triangle(tris_[k], ray, tmin, tmax, t, b1, b2) && (!found || closer(t, order_[k], best))) {
                best = {order_[k], t, b1, b2};
                found = true;
                // Keep equal-t candidates reachable so the id tie-break matches a linear scan.
                limit = std::nextafter(t, INFINITY);
            }
            return false;
        }, tmax, stats);
        if (!found) return std::nullopt;
        return best;
    }

    bool occluded(const Ray &ray, double tmin = 0, double tmax = INFINITY) const {
        bool hit = false;
        traverse(ray, tmin, [&](std::size_t k, double &) {
            double t, b1, b2;
            hit = intersect_triangle(tris_[k], ray, tmin, tmax, t, b1, b2);
            return hit;
        }, tmax, nullptr);
        return hit;
    }

  private:
    static bool slab(const Bounds3 &b, const Ray &ray, const Vec3 &inv, double tmin, double tmax) {
        for (int a = 0; a < 3; ++a) {
            double t0 = (b.lo[a] - ray.origin[a]) * inv[a];
            double t1 = (b.hi[a] - ray.origin[a]) * inv[a];
            if (t0 > t1) std::swap(t0, t1);
            // NaN (0 * inf) leaves the interval unchanged.
            tmin = t0 > tmin ? t0 : tmin;
            tmax = t1 < tmax ? t1 : tmax;
            if (tmin > tmax) return false;
        }
        return true;
    }

    // visit(k, limit) tests leaf triangle k (position in order_); returning true stops traversal.
    template <typename Visit>
    void traverse(const Ray &ray, double tmin, Visit &&visit, double tmax, TraversalStats *stats) const {
        const Vec3 inv{1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z};
        const bool neg[3] = {inv.x < 0, inv.y < 0, inv.z < 0};
        std::array<std::uint32_t, 128> stack;
        int sp = 0;
        std::uint32_t node = 0;
        double limit = tmax;
        for (;;) {
            const Node &nd = nodes_[node];
            if (stats) ++stats->nodes_visited;
            if (slab(nd.bounds, ray, inv, tmin, limit)) {
                if (nd.is_leaf()) {
                    for (std::uint32_t i = 0; i < nd.count; ++i)
                        if (visit(nd.offset + i, limit)) return;
                } else if (neg[nd.axis]) {
                    stack[sp++] = node + 1;
                    node = nd.offset;
                    continue;
                } else {
                    stack[sp++] = nd.offset;
                    node = node + 1;
                    continue;
                }
            }
            if (sp == 0) return;
            node = stack[--sp];
        }
    }

    std::uint32_t build(const std::vector<Bounds3> &pb, const std::vector<Vec3> &cent, std::size_t begin,
                        std::size_t end, int depth = 0) {
        const auto index = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        Bounds3 bounds, cbounds;
        for (std::size_t i = begin; i < end; ++i) {
            bounds.extend(pb[order_[i]]);
            cbounds.extend(cent[order_[i]]);
        }
        nodes_[index].bounds = bounds;
        const std::size_t count = end - begin;
        if (count <= 1) {
            make_leaf(index, begin, count);
            return index;
        }
        const int axis = cbounds.longest_axis();
        const double lo = cbounds.lo[axis], extent = cbounds.hi[axis] - cbounds.lo[axis];
        std::size_t mid = begin + count / 2;
        // Deep chains fall back to median splits so traversal depth stays bounded.
        const bool force_median = depth > 48;
        if (extent <= 0) {
            if (count <= kMaxLeafSize) {
                make_leaf(index, begin, count);
                return index;
            }
            // All centroids coincide: split by position in the list.
        } else {
            constexpr int kBins = 16;
            std::array<Bounds3, kBins> bin_bounds;
            std::array<std::size_t, kBins> bin_count{};
            auto bin_of = [&](std::uint32_t p) {
                return std::min(kBins - 1, static_cast<int>(kBins * ((cent[p][axis] - lo) / extent)));
            };
            for (std::size_t i = begin; i < end; ++i) {
                const int b = bin_of(order_[i]);
                ++bin_count[b];
                bin_bounds[b].extend(pb[order_[i]]);
            }
            double best_cost = INFINITY;
            int best_split = -1;
            for (int s = 0; s < kBins - 1; ++s) {
                Bounds3 left, right;
                std::size_t nl = 0, nr = 0;
                for (int b = 0; b <= s; ++b) {
                    left.extend(bin_bounds[b]);
                    nl += bin_count[b];
                }
                for (int b = s + 1; b < kBins; ++b) {
                    right.extend(bin_bounds[b]);
                    nr += bin_count[b];
                }
                if (nl == 0 || nr == 0) continue;
                const double cost = 0.125 + (nl * left.surface_area() + nr * right.surface_area()) / bounds.surface_area();
                if (cost < best_cost) {
                    best_cost = cost;
                    best_split = s;
                }
            }
            if (count <= kMaxLeafSize && (best_split < 0 || best_cost >= double(count))) {
                make_leaf(index, begin, count);
                return index;
            }
            if (best_split >= 0 && !force_median) {
                auto it = std::stable_partition(order_.begin() + begin, order_.begin() + end,
                                                [&](std::uint32_t p) { return bin_of(p) <= best_split; });
                mid = static_cast<std::size_t>(it - order_.begin());
            } else {
                std::stable_sort(order_.begin() + begin, order_.begin() + end,
                                 [&](std::uint32_t a, std::uint32_t b) { return cent[a][axis] < cent[b][axis]; });
            }
        }
        nodes_[index].axis = static_cast<std::uint8_t>(axis);
        build(pb, cent, begin, mid, depth + 1);
        const std::uint32_t second = build(pb, cent, mid, end, depth + 1);
        nodes_[index].offset = second;
        return index;
    }

    void make_leaf(std::uint32_t index, std::size_t begin, std::size_t count) {
        nodes_[index].offset = static_cast<std::uint32_t>(begin);
        nodes_[index].count = static_cast<std::uint16_t>(count);
    }

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<TriangleData> tris_;
};

inline BVHAccel build_bvh(const TriangleMesh &mesh) { return BVHAccel(mesh); }

}  // namespace relight

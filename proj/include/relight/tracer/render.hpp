// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/image.hpp>
#include <relight/core/parallel.hpp>
#include <relight/core/rng.hpp>
#include <relight/envlight/envmap.hpp>
#include <relight/envlight/sampler.hpp>
#include <relight/mesh/mesh.hpp>
#include <relight/tracer/bvh.hpp>
#include <relight/tracer/camera.hpp>
#include <relight/tracer/gbuffer.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

namespace relight {

struct RenderConfig {
    int spp = 256;
    // Self-intersection offset along the geometric normal; unset means 1e-4 x bbox diagonal.
    std::optional<double> ray_epsilon;
    double ao_max_distance = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    std::optional<double> clamp_radiance;
    int jobs = default_jobs();
    int tile_size = 16;

    void validate() const {
        if (spp < 1) fail(ErrorKind::Config, "spp must be >= 1");
        if (ray_epsilon && !(*ray_epsilon > 0)) fail(ErrorKind::Config, "ray epsilon must be > 0");
        if (!(ao_max_distance > 0)) fail(ErrorKind::Config, "AO distance must be > 0");
        if (clamp_radiance && !(*clamp_radiance > 0)) fail(ErrorKind::Config, "clamp radiance must be > 0");
        if (jobs < 1) fail(ErrorKind::Config, "jobs must be >= 1");
        if (tile_size < 1) fail(ErrorKind::Config, "tile size must be >= 1");
    }
};

// Mesh plus acceleration structure. Vertex normals are computed when the mesh has none.
class Scene {
  public:
    explicit Scene(TriangleMesh mesh)
        : mesh_(mesh.vertex_normals ? std::move(mesh) : compute_vertex_normals(mesh)), bvh_(mesh_),
          diagonal_(mesh_.bounds().diagonal()) {
        mesh_.validate();
    }

    const TriangleMesh &mesh() const { return mesh_; }
    const BVHAccel &bvh() const { return bvh_; }
    double epsilon(const RenderConfig &cfg) const {
        return cfg.ray_epsilon ? *cfg.ray_epsilon : 1e-4 * (diagonal_ > 0 ? diagonal_ : 1.0);
    }

  private:
    TriangleMesh mesh_;
    BVHAccel bvh_;
    double diagonal_;
};

struct SurfacePoint {
    Vec3 position;
    Vec3 geometric_normal;  // unit, on the side the point is seen from
    Vec3 shading_normal;    // unit, flipped together with the geometric normal
    double t = 0;
    std::uint32_t triangle = 0;
    double b1 = 0, b2 = 0;
};

// Resolves a hit into a surface point whose normals face back along `incoming`.
inline SurfacePoint surface_point(const Scene &scene, const Ray &ray, const Hit &hit) {
    const TriangleMesh &m = scene.mesh();
    const Triangle &tri = m.triangles[hit.triangle];
    SurfacePoint sp;
    sp.t = hit.t;
    sp.triangle = hit.triangle;
    sp.b1 = hit.b1;
    sp.b2 = hit.b2;
    sp.position = ray.origin + ray.dir * hit.t;
    Vec3 ng = normalize(m.face_normal_unnormalized(hit.triangle));
    const double b0 = 1.0 - hit.b1 - hit.b2;
    const auto &vn = *m.vertex_normals;
    Vec3 ns = vn[tri[0]] * b0 + vn[tri[1]] * hit.b1 + vn[tri[2]] * hit.b2;
    const double len = length(ns);
    ns = len > 0 ? ns / len : ng;
    if (dot(ng, ray.dir) > 0) {
        ng = -ng;
        ns = -ns;
    }
    sp.geometric_normal = ng;
    sp.shading_normal = ns;
    return sp;
}

inline std::optional<SurfacePoint> trace_primary(const Scene &scene, const OrthoCamera &camera, int x, int y) {
    const Ray ray = camera.primary_ray(x, y);
    const auto hit = scene.bvh().intersect(ray, 0.0, INFINITY);
    if (!hit) return std::nullopt;
    return surface_point(scene, ray, *hit);
}

namespace detail {

enum StreamPass : std::uint64_t { kAoPass = 1, kShadingPass = 2 };

inline std::uint64_t stream_id(std::uint64_t pixel, StreamPass pass) { return pixel * 4 + pass; }

// Cosine-weighted hemisphere direction about n (polar mapping of the unit disk).
inline Vec3 cosine_hemisphere(const Vec3 &n, double u, double v) {
    const double r = std::sqrt(u);
    const double phi = 2 * kPi * v;
    Vec3 t, b;
    coordinate_system(n, t, b);
    const double z = std::sqrt(std::max(0.0, 1.0 - u));
    return t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + n * z;
}

}  // namespace detail

// Cosine-weighted visibility estimate at a surface point:
// (1/spp) sum V(w_i), w_i ~ cos / pi about the shading normal.
inline double ambient_occlusion_at(const Scene &scene, const SurfacePoint &sp, const RenderConfig &cfg,
                                   std::uint64_t stream) {
    const OwenSobol2D seq(cfg.seed, stream);
    const Vec3 origin = sp.position + sp.geometric_normal * scene.epsilon(cfg);
    int visible = 0;
    for (int i = 0; i < cfg.spp; ++i) {
        const Sample2 s = seq(static_cast<std::uint32_t>(i));
        const Vec3 w = detail::cosine_hemisphere(sp.shading_normal, s.u, s.v);
        // Directions under the geometric surface are blocked by the surface itself.
        if (dot(w, sp.geometric_normal) <= 0) continue;
        if (!scene.bvh().occluded({origin, w}, 0.0, cfg.ao_max_distance)) ++visible;
    }
    return double(visible) / cfg.spp;
}

// Direct environment lighting estimate of (1/pi) int L(w) max(n.w, 0) V(w) dw using the
// luminance importance sampler: average of L(w) max(n.w, 0) V(w) / (pi pdf(w)).
inline Vec3 shade_at(const Scene &scene, const SurfacePoint &sp, const EnvironmentMap &env, const EnvSampler &sampler,
                     const RenderConfig &cfg, std::uint64_t stream) {
    const OwenSobol2D seq(cfg.seed, stream);
    const Vec3 origin = sp.position + sp.geometric_normal * scene.epsilon(cfg);
    Vec3 sum;
    for (int i = 0; i < cfg.spp; ++i) {
        const Sample2 s = seq(static_cast<std::uint32_t>(i));
        const EnvSample ls = sampler.sample(s.u, s.v);
        const double cos_s = dot(sp.shading_normal, ls.direction);
        if (cos_s <= 0 || ls.pdf <= 0 || dot(ls.direction, sp.geometric_normal) <= 0) continue;
        if (scene.bvh().occluded({origin, ls.direction}, 0.0, INFINITY)) continue;
        Vec3 c = env.at(ls.pixel.col, ls.pixel.row) * (cos_s / (kPi * ls.pdf));
        if (cfg.clamp_radiance) c = min(c, Vec3{1, 1, 1} * *cfg.clamp_radiance);
        sum += c;
    }
    return sum / double(cfg.spp);
}

// Primary visibility: one ray per pixel center. Fills mask, depth and normal.
inline GBuffer render_geometry(const Scene &scene, const OrthoCamera &camera, const RenderConfig &cfg) {
    cfg.validate();
    camera.validate();
    GBuffer gb(camera.image_w, camera.image_h);
    parallel_for_tiles(gb.width, gb.height, cfg.tile_size, cfg.jobs, [&](const Tile &tile) {
        for (int y = tile.y0; y < tile.y1; ++y)
            for (int x = tile.x0; x < tile.x1; ++x) {
                const auto sp = trace_primary(scene, camera, x, y);
                if (!sp) continue;
                gb.mask(x, y) = 1;
                gb.depth(x, y) = sp->t;
                gb.normal.set_rgb(x, y, sp->shading_normal);
            }
    });
    return gb;
}

// Fills gb.ao for covered pixels. Never reads the environment.
inline void render_ao(const Scene &scene, const OrthoCamera &camera, const RenderConfig &cfg, GBuffer &gb) {
    cfg.validate();
    if (gb.width != camera.image_w || gb.height != camera.image_h)
        fail(ErrorKind::Shape, "G-buffer does not match the camera raster");
    parallel_for_tiles(gb.width, gb.height, cfg.tile_size, cfg.jobs, [&](const Tile &tile) {
        for (int y = tile.y0; y < tile.y1; ++y)
            for (int x = tile.x0; x < tile.x1; ++x) {
                if (!gb.covered(x, y)) continue;
                const auto sp = trace_primary(scene, camera, x, y);
                if (!sp) continue;
                const std::uint64_t pixel = static_cast<std::uint64_t>(y) * gb.width + x;
                gb.ao(x, y) = ambient_occlusion_at(scene, *sp, cfg, detail::stream_id(pixel, detail::kAoPass));
            }
    });
}

inline void render_shading(const Scene &scene, const OrthoCamera &camera, const EnvironmentMap &env,
                           const EnvSampler &sampler, const RenderConfig &cfg, GBuffer &gb) {
    cfg.validate();
    if (gb.width != camera.image_w || gb.height != camera.image_h)
        fail(ErrorKind::Shape, "G-buffer does not match the camera raster");
    parallel_for_tiles(gb.width, gb.height, cfg.tile_size, cfg.jobs, [&](const Tile &tile) {
        for (int y = tile.y0; y < tile.y1; ++y)
            for (int x = tile.x0; x < tile.x1; ++x) {
                if (!gb.covered(x, y)) continue;
                const auto sp = trace_primary(scene, camera, x, y);
                if (!sp) continue;
                const std::uint64_t pixel = static_cast<std::uint64_t>(y) * gb.width + x;
                gb.shading.set_rgb(x, y, shade_at(scene, *sp, env, sampler, cfg,
                                                  detail::stream_id(pixel, detail::kShadingPass)));
            }
    });
}

// An all-black environment yields zero shading.
inline void render_shading(const Scene &scene, const OrthoCamera &camera, const EnvironmentMap &env,
                           const RenderConfig &cfg, GBuffer &gb) {
    if (!(env.max_value() > 0)) {
        cfg.validate();
        for (double &v : gb.shading.data()) v = 0;
        return;
    }
    render_shading(scene, camera, env, EnvSampler(env), cfg, gb);
}

// Separately traced mesh (e.g. a face model) on the same raster; no smoothing is applied here.
inline GBuffer render_face_pass(const Scene &face, const OrthoCamera &camera, const EnvironmentMap &env,
                                const RenderConfig &cfg) {
    GBuffer gb = render_geometry(face, camera, cfg);
    render_shading(face, camera, env, cfg, gb);
    return gb;
}

// Albedo plane from interpolated vertex colors (or `fallback` where the mesh has none);
// zero where the pixel is not covered.
inline ImageD render_albedo(const Scene &scene, const OrthoCamera &camera, const RenderConfig &cfg,
                            const Vec3 &fallback = {0.8, 0.8, 0.8}) {
    cfg.validate();
    ImageD out(camera.image_w, camera.image_h, 3, 0.0);
    const TriangleMesh &m = scene.mesh();
    parallel_for_tiles(out.width(), out.height(), cfg.tile_size, cfg.jobs, [&](const Tile &tile) {
        for (int y = tile.y0; y < tile.y1; ++y)
            for (int x = tile.x0; x < tile.x1; ++x) {
                const auto sp = trace_primary(scene, camera, x, y);
                if (!sp) continue;
                Vec3 c = fallback;
                if (m.vertex_colors) {
                    const Triangle &tri = m.triangles[sp->triangle];
                    const auto &vc = *m.vertex_colors;
                    c = vc[tri[0]] * (1 - sp->b1 - sp->b2) + vc[tri[1]] * sp->b1 + vc[tri[2]] * sp->b2;
                }
                out.set_rgb(x, y, max(c, Vec3{}));
            }
    });
    return out;
}

}  // namespace relight

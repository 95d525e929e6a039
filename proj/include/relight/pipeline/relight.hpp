// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/compose/compose.hpp>
#include <relight/core/error.hpp>
#include <relight/envlight/envmap.hpp>
#include <relight/io/image_io.hpp>
#include <relight/mesh/smooth.hpp>
#include <relight/pipeline/dataset.hpp>
#include <relight/pipeline/pose.hpp>
#include <relight/tracer/render.hpp>

#include <filesystem>
#include <optional>

namespace relight {

struct RelightInputs {
    TriangleMesh body;
    ImageRGB albedo;  // pixel-aligned with the camera raster
    EnvironmentMap env;
    std::optional<TriangleMesh> face;
    std::optional<RegionSpec> face_region;
};

struct RelightOptions {
    SmoothingConfig smoothing;  // applied to the body only
    RenderConfig render;
    Pose pose;
    bool ambient_occlusion = true;
    std::optional<BackgroundView> background;
};

struct RelightResult {
    OrthoCamera camera;
    TriangleMesh smoothed_body;
    GBuffer body;
    std::optional<GBuffer> face;
    ImageRGB shading;  // final shading (body with the face region composited in)
    ImageRGB relit;
    std::optional<ImageRGB> with_background;
};

// Smooth body -> trace body -> optional face pass composited over the region -> albedo x shading
// -> optional environment background.
inline RelightResult relight(const RelightInputs &in, const RelightOptions &opt) {
    if (in.face && !in.face_region) fail(ErrorKind::Config, "a face mesh needs a face region");
    in.albedo.validate();
    RelightResult res;
    const int w = in.albedo.width(), h = in.albedo.height();
    res.camera = camera_from_pose(opt.pose, in.body.bounds(), w, h);
    if (in.face_region) in.face_region->validate(w, h);

    res.smoothed_body = compute_vertex_normals(laplacian_smooth(in.body, opt.smoothing));
    const Scene body(res.smoothed_body);
    res.body = render_geometry(body, res.camera, opt.render);
    if (opt.ambient_occlusion) render_ao(body, res.camera, opt.render, res.body);
    render_shading(body, res.camera, in.env, opt.render, res.body);

    ImageD coverage = mask_from_coverage(res.body.mask);
    res.shading = ImageRGB(res.body.shading, coverage);
    if (in.face) {
        const Scene face(in.face->vertex_normals ? *in.face : compute_vertex_normals(*in.face));
        res.face = render_face_pass(face, res.camera, in.env, opt.render);
        const RegionSpec &r = *in.face_region;
        // Inside the region the face pass wins wherever it has coverage.
        ImageRGB patch = crop(res.shading, r);
        for (int y = 0; y < r.rows; ++y)
            for (int x = 0; x < r.cols; ++x)
                if (res.face->covered(r.col0 + x, r.row0 + y)) {
                    patch.rgb.set_rgb(x, y, res.face->shading.rgb(r.col0 + x, r.row0 + y));
                    (*patch.mask)(x, y) = 1.0;
                }
        res.shading = composite_region(res.shading, patch, r);
    }

    res.relit = compose_relit(in.albedo, res.shading);
    if (!res.relit.mask) res.relit.mask = res.shading.mask;
    if (opt.background) res.with_background = composite_background(res.relit, in.env, *opt.background);
    return res;
}

inline void write_relight_outputs(const RelightResult &res, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    write_png(detail::mask_image(res.body), dir / "mask.png", 8);
    write_png(detail::encode_normals(res.body), dir / "normal.png", 16);
    write_pfm(res.body.depth, dir / "depth.pfm");
    write_pfm(res.body.ao, dir / "ao.pfm");
    write_pfm(res.body.shading, dir / "shading_body.pfm");
    if (res.face) {
        write_pfm(res.face->shading, dir / "shading_face.pfm");
        write_png(detail::mask_image(*res.face), dir / "mask_face.png", 8);
    }
    write_pfm(res.shading.rgb, dir / "shading.pfm");
    write_pfm(res.relit.rgb, dir / "relit.pfm");
    write_linear_image(res.relit.rgb, dir / "relit.png");
    if (res.with_background) {
        write_pfm(res.with_background->rgb, dir / "relit_background.pfm");
        write_linear_image(res.with_background->rgb, dir / "relit_background.png");
    }
    write_obj(res.smoothed_body, dir / "body_smoothed.obj");
}

}  // namespace relight

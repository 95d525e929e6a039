// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

// Command-line front end: dataset, relight, trace, envtool, compare.

#include <relight/relight.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace relight;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitFatal = 2;

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// Flags shared by the rendering commands.
struct CommonFlags {
    std::string config;
    std::uint64_t seed = 0;
    int spp = 64;
    std::string out_dir;
    std::string size = "512x512";
    int jobs = default_jobs();
    int smooth_steps = 10;
    std::string smooth_scheme = "cotangent";
    double smooth_lambda = 1.0;

    CLI::Option *seed_opt = nullptr, *spp_opt = nullptr, *size_opt = nullptr, *jobs_opt = nullptr,
                *out_opt = nullptr, *steps_opt = nullptr, *scheme_opt = nullptr, *lambda_opt = nullptr;

    void add(CLI::App *app, bool smoothing) {
        app->add_option("--config", config, "JSON config file; command-line flags override it");
        seed_opt = app->add_option("--seed", seed, "random seed");
        spp_opt = app->add_option("--spp", spp, "samples per pixel");
        out_opt = app->add_option("--out-dir", out_dir, "output directory");
        size_opt = app->add_option("--size", size, "raster size WxH")->capture_default_str();
        jobs_opt = app->add_option("--jobs", jobs, "worker threads");
        if (smoothing) {
            steps_opt = app->add_option("--smooth-steps", smooth_steps, "Laplacian smoothing steps");
            scheme_opt = app->add_option("--smooth-scheme", smooth_scheme, "uniform or cotangent");
            lambda_opt = app->add_option("--smooth-lambda", smooth_lambda, "smoothing step size in (0, 1]");
        }
    }

    SmoothingConfig smoothing() const {
        SmoothingConfig s{smooth_steps, parse_smoothing_scheme(smooth_scheme), smooth_lambda};
        s.validate();
        return s;
    }
};

bool given(const CLI::Option *opt) { return opt && opt->count() > 0; }

// Copies config keys into flag variables unless the flag was given on the command line.
class ConfigOverlay {
  public:
    explicit ConfigOverlay(const std::string &path) {
        if (path.empty()) return;
        json_ = load_json_file(path);
        if (!json_.is_object()) fail(ErrorKind::Config, path + ": config must be a JSON object");
    }

    template <class T> void take(const char *key, const CLI::Option *opt, T &var) {
        used_.insert(key);
        if (!json_.contains(key) || given(opt)) return;
        try {
            var = json_[key].get<T>();
        } catch (const nlohmann::json::exception &e) {
            fail(ErrorKind::Config, std::string("config key '") + key + "': " + e.what());
        }
    }

    void take_common(CommonFlags &f) {
        take("seed", f.seed_opt, f.seed);
        take("spp", f.spp_opt, f.spp);
        take("out_dir", f.out_opt, f.out_dir);
        take("size", f.size_opt, f.size);
        take("jobs", f.jobs_opt, f.jobs);
        if (f.steps_opt) {
            take("smooth_steps", f.steps_opt, f.smooth_steps);
            take("smooth_scheme", f.scheme_opt, f.smooth_scheme);
            take("smooth_lambda", f.lambda_opt, f.smooth_lambda);
        }
    }

    void reject_unknown() const {
        for (const auto &[key, v] : json_.items())
            if (!used_.count(key)) fail(ErrorKind::Config, "unknown config key '" + key + "'");
    }

  private:
    nlohmann::json json_ = nlohmann::json::object();
    std::set<std::string> used_;
};

void require(const std::string &value, const char *flag) {
    if (value.empty()) fail(ErrorKind::Config, std::string(flag) + " is required");
}

// ---------------------------------------------------------------------------------------------
// dataset

struct DatasetFlags {
    CommonFlags common;
    std::vector<std::string> models;
    std::vector<std::string> envs;
    int lightings = 2;
    int env_rotations = 1;
    double ao_distance = 0;
    CLI::Option *lightings_opt = nullptr, *rotations_opt = nullptr, *ao_opt = nullptr;
};

int run_dataset(DatasetFlags &f) {
    DatasetJob job;
    if (!f.common.config.empty()) {
        const fs::path cfg_path(f.common.config);
        apply_dataset_config(load_json_file(cfg_path), cfg_path.parent_path(), job);
    }
    auto &c = f.common;
    if (given(c.seed_opt)) job.grid.seed = c.seed;
    if (given(c.spp_opt)) job.options.spp = c.spp;
    if (given(c.jobs_opt)) job.options.jobs = c.jobs;
    if (given(c.size_opt) || c.config.empty()) parse_size(c.size, job.options.width, job.options.height);
    if (given(f.lightings_opt)) job.grid.lightings_per_pose = f.lightings;
    if (given(f.rotations_opt)) job.grid.env_rotations = f.env_rotations;
    if (given(f.ao_opt)) job.options.ao_max_distance = f.ao_distance;
    if (given(c.steps_opt) || given(c.scheme_opt) || given(c.lambda_opt)) {
        SmoothingConfig s = job.options.smoothing.value_or(SmoothingConfig{0, SmoothingScheme::Cotangent, 1.0});
        if (given(c.steps_opt)) s.steps = c.smooth_steps;
        if (given(c.scheme_opt)) s.scheme = parse_smoothing_scheme(c.smooth_scheme);
        if (given(c.lambda_opt)) s.lambda = c.smooth_lambda;
        s.validate();
        job.options.smoothing = s;
    }
    if (!f.models.empty()) {
        job.models.clear();
        for (const auto &m : f.models) job.models.push_back({fs::path(m).stem().string(), m, {0.8, 0.8, 0.8}});
    }
    if (!f.envs.empty()) job.grid.env_pool.assign(f.envs.begin(), f.envs.end());
    require(c.out_dir, "--out-dir");

    const DatasetResult res = generate_dataset(job.models, job.grid, c.out_dir, job.options);
    std::fprintf(stderr, "dataset: %zu sets, %zu failed sets, %zu failed models -> %s\n", res.total_sets,
                 res.failed_sets, res.failed_models, (fs::path(c.out_dir) / "manifest.json").c_str());
    return res.partial() ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------------------------
// trace

struct PoseFlags {
    double pitch = 0, yaw = 0, scale = 1;
    CLI::Option *pitch_opt = nullptr, *yaw_opt = nullptr, *scale_opt = nullptr;

    void add(CLI::App *app) {
        pitch_opt = app->add_option("--pitch", pitch, "camera pitch in degrees");
        yaw_opt = app->add_option("--yaw", yaw, "camera yaw in degrees");
        scale_opt = app->add_option("--scale", scale, "subject scale in frame");
    }
    void take(ConfigOverlay &cfg) {
        cfg.take("pitch", pitch_opt, pitch);
        cfg.take("yaw", yaw_opt, yaw);
        cfg.take("scale", scale_opt, scale);
    }
    Pose pose() const { return {pitch, yaw, scale}; }
};

struct TraceFlags {
    CommonFlags common;
    PoseFlags pose;
    std::string mesh, env;
    std::string passes = "mask,normal,depth,ao,shading";
    double ao_distance = 0;
    CLI::Option *mesh_opt = nullptr, *env_opt = nullptr, *passes_opt = nullptr, *ao_opt = nullptr;
};

int run_trace(TraceFlags &f) {
    ConfigOverlay cfg(f.common.config);
    cfg.take_common(f.common);
    f.pose.take(cfg);
    cfg.take("mesh", f.mesh_opt, f.mesh);
    cfg.take("env", f.env_opt, f.env);
    cfg.take("passes", f.passes_opt, f.passes);
    cfg.take("ao_max_distance", f.ao_opt, f.ao_distance);
    cfg.reject_unknown();
    require(f.mesh, "--mesh");
    require(f.common.out_dir, "--out-dir");

    static const std::set<std::string> known{"mask", "normal", "depth", "ao", "shading"};
    std::set<std::string> passes;
    for (const auto &p : split_list(f.passes)) {
        if (!known.count(p)) fail(ErrorKind::Config, "unknown pass '" + p + "'");
        passes.insert(p);
    }
    if (passes.empty()) fail(ErrorKind::Config, "--passes selects nothing");
    if (passes.count("shading")) require(f.env, "--env");

    int w = 0, h = 0;
    parse_size(f.common.size, w, h);
    RenderConfig rc;
    rc.spp = f.common.spp;
    rc.seed = f.common.seed;
    rc.jobs = f.common.jobs;
    if (given(f.ao_opt) || f.ao_distance > 0) rc.ao_max_distance = f.ao_distance;
    rc.validate();
    const SmoothingConfig smoothing = f.common.smoothing();

    TriangleMesh mesh = load_obj(f.mesh);
    if (smoothing.steps > 0) mesh = laplacian_smooth(mesh, smoothing);
    const Scene scene(compute_vertex_normals(mesh));
    const OrthoCamera cam = camera_from_pose(f.pose.pose(), scene.mesh().bounds(), w, h);

    GBuffer gb = render_geometry(scene, cam, rc);
    if (passes.count("ao")) render_ao(scene, cam, rc, gb);
    if (passes.count("shading")) render_shading(scene, cam, read_envmap(f.env), rc, gb);

    const fs::path out(f.common.out_dir);
    fs::create_directories(out);
    if (passes.count("mask")) write_png(detail::mask_image(gb), out / "mask.png", 8);
    if (passes.count("normal")) write_png(detail::encode_normals(gb), out / "normal.png", 16);
    if (passes.count("depth")) write_pfm(gb.depth, out / "depth.pfm");
    if (passes.count("ao")) write_pfm(gb.ao, out / "ao.pfm");
    if (passes.count("shading")) write_pfm(gb.shading, out / "shading.pfm");
    std::size_t covered = 0;
    for (auto v : gb.mask.data()) covered += v != 0;
    std::fprintf(stderr, "trace: %dx%d, %zu covered pixels -> %s\n", w, h, covered, out.c_str());
    return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// relight

struct RelightFlags {
    CommonFlags common;
    PoseFlags pose;
    std::string mesh, env, albedo, face_mesh, region;
    int feather = 4;
    double bg_azimuth = 0, bg_fov = 45;
    bool no_ao = false;
    CLI::Option *mesh_opt = nullptr, *env_opt = nullptr, *albedo_opt = nullptr, *face_opt = nullptr,
                *region_opt = nullptr, *feather_opt = nullptr, *azimuth_opt = nullptr, *fov_opt = nullptr;
};

int run_relight(RelightFlags &f) {
    ConfigOverlay cfg(f.common.config);
    cfg.take_common(f.common);
    f.pose.take(cfg);
    cfg.take("mesh", f.mesh_opt, f.mesh);
    cfg.take("env", f.env_opt, f.env);
    cfg.take("albedo", f.albedo_opt, f.albedo);
    cfg.take("face_mesh", f.face_opt, f.face_mesh);
    cfg.take("region", f.region_opt, f.region);
    cfg.take("feather", f.feather_opt, f.feather);
    cfg.take("bg_azimuth", f.azimuth_opt, f.bg_azimuth);
    cfg.take("bg_fov", f.fov_opt, f.bg_fov);
    cfg.reject_unknown();
    require(f.mesh, "--mesh");
    require(f.env, "--env");
    require(f.common.out_dir, "--out-dir");
    if (!f.face_mesh.empty() && f.region.empty()) fail(ErrorKind::Config, "--face-mesh needs --region");

    RelightInputs in;
    in.body = load_obj(f.mesh);
    in.env = read_envmap(f.env);
    RelightOptions opt;
    opt.smoothing = f.common.smoothing();
    opt.render.spp = f.common.spp;
    opt.render.seed = f.common.seed;
    opt.render.jobs = f.common.jobs;
    opt.pose = f.pose.pose();
    opt.ambient_occlusion = !f.no_ao;
    if (given(f.azimuth_opt) || given(f.fov_opt)) opt.background = BackgroundView{f.bg_azimuth, f.bg_fov};

    if (!f.albedo.empty()) {
        in.albedo = ImageRGB(read_linear_image(f.albedo));
    } else {
        // No albedo image: use the mesh's own colors, rendered on the same raster.
        int w = 0, h = 0;
        parse_size(f.common.size, w, h);
        const Scene plain(compute_vertex_normals(in.body));
        const OrthoCamera cam = camera_from_pose(opt.pose, in.body.bounds(), w, h);
        in.albedo = ImageRGB(render_albedo(plain, cam, opt.render));
    }
    if (!f.face_mesh.empty()) {
        in.face = load_obj(f.face_mesh);
        in.face_region = parse_region(f.region, f.feather);
    }

    const RelightResult res = relight::relight(in, opt);
    write_relight_outputs(res, f.common.out_dir);
    std::fprintf(stderr, "relight: %dx%d -> %s\n", res.relit.width(), res.relit.height(), f.common.out_dir.c_str());
    return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// envtool

struct EnvFlags {
    std::string in, out, size;
    double degrees = 0;
    int order = 4;
};

int run_env_rotate(const EnvFlags &f) {
    write_envmap(rotate_yaw(read_envmap(f.in), f.degrees), f.out);
    return kExitOk;
}

int run_env_downsample(const EnvFlags &f) {
    int w = 0, h = 0;
    parse_size(f.size, w, h);
    write_envmap(downsample_pyramid(read_envmap(f.in), w, h), f.out);
    return kExitOk;
}

int run_env_sh(const EnvFlags &f) {
    if (f.order < 0) fail(ErrorKind::Config, "--order must be >= 0");
    const SHCoefficients sh = sh_project(read_envmap(f.in), f.order);
    nlohmann::json arr = nlohmann::json::array();
    for (int l = 0; l <= sh.order; ++l)
        for (int m = -l; m <= l; ++m) {
            const Vec3 c = sh(l, m);
            arr.push_back({l, m, c.x, c.y, c.z});
        }
    if (f.out.empty()) {
        std::cout << arr.dump() << '\n';
    } else {
        std::ofstream os(f.out);
        if (!os) fail(ErrorKind::Io, "cannot write " + f.out);
        os << arr.dump(1) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// compare

struct CompareFlags {
    std::string a, b, mask;
    std::string metrics = "mse,psnr,ssim";
    bool fft_magnitude = false;
    bool light_asymmetric = false;
};

int run_compare(const CompareFlags &f) {
    std::set<std::string> want;
    for (const auto &m : split_list(f.metrics)) {
        if (m != "mse" && m != "psnr" && m != "ssim" && m != "fft" && m != "light")
            fail(ErrorKind::Config, "unknown metric '" + m + "'");
        want.insert(m);
    }
    if (want.empty()) fail(ErrorKind::Config, "--metrics selects nothing");
    const ImageD a = read_linear_image(f.a);
    const ImageD b = read_linear_image(f.b);
    std::optional<ImageD> mask;
    if (!f.mask.empty()) mask = read_mask(f.mask);
    const ImageD *mp = mask ? &*mask : nullptr;

    nlohmann::ordered_json out;
    if (want.count("mse") || want.count("psnr")) {
        const MetricReport r = mse_psnr(a, b, mp);
        if (want.count("mse")) out["mse_scaled"] = r.mse_scaled;
        if (want.count("psnr")) out["psnr"] = r.psnr;
        out["pixel_count"] = r.pixel_count;
        out["clamped_values"] = r.clamped_values;
    }
    if (want.count("ssim")) out["ssim"] = ssim(a, b, mp);
    if (want.count("fft"))
        out[f.fft_magnitude ? "fft_l1_magnitude" : "fft_l1"] =
            fft_l1(a, b, f.fft_magnitude ? FftDistance::Magnitude : FftDistance::Complex);
    if (want.count("light"))
        out["light_loss"] = light_loss(EnvironmentMap(a), EnvironmentMap(b),
                                       f.light_asymmetric ? LightLossForm::Asymmetric : LightLossForm::Symmetric);
    std::cout << out.dump() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"relight: geometry-aware relighting renderer and dataset toolkit"};
    app.require_subcommand(1);

    DatasetFlags ds;
    auto *dataset = app.add_subcommand("dataset", "render the pose x lighting dataset grid");
    ds.common.add(dataset, true);
    dataset->add_option("--model", ds.models, "OBJ model (repeatable); replaces the config's models");
    dataset->add_option("--env", ds.envs, "environment map for the pool (repeatable)");
    ds.lightings_opt = dataset->add_option("--lightings", ds.lightings, "lightings drawn per pose");
    ds.rotations_opt = dataset->add_option("--env-rotations", ds.env_rotations, "yaw copies of each pool map");
    ds.ao_opt = dataset->add_option("--ao-distance", ds.ao_distance, "AO ray length (default unlimited)");

    TraceFlags tr;
    auto *trace = app.add_subcommand("trace", "render G-buffer passes of one mesh");
    tr.common.smooth_steps = 0;
    tr.common.add(trace, true);
    tr.pose.add(trace);
    tr.mesh_opt = trace->add_option("--mesh", tr.mesh, "OBJ mesh");
    tr.env_opt = trace->add_option("--env", tr.env, "environment map (.hdr/.pfm)");
    tr.passes_opt = trace->add_option("--passes", tr.passes, "comma list of mask,normal,depth,ao,shading")
                        ->capture_default_str();
    tr.ao_opt = trace->add_option("--ao-distance", tr.ao_distance, "AO ray length (default unlimited)");

    RelightFlags rl;
    auto *rel = app.add_subcommand("relight", "smooth, trace, composite and relight a subject");
    rl.common.add(rel, true);
    rl.pose.add(rel);
    rl.mesh_opt = rel->add_option("--mesh", rl.mesh, "body OBJ mesh");
    rl.env_opt = rel->add_option("--env", rl.env, "target environment map");
    rl.albedo_opt = rel->add_option("--albedo", rl.albedo, "pixel-aligned albedo image (.pfm/.png)");
    rl.face_opt = rel->add_option("--face-mesh", rl.face_mesh, "face OBJ mesh traced without smoothing");
    rl.region_opt = rel->add_option("--region", rl.region, "face region r0,c0,h,w");
    rl.feather_opt = rel->add_option("--feather", rl.feather, "face blend band in pixels");
    rl.azimuth_opt = rel->add_option("--bg-azimuth", rl.bg_azimuth, "background view azimuth in degrees");
    rl.fov_opt = rel->add_option("--bg-fov", rl.bg_fov, "background vertical field of view in degrees");
    rel->add_flag("--no-ao", rl.no_ao, "skip the ambient-occlusion pass");

    EnvFlags ef;
    auto *env = app.add_subcommand("envtool", "environment map utilities");
    env->require_subcommand(1);
    auto *rot = env->add_subcommand("rotate", "rotate about the vertical axis");
    rot->add_option("--in", ef.in)->required();
    rot->add_option("--out", ef.out)->required();
    rot->add_option("--degrees", ef.degrees)->required();
    auto *down = env->add_subcommand("downsample", "binomial pyramid reduction");
    down->add_option("--in", ef.in)->required();
    down->add_option("--out", ef.out)->required();
    down->add_option("--size", ef.size, "target WxH")->required();
    auto *shp = env->add_subcommand("sh-project", "spherical-harmonic projection as JSON [l, m, r, g, b]");
    shp->add_option("--in", ef.in)->required();
    shp->add_option("--out", ef.out, "JSON output (stdout when omitted)");
    shp->add_option("--order", ef.order)->capture_default_str();

    CompareFlags cf;
    auto *cmp = app.add_subcommand("compare", "image metrics as single-line JSON");
    cmp->add_option("--a", cf.a)->required();
    cmp->add_option("--b", cf.b)->required();
    cmp->add_option("--mask", cf.mask, "foreground mask");
    cmp->add_option("--metrics", cf.metrics, "comma list of mse,psnr,ssim,fft,light")->capture_default_str();
    cmp->add_flag("--fft-magnitude", cf.fft_magnitude, "compare FFT magnitudes only");
    cmp->add_flag("--light-asymmetric", cf.light_asymmetric, "weight only the estimate inside the light loss");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitFatal;
    }

    try {
        if (*dataset) return run_dataset(ds);
        if (*trace) return run_trace(tr);
        if (*rel) return run_relight(rl);
        if (*rot) return run_env_rotate(ef);
        if (*down) return run_env_downsample(ef);
        if (*shp) return run_env_sh(ef);
        if (*cmp) return run_compare(cf);
    } catch (const Error &e) {
        std::fprintf(stderr, "relight: %s\n", e.what());
        return kExitFatal;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "relight: %s\n", e.what());
        return kExitFatal;
    }
    return kExitFatal;
}

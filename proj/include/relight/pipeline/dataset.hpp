// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/compose/compose.hpp>
#include <relight/core/error.hpp>
#include <relight/core/parallel.hpp>
#include <relight/core/rng.hpp>
#include <relight/envlight/envmap.hpp>
#include <relight/envlight/sampler.hpp>
#include <relight/io/image_io.hpp>
#include <relight/mesh/obj.hpp>
#include <relight/mesh/smooth.hpp>
#include <relight/pipeline/config.hpp>
#include <relight/pipeline/pose.hpp>
#include <relight/tracer/render.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace relight {

inline constexpr int kManifestSchemaVersion = 1;

// Pose and lighting grid rendered for every model.
struct DatasetGrid {
    std::vector<double> pitches{0, 10, 20, 30};
    std::vector<double> yaws{-32, -24, -16, -8, 0, 8, 16, 24, 32};
    std::vector<double> scales{0.8, 1.0, 1.1};
    int lightings_per_pose = 2;
    std::vector<std::filesystem::path> env_pool;
    // Each pool map also enters the pool at yaw offsets of k * 360 / env_rotations degrees.
    int env_rotations = 1;
    std::uint64_t seed = 0;

    std::size_t sets_per_model() const {
        return pitches.size() * yaws.size() * scales.size() * static_cast<std::size_t>(lightings_per_pose);
    }
    std::size_t pool_size() const { return env_pool.size() * static_cast<std::size_t>(env_rotations); }

    void validate() const {
        if (pitches.empty() || yaws.empty() || scales.empty()) fail(ErrorKind::Config, "grid lists must be non-empty");
        if (lightings_per_pose < 1) fail(ErrorKind::Config, "lightings_per_pose must be >= 1");
        if (env_rotations < 1) fail(ErrorKind::Config, "env_rotations must be >= 1");
        if (env_pool.empty()) fail(ErrorKind::Config, "environment pool is empty");
        if (pool_size() < static_cast<std::size_t>(lightings_per_pose))
            fail(ErrorKind::Config, "environment pool has fewer maps than lightings_per_pose");
        for (double s : scales)
            if (!(s > 0)) fail(ErrorKind::Config, "scales must be > 0");
    }
};

struct ModelSpec {
    std::string name;
    std::filesystem::path mesh_path;
    Vec3 albedo{0.8, 0.8, 0.8};  // used where the mesh carries no vertex colors
};

struct DatasetOptions {
    int width = 512, height = 512;
    int spp = 64;
    int jobs = default_jobs();
    std::optional<SmoothingConfig> smoothing;
    double ao_max_distance = std::numeric_limits<double>::infinity();
};

// The six planes of one (model, pose, lighting) set; paths relative to the output directory.
struct RenderSet {
    std::string image, mask, albedo, shading, normal, ao;
};

struct DatasetResult {
    nlohmann::ordered_json manifest;
    std::size_t total_sets = 0;
    std::size_t failed_sets = 0;
    std::size_t failed_models = 0;
    bool partial() const { return failed_sets > 0 || failed_models > 0; }
};

inline constexpr double kAlbedoShadingTolerance = 1e-3;

namespace detail {

struct PoolEntry {
    std::size_t file;
    double rotation_deg;
    EnvironmentMap map;
    std::unique_ptr<EnvSampler> sampler;  // null for an all-black map
};

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Normal map encoded as (n + 1) / 2; zero where uncovered.
inline ImageD encode_normals(const GBuffer &gb) {
    ImageD out(gb.width, gb.height, 3, 0.0);
    for (int y = 0; y < gb.height; ++y)
        for (int x = 0; x < gb.width; ++x)
            if (gb.covered(x, y)) out.set_rgb(x, y, (gb.normal.rgb(x, y) + Vec3{1, 1, 1}) * 0.5);
    return out;
}

inline ImageD mask_image(const GBuffer &gb) {
    ImageD out(gb.width, gb.height, 1, 0.0);
    for (int y = 0; y < gb.height; ++y)
        for (int x = 0; x < gb.width; ++x) out(x, y) = gb.covered(x, y) ? 1.0 : 0.0;
    return out;
}

// Chooses `count` distinct pool indices for a pose (partial Fisher-Yates).
inline std::vector<std::size_t> draw_lightings(std::size_t pool, int count, std::uint64_t seed, std::uint64_t model,
                                               std::uint64_t pose) {
    std::vector<std::size_t> idx(pool);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    SplitMix64 rng(hash_key(seed, model, pose, 0x6c69676874ull));
    for (int k = 0; k < count; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.below(pool - k));
        std::swap(idx[k], idx[j]);
    }
    idx.resize(count);
    return idx;
}

}  // namespace detail

inline void write_render_planes(const GBuffer &gb, const ImageD &albedo, const ImageD &image,
                                const std::filesystem::path &dir, const RenderSet &files) {
    write_pfm(image, dir / files.image);
    write_png(detail::mask_image(gb), dir / files.mask, 8);
    write_pfm(albedo, dir / files.albedo);
    write_pfm(gb.shading, dir / files.shading);
    write_png(detail::encode_normals(gb), dir / files.normal, 16);
    write_pfm(gb.ao, dir / files.ao);
}

// Largest |image - albedo * shading| over covered pixels, read back from the written files.
inline double albedo_shading_residual(const std::filesystem::path &dir, const RenderSet &files) {
    const ImageD image = read_pfm(dir / files.image);
    const ImageD albedo = read_pfm(dir / files.albedo);
    const ImageD shading = read_pfm(dir / files.shading);
    const ImageD mask = read_mask(dir / files.mask);
    double worst = 0;
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x) {
            if (mask(x, y) < 0.5) continue;
            for (int c = 0; c < 3; ++c)
                worst = std::max(worst, std::abs(image(x, y, c) - albedo(x, y, c) * shading(x, y, c)));
        }
    return worst;
}

// Renders |pitches| x |yaws| x |scales| x lightings_per_pose sets per model into out_dir and
// writes out_dir/manifest.json. Sets render in parallel, each single-threaded with a seed derived
// from (grid seed, model index, set index), so outputs do not depend on the worker count.
inline DatasetResult generate_dataset(const std::vector<ModelSpec> &models, const DatasetGrid &grid,
                                      const std::filesystem::path &out_dir, const DatasetOptions &opt) {
    grid.validate();
    if (models.empty()) fail(ErrorKind::Config, "no models given");
    if (opt.width <= 0 || opt.height <= 0 || opt.spp < 1 || opt.jobs < 1)
        fail(ErrorKind::Config, "invalid dataset render options");
    if (opt.smoothing) opt.smoothing->validate();
    std::filesystem::create_directories(out_dir);

    std::vector<detail::PoolEntry> pool;
    for (std::size_t f = 0; f < grid.env_pool.size(); ++f) {
        EnvironmentMap base;
        try {
            base = read_envmap(grid.env_pool[f]);
        } catch (const Error &e) {
            fail(ErrorKind::Config, "environment pool entry " + grid.env_pool[f].string() + ": " + e.what());
        }
        for (int r = 0; r < grid.env_rotations; ++r) {
            detail::PoolEntry entry{f, 360.0 * r / grid.env_rotations, {}, nullptr};
            entry.map = r == 0 ? base : rotate_yaw(base, entry.rotation_deg);
            if (entry.map.max_value() > 0) entry.sampler = std::make_unique<EnvSampler>(entry.map);
            pool.push_back(std::move(entry));
        }
    }

    struct Task {
        std::size_t model;
        std::size_t set_index;
        Pose pose;
        std::size_t pose_index;
        int lighting;
        std::size_t pool_index;
    };
    struct TaskResult {
        bool ok = false;
        std::string error;
        RenderSet files;
        std::uint64_t seed = 0;
    };

    DatasetResult result;
    nlohmann::ordered_json model_entries = nlohmann::ordered_json::array();
    std::vector<std::unique_ptr<Scene>> scenes(models.size());
    std::vector<Task> tasks;
    for (std::size_t m = 0; m < models.size(); ++m) {
        nlohmann::ordered_json entry;
        entry["name"] = models[m].name;
        entry["mesh"] = models[m].mesh_path.string();
        try {
            TriangleMesh mesh = load_obj(models[m].mesh_path);
            if (opt.smoothing && opt.smoothing->steps > 0) mesh = laplacian_smooth(mesh, *opt.smoothing);
            scenes[m] = std::make_unique<Scene>(compute_vertex_normals(mesh));
            entry["status"] = "ok";
        } catch (const std::exception &e) {
            entry["status"] = "error";
            entry["error"] = e.what();
            ++result.failed_models;
            model_entries.push_back(entry);
            continue;
        }
        model_entries.push_back(entry);
        std::size_t set_index = 0, pose_index = 0;
        for (double pitch : grid.pitches)
            for (double yaw : grid.yaws)
                for (double scale : grid.scales) {
                    const auto lights = detail::draw_lightings(pool.size(), grid.lightings_per_pose, grid.seed, m, pose_index);
                    for (int k = 0; k < grid.lightings_per_pose; ++k)
                        tasks.push_back({m, set_index++, {pitch, yaw, scale}, pose_index, k, lights[k]});
                    ++pose_index;
                }
    }

    std::vector<TaskResult> results(tasks.size());
    parallel_for(tasks.size(), opt.jobs, [&](std::size_t i) {
        const Task &task = tasks[i];
        TaskResult &res = results[i];
        const ModelSpec &model = models[task.model];
        char dir_name[32];
        std::snprintf(dir_name, sizeof dir_name, "set_%04zu", task.set_index);
        const std::filesystem::path rel = std::filesystem::path(model.name) / dir_name;
        res.files = {(rel / "image.pfm").string(),   (rel / "mask.png").string(),   (rel / "albedo.pfm").string(),
                     (rel / "shading.pfm").string(), (rel / "normal.png").string(), (rel / "ao.pfm").string()};
        res.seed = hash_key(grid.seed, task.model, task.set_index, 0x736574ull);
        try {
            const Scene &scene = *scenes[task.model];
            const detail::PoolEntry &light = pool[task.pool_index];
            std::filesystem::create_directories(out_dir / rel);
            RenderConfig cfg;
            cfg.spp = opt.spp;
            cfg.seed = res.seed;
            cfg.jobs = 1;
            cfg.ao_max_distance = opt.ao_max_distance;
            const OrthoCamera cam = camera_from_pose(task.pose, scene.mesh().bounds(), opt.width, opt.height);
            GBuffer gb = render_geometry(scene, cam, cfg);
            render_ao(scene, cam, cfg, gb);
            if (light.sampler) render_shading(scene, cam, light.map, *light.sampler, cfg, gb);
            const ImageD albedo = render_albedo(scene, cam, cfg, model.albedo);
            ImageD image = albedo;
            for (std::size_t k = 0; k < image.data().size(); ++k) image.data()[k] *= gb.shading.data()[k];
            write_render_planes(gb, albedo, image, out_dir, res.files);
            const double residual = albedo_shading_residual(out_dir, res.files);
            if (!(residual <= kAlbedoShadingTolerance))
                fail(ErrorKind::Numerical, "image != albedo * shading (residual " + std::to_string(residual) + ")");
            res.ok = true;
        } catch (const std::exception &e) {
            res.error = e.what();
            // Keep the manifest complete: nothing on disk that it does not reference.
            std::error_code ec;
            std::filesystem::remove_all(out_dir / rel, ec);
        }
    });

    nlohmann::ordered_json sets = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task &t = tasks[i];
        const TaskResult &r = results[i];
        const detail::PoolEntry &light = pool[t.pool_index];
        nlohmann::ordered_json s;
        s["model"] = models[t.model].name;
        s["index"] = t.set_index;
        s["pitch"] = t.pose.pitch_deg;
        s["yaw"] = t.pose.yaw_deg;
        s["scale"] = t.pose.scale;
        s["lighting"] = t.lighting;
        s["env"] = grid.env_pool[light.file].string();
        s["env_rotation"] = light.rotation_deg;
        s["seed"] = r.seed;
        s["status"] = r.ok ? "ok" : "failed";
        if (r.ok) {
            s["files"] = {{"image", r.files.image},     {"mask", r.files.mask},     {"albedo", r.files.albedo},
                          {"shading", r.files.shading}, {"normal", r.files.normal}, {"ao", r.files.ao}};
        } else {
            s["error"] = r.error;
            ++result.failed_sets;
        }
        sets.push_back(std::move(s));
    }
    result.total_sets = tasks.size();

    nlohmann::ordered_json grid_echo;
    grid_echo["pitches"] = grid.pitches;
    grid_echo["yaws"] = grid.yaws;
    grid_echo["scales"] = grid.scales;
    grid_echo["lightings_per_pose"] = grid.lightings_per_pose;
    grid_echo["env_rotations"] = grid.env_rotations;
    nlohmann::ordered_json pool_echo = nlohmann::ordered_json::array();
    for (const auto &p : grid.env_pool) pool_echo.push_back(p.string());
    grid_echo["env_pool"] = pool_echo;
    grid_echo["seed"] = grid.seed;

    auto &mf = result.manifest;
    mf["schema_version"] = kManifestSchemaVersion;
    mf["grid"] = grid_echo;
    mf["render"] = {{"width", opt.width}, {"height", opt.height}, {"spp", opt.spp},
                    {"smoothing_steps", opt.smoothing ? opt.smoothing->steps : 0}};
    mf["models"] = model_entries;
    mf["set_count"] = result.total_sets;
    mf["failed_count"] = result.failed_sets;
    mf["sets"] = sets;

    std::ofstream out(out_dir / "manifest.json");
    if (!out) fail(ErrorKind::Io, "cannot write manifest in " + out_dir.string());
    out << mf.dump(2) << '\n';
    return result;
}

// Dataset job description as read from a JSON config file.
struct DatasetJob {
    std::vector<ModelSpec> models;
    DatasetGrid grid;
    DatasetOptions options;
};

// Reads keys mirroring DatasetGrid / DatasetOptions plus a "models" list:
//   {"pitches": [..], "yaws": [..], "scales": [..], "lightings_per_pose": 2, "env_pool": ["a.hdr"],
//    "env_rotations": 1, "seed": 0, "size": "512x512", "spp": 64, "smooth_steps": 0,
//    "smooth_scheme": "cotangent", "smooth_lambda": 1.0, "ao_max_distance": 5.0,
//    "models": [{"name": "m", "mesh": "m.obj", "albedo": [0.8, 0.8, 0.8]}]}
// Keys left out keep their defaults. Relative paths resolve against `base_dir`.
inline void apply_dataset_config(const nlohmann::json &cfg, const std::filesystem::path &base_dir, DatasetJob &job) {
    if (!cfg.is_object()) fail(ErrorKind::Config, "dataset config must be a JSON object");
    auto resolve = [&](const std::string &p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    auto numbers = [&](const nlohmann::json &v, const char *key) {
        if (!v.is_array()) fail(ErrorKind::Config, std::string(key) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto &x : v) {
            if (!x.is_number()) fail(ErrorKind::Config, std::string(key) + " must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    };
    try {
        SmoothingConfig smoothing = job.options.smoothing.value_or(SmoothingConfig{0, SmoothingScheme::Cotangent, 1.0});
        bool smoothing_set = job.options.smoothing.has_value();
        for (const auto &[key, v] : cfg.items()) {
            if (key == "pitches") job.grid.pitches = numbers(v, "pitches");
            else if (key == "yaws") job.grid.yaws = numbers(v, "yaws");
            else if (key == "scales") job.grid.scales = numbers(v, "scales");
            else if (key == "lightings_per_pose") job.grid.lightings_per_pose = v.get<int>();
            else if (key == "env_rotations") job.grid.env_rotations = v.get<int>();
            else if (key == "seed") job.grid.seed = v.get<std::uint64_t>();
            else if (key == "env_pool") {
                job.grid.env_pool.clear();
                for (const auto &e : v) job.grid.env_pool.push_back(resolve(e.get<std::string>()));
            } else if (key == "size") parse_size(v.get<std::string>(), job.options.width, job.options.height);
            else if (key == "spp") job.options.spp = v.get<int>();
            else if (key == "jobs") job.options.jobs = v.get<int>();
            else if (key == "ao_max_distance") job.options.ao_max_distance = v.get<double>();
            else if (key == "smooth_steps") smoothing.steps = v.get<int>(), smoothing_set = true;
            else if (key == "smooth_scheme") smoothing.scheme = parse_smoothing_scheme(v.get<std::string>()), smoothing_set = true;
            else if (key == "smooth_lambda") smoothing.lambda = v.get<double>(), smoothing_set = true;
            else if (key == "models") {
                job.models.clear();
                for (const auto &m : v) {
                    ModelSpec spec;
                    spec.mesh_path = resolve(m.at("mesh").get<std::string>());
                    spec.name = m.contains("name") ? m["name"].get<std::string>() : spec.mesh_path.stem().string();
                    if (m.contains("albedo")) {
                        const auto a = numbers(m["albedo"], "albedo");
                        if (a.size() != 3) fail(ErrorKind::Config, "albedo must have 3 components");
                        spec.albedo = {a[0], a[1], a[2]};
                    }
                    job.models.push_back(spec);
                }
            } else {
                fail(ErrorKind::Config, "unknown dataset config key '" + key + "'");
            }
        }
        if (smoothing_set) {
            smoothing.validate();
            job.options.smoothing = smoothing;
        }
    } catch (const nlohmann::json::exception &e) {
        fail(ErrorKind::Config, std::string("dataset config: ") + e.what());
    }
}

}  // namespace relight

// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion with the measured
// quantities and the wall time against the budget; exits non-zero when any criterion fails.

#include <relight/relight.hpp>

#include "support/reference_smoother.hpp"
#include "support/scenes.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#ifndef RELIGHT_CLI_PATH
#error "RELIGHT_CLI_PATH must name the relight executable"
#endif

namespace fs = std::filesystem;
using namespace relight;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char *name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char *f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

fs::path g_work;

fs::path fresh_dir(const std::string &name) {
    const fs::path d = g_work / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

RenderConfig config(int spp, std::uint64_t seed = 0) {
    RenderConfig cfg;
    cfg.spp = spp;
    cfg.seed = seed;
    return cfg;
}

// 1 ------------------------------------------------------------------------------------------
Outcome solid_angle_closure() {
    Outcome o{true, ""};
    for (auto [w, h] : {std::pair{4, 2}, std::pair{32, 16}, std::pair{512, 256}}) {
        const SolidAngleWeights sw(w, h);
        double sum = 0;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) sum += sw(r);
        const double rel = std::abs(sum - 4 * kPi) / (4 * kPi);
        o.pass &= rel <= 1e-6;
        o.detail += fmt("%dx%d rel err %.1e; ", w, h, rel);
    }
    return o;
}

// 2 ------------------------------------------------------------------------------------------
Outcome uniform_environment() {
    const double c = 0.7;
    const Scene scene(make_icosphere(5));
    const OrthoCamera cam = scenes::front_camera(128, 128, 1.1, 1.1);
    const EnvironmentMap env(64, 32, {c, c, c});
    const RenderConfig cfg = config(256, 11);
    GBuffer gb = render_geometry(scene, cam, cfg);
    render_shading(scene, cam, env, cfg, gb);
    std::size_t ok = 0;
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x)
            if (gb.covered(x, y)) {
                bool good = true;
                for (int k = 0; k < 3; ++k) good &= std::abs(gb.shading(x, y, k) - c) <= 0.01 * c;
                ok += good;
            }
    const double frac = double(ok) / gb.coverage();
    return {gb.coverage() > 0 && frac >= 0.99,
            fmt("%zu mask pixels, %.4f within 1%% of c=%.1f (need >= 0.99)", gb.coverage(), frac, c)};
}

// 3 ------------------------------------------------------------------------------------------
Outcome sh_mc_agreement() {
    const EnvironmentMap env = make_sky(256, 128, normalize(Vec3{0.3, 0.7, 0.6}));
    const Scene scene(make_icosphere(4));
    const OrthoCamera cam = scenes::front_camera(64, 64, 1.05, 1.05);
    const RenderConfig cfg = config(1024, 5);
    GBuffer gb = render_geometry(scene, cam, cfg);
    render_shading(scene, cam, env, cfg, gb);
    const SHCoefficients sh = sh_project(env, 4);
    double err2 = 0, mean = 0;
    std::size_t n = 0;
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            if (!gb.covered(x, y)) continue;
            const Vec3 mc = gb.shading.rgb(x, y);
            const Vec3 s = sh_irradiance_shading(sh, normalize(gb.normal.rgb(x, y)));
            for (int k = 0; k < 3; ++k) {
                err2 += (mc[k] - s[k]) * (mc[k] - s[k]);
                mean += mc[k];
            }
            n += 3;
        }
    mean /= n;
    const double rms = std::sqrt(err2 / n);
    return {n > 0 && rms <= 0.10 * mean,
            fmt("RMS %.4f vs mean %.4f -> %.2f%% (need <= 10%%) over %zu pixels", rms, mean, 100 * rms / mean, n / 3)};
}

// 4 ------------------------------------------------------------------------------------------
Outcome hard_shadow() {
    const scenes::ShadowScene s = scenes::make_shadow_scene(256);
    const Scene scene(s.mesh);
    const RenderConfig cfg = config(16, 3);
    GBuffer gb = render_geometry(scene, s.camera, cfg);
    render_shading(scene, s.camera, s.env, cfg, gb);
    const auto report = scenes::measure_shadow_boundary(s, gb);
    return {report.boundary_pixels > 100 && report.fraction() >= 0.95,
            fmt("%zu of %zu umbra boundary pixels within 1 px of the projected quad (%.4f, need >= 0.95)",
                report.within_one_pixel, report.boundary_pixels, report.fraction())};
}

// 5 ------------------------------------------------------------------------------------------
Outcome ambient_occlusion() {
    // Open plane, every pixel of a top-down view.
    const Scene plane(make_grid(4, 4, -2, 2, -2, 2));
    const OrthoCamera cam = scenes::top_down_camera(32, 1.0);
    GBuffer gb = render_geometry(plane, cam, config(1024, 1));
    render_ao(plane, cam, config(1024, 1), gb);
    double plane_worst = 0;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) plane_worst = std::max(plane_worst, std::abs(gb.ao(x, y) - 1.0));

    // Points inside a closed sphere, a range of normals.
    const Scene sphere(make_icosphere(3));
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    double inside_max = 0;
    for (int i = 0; i < 32; ++i) {
        SurfacePoint sp = scenes::upward_point({0.1 * nd(rng), 0.1 * nd(rng), 0.1 * nd(rng)});
        sp.geometric_normal = sp.shading_normal = normalize(Vec3{nd(rng), nd(rng), nd(rng)});
        inside_max = std::max(inside_max, ambient_occlusion_at(sphere, sp, config(1024, 2), i));
    }

    // Ground flush against a half-infinite wall.
    const Scene wall(scenes::make_wall_scene());
    RenderConfig wcfg = config(1024, 4);
    wcfg.ray_epsilon = 1e-7;
    double wall_worst = 0;
    for (int i = 0; i < 8; ++i) {
        const double ao = ambient_occlusion_at(wall, scenes::upward_point({1e-4, 0, -1.0 + 0.3 * i}), wcfg, 100 + i);
        wall_worst = std::max(wall_worst, std::abs(ao - 0.5));
    }
    return {plane_worst <= 0.02 && inside_max == 0.0 && wall_worst <= 0.02,
            fmt("plane max |ao-1| %.4f; sphere interior max ao %.1f; wall max |ao-0.5| %.4f (tol 0.02)", plane_worst,
                inside_max, wall_worst)};
}

// 6 ------------------------------------------------------------------------------------------
Outcome smoothing() {
    // Flat grid: the boundary is free, so only vertices more than 10 rings from it are
    // expected to stay put; the whole mesh must stay in the plane.
    const int n = 40;
    const TriangleMesh grid = make_grid(n, n, -1, 1, -1, 1);
    SmoothingConfig cfg;  // 10 cotangent steps, lambda 1
    const TriangleMesh flat = laplacian_smooth(grid, cfg);
    double interior = 0, off_plane = 0, all = 0;
    for (int r = 0; r <= n; ++r)
        for (int c = 0; c <= n; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * (n + 1) + c;
            const double d = length(flat.positions[i] - grid.positions[i]);
            off_plane = std::max(off_plane, std::abs(flat.positions[i].y));
            all = std::max(all, d);
            if (std::min({r, c, n - r, n - c}) > cfg.steps) interior = std::max(interior, d);
        }

    const TriangleMesh sphere = make_icosphere(2);
    std::vector<Vec3> ref = sphere.positions;
    double prev = scenes::mean_radius(ref), diff = 0;
    bool monotone = true;
    for (int step = 1; step <= 10; ++step) {
        ref = scenes::reference_smooth_step(sphere, ref, true, 1.0);
        SmoothingConfig sc;
        sc.steps = step;
        const TriangleMesh lib = laplacian_smooth(sphere, sc);
        for (std::size_t i = 0; i < ref.size(); ++i) diff = std::max(diff, length(lib.positions[i] - ref[i]));
        const double r = scenes::mean_radius(lib.positions);
        monotone &= r < prev;
        prev = r;
    }
    return {interior < 1e-6 && off_plane == 0.0 && monotone && diff <= 1e-9,
            fmt("plane interior max disp %.1e (boundary-driven max %.3f), off-plane %.1e; icosphere monotone=%s, "
                "max |lib-ref| %.1e",
                interior, all, off_plane, monotone ? "yes" : "no", diff)};
}

// 7 ------------------------------------------------------------------------------------------
Outcome metric_arithmetic() {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 0.9);
    ImageD a(48, 40, 3);
    for (double &v : a.data()) v = u(rng);
    ImageD b = a;
    for (double &v : b.data()) v += 0.1;
    const MetricReport r = mse_psnr(a, b);
    const double s = ssim(a, a);
    EnvironmentMap env(64, 32);
    for (double &v : env.image().data()) v = 5 * u(rng);
    const double ll = light_loss(env, env);
    const bool pass = std::abs(r.mse_scaled - 10.0) <= 1e-6 && std::abs(r.psnr - 20.0) <= 1e-4 && s == 1.0 && ll == 0.0;
    return {pass, fmt("mse x1e3 %.9f, psnr %.7f dB, ssim(a,a) %.17g, light_loss(e,e) %g", r.mse_scaled, r.psnr, s, ll)};
}

// 8 ------------------------------------------------------------------------------------------
std::vector<fs::path> write_sky_pool(const fs::path &dir, int count) {
    std::vector<fs::path> pool;
    for (int k = 0; k < count; ++k) {
        const double phi = 2 * kPi * k / count + 0.3, elev = 0.35 + 0.5 * k / count;
        const Vec3 sun{std::cos(elev) * std::cos(phi), std::sin(elev), std::cos(elev) * std::sin(phi)};
        pool.push_back(dir / ("sky_" + std::to_string(k) + ".hdr"));
        write_hdr(make_sky(256, 128, sun).image(), pool.back());
    }
    return pool;
}

Outcome dataset_grid_law() {
    const fs::path dir = fresh_dir("dataset_law");
    write_obj(make_figure(3), dir / "figure.obj");
    DatasetGrid grid;  // default pitches, yaws, scales, two lightings per pose
    grid.env_pool = write_sky_pool(dir, 4);
    grid.seed = 21;
    DatasetOptions opt;
    opt.width = opt.height = 256;
    opt.spp = 64;
    const DatasetResult res = generate_dataset({{"figure", dir / "figure.obj", {0.8, 0.8, 0.8}}}, grid, dir / "out", opt);

    // Independent re-check from the files on disk.
    std::size_t ok_sets = 0, shape_errors = 0;
    double worst = 0;
    for (const auto &s : res.manifest["sets"]) {
        if (s["status"] != "ok") continue;
        const auto &f = s["files"];
        auto load = [&](const char *key) { return read_linear_image(dir / "out" / f[key].get<std::string>()); };
        const ImageD image = load("image"), albedo = load("albedo"), shading = load("shading");
        const ImageD mask = read_mask(dir / "out" / f["mask"].get<std::string>());
        const ImageD normal = load("normal"), ao = load("ao");
        for (const ImageD *p : {&image, &albedo, &shading, &mask, &normal, &ao})
            shape_errors += p->width() != 256 || p->height() != 256;
        for (int y = 0; y < 256; ++y)
            for (int x = 0; x < 256; ++x) {
                if (mask(x, y) < 0.5) continue;
                for (int c = 0; c < 3; ++c)
                    worst = std::max(worst, std::abs(image(x, y, c) - albedo(x, y, c) * shading(x, y, c)));
            }
        ++ok_sets;
    }
    const bool pass = res.total_sets == 216 && grid.sets_per_model() == 216 && ok_sets == 216 && shape_errors == 0 &&
                      worst <= 1e-3;
    fs::remove_all(dir);
    return {pass, fmt("%zu sets (%zu ok, %zu failed), planes off 256x256: %zu, max |image - albedo*shading| %.2e",
                      res.total_sets, ok_sets, res.failed_sets, shape_errors, worst)};
}

// 9 ------------------------------------------------------------------------------------------
std::map<std::string, std::string> snapshot(const fs::path &root) {
    std::map<std::string, std::string> files;
    for (const auto &e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files[fs::relative(e.path(), root).generic_string()] = ss.str();
    }
    return files;
}

int run_cli(const std::string &args) {
    const std::string cmd = std::string("\"") + RELIGHT_CLI_PATH + "\" " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
    const fs::path dir = fresh_dir("determinism");
    write_obj(make_figure(3), dir / "figure.obj");
    write_sky_pool(dir, 3);
    {
        std::ofstream cfg(dir / "dataset.json");
        cfg << R"({"models": [{"name": "figure", "mesh": "figure.obj"}],)"
            << R"( "env_pool": ["sky_0.hdr", "sky_1.hdr", "sky_2.hdr"], "seed": 1234})" << '\n';
    }
    const std::string q = "\"";
    std::string detail;
    bool pass = true;
    for (const char *command : {"dataset", "trace"}) {
        std::vector<std::map<std::string, std::string>> runs;
        int bad_exit = 0;
        for (int jobs : {1, 4, 8}) {
            const fs::path out = dir / (std::string(command) + "_j" + std::to_string(jobs));
            std::string args;
            if (std::string(command) == "dataset")
                args = "dataset --config " + q + (dir / "dataset.json").string() + q + " --size 64x64 --spp 8";
            else
                args = "trace --mesh " + q + (dir / "figure.obj").string() + q + " --env " + q +
                       (dir / "sky_1.hdr").string() + q + " --size 256x256 --spp 64 --seed 99 --pitch 10 --yaw -16";
            args += " --jobs " + std::to_string(jobs) + " --out-dir " + q + out.string() + q;
            bad_exit += run_cli(args) != 0;
            runs.push_back(snapshot(out));
        }
        const bool same = runs[0] == runs[1] && runs[0] == runs[2] && !runs[0].empty();
        pass &= same && bad_exit == 0;
        std::size_t bytes = 0;
        for (const auto &[k, v] : runs[0]) bytes += v.size();
        detail += fmt("%s: %zu files / %zu bytes, jobs 1/4/8 %s, bad exits %d; ", command, runs[0].size(), bytes,
                      same ? "bit-identical" : "DIFFER", bad_exit);
    }
    fs::remove_all(dir);
    return {pass, detail};
}

// 10 -----------------------------------------------------------------------------------------
Outcome envmap_algebra() {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    EnvironmentMap m(360, 180);
    for (double &v : m.image().data()) v = u(rng);
    EnvironmentMap r = m;
    for (int k = 0; k < 10; ++k) r = rotate_yaw(r, 36.0);
    const bool rot_exact = r.image().data().size() == m.image().data().size() &&
                           std::equal(r.image().data().begin(), r.image().data().end(), m.image().data().begin());

    const EnvironmentMap flat(512, 256, {0.25, 1.5, 3.0});
    const EnvironmentMap small = downsample_pyramid(flat, 32, 16);
    double const_dev = 0;
    for (int row = 0; row < 16; ++row)
        for (int col = 0; col < 32; ++col)
            const_dev = std::max(const_dev, length(small.at(col, row) - Vec3{0.25, 1.5, 3.0}));
    const bool const_ok = small.width() == 32 && small.height() == 16 && const_dev <= 1e-12;

    // sh_project(alpha a + beta b) against alpha sh(a) + beta sh(b), relative to the largest coefficient.
    EnvironmentMap ma(128, 64), mb(128, 64), comb(128, 64);
    for (double &v : ma.image().data()) v = u(rng);
    for (double &v : mb.image().data()) v = u(rng);
    const double alpha = 0.7, beta = 2.3;
    for (std::size_t i = 0; i < comb.image().data().size(); ++i)
        comb.image().data()[i] = alpha * ma.image().data()[i] + beta * mb.image().data()[i];
    const SHCoefficients sa = sh_project(ma, 4), sb = sh_project(mb, 4), sc = sh_project(comb, 4);
    double norm = 0, lin = 0;
    for (const Vec3 &c : sc.coeffs) norm = std::max(norm, length(c));
    for (std::size_t k = 0; k < sc.coeffs.size(); ++k)
        lin = std::max(lin, length(sc.coeffs[k] - (alpha * sa.coeffs[k] + beta * sb.coeffs[k])) / norm);
    return {rot_exact && const_ok && lin <= 1e-6,
            fmt("10 x 36 deg on W=360 %s; constant pyramid 512x256->32x16 max dev %.1e; SH linearity rel err %.1e",
                rot_exact ? "bit-exact" : "DIFFERS", const_dev, lin)};
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"relight acceptance checks"};
    std::vector<int> only;
    std::string work = (fs::temp_directory_path() / "relight_acceptance").string();
    app.add_option("--only", only, "run just these criterion numbers");
    app.add_option("--work-dir", work, "scratch directory")->capture_default_str();
    CLI11_PARSE(app, argc, argv);
    g_work = work;
    fs::create_directories(g_work);

    const std::vector<Criterion> criteria{
        {1, "solid-angle closure", 1, solid_angle_closure},
        {2, "uniform-environment identity", 30, uniform_environment},
        {3, "SH / Monte Carlo agreement", 60, sh_mc_agreement},
        {4, "hard-shadow fidelity", 60, hard_shadow},
        {5, "ambient-occlusion analytic cases", 30, ambient_occlusion},
        {6, "Laplacian smoothing", 5, smoothing},
        {7, "metric arithmetic", 1, metric_arithmetic},
        {8, "dataset grid law", 15 * 60, dataset_grid_law},
        {9, "determinism across worker counts", 10 * 60, determinism},
        {10, "envmap algebra", 5, envmap_algebra},
    };

    int failed = 0, ran = 0;
    for (const Criterion &c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        std::printf("%s [%2d] %s: %s | %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", EXCEEDED");
        std::fflush(stdout);
        failed += !pass;
        ++ran;
    }
    std::printf("%d of %d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}

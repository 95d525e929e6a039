// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include <gtest/gtest.h>

#include <relight/envlight/procedural.hpp>
#include <relight/mesh/primitives.hpp>
#include <relight/pipeline/config.hpp>
#include <relight/pipeline/dataset.hpp>
#include <relight/pipeline/pose.hpp>
#include <relight/pipeline/relight.hpp>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>

using namespace relight;
namespace fs = std::filesystem;

namespace {

class PipelineTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("relight_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    // Two sky maps and a vertex-colored figure on disk.
    DatasetJob small_job() {
        write_envmap(make_sky(64, 32, normalize(Vec3{0.5, 0.7, 0.3})), dir_ / "sky_a.pfm");
        write_envmap(make_sky(64, 32, normalize(Vec3{-0.6, 0.5, 0.2}), 20.0), dir_ / "sky_b.hdr");
        write_obj(make_figure(1), dir_ / "figure.obj");
        DatasetJob job;
        job.grid.env_pool = {dir_ / "sky_a.pfm", dir_ / "sky_b.hdr"};
        job.grid.seed = 5;
        job.models = {{"figure", dir_ / "figure.obj", {0.8, 0.8, 0.8}}};
        job.options.width = job.options.height = 24;
        job.options.spp = 2;
        job.options.jobs = 1;
        return job;
    }

    fs::path dir_;
};

std::string file_bytes(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::set<std::string> files_under(const fs::path &root) {
    std::set<std::string> out;
    for (const auto &e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out.insert(fs::relative(e.path(), root).generic_string());
    return out;
}

std::size_t coverage_for(const Pose &pose, const TriangleMesh &mesh, int size) {
    const Scene scene(mesh);
    RenderConfig cfg;
    cfg.jobs = 1;
    return render_geometry(scene, camera_from_pose(pose, mesh.bounds(), size, size), cfg).coverage();
}

}  // namespace

TEST(Pose, CanonicalCameraLooksDownMinusZ) {
    const TriangleMesh m = make_figure(1);
    const OrthoCamera cam = camera_from_pose({0, 0, 1}, m.bounds(), 64, 64);
    EXPECT_NEAR(length(cam.forward - Vec3{0, 0, -1}), 0.0, 1e-15);
    EXPECT_NEAR(length(normalize(cam.up) - Vec3{0, 1, 0}), 0.0, 1e-15);
    EXPECT_NEAR(length(normalize(cam.right) - Vec3{1, 0, 0}), 0.0, 1e-15);
    EXPECT_NO_THROW(cam.validate());
    double px, py;
    cam.project(m.bounds().center(), px, py);
    EXPECT_NEAR(px, 32.0, 1e-9);
    EXPECT_NEAR(py, 32.0, 1e-9);
}

TEST(Pose, OppositeYawsMirrorAboutYZPlane) {
    Bounds3 b;
    b.extend({-1, 0, -0.5});
    b.extend({1, 2, 0.5});
    for (double pitch : {0.0, 20.0}) {
        const OrthoCamera p = camera_from_pose({pitch, 8, 1}, b, 32, 32), n = camera_from_pose({pitch, -8, 1}, b, 32, 32);
        auto mirror = [](const Vec3 &v) { return Vec3{-v.x, v.y, v.z}; };
        EXPECT_NEAR(length(mirror(p.center) - n.center), 0.0, 1e-12);
        EXPECT_NEAR(length(mirror(p.forward) - n.forward), 0.0, 1e-12);
        EXPECT_NEAR(length(mirror(p.up) - n.up), 0.0, 1e-12);
        // The mirror flips handedness, so `right` maps to minus the other camera's right.
        EXPECT_NEAR(length(mirror(p.right) + n.right), 0.0, 1e-12);
    }
}

TEST(Pose, PositivePitchLooksDown) {
    const OrthoCamera cam = camera_from_pose({30, 0, 1}, make_figure(1).bounds(), 16, 16);
    EXPECT_NEAR(cam.forward.y, -0.5, 1e-12);
}

TEST(Pose, ScaleChangesProjectedArea) {
    const TriangleMesh m = make_figure(2);
    const double small = coverage_for({0, 0, 0.8}, m, 160), large = coverage_for({0, 0, 1.1}, m, 160);
    const double expect = std::pow(1.1 / 0.8, 2);
    EXPECT_NEAR(large / small / expect, 1.0, 0.05);
}

TEST(Pose, DegenerateBoundsAndBadPose) {
    Bounds3 point;
    point.extend({1, 1, 1});
    try {
        camera_from_pose({}, point, 8, 8);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Structural);
    }
    EXPECT_THROW(camera_from_pose({90, 0, 1}, make_figure(0).bounds(), 8, 8), Error);
    EXPECT_THROW(camera_from_pose({0, 0, 0}, make_figure(0).bounds(), 8, 8), Error);
}

TEST(Config, SizeListsAndRegions) {
    int w = 0, h = 0;
    parse_size("640x480", w, h);
    EXPECT_EQ(w, 640);
    EXPECT_EQ(h, 480);
    for (const char *bad : {"640", "x480", "640x", "0x5", "12x3y"}) EXPECT_THROW(parse_size(bad, w, h), Error) << bad;
    EXPECT_EQ(parse_number_list("0,10,-2.5"), (std::vector<double>{0, 10, -2.5}));
    EXPECT_THROW(parse_number_list("1,a"), Error);
    const RegionSpec r = parse_region("10,20,30,40", 3);
    EXPECT_EQ(r.row0, 10);
    EXPECT_EQ(r.col0, 20);
    EXPECT_EQ(r.rows, 30);
    EXPECT_EQ(r.cols, 40);
    EXPECT_EQ(r.feather, 3);
    EXPECT_THROW(parse_region("1,2,3", 0), Error);
}

TEST(Config, DatasetJsonOverridesDefaults) {
    DatasetJob job;
    const auto cfg = nlohmann::json::parse(R"({
        "pitches": [0, 15], "yaws": [0], "scales": [1], "lightings_per_pose": 1, "seed": 9,
        "env_pool": ["envs/a.hdr", "/abs/b.pfm"], "size": "64x32", "spp": 8, "smooth_steps": 3,
        "models": [{"mesh": "meshes/body.obj", "albedo": [0.5, 0.6, 0.7]}]})");
    apply_dataset_config(cfg, "/data", job);
    EXPECT_EQ(job.grid.pitches, (std::vector<double>{0, 15}));
    EXPECT_EQ(job.grid.sets_per_model(), 2u);
    EXPECT_EQ(job.grid.seed, 9u);
    EXPECT_EQ(job.grid.env_pool[0], fs::path("/data/envs/a.hdr"));
    EXPECT_EQ(job.grid.env_pool[1], fs::path("/abs/b.pfm"));
    EXPECT_EQ(job.options.width, 64);
    EXPECT_EQ(job.options.height, 32);
    ASSERT_TRUE(job.options.smoothing);
    EXPECT_EQ(job.options.smoothing->steps, 3);
    ASSERT_EQ(job.models.size(), 1u);
    EXPECT_EQ(job.models[0].name, "body");
    EXPECT_EQ(job.models[0].albedo, (Vec3{0.5, 0.6, 0.7}));
    for (const char *bad : {R"({"pitch": [0]})", R"({"pitches": "0"})", R"({"spp": "many"})", R"([1, 2])"}) {
        try {
            apply_dataset_config(nlohmann::json::parse(bad), "/", job);
            FAIL() << bad;
        } catch (const Error &e) {
            EXPECT_EQ(e.kind(), ErrorKind::Config) << bad;
        }
    }
}

TEST(Dataset, DefaultGridCardinality) {
    const DatasetGrid g;
    EXPECT_EQ(g.sets_per_model(), 216u);
    DatasetGrid one;
    one.pitches = {0};
    one.yaws = {0};
    one.scales = {1};
    one.lightings_per_pose = 1;
    EXPECT_EQ(one.sets_per_model(), 1u);
}

TEST(Dataset, LightingsAreDistinctPerPose) {
    for (std::uint64_t pose = 0; pose < 50; ++pose) {
        const auto idx = detail::draw_lightings(5, 3, 1, 0, pose);
        EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 3u);
        for (auto i : idx) EXPECT_LT(i, 5u);
    }
    // Every pool entry gets used across poses.
    std::set<std::size_t> used;
    for (std::uint64_t pose = 0; pose < 50; ++pose)
        for (auto i : detail::draw_lightings(5, 2, 1, 0, pose)) used.insert(i);
    EXPECT_EQ(used.size(), 5u);
}

TEST_F(PipelineTest, DefaultGridProducesTwoHundredSixteenValidSets) {
    DatasetJob job = small_job();
    job.options.width = job.options.height = 16;
    job.options.spp = 1;
    const DatasetResult r = generate_dataset(job.models, job.grid, dir_ / "out", job.options);
    EXPECT_EQ(r.total_sets, 216u);
    EXPECT_EQ(r.failed_sets, 0u);
    EXPECT_FALSE(r.partial());
    const auto &mf = r.manifest;
    EXPECT_EQ(mf["schema_version"], kManifestSchemaVersion);
    EXPECT_EQ(mf["set_count"], 216);
    ASSERT_EQ(mf["sets"].size(), 216u);
    // Manifest completeness: referenced files exist and nothing else was produced.
    std::set<std::string> referenced{"manifest.json"};
    for (const auto &s : mf["sets"]) {
        EXPECT_EQ(s["status"], "ok");
        for (const auto &[k, v] : s["files"].items()) referenced.insert(v.get<std::string>());
        RenderSet files{s["files"]["image"], s["files"]["mask"],   s["files"]["albedo"],
                        s["files"]["shading"], s["files"]["normal"], s["files"]["ao"]};
        EXPECT_LE(albedo_shading_residual(dir_ / "out", files), kAlbedoShadingTolerance);
    }
    EXPECT_EQ(files_under(dir_ / "out"), referenced);
    const auto reread = nlohmann::ordered_json::parse(file_bytes(dir_ / "out" / "manifest.json"));
    EXPECT_EQ(reread, mf);
}

TEST_F(PipelineTest, PlanesShareDimensionsAndEncodings) {
    DatasetJob job = small_job();
    job.grid.pitches = {10};
    job.grid.yaws = {8};
    job.grid.scales = {1};
    job.grid.lightings_per_pose = 1;
    const DatasetResult r = generate_dataset(job.models, job.grid, dir_ / "out", job.options);
    ASSERT_EQ(r.total_sets, 1u);
    const auto &files = r.manifest["sets"][0]["files"];
    const fs::path out = dir_ / "out";
    for (const char *k : {"image", "albedo", "shading", "ao"}) {
        const ImageD img = read_pfm(out / files[k].get<std::string>());
        EXPECT_EQ(img.width(), 24);
        EXPECT_EQ(img.height(), 24);
    }
    const ImageD normal = read_png(out / files["normal"].get<std::string>());
    const ImageD mask = read_mask(out / files["mask"].get<std::string>());
    ASSERT_EQ(normal.channels(), 3);
    std::size_t covered = 0;
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 24; ++x) {
            if (mask(x, y) < 0.5) continue;
            ++covered;
            const Vec3 n = normal.rgb(x, y) * 2.0 - Vec3{1, 1, 1};
            EXPECT_NEAR(length(n), 1.0, 1e-3);
        }
    EXPECT_GT(covered, 20u);
}

TEST_F(PipelineTest, ReplayIsByteIdenticalAcrossWorkerCounts) {
    DatasetJob job = small_job();
    job.grid.pitches = {0, 20};
    job.grid.yaws = {-8, 8};
    job.grid.scales = {1};
    std::string reference;
    for (int jobs : {1, 4, 8}) {
        job.options.jobs = jobs;
        const fs::path out = dir_ / ("run" + std::to_string(jobs));
        generate_dataset(job.models, job.grid, out, job.options);
        std::string all;
        for (const auto &f : files_under(out)) all += f + ":" + file_bytes(out / f);
        if (reference.empty()) reference = all;
        else EXPECT_TRUE(all == reference) << jobs;
    }
    job.grid.seed = 6;
    generate_dataset(job.models, job.grid, dir_ / "other", job.options);
    EXPECT_NE(file_bytes(dir_ / "other" / "manifest.json"), file_bytes(dir_ / "run1" / "manifest.json"));
}

TEST_F(PipelineTest, UnreadableModelIsRecordedAndSkipped) {
    DatasetJob job = small_job();
    job.grid.pitches = {0};
    job.grid.yaws = {0};
    job.grid.scales = {1};
    std::ofstream(dir_ / "broken.obj") << "v 0 0 0\nf 1 2 3\n";
    job.models.push_back({"broken", dir_ / "broken.obj", {}});
    const DatasetResult r = generate_dataset(job.models, job.grid, dir_ / "out", job.options);
    EXPECT_EQ(r.failed_models, 1u);
    EXPECT_TRUE(r.partial());
    EXPECT_EQ(r.total_sets, 2u);
    EXPECT_EQ(r.manifest["models"][1]["status"], "error");
    EXPECT_FALSE(fs::exists(dir_ / "out" / "broken"));
}

TEST_F(PipelineTest, BadPoolIsConfigError) {
    DatasetJob job = small_job();
    job.grid.env_pool = {dir_ / "missing.hdr", dir_ / "sky_a.pfm"};
    try {
        generate_dataset(job.models, job.grid, dir_ / "out", job.options);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
    job.grid.env_pool = {dir_ / "sky_a.pfm"};  // fewer maps than lightings per pose
    EXPECT_THROW(generate_dataset(job.models, job.grid, dir_ / "out", job.options), Error);
    job.grid.env_rotations = 2;  // rotated copies make the pool large enough
    job.grid.pitches = {0};
    job.grid.yaws = {0};
    job.grid.scales = {1};
    EXPECT_EQ(generate_dataset(job.models, job.grid, dir_ / "out", job.options).total_sets, 2u);
}

namespace {

RelightInputs white_inputs(const TriangleMesh &body, const EnvironmentMap &env, int size) {
    RelightInputs in;
    in.body = body;
    in.albedo = ImageRGB(size, size, {1, 1, 1});
    in.env = env;
    return in;
}

RelightOptions quick_options(int spp) {
    RelightOptions opt;
    opt.render.spp = spp;
    opt.render.jobs = 1;
    opt.smoothing.steps = 2;
    return opt;
}

}  // namespace

TEST(Relight, WhiteAlbedoUniformEnvironment) {
    const double c = 0.4;
    const RelightResult r = relight::relight(white_inputs(make_icosphere(3), EnvironmentMap(32, 16, {c, c, c}), 32), quick_options(256));
    std::size_t n = 0, ok = 0;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            if (!r.body.covered(x, y)) continue;
            ++n;
            ok += std::abs(r.relit.rgb(x, y, 0) - c) <= 0.01 * c;
        }
    EXPECT_GT(n, 200u);
    EXPECT_GE(double(ok), 0.99 * n);
}

TEST(Relight, NoFaceMeansBodyShading) {
    const RelightResult r = relight::relight(white_inputs(make_figure(1), make_sky(64, 32, {0, 1, 0}), 24), quick_options(4));
    EXPECT_FALSE(r.face);
    EXPECT_EQ(r.shading.rgb, r.body.shading);
}

TEST(Relight, RelitIsAlbedoTimesShading) {
    RelightInputs in = white_inputs(make_figure(1), make_sky(64, 32, normalize(Vec3{1, 1, 1})), 24);
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 24; ++x) in.albedo.rgb.set_rgb(x, y, {x / 24.0, y / 24.0, 0.5});
    const RelightResult r = relight::relight(in, quick_options(4));
    for (std::size_t i = 0; i < r.relit.rgb.data().size(); ++i)
        EXPECT_EQ(r.relit.rgb.data()[i], in.albedo.rgb.data()[i] * r.shading.rgb.data()[i]);
}

TEST(Relight, FaceRegionRequiredAndComposited) {
    const TriangleMesh body = make_figure(1);
    RelightInputs in = white_inputs(body, make_sky(64, 32, normalize(Vec3{0.3, 1, 0.5})), 32);
    // The face pass uses a mesh whose shading differs (a bigger head sphere).
    in.face = transformed(make_icosphere(2), Vec3{0.2, 0.2, 0.2}, {0, 1.6, 0.05});
    try {
        relight::relight(in, quick_options(4));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
    const RegionSpec region{0, 8, 12, 16, 0};
    in.face_region = region;
    const RelightResult r = relight::relight(in, quick_options(4));
    ASSERT_TRUE(r.face);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            const bool in_region = y >= region.row0 && y < region.row0 + region.rows && x >= region.col0 &&
                                   x < region.col0 + region.cols;
            if (in_region && r.face->covered(x, y)) EXPECT_EQ(r.shading.rgb.rgb(x, y), r.face->shading.rgb(x, y));
            else EXPECT_EQ(r.shading.rgb.rgb(x, y), r.body.shading.rgb(x, y));
        }
}

TEST_F(PipelineTest, WritesAllIntermediates) {
    RelightInputs in = white_inputs(make_figure(1), make_sky(64, 32, {0, 1, 0}), 20);
    in.face = transformed(make_icosphere(1), Vec3{0.15, 0.15, 0.15}, {0, 1.6, 0});
    in.face_region = RegionSpec{0, 4, 8, 12, 2};
    RelightOptions opt = quick_options(2);
    opt.background = BackgroundView{};
    write_relight_outputs(relight::relight(in, opt), dir_ / "out");
    for (const char *f : {"mask.png", "normal.png", "depth.pfm", "ao.pfm", "shading_body.pfm", "shading_face.pfm",
                          "mask_face.png", "shading.pfm", "relit.pfm", "relit.png", "relit_background.pfm",
                          "relit_background.png", "body_smoothed.obj"})
        EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
}

TEST(Relight, FullFigureAtFullResolution) {
    // 12.8k-triangle figure, 512x512, 128 spp: completes and keeps image = albedo * shading.
    RelightInputs in;
    in.body = make_figure(3);
    in.env = make_sky(256, 128, normalize(Vec3{0.4, 0.8, 0.5}));
    in.albedo = ImageRGB(512, 512, {0.7, 0.5, 0.4});
    RelightOptions opt;
    opt.render.spp = 128;
    opt.ambient_occlusion = false;
    const RelightResult r = relight::relight(in, opt);
    EXPECT_GT(r.body.coverage(), 10000u);
    double worst = 0;
    for (std::size_t i = 0; i < r.relit.rgb.data().size(); ++i)
        worst = std::max(worst, std::abs(r.relit.rgb.data()[i] - in.albedo.rgb.data()[i] * r.shading.rgb.data()[i]));
    EXPECT_LE(worst, 1e-12);
}

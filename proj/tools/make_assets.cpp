// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

// Writes a small self-contained demo asset set: a vertex-colored figure, a separate head mesh
// for face compositing, a few procedural sky panoramas and a dataset config that uses them.

#include <relight/relight.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using namespace relight;

int main(int argc, char **argv) {
    CLI::App app{"write demo meshes, environment maps and a dataset config"};
    std::string out_dir;
    int subdivisions = 3;
    std::string env_size = "256x128";
    int skies = 4;
    app.add_option("--out-dir", out_dir, "output directory")->required();
    app.add_option("--subdivisions", subdivisions, "icosphere level of each body part")->capture_default_str();
    app.add_option("--env-size", env_size, "panorama size WxH")->capture_default_str();
    app.add_option("--skies", skies, "number of sky panoramas")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        int w = 0, h = 0;
        parse_size(env_size, w, h);
        if (skies < 2) fail(ErrorKind::Config, "--skies must be >= 2");
        const fs::path out(out_dir);
        fs::create_directories(out);

        write_obj(make_figure(subdivisions), out / "figure.obj");
        const TriangleMesh head =
            with_color(transformed(make_icosphere(subdivisions + 1), {0.11, 0.13, 0.12}, {0.0, 1.66, 0.0}),
                       {0.80, 0.60, 0.48});
        write_obj(head, out / "head.obj");

        nlohmann::ordered_json pool = nlohmann::ordered_json::array();
        for (int k = 0; k < skies; ++k) {
            const double phi = 2 * kPi * k / skies + 0.3;
            const double elev = 0.35 + 0.5 * k / skies;
            const Vec3 sun{std::cos(elev) * std::cos(phi), std::sin(elev), std::cos(elev) * std::sin(phi)};
            char name[32];
            std::snprintf(name, sizeof name, "sky_%02d.hdr", k);
            write_hdr(make_sky(w, h, sun).image(), out / name);
            pool.push_back(name);
        }

        nlohmann::ordered_json cfg;
        cfg["models"] = {{{"name", "figure"}, {"mesh", "figure.obj"}}};
        cfg["env_pool"] = pool;
        cfg["seed"] = 7;
        cfg["size"] = "256x256";
        cfg["spp"] = 64;
        std::ofstream(out / "dataset.json") << cfg.dump(2) << '\n';
        std::fprintf(stderr, "assets written to %s\n", out.c_str());
    } catch (const std::exception &e) {
        std::fprintf(stderr, "make_assets: %s\n", e.what());
        return 2;
    }
    return 0;
}

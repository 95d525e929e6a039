// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/mesh/mesh.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace relight {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

inline bool parse_double(std::string_view s, double &out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_long(std::string_view s, long &out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

// Parses Wavefront OBJ text. Reads v (optionally with r g b), vn and f records; all other
// records are ignored. Polygons are fan-triangulated. Face corners accept v, v/vt, v//vn and
// v/vt/vn, with negative (relative) indices. Normals are kept only if every vertex receives one.
inline TriangleMesh parse_obj(std::istream &in, const std::string &source_name = "<obj>") {
    TriangleMesh mesh;
    std::vector<Vec3> file_normals;
    std::vector<Vec3> colors;
    bool any_color = false;
    struct Corner {
        long v, vn;
        std::size_t line;
    };
    std::vector<std::vector<Corner>> faces;

    auto parse_error = [&](std::size_t line_no, const std::string &what) {
        fail(ErrorKind::Parse, source_name + ":" + std::to_string(line_no) + ": " + what);
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        std::string_view body(line.data(), hash == std::string::npos ? line.size() : hash);
        const auto tok = detail::split_ws(body);
        if (tok.empty()) continue;
        const std::string_view kw = tok[0];
        if (kw == "v") {
            if (tok.size() != 4 && tok.size() != 5 && tok.size() != 7) parse_error(line_no, "malformed vertex");
            double c[6] = {0, 0, 0, 0, 0, 0};
            for (std::size_t k = 1; k < tok.size(); ++k)
                if (!detail::parse_double(tok[k], c[k - 1])) parse_error(line_no, "bad number '" + std::string(tok[k]) + "'");
            mesh.positions.push_back({c[0], c[1], c[2]});
            if (tok.size() == 7) {
                colors.push_back({c[3], c[4], c[5]});
                any_color = true;
            } else {
                colors.push_back({-1, -1, -1});
            }
        } else if (kw == "vn") {
            if (tok.size() != 4) parse_error(line_no, "malformed normal");
            double c[3];
            for (std::size_t k = 1; k < 4; ++k)
                if (!detail::parse_double(tok[k], c[k - 1])) parse_error(line_no, "bad number '" + std::string(tok[k]) + "'");
            file_normals.push_back({c[0], c[1], c[2]});
        } else if (kw == "f") {
            if (tok.size() < 4) parse_error(line_no, "face needs at least 3 vertices");
            std::vector<Corner> face;
            for (std::size_t k = 1; k < tok.size(); ++k) {
                const std::string_view corner = tok[k];
                const auto s1 = corner.find('/');
                long v = 0, vn = 0;
                if (!detail::parse_long(corner.substr(0, s1), v) || v == 0)
                    parse_error(line_no, "bad face index '" + std::string(corner) + "'");
                if (s1 != std::string_view::npos) {
                    const auto s2 = corner.find('/', s1 + 1);
                    if (s2 != std::string_view::npos && s2 + 1 < corner.size()) {
                        if (!detail::parse_long(corner.substr(s2 + 1), vn) || vn == 0)
                            parse_error(line_no, "bad normal index '" + std::string(corner) + "'");
                    }
                }
                // Relative indices resolve against the counts seen so far.
                if (v < 0) v = static_cast<long>(mesh.positions.size()) + v + 1;
                if (vn < 0) vn = static_cast<long>(file_normals.size()) + vn + 1;
                face.push_back({v, vn, line_no});
            }
            faces.push_back(std::move(face));
        }
    }

    std::vector<Vec3> normals(mesh.positions.size());
    std::vector<char> has_normal(mesh.positions.size(), 0);
    const long nv = static_cast<long>(mesh.positions.size());
    for (const auto &face : faces) {
        for (const Corner &c : face) {
            if (c.v < 1 || c.v > nv)
                fail(ErrorKind::Structural, source_name + ":" + std::to_string(c.line) + ": vertex index " +
                                                std::to_string(c.v) + " out of range (" + std::to_string(nv) +
                                                " vertices)");
            if (c.vn != 0) {
                if (c.vn < 1 || c.vn > static_cast<long>(file_normals.size()))
                    fail(ErrorKind::Structural, source_name + ":" + std::to_string(c.line) + ": normal index " +
                                                    std::to_string(c.vn) + " out of range");
                normals[c.v - 1] = file_normals[c.vn - 1];
                has_normal[c.v - 1] = 1;
            }
        }
        for (std::size_t k = 1; k + 1 < face.size(); ++k)
            mesh.triangles.push_back({static_cast<std::uint32_t>(face[0].v - 1),
                                      static_cast<std::uint32_t>(face[k].v - 1),
                                      static_cast<std::uint32_t>(face[k + 1].v - 1)});
    }
    // Files that list one vn per v without referencing them in faces.
    if (!file_normals.empty() && file_normals.size() == mesh.positions.size()) {
        for (std::size_t i = 0; i < normals.size(); ++i)
            if (!has_normal[i]) {
                normals[i] = file_normals[i];
                has_normal[i] = 1;
            }
    }

    if (mesh.positions.empty() || mesh.triangles.empty())
        fail(ErrorKind::Structural, source_name + ": mesh has no triangles");

    bool all_normals = !file_normals.empty();
    for (std::size_t i = 0; i < normals.size() && all_normals; ++i) {
        const double len = length(normals[i]);
        if (!has_normal[i] || !(len > 0)) all_normals = false;
        else normals[i] = normals[i] / len;
    }
    if (all_normals) mesh.vertex_normals = std::move(normals);

    if (any_color) {
        for (Vec3 &c : colors)
            if (c.x < 0) c = {1, 1, 1};
        mesh.vertex_colors = std::move(colors);
    }
    mesh.validate();
    return mesh;
}

inline TriangleMesh load_obj(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    return parse_obj(in, path.string());
}

inline void write_obj(const TriangleMesh &mesh, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    char buf[160];
    for (std::size_t i = 0; i < mesh.positions.size(); ++i) {
        const Vec3 &p = mesh.positions[i];
        if (mesh.vertex_colors) {
            const Vec3 &c = (*mesh.vertex_colors)[i];
            std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g %.6g %.6g %.6g\n", p.x, p.y, p.z, c.x, c.y, c.z);
        } else {
            std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", p.x, p.y, p.z);
        }
        out << buf;
    }
    if (mesh.vertex_normals)
        for (const Vec3 &n : *mesh.vertex_normals) {
            std::snprintf(buf, sizeof buf, "vn %.9g %.9g %.9g\n", n.x, n.y, n.z);
            out << buf;
        }
    for (const Triangle &t : mesh.triangles) {
        if (mesh.vertex_normals)
            out << "f " << t[0] + 1 << "//" << t[0] + 1 << ' ' << t[1] + 1 << "//" << t[1] + 1 << ' ' << t[2] + 1
                << "//" << t[2] + 1 << '\n';
        else
            out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
    if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace relight

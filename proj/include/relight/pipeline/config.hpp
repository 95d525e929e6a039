// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/compose/compose.hpp>
#include <relight/core/error.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace relight {

// Parses "WxH" (e.g. "512x512").
inline void parse_size(const std::string &s, int &w, int &h) {
    const auto x = s.find_first_of("xX");
    try {
        if (x == std::string::npos) throw std::invalid_argument(s);
        std::size_t used = 0;
        w = std::stoi(s.substr(0, x), &used);
        if (used != x) throw std::invalid_argument(s);
        h = std::stoi(s.substr(x + 1), &used);
        if (used != s.size() - x - 1) throw std::invalid_argument(s);
    } catch (const std::exception &) {
        fail(ErrorKind::Config, "size must look like WxH, got '" + s + "'");
    }
    if (w <= 0 || h <= 0) fail(ErrorKind::Config, "size must be positive, got '" + s + "'");
}

inline std::vector<double> parse_number_list(const std::string &s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception &) {
            fail(ErrorKind::Config, "bad number '" + item + "' in list '" + s + "'");
        }
    }
    return out;
}

// "r0,c0,h,w"
inline RegionSpec parse_region(const std::string &s, int feather) {
    const auto v = parse_number_list(s);
    if (v.size() != 4) fail(ErrorKind::Config, "region must be r0,c0,h,w");
    RegionSpec r;
    r.row0 = static_cast<int>(v[0]);
    r.col0 = static_cast<int>(v[1]);
    r.rows = static_cast<int>(v[2]);
    r.cols = static_cast<int>(v[3]);
    r.feather = feather;
    return r;
}

inline nlohmann::json load_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open config " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        fail(ErrorKind::Config, path.string() + ": " + e.what());
    }
}

}  // namespace relight

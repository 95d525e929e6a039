// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace relight {

inline int default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// Runs fn(i) for i in [0, count) on `jobs` workers pulling from a shared counter.
// The first exception thrown by any task is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn &&fn) {
    if (count == 0) return;
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

struct Tile {
    int x0, y0, x1, y1;
};

// Splits a raster into square tiles and renders them in parallel; tiles partition the raster.
template <typename Fn>
void parallel_for_tiles(int width, int height, int tile_size, int jobs, Fn &&fn) {
    const int tx = (width + tile_size - 1) / tile_size;
    const int ty = (height + tile_size - 1) / tile_size;
    parallel_for(static_cast<std::size_t>(tx) * ty, jobs, [&](std::size_t t) {
        const int ix = static_cast<int>(t % tx), iy = static_cast<int>(t / tx);
        Tile tile{ix * tile_size, iy * tile_size, std::min(width, (ix + 1) * tile_size),
                  std::min(height, (iy + 1) * tile_size)};
        fn(tile);
    });
}

}  // namespace relight

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sfp {

template <typename Body>
void for_each_row_tile(Eigen::Index rows, Eigen::Index tile_rows, Body&& body) {
    if (rows <= 0) return;
    tile_rows = std::max<Eigen::Index>(tile_rows, 1);
    const Eigen::Index tiles = (rows + tile_rows - 1) / tile_rows;
    const auto run_tile = [&](Eigen::Index t) {
        const Eigen::Index begin = t * tile_rows;
        body(begin, std::min(rows, begin + tile_rows), t);
    };

    const unsigned workers = std::min<unsigned>(thread_count(), static_cast<unsigned>(tiles));
    if (workers <= 1) {
        for (Eigen::Index t = 0; t < tiles; ++t) run_tile(t);
        return;
    }

    std::atomic<Eigen::Index> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (Eigen::Index t = next++; t < tiles; t = next++) {
                try {
                    run_tile(t);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace sfp

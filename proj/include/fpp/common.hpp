#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fpp {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

inline bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline int ilog2(std::int64_t n) {
    int r = 0;
    while ((std::int64_t{1} << (r + 1)) <= n) ++r;
    return r;
}

/// Number of worker threads: FPP_THREADS if set, else hardware concurrency.
inline unsigned thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* s = std::getenv("FPP_THREADS")) {
        int v = std::atoi(s);
        if (v > 0) return std::min<unsigned>(static_cast<unsigned>(v), hw * 4);
    }
    return hw;
}

/// Static-chunked parallel loop. Each index is visited exactly once; callers
/// write to disjoint slots so results never depend on the thread count.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
    unsigned t = std::min<std::size_t>(thread_count(), n);
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned w = 0; w < t; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += t) fn(i);
        });
    for (auto& th : pool) th.join();
}

/// Independent stream for (seed, stream index).
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    return std::mt19937_64(seq);
}

}  // namespace fpp

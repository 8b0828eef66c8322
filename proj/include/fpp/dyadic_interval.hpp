#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>

namespace fpp {

/// [2^k n, 2^k (n+1)) on the unit torus; k <= 0 and 0 <= n < 2^{-k}.
struct DyadicInterval {
    int k = 0;
    std::int64_t n = 0;

    DyadicInterval() = default;
    DyadicInterval(int k_, std::int64_t n_) : k(k_), n(n_) {
        if (k > 0 || n < 0 || n >= (std::int64_t{1} << -k))
            throw std::invalid_argument("dyadic interval outside [0,1)");
    }

    double length() const { return std::ldexp(1.0, k); }
    double left() const { return std::ldexp(static_cast<double>(n), k); }
    double right() const { return std::ldexp(static_cast<double>(n + 1), k); }

    /// this ⊆ o
    bool subset_of(const DyadicInterval& o) const {
        if (k > o.k) return false;
        return (n >> (o.k - k)) == o.n;
    }
    bool disjoint(const DyadicInterval& o) const { return !subset_of(o) && !o.subset_of(*this); }

    /// Unique dyadic ancestor of length 2^kk (kk >= k).
    DyadicInterval ancestor(int kk) const { return {kk, n >> (kk - k)}; }

    /// Grid cells [first, last) covered on an N-point grid (requires 2^k N >= 1).
    std::int64_t first_cell(std::int64_t N) const { return static_cast<std::int64_t>(std::ldexp(double(n), k) * N); }
    std::int64_t cell_count(std::int64_t N) const { return static_cast<std::int64_t>(std::ldexp(double(N), k)); }

    auto operator<=>(const DyadicInterval&) const = default;
};

}  // namespace fpp

#pragma once

// Sizes, energies, the stopping-time decomposition and the size/energy
// estimate for the reordered form, all as measured quantities.

#include <numeric>
#include <set>

#include "dyadic.hpp"

namespace fpp {

struct SizeEnergyParams {
    int j = 1;  // the non-lacunary 𝓙-slot
    int i = 1;  // the coefficient slot being measured
    std::optional<int> k0;
    std::array<double, 3> theta{1.0 / 3, 1.0 / 3, 1.0 / 3};

    bool square() const { return i != j; }  // square-function branch
    void validate() const {
        if (i < 1 || i > 3 || j < 1 || j > 3) throw std::invalid_argument("slots must be 1, 2 or 3");
        double s = 0;
        for (double t : theta) {
            if (t < 0 || t >= 1) throw std::invalid_argument("theta_i must lie in [0,1)");
            s += t;
        }
        if (std::abs(s - 1) > 1e-12) throw std::invalid_argument("theta must sum to 1");
    }
};

/// Parses "1/3,1/3,1/3" or "0.25,0.25,0.5".
inline std::array<double, 3> parse_theta(const std::string& s) {
    std::array<double, 3> t{};
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
        std::size_t end = s.find(',', pos);
        std::string tok = s.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        auto slash = tok.find('/');
        t[k] = slash == std::string::npos ? std::stod(tok) : std::stod(tok.substr(0, slash)) / std::stod(tok.substr(slash + 1));
        if (end == std::string::npos && k < 2) throw std::invalid_argument("theta needs three entries");
        pos = end + 1;
    }
    return t;
}

/// Restriction of a family to the intervals for which keep(index) holds.
template <class Pred>
CoefficientFamily restrict_family(const CoefficientFamily& f, Pred keep) {
    CoefficientFamily out;
    out.k0 = f.k0;
    for (std::size_t t = 0; t < f.size(); ++t)
        if (keep(t)) out.intervals.push_back(f.intervals[t]), out.a.push_back(f.a[t]);
    return out;
}

namespace detail {

inline int finest_scale(const CoefficientFamily& f) {
    int k = 0;
    for (auto& J : f.intervals) k = std::min(k, J.k);
    return k;
}

/// Cell values of (Σ_{J'⊆J} |a_J'|²/|J'| χ_J')^{1/2} on J, at the family's finest scale.
inline std::vector<double> local_square_function(const CoefficientFamily& f, std::size_t t, int kmin) {
    const auto& J = f.intervals[t];
    const std::int64_t cells = std::int64_t{1} << (J.k - kmin);
    std::vector<double> s2(cells, 0.0);
    for (std::size_t u = 0; u < f.size(); ++u) {
        const auto& K = f.intervals[u];
        if (!K.subset_of(J)) continue;
        const double v = std::norm(f.a[u]) / K.length();
        const std::int64_t w = std::int64_t{1} << (K.k - kmin);
        const std::int64_t first = (K.n << (K.k - kmin)) - (J.n << (J.k - kmin));
        for (std::int64_t c = first; c < first + w; ++c) s2[c] += v;
    }
    for (auto& v : s2) v = std::sqrt(v);
    return s2;
}

}  // namespace detail

/// q(J): |a_J|/|J|^{1/2}, or (1/|J|)‖(Σ_{J'⊆J}|a_J'|²/|J'|χ_J')^{1/2}‖_{1,∞} in the square branch.
inline std::vector<double> local_quantities(const CoefficientFamily& f, bool square) {
    std::vector<double> q(f.size(), 0.0);
    if (!square) {
        for (std::size_t t = 0; t < f.size(); ++t) q[t] = std::abs(f.a[t]) / std::sqrt(f.intervals[t].length());
        return q;
    }
    const int kmin = detail::finest_scale(f);
    parallel_for(f.size(), [&](std::size_t t) {
        auto s = detail::local_square_function(f, t, kmin);
        // cells of equal measure |J|/cells, so (1/|J|)‖S‖_{1,∞} is the unit-mass weak norm of the cell values
        q[t] = weak_l1_norm(s);
    });
    return q;
}

inline double size(const CoefficientFamily& f, const SizeEnergyParams& p) {
    auto q = local_quantities(f, p.square());
    return q.empty() ? 0.0 : *std::max_element(q.begin(), q.end());
}

namespace detail {

/// Threshold exponents worth trying: the attained dyadic range of q, ±2.
inline std::pair<int, int> level_range(const std::vector<double>& q) {
    int lo = INT32_MAX, hi = INT32_MIN;
    for (double v : q)
        if (v > 0) {
            int e = std::ilogb(v);
            lo = std::min(lo, e), hi = std::max(hi, e);
        }
    return {lo - 2, hi + 2};
}

/// Maximal elements among the marked intervals.
inline std::vector<std::size_t> maximal(const std::vector<DyadicInterval>& iv, const std::vector<char>& mark) {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < iv.size(); ++t) {
        if (!mark[t]) continue;
        bool top = true;
        for (std::size_t u = 0; u < iv.size() && top; ++u)
            if (u != t && mark[u] && iv[t].subset_of(iv[u]) && !(iv[t] == iv[u])) top = false;
        if (top) out.push_back(t);
    }
    return out;
}

}  // namespace detail

struct EnergyReport {
    double energy = 0;
    int level = 0;                      // the maximizing n
    std::vector<DyadicInterval> chain;  // the maximizing disjoint collection
};

/// sup_n sup_D 2^n Σ_{J∈D}|J| over disjoint D ⊆ 𝓙 with q(J) ≥ 2^n. For each n the
/// maximal intervals meeting the threshold form an optimal antichain.
inline EnergyReport energy_report(const CoefficientFamily& f, const SizeEnergyParams& p) {
    auto q = local_quantities(f, p.square());
    EnergyReport r;
    if (q.empty()) return r;
    auto [lo, hi] = detail::level_range(q);
    for (int n = lo; n <= hi; ++n) {
        const double thr = std::ldexp(1.0, n);
        std::vector<char> mark(q.size());
        for (std::size_t t = 0; t < q.size(); ++t) mark[t] = q[t] >= thr;
        auto top = detail::maximal(f.intervals, mark);
        double len = 0;
        for (auto t : top) len += f.intervals[t].length();
        double e = thr * len;
        if (e > r.energy) {
            r.energy = e;
            r.level = n;
            r.chain.clear();
            for (auto t : top) r.chain.push_back(f.intervals[t]);
        }
    }
    return r;
}

inline double energy(const CoefficientFamily& f, const SizeEnergyParams& p) { return energy_report(f, p).energy; }

/// Exponential oracle: every subset of the thresholded set, disjointness checked pairwise.
inline double energy_exhaustive(const CoefficientFamily& f, const SizeEnergyParams& p) {
    if (f.size() > 20) throw std::invalid_argument("exhaustive energy limited to 20 intervals");
    auto q = local_quantities(f, p.square());
    double best = 0;
    if (q.empty()) return 0;
    auto [lo, hi] = detail::level_range(q);
    for (int n = lo; n <= hi; ++n) {
        const double thr = std::ldexp(1.0, n);
        std::vector<std::size_t> A;
        for (std::size_t t = 0; t < q.size(); ++t)
            if (q[t] >= thr) A.push_back(t);
        for (std::uint32_t mask = 1; mask < (1u << A.size()); ++mask) {
            bool ok = true;
            double len = 0;
            for (std::size_t x = 0; x < A.size() && ok; ++x) {
                if (!(mask >> x & 1)) continue;
                len += f.intervals[A[x]].length();
                for (std::size_t y = x + 1; y < A.size() && ok; ++y)
                    if ((mask >> y & 1) && !f.intervals[A[x]].disjoint(f.intervals[A[y]])) ok = false;
            }
            if (ok) best = std::max(best, thr * len);
        }
    }
    return best;
}

/// Pointwise oracle for q in the square branch: samples S at `per_cell` points per finest cell
/// over the whole torus and takes the weak norm of the samples inside J.
inline std::vector<double> local_quantities_pointwise(const CoefficientFamily& f, int per_cell = 3) {
    const int kmin = detail::finest_scale(f);
    const std::int64_t M = (std::int64_t{1} << -kmin) * per_cell;
    std::vector<double> q(f.size());
    for (std::size_t t = 0; t < f.size(); ++t) {
        const auto& J = f.intervals[t];
        std::vector<double> vals;
        for (std::int64_t s = 0; s < M; ++s) {
            double x = (s + 0.5) / double(M);
            if (x < J.left() || x >= J.right()) continue;
            double s2 = 0;
            for (std::size_t u = 0; u < f.size(); ++u) {
                const auto& K = f.intervals[u];
                if (K.subset_of(J) && x >= K.left() && x < K.right()) s2 += std::norm(f.a[u]) / K.length();
            }
            vals.push_back(std::sqrt(s2));
        }
        q[t] = weak_l1_norm(vals);
    }
    return q;
}

// ---------------------------------------------------------------------------
// John–Nirenberg comparison

struct JohnNirenbergReport {
    double weak_size = 0;  // square-branch size
    double l2_size = 0;    // sup_J |J|^{-1/2}(Σ_{J'⊆J}|a_J'|²)^{1/2}
    double ratio() const { return l2_size > 0 ? weak_size / l2_size : 0.0; }
};

inline JohnNirenbergReport john_nirenberg_compare(const CoefficientFamily& f, const SizeEnergyParams& p) {
    if (!p.square()) throw std::invalid_argument("John-Nirenberg comparison needs i != j");
    JohnNirenbergReport r;
    r.weak_size = size(f, p);
    for (std::size_t t = 0; t < f.size(); ++t) {
        double s = 0;
        for (std::size_t u = 0; u < f.size(); ++u)
            if (f.intervals[u].subset_of(f.intervals[t])) s += std::norm(f.a[u]);
        r.l2_size = std::max(r.l2_size, std::sqrt(s / f.intervals[t].length()));
    }
    return r;
}

// ---------------------------------------------------------------------------
// local embedding

struct BoundReport {
    double lhs = 0, rhs = 0;
    double ratio() const { return rhs > 0 ? lhs / rhs : (lhs > 0 ? INFINITY : 0.0); }
};

/// ‖(Σ_{J'⊆J}|⟨f,Φ_J'⟩|²/|J'| χ_J')^{1/2}‖_{1,∞} against ∫|f|(1 + dist(x,J)/|J|)^{−N}.
inline BoundReport local_embedding_check(const SampledFunction& f, const BumpFamily& fam, const DyadicInterval& J,
                                         int N_exp) {
    if (fam.flavor != Flavor::lacunary) throw std::invalid_argument("local embedding needs a lacunary family");
    Spectrum s = dft(f);
    CoefficientFamily c;
    for (std::size_t t = 0; t < fam.size(); ++t)
        if (fam.intervals[t].subset_of(J)) c.intervals.push_back(fam.intervals[t]), c.a.push_back(coefficient(s, fam.spectra[t]));
    BoundReport r;
    if (!c.intervals.empty()) {
        const int kmin = detail::finest_scale(c);
        c.intervals.push_back(J);  // evaluation frame; its coefficient is not part of the sum
        c.a.push_back(0);
        auto S = detail::local_square_function(c, c.size() - 1, std::min(kmin, J.k));
        r.lhs = weak_l1_norm(S) * J.length();
    }
    auto w = approx_cutoff(J, f.grid, N_exp);
    for (int k = 0; k < f.grid.N; ++k) r.rhs += std::abs(f[k]) * w[k].real();
    r.rhs /= f.grid.N;
    return r;
}

// ---------------------------------------------------------------------------
// stopping time

struct Tree {
    DyadicInterval top;
    std::vector<DyadicInterval> members;
};

struct TreeDecomposition {
    int n0 = 0;
    double energy = 0;     // of the full collection
    double threshold = 0;  // 2^{-n0-1}·energy
    std::vector<Tree> trees;
    std::vector<DyadicInterval> residual;
    double residual_size = 0;
    double top_measure = 0;  // Σ_T |J_T|
    double constant = 0;     // top_measure / 2^{n0}
    bool verified = false;
};

namespace detail {
inline std::set<DyadicInterval> as_set(const std::vector<DyadicInterval>& v) { return {v.begin(), v.end()}; }
}  // namespace detail

/// Independent re-evaluation of the postconditions.
inline bool verify_decomposition(const CoefficientFamily& full, const CoefficientFamily& sub, const SizeEnergyParams& p,
                                 const TreeDecomposition& d) {
    std::multiset<DyadicInterval> seen;
    for (auto& T : d.trees) {
        for (auto& J : T.members) {
            if (!J.subset_of(T.top)) return false;
            seen.insert(J);
        }
    }
    for (auto& J : d.residual) seen.insert(J);
    std::multiset<DyadicInterval> want(sub.intervals.begin(), sub.intervals.end());
    if (seen != want) return false;  // disjoint and exhaustive
    for (std::size_t x = 0; x < d.trees.size(); ++x)
        for (std::size_t y = x + 1; y < d.trees.size(); ++y)
            if (!d.trees[x].top.disjoint(d.trees[y].top)) return false;
    auto rs = detail::as_set(d.residual);
    auto res = restrict_family(full, [&](std::size_t t) { return rs.count(full.intervals[t]) > 0; });
    if (size(res, p) > d.threshold) return false;
    double tops = 0;
    for (auto& T : d.trees) tops += T.top.length();
    return tops <= 4 * std::ldexp(1.0, d.n0);
}

/// One step of the stopping time: from `sub` ⊆ `full`, repeatedly take the longest (then
/// leftmost) interval with q(J) > 2^{-n0-1}·energy(full), q measured on `full`, and move
/// everything below it into a tree.
inline TreeDecomposition stopping_decomposition(const CoefficientFamily& full, const CoefficientFamily& sub,
                                                const SizeEnergyParams& p, int n0) {
    p.validate();
    TreeDecomposition d;
    d.n0 = n0;
    d.energy = energy(full, p);
    if (size(sub, p) > std::ldexp(d.energy, -n0)) throw std::domain_error("stopping decomposition: size exceeds 2^{-n0}·energy");
    d.threshold = std::ldexp(d.energy, -n0 - 1);
    auto q = local_quantities(full, p.square());
    std::map<DyadicInterval, double> qmap;
    for (std::size_t t = 0; t < full.size(); ++t) qmap[full.intervals[t]] = q[t];

    std::vector<DyadicInterval> order = sub.intervals;
    std::sort(order.begin(), order.end(), [](auto& a, auto& b) { return a.k != b.k ? a.k > b.k : a.n < b.n; });
    std::vector<char> taken(order.size(), 0);
    for (std::size_t t = 0; t < order.size(); ++t) {
        if (taken[t] || !(qmap.at(order[t]) > d.threshold)) continue;
        Tree T{order[t], {}};
        for (std::size_t u = 0; u < order.size(); ++u)
            if (!taken[u] && order[u].subset_of(order[t])) taken[u] = 1, T.members.push_back(order[u]);
        d.top_measure += T.top.length();
        d.trees.push_back(std::move(T));
    }
    for (std::size_t t = 0; t < order.size(); ++t)
        if (!taken[t]) d.residual.push_back(order[t]);
    auto rs = detail::as_set(d.residual);
    d.residual_size = size(restrict_family(full, [&](std::size_t t) { return rs.count(full.intervals[t]) > 0; }), p);
    d.constant = d.top_measure / std::ldexp(1.0, n0);
    d.verified = verify_decomposition(full, sub, p, d);
    return d;
}

struct PartitionLevel {
    int n = 0;
    std::vector<Tree> trees;
    double size = 0;         // of the level's collection
    double top_measure = 0;  // Σ_T |J_T|
};

struct FullPartition {
    double energy = 0, size = 0;
    std::vector<PartitionLevel> levels;
    std::vector<DyadicInterval> null_set;  // intervals with q = 0 everywhere below; never selected
    double max_constant = 0;               // max_n top_measure / 2^n
    bool exact = false;                    // levels ∪ null set = input, pairwise disjoint
    bool size_bounds = false;              // size(level n) ≤ min(2^{-n}E, size)
};

/// Iterated stopping time, starting at the largest n0 with size ≤ 2^{-n0}·energy.
inline FullPartition full_partition(const CoefficientFamily& f, const SizeEnergyParams& p) {
    p.validate();
    FullPartition r;
    if (f.size() == 0) throw std::invalid_argument("full_partition: empty family");
    r.energy = energy(f, p);
    r.size = size(f, p);
    CoefficientFamily cur = f;
    if (r.energy == 0) {
        r.null_set = f.intervals;
    } else {
        int n = int(std::floor(std::log2(r.energy / r.size)));
        while (size(cur, p) > std::ldexp(r.energy, -n)) --n;
        for (; cur.size() > 0; ++n) {
            if (size(cur, p) == 0) {
                r.null_set = cur.intervals;
                break;
            }
            auto d = stopping_decomposition(f, cur, p, n);
            if (!d.verified) throw std::logic_error("stopping decomposition failed its own check");
            if (!d.trees.empty()) {
                PartitionLevel L;
                L.n = n;
                L.trees = d.trees;
                L.top_measure = d.top_measure;
                std::set<DyadicInterval> in;
                for (auto& T : d.trees) in.insert(T.members.begin(), T.members.end());
                L.size = size(restrict_family(f, [&](std::size_t t) { return in.count(f.intervals[t]) > 0; }), p);
                r.max_constant = std::max(r.max_constant, L.top_measure / std::ldexp(1.0, n));
                r.levels.push_back(std::move(L));
            }
            auto rs = detail::as_set(d.residual);
            cur = restrict_family(cur, [&](std::size_t t) { return rs.count(cur.intervals[t]) > 0; });
        }
    }
    std::multiset<DyadicInterval> seen(r.null_set.begin(), r.null_set.end());
    r.size_bounds = true;
    for (auto& L : r.levels) {
        for (auto& T : L.trees) seen.insert(T.members.begin(), T.members.end());
        if (L.size > std::min(std::ldexp(r.energy, -L.n), r.size)) r.size_bounds = false;
    }
    r.exact = seen == std::multiset<DyadicInterval>(f.intervals.begin(), f.intervals.end());
    return r;
}

// ---------------------------------------------------------------------------
// the size/energy estimate for Λ = Σ_J |J|^{-1/2} a1 a2 a3

struct AbstractEstimateReport {
    double lhs = 0, rhs = 0;
    std::array<double, 3> sizes{}, energies{};
    double ratio() const { return rhs > 0 ? lhs / rhs : (lhs > 0 ? INFINITY : 0.0); }
};

inline AbstractEstimateReport abstract_estimate_check(const std::array<CoefficientFamily, 3>& a, const SizeEnergyParams& base) {
    base.validate();
    for (int s = 1; s < 3; ++s)
        if (a[s].intervals != a[0].intervals) throw std::invalid_argument("families must share the interval collection");
    AbstractEstimateReport r;
    cplx lam{};
    for (std::size_t t = 0; t < a[0].size(); ++t)
        lam += a[0].a[t] * a[1].a[t] * a[2].a[t] / std::sqrt(a[0].intervals[t].length());
    r.lhs = std::abs(lam);
    r.rhs = 1;
    for (int s = 0; s < 3; ++s) {
        SizeEnergyParams p = base;
        p.i = s + 1;
        r.sizes[s] = size(a[s], p);
        r.energies[s] = energy(a[s], p);
        r.rhs *= std::pow(r.sizes[s], 1 - p.theta[s]) * std::pow(r.energies[s], p.theta[s]);
    }
    return r;
}

/// Random families on `count` distinct intervals of the ladder [kmin, 0], with a_J = |J|^{1/2}·g,
/// g standard complex Gaussian.
template <class Rng>
std::array<CoefficientFamily, 3> random_coefficient_families(std::size_t count, int kmin, Rng& rng) {
    auto pool = dyadic_ladder(kmin, 0);
    if (count > pool.size()) throw std::invalid_argument("not enough intervals in the ladder");
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    std::normal_distribution<double> nd;
    std::array<CoefficientFamily, 3> out;
    for (auto& f : out) {
        f.intervals = pool;
        for (auto& J : pool) f.a.push_back(std::sqrt(J.length()) * cplx(nd(rng), nd(rng)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// sets and the size/energy bounds in terms of measures

/// Union of grid cells.
struct MeasurableSet {
    TorusGrid grid;
    std::vector<char> cells;

    MeasurableSet() = default;
    explicit MeasurableSet(TorusGrid g, bool full = false) : grid(g), cells(g.N, full ? 1 : 0) {}
    double measure() const { return double(std::count(cells.begin(), cells.end(), 1)) / grid.N; }
    bool empty() const { return std::find(cells.begin(), cells.end(), 1) == cells.end(); }
    SampledFunction indicator() const {
        SampledFunction f(grid);
        for (int k = 0; k < grid.N; ++k) f[k] = cells[k] ? 1.0 : 0.0;
        return f;
    }
    bool contains(const MeasurableSet& o) const {
        for (int k = 0; k < grid.N; ++k)
            if (o.cells[k] && !cells[k]) return false;
        return true;
    }
    bool intersects(const MeasurableSet& o) const {
        for (int k = 0; k < grid.N; ++k)
            if (o.cells[k] && cells[k]) return true;
        return false;
    }
    static MeasurableSet from_interval(TorusGrid g, const DyadicInterval& J) {
        MeasurableSet s(g);
        for (std::int64_t c = J.first_cell(g.N); c < J.first_cell(g.N) + J.cell_count(g.N); ++c) s.cells[c] = 1;
        return s;
    }
};

/// Union of dyadic blocks of length 2^{-level}, each kept with probability p (never empty).
template <class Rng>
MeasurableSet random_dyadic_set(const TorusGrid& g, int level, double p, Rng& rng) {
    if ((std::int64_t{1} << level) > g.N) throw std::invalid_argument("block finer than the grid");
    MeasurableSet s(g);
    std::bernoulli_distribution keep(p);
    const int blocks = 1 << level, w = g.N / blocks;
    for (int b = 0; b < blocks; ++b)
        if (keep(rng))
            for (int c = 0; c < w; ++c) s.cells[b * w + c] = 1;
    if (s.empty()) {
        std::uniform_int_distribution<int> pick(0, blocks - 1);
        int b = pick(rng);
        for (int c = 0; c < w; ++c) s.cells[b * w + c] = 1;
    }
    return s;
}

/// A member of X(E): unimodular values with uniform random phase on E, zero elsewhere.
template <class Rng>
SampledFunction random_in_X(const MeasurableSet& E, Rng& rng) {
    std::uniform_real_distribution<double> ph(0, 2 * pi);
    SampledFunction f(E.grid);
    for (int k = 0; k < E.grid.N; ++k)
        if (E.cells[k]) f[k] = std::polar(1.0, ph(rng));
    return f;
}

/// (1/|J|) ∫_E (1 + dist(x,J)/|J|)^{−N}
inline double cutoff_average(const MeasurableSet& E, const DyadicInterval& J, int N_exp) {
    auto w = approx_cutoff(J, E.grid, N_exp);
    double s = 0;
    for (int k = 0; k < E.grid.N; ++k)
        if (E.cells[k]) s += w[k].real();
    return s / E.grid.N / J.length();
}

inline double sup_cutoff_average(const MeasurableSet& E, const std::vector<DyadicInterval>& iv, int N_exp) {
    double m = 0;
    for (auto& J : iv) m = std::max(m, cutoff_average(E, J, N_exp));
    return m;
}

/// a^{(i)}_J = ⟨f, Φ^i_J⟩ for i ∈ {1,2}.
inline CoefficientFamily slot_coefficients(const ModelConfig& c, int i, const SampledFunction& f) {
    if (i < 1 || i > 2) throw std::invalid_argument("slot must be 1 or 2");
    Spectrum s = dft(f);
    CoefficientFamily out;
    out.intervals = c.J[i - 1].intervals;
    for (auto& sp : c.J[i - 1].spectra) out.a.push_back(coefficient(s, sp));
    return out;
}

/// size_i ≲ sup_J (1/|J|)∫_E χ̃_J^N for f_{i+1} ∈ X(E), i ∈ {1,2}.
inline BoundReport size_bound_l3(const ModelConfig& c, int i, const SampledFunction& f, const MeasurableSet& E, int N_exp) {
    SizeEnergyParams p;
    p.j = c.nonlac_J, p.i = i;
    BoundReport r;
    if (E.empty()) return r;
    r.lhs = size(slot_coefficients(c, i, f), p);
    r.rhs = sup_cutoff_average(E, c.J[0].intervals, N_exp);
    return r;
}

/// energy_i ≲ |E| for f_{i+1} ∈ X(E), i ∈ {1,2}.
inline BoundReport energy_bound_l4(const ModelConfig& c, int i, const SampledFunction& f, const MeasurableSet& E) {
    SizeEnergyParams p;
    p.j = c.nonlac_J, p.i = i;
    BoundReport r;
    if (E.empty()) return r;
    r.lhs = energy(slot_coefficients(c, i, f), p);
    r.rhs = E.measure();
    return r;
}

namespace detail {
inline CoefficientFamily third_slot(const ModelConfig& c, Model m, const SampledFunction& f1, const SampledFunction& f4) {
    SampledFunction one(c.grid());
    return lambda1_coefficients(c, m, f1, one, one, f4).a3;
}
inline Model t1_variant(const ModelConfig& c) { return c.k0 ? Model::T1k0 : Model::T1; }
}  // namespace detail

/// size_3 ≲ (sup_J avg_{E1})^{1−θ}(sup_J avg_{E4})^θ for f1 ∈ X(E1), f4 ∈ X(E4).
inline BoundReport size_bound_l5(const ModelConfig& c, const SampledFunction& f1, const MeasurableSet& E1,
                                 const SampledFunction& f4, const MeasurableSet& E4, double theta, int N_exp) {
    SizeEnergyParams p;
    p.j = c.nonlac_J, p.i = 3;
    BoundReport r;
    if (E1.empty() || E4.empty()) return r;
    r.lhs = size(detail::third_slot(c, detail::t1_variant(c), f1, f4), p);
    r.rhs = std::pow(sup_cutoff_average(E1, c.J[0].intervals, N_exp), 1 - theta) *
            std::pow(sup_cutoff_average(E4, c.J[0].intervals, N_exp), theta);
    return r;
}

/// energy_3 ≲ (sup_I avg_{E1})^{1−θ1}(sup_I avg_{E4})^{1−θ2}|E1|^{θ1}|E4|^{θ2}, θ1 + θ2 = 1.
inline BoundReport energy_bound_l6(const ModelConfig& c, const SampledFunction& f1, const MeasurableSet& E1,
                                   const SampledFunction& f4, const MeasurableSet& E4, double theta1, int N_exp) {
    SizeEnergyParams p;
    p.j = c.nonlac_J, p.i = 3;
    BoundReport r;
    if (E1.empty() || E4.empty()) return r;
    const double theta2 = 1 - theta1;
    r.lhs = energy(detail::third_slot(c, detail::t1_variant(c), f1, f4), p);
    r.rhs = std::pow(sup_cutoff_average(E1, c.I[0].intervals, N_exp), 1 - theta1) *
            std::pow(sup_cutoff_average(E4, c.I[0].intervals, N_exp), 1 - theta2) * std::pow(E1.measure(), theta1) *
            std::pow(E4.measure(), theta2);
    return r;
}

}  // namespace fpp

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "grid.hpp"
#include "symbols.hpp"

namespace fpp {

// ---------------------------------------------------------------------------
// Truncated Taylor jets: c[l] = g^{(l)}(x)/l!

template <int K>
struct Jet {
    std::array<double, K + 1> c{};

    static Jet constant(double v) {
        Jet j;
        j.c[0] = v;
        return j;
    }
    static Jet variable(double x, double slope = 1.0) {
        Jet j;
        j.c[0] = x;
        if constexpr (K >= 1) j.c[1] = slope;
        return j;
    }
    double derivative(int l) const { return c[l] * std::tgamma(l + 1.0); }

    friend Jet operator+(Jet a, const Jet& b) {
        for (int i = 0; i <= K; ++i) a.c[i] += b.c[i];
        return a;
    }
    friend Jet operator-(Jet a, const Jet& b) {
        for (int i = 0; i <= K; ++i) a.c[i] -= b.c[i];
        return a;
    }
    friend Jet operator*(double s, Jet a) {
        for (auto& v : a.c) v *= s;
        return a;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int i = 0; i <= K; ++i)
            for (int j = 0; i + j <= K; ++j) r.c[i + j] += a.c[i] * b.c[j];
        return r;
    }
};

template <int K>
Jet<K> reciprocal(const Jet<K>& g) {
    if (g.c[0] == 0) throw std::domain_error("jet reciprocal of zero");
    Jet<K> r;
    r.c[0] = 1 / g.c[0];
    for (int n = 1; n <= K; ++n) {
        double s = 0;
        for (int i = 1; i <= n; ++i) s += g.c[i] * r.c[n - i];
        r.c[n] = -s / g.c[0];
    }
    return r;
}

template <int K>
Jet<K> exp(const Jet<K>& g) {
    // h' = g' h  ⇒  n·h_n = Σ_{i=1..n} i·g_i·h_{n−i}
    Jet<K> h;
    h.c[0] = std::exp(g.c[0]);
    for (int n = 1; n <= K; ++n) {
        double s = 0;
        for (int i = 1; i <= n; ++i) s += i * g.c[i] * h.c[n - i];
        h.c[n] = s / n;
    }
    return h;
}

namespace detail {

// e^{−1/x} for x > 0, flat zero otherwise
inline double flat(double x) { return x > 0 ? std::exp(-1 / x) : 0.0; }

template <int K>
Jet<K> flat(const Jet<K>& x) {
    if (x.c[0] <= 0) return Jet<K>{};
    return exp(-1.0 * reciprocal(x));
}

// C^∞ step: 0 for x ≤ 0, 1 for x ≥ 1
inline double smoothstep(double x) {
    double a = flat(x), b = flat(1 - x);
    return a / (a + b);
}

template <int K>
Jet<K> smoothstep(const Jet<K>& x) {
    auto a = flat(x), b = flat(Jet<K>::constant(1) - x);
    return a * reciprocal(a + b);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// window system

enum class Geometry { desk, narrow };

/// Square-root windows W_j: 1 on the core [j−1,j] (j>0) or [j,j+1] (j<0), smooth
/// transitions of width τ on both sides. Ψ̂_j = W_j². Coefficients live on a box
/// of side P around the core centre, sampled S times per side.
struct WindowSystem {
    Geometry geometry = Geometry::desk;
    int M = 8;
    int Q = 8;
    double tau = 2;
    double P = 5;
    int S = 80;
    double c0_floor = 0.05;  // ã below this makes a/ã unusable

    double h() const { return P / S; }
    void check_index(int j) const {
        if (j == 0 || std::abs(j) > M) throw std::invalid_argument("window index must be in ±1..±M");
    }
    double core_lo(int j) const { return j > 0 ? j - 1 : j; }
    double core_hi(int j) const { return j > 0 ? j : j + 1; }
    double centre(int j) const { return j > 0 ? j - 0.5 : j + 0.5; }
    double support_lo(int j) const { return core_lo(j) - tau; }
    double support_hi(int j) const { return core_hi(j) + tau; }

    double W(int j, double z) const {
        return detail::smoothstep((z - core_lo(j) + tau) / tau) * detail::smoothstep((core_hi(j) + tau - z) / tau);
    }
    template <int K>
    Jet<K> W(int j, const Jet<K>& z) const {
        auto a = (1 / tau) * (z - Jet<K>::constant(core_lo(j) - tau));
        auto b = (1 / tau) * (Jet<K>::constant(core_hi(j) + tau) - z);
        return detail::smoothstep(a) * detail::smoothstep(b);
    }
    double psi(int j, double z) const {
        double w = W(j, z);
        return w * w;
    }
    /// Σ_{0<|j|≤m} Ψ̂_j(u)
    double psi_sum(double u, int m) const {
        double s = 0;
        int jlo = std::max(-m, int(std::floor(u - tau)) - 1), jhi = std::min(m, int(std::ceil(u + tau)) + 1);
        for (int j = jlo; j <= jhi; ++j)
            if (j != 0) s += psi(j, u);
        return s;
    }
    /// the factor multiplying e_n in a piece: W (desk) or Ψ̂ (narrow)
    double piece(int j, double u) const { return geometry == Geometry::desk ? W(j, u) : psi(j, u); }
    /// inner/outer radius (in |·|_∞) of the max(|j₁|,|j₂|)=M shell
    double shell_lo() const { return M - 1 - tau; }
    double shell_hi() const { return M + tau; }
};

inline WindowSystem desk_windows(int M = 8, int Q = 8, double tau = 2) {
    if (M < 2) throw std::invalid_argument("M must be at least 2");
    if (Q < 1) throw std::invalid_argument("Q must be positive");
    WindowSystem w;
    w.geometry = Geometry::desk;
    w.M = M;
    w.Q = Q;
    w.tau = tau;
    w.P = 1 + 2 * tau;
    w.S = 80;
    if (w.shell_lo() <= 0) throw std::invalid_argument("M too small for the transition width");
    return w;
}

/// Narrow transitions (τ = 1/18) and the 10/9-period series of a/ã itself.
inline WindowSystem narrow_windows(int M = 8, int Q = 8) {
    if (M < 2) throw std::invalid_argument("M must be at least 2");
    WindowSystem w;
    w.geometry = Geometry::narrow;
    w.M = M;
    w.Q = Q;
    w.tau = 1.0 / 18;
    w.P = 10.0 / 9;
    w.S = 80;
    return w;
}

/// (1/Q) Σ_l Σ_{max(|j₁|,|j₂|)=M} Ψ̂_{j₁}(2^{−l/Q}x₁) Ψ̂_{j₂}(2^{−l/Q}x₂)
inline double atilde(const WindowSystem& w, double x1, double x2) {
    double r = std::max(std::abs(x1), std::abs(x2));
    if (r == 0) return 0;
    int lmin = int(std::floor(w.Q * std::log2(r / w.shell_hi()))) - 1;
    int lmax = int(std::ceil(w.Q * std::log2(r / w.shell_lo()))) + 1;
    double s = 0;
    for (int l = lmin; l <= lmax; ++l) {
        double f = std::exp2(-double(l) / w.Q);
        double u1 = f * x1, u2 = f * x2;
        s += w.psi_sum(u1, w.M) * w.psi_sum(u2, w.M) - w.psi_sum(u1, w.M - 1) * w.psi_sum(u2, w.M - 1);
    }
    return s / w.Q;
}

namespace detail {

/// ã(2^{κ/Q} z) for z on the lattice h·ℤ², through 1-D tables of the partial sums.
/// ã is exactly invariant under x ↦ 2^{1/Q}x, so λ drops out entirely.
class AtildeLattice {
public:
    explicit AtildeLattice(const WindowSystem& w) : w_(w) {
        imax_ = long(std::ceil((w.shell_hi() + w.P) / w.h())) + 2;
        smin_ = int(std::floor(w.Q * std::log2(w.shell_lo() / (imax_ * w.h())))) - 2;
        smax_ = w.Q * 1 + int(std::ceil(w.Q * std::log2(w.shell_hi() / w.h()))) + 2;
        const long width = 2 * imax_ + 1;
        sm_.assign(std::size_t(smax_ - smin_ + 1) * width, 0.0);
        sm1_.assign(sm_.size(), 0.0);
        for (int s = smin_; s <= smax_; ++s)
            for (long i = -imax_; i <= imax_; ++i) {
                double u = std::exp2(double(s) / w.Q) * i * w.h();
                sm_[idx(s, i)] = w.psi_sum(u, w.M);
                sm1_[idx(s, i)] = w.psi_sum(u, w.M - 1);
            }
    }
    long imax() const { return imax_; }

    /// ã(2^{κ/Q}·h·(i1,i2)); κ in 0..Q−1
    double value(int kappa, long i1, long i2) const {
        (void)kappa;  // ã(2^{1/Q}x) = ã(x): the l-sum runs over all integers
        long r = std::max(std::abs(i1), std::abs(i2));
        if (r == 0) return 0;
        // terms l with 2^{−l/Q}rz in the shell; shift s = κ − l satisfies 2^{s/Q} r h ∈ shell
        int lo = int(std::floor(w_.Q * std::log2(w_.shell_lo() / (r * w_.h())))) - 1;
        int hi = int(std::ceil(w_.Q * std::log2(w_.shell_hi() / (r * w_.h())))) + 1;
        double s = 0;
        for (int sh = std::max(lo, smin_); sh <= std::min(hi, smax_); ++sh)
            s += sm_[idx(sh, i1)] * sm_[idx(sh, i2)] - sm1_[idx(sh, i1)] * sm1_[idx(sh, i2)];
        return s / w_.Q;
    }

private:
    std::size_t idx(int s, long i) const { return std::size_t(s - smin_) * std::size_t(2 * imax_ + 1) + std::size_t(i + imax_); }
    WindowSystem w_;
    long imax_;
    int smin_, smax_;
    std::vector<double> sm_, sm1_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// partition

struct PartitionReport {
    Symbol atilde;  // tabulated on the frequency box
    int M = 0, Q = 0;
    double c0 = 0;             // min ã over the box minus |ξ|_∞ < 4
    double min_value = 0;      // min over the whole box (ã ≥ 0 check)
    double diagonal_spread = 0;  // max/min − 1 of ã(2^k(M−1/2)(1,1)) across k
    bool lower_bound_ok = false;  // c0 ≥ 0.1
    MihlinReport mihlin;
};

inline PartitionReport build_partition(int M, const TorusGrid& grid, int Q = 8, Geometry geom = Geometry::desk) {
    WindowSystem w = geom == Geometry::desk ? desk_windows(M, Q) : narrow_windows(M, Q);
    const int half = grid.N / 2;
    auto t = std::make_shared<SymbolTable>();
    t->d = 2;
    t->lo = {-half, -half};
    t->shape = {2 * half, 2 * half};
    t->values.resize(t->size());
    parallel_for(std::size_t(2 * half), [&](std::size_t r) {
        double x1 = double(long(r) - half);
        for (int c = 0; c < 2 * half; ++c) t->values[r * 2 * half + c] = atilde(w, x1, double(c - half));
    });
    PartitionReport rep;
    rep.M = M;
    rep.Q = Q;
    rep.c0 = INFINITY;
    rep.min_value = INFINITY;
    for (int r = 0; r < 2 * half; ++r)
        for (int c = 0; c < 2 * half; ++c) {
            double v = t->values[std::size_t(r) * 2 * half + c].real();
            rep.min_value = std::min(rep.min_value, v);
            if (std::max(std::abs(r - half), std::abs(c - half)) >= 4) rep.c0 = std::min(rep.c0, v);
        }
    rep.lower_bound_ok = rep.c0 >= 0.1;
    double lo = INFINITY, hi = 0;
    for (int k = -3; k <= 6; ++k) {
        double x = std::ldexp(M - 0.5, k), v = atilde(w, x, x);
        lo = std::min(lo, v), hi = std::max(hi, v);
    }
    rep.diagonal_spread = hi / lo - 1;
    Symbol s;
    s.d = 2;
    s.kind = SymbolKind::tabulated;
    s.name = "atilde";
    s.fn = [w](const double* x) { return cplx(atilde(w, x[0], x[1])); };
    s.table = t;
    rep.atilde = s;
    // windows have O(1) transitions at radius ~M, so |ξ|^{|α|}∂^α ã grows like M^{|α|}
    rep.mihlin = mihlin_check(s, 2, 50 * std::max(1.0, M * M / 4.0), std::min(half, 64));
    return rep;
}

// ---------------------------------------------------------------------------
// Fourier coefficients of a/ã on a window box

struct CoefficientSlice {
    int j1 = 0, j2 = 0;
    double lambda = 0;
    int nrange = 0;
    std::vector<cplx> C;  // (2R+1)², C[(n1+R)(2R+1) + n2+R]
    double decay_exponent = 0;  // −slope of log max_{|n|_∞=r}|C| vs log(1+r)
    double K5 = 0;              // max |C|(1+|n1|)^5(1+|n2|)^5
    double reconstruction_error = 0;  // relative, on the core, with all |n| ≤ R
    double min_atilde = 0;

    cplx at(int n1, int n2) const { return C[std::size_t(n1 + nrange) * (2 * nrange + 1) + std::size_t(n2 + nrange)]; }
};

namespace detail {

/// The full S×S coefficient grid (centred, n ∈ [−S/2, S/2)) plus the sampled
/// function and the division floor check.
struct CoefficientGrid {
    int S = 0;
    std::vector<cplx> C, F, a_core;  // a_core: a at samples (for reconstruction)
    std::vector<double> at;          // ã at samples
    double min_atilde = INFINITY;
};

inline CoefficientGrid coefficient_grid(const Symbol& a, const WindowSystem& w, const AtildeLattice& lat, int j1, int j2,
                                        double lambda) {
    w.check_index(j1);
    w.check_index(j2);
    if (std::max(std::abs(j1), std::abs(j2)) != w.M) throw std::invalid_argument("window pair must lie on the M shell");
    if (a.d != 2) throw std::invalid_argument("coefficients need an arity-2 symbol");
    const int S = w.S;
    const double h = w.h();
    const int k = int(std::floor(lambda));
    const int kappa = int(std::lround((lambda - k) * w.Q));
    if (std::abs(lambda - (k + double(kappa) / w.Q)) > 1e-12 || kappa >= w.Q)
        throw std::invalid_argument("λ must be a quadrature node l/Q");
    const long o1 = std::lround((w.centre(j1) - w.P / 2) / h), o2 = std::lround((w.centre(j2) - w.P / 2) / h);
    const double scale = std::exp2(lambda);
    CoefficientGrid g;
    g.S = S;
    g.F.assign(std::size_t(S) * S, 0.0);
    g.a_core.assign(g.F.size(), 0.0);
    g.at.assign(g.F.size(), 0.0);
    for (int p = 0; p < S; ++p)
        for (int q = 0; q < S; ++q) {
            double z1 = (o1 + p) * h, z2 = (o2 + q) * h;
            double win = w.geometry == Geometry::desk ? w.W(j1, z1) * w.W(j2, z2) : 1.0;
            if (win == 0) continue;
            double at = lat.value(kappa, o1 + p, o2 + q);
            g.min_atilde = std::min(g.min_atilde, at);
            if (at < w.c0_floor) throw std::domain_error("ã below the division floor: partition too coarse");
            double x[2] = {scale * z1, scale * z2};
            cplx av = eval_real(a, x);
            g.a_core[std::size_t(p) * S + q] = av;
            g.at[std::size_t(p) * S + q] = at;
            g.F[std::size_t(p) * S + q] = av / at * win;
        }
    // C_n = S^{-2} Σ F(z) e^{−2πi n·(z−c)/P}, (z−c)/P = p/S − 1/2
    std::vector<cplx> v = g.F;
    fft2_inplace(v, S, S, FFTW_FORWARD);
    g.C.assign(v.size(), 0.0);
    for (int n1 = -S / 2; n1 < S / 2; ++n1)
        for (int n2 = -S / 2; n2 < S / 2; ++n2) {
            cplx c = v[std::size_t((n1 + S) % S) * S + (n2 + S) % S] / double(S * S);
            if ((n1 + n2) % 2) c = -c;
            g.C[std::size_t(n1 + S / 2) * S + (n2 + S / 2)] = c;
        }
    return g;
}

inline double fit_decay(const std::vector<double>& env) {
    double top = *std::max_element(env.begin(), env.end());
    std::vector<double> xs, ys;
    for (std::size_t r = 0; r < env.size(); ++r)
        if (env[r] > 1e-14 * top) xs.push_back(std::log1p(double(r))), ys.push_back(std::log(env[r]));
    if (xs.size() < 2) return INFINITY;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= xs.size(), my /= ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    return -sxy / sxx;
}

}  // namespace detail

inline CoefficientSlice fourier_coefficients(const Symbol& a, const WindowSystem& w, int j1, int j2, double lambda,
                                             int nrange, const detail::AtildeLattice* lattice = nullptr) {
    if (nrange < 1 || 2 * nrange >= w.S) throw std::invalid_argument("n-range must be in 1..S/2−1");
    std::optional<detail::AtildeLattice> own;
    if (!lattice) lattice = &own.emplace(w);
    auto g = detail::coefficient_grid(a, w, *lattice, j1, j2, lambda);
    const int S = w.S, R = nrange, L = 2 * R + 1;
    CoefficientSlice s;
    s.j1 = j1, s.j2 = j2, s.lambda = lambda, s.nrange = R, s.min_atilde = g.min_atilde;
    s.C.resize(std::size_t(L) * L);
    std::vector<double> env(R + 1, 0.0);
    for (int n1 = -R; n1 <= R; ++n1)
        for (int n2 = -R; n2 <= R; ++n2) {
            cplx c = g.C[std::size_t(n1 + S / 2) * S + (n2 + S / 2)];
            s.C[std::size_t(n1 + R) * L + (n2 + R)] = c;
            int r = std::max(std::abs(n1), std::abs(n2));
            env[r] = std::max(env[r], std::abs(c));
            s.K5 = std::max(s.K5, std::abs(c) * std::pow((1.0 + std::abs(n1)) * (1.0 + std::abs(n2)), 5));
        }
    s.decay_exponent = detail::fit_decay(env);
    // resum |n| ≤ R on the sample lattice and compare ã·series with a on the core
    std::vector<cplx> v(std::size_t(S) * S, 0.0);
    for (int n1 = -R; n1 <= R; ++n1)
        for (int n2 = -R; n2 <= R; ++n2) {
            cplx c = s.at(n1, n2);
            if ((n1 + n2) % 2) c = -c;
            v[std::size_t((n1 + S) % S) * S + (n2 + S) % S] = c;
        }
    fft2_inplace(v, S, S, FFTW_BACKWARD);
    const double h = w.h();
    double err = 0, mag = 0;
    for (int p = 0; p < S; ++p)
        for (int q = 0; q < S; ++q) {
            double z1 = w.centre(j1) - w.P / 2 + p * h, z2 = w.centre(j2) - w.P / 2 + q * h;
            if (std::abs(z1 - w.centre(j1)) > 0.5 || std::abs(z2 - w.centre(j2)) > 0.5) continue;
            std::size_t i = std::size_t(p) * S + q;
            err = std::max(err, std::abs(g.at[i] * v[i] - g.a_core[i]));
            mag = std::max(mag, std::abs(g.a_core[i]));
        }
    s.reconstruction_error = mag > 0 ? err / mag : err;
    return s;
}

// ---------------------------------------------------------------------------
// three-way split of a(ξ₁,ξ₂)·b(ξ₂,ξ₃)

namespace detail {

/// Per-scale pieces A_k(x,y) = Σ_κ A_{k+κ/Q}(x,y) on {−half..half−1}², with the
/// coefficient grids computed once and truncated on demand.
class ScaleSeries {
public:
    ScaleSeries(const Symbol& a, const WindowSystem& w, int half) : w_(w), half_(half) {
        AtildeLattice lat(w);
        double rmax = half * 1.0;
        kmin_ = int(std::floor(std::log2(1.0 / w.shell_hi()))) - 1;
        kmax_ = int(std::ceil(std::log2(rmax / w.shell_lo()))) + 1;
        std::vector<std::tuple<int, int, int, int>> jobs;  // k, κ, j1, j2
        for (int k = kmin_; k <= kmax_; ++k)
            for (int kap = 0; kap < w.Q; ++kap)
                for (int j1 = -w.M; j1 <= w.M; ++j1)
                    for (int j2 = -w.M; j2 <= w.M; ++j2) {
                        if (!j1 || !j2 || std::max(std::abs(j1), std::abs(j2)) != w.M) continue;
                        double lam = k + double(kap) / w.Q;
                        if (rows(j1, lam).empty() || rows(j2, lam).empty()) continue;
                        jobs.emplace_back(k, kap, j1, j2);
                    }
        cells_.resize(jobs.size());
        parallel_for(jobs.size(), [&](std::size_t i) {
            auto [k, kap, j1, j2] = jobs[i];
            double lam = k + double(kap) / w.Q;
            Cell c;
            c.k = k, c.lambda = lam, c.j1 = j1, c.j2 = j2;
            c.grid = coefficient_grid(a, w, lat, j1, j2, lam);
            cells_[i] = std::move(c);
        });
    }

    int kmin() const { return kmin_; }
    int kmax() const { return kmax_; }

    /// tables[k − kmin] over the box, truncated to |n|_∞ ≤ R
    std::vector<std::vector<cplx>> tables(int R) const {
        const int side = 2 * half_, nk = kmax_ - kmin_ + 1;
        std::vector<std::vector<cplx>> part(cells_.size());
        parallel_for(cells_.size(), [&](std::size_t i) { part[i] = evaluate(cells_[i], R); });
        std::vector<std::vector<cplx>> out(nk, std::vector<cplx>(std::size_t(side) * side, 0.0));
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            auto& t = out[cells_[i].k - kmin_];
            for (std::size_t p = 0; p < t.size(); ++p) t[p] += part[i][p];
        }
        return out;
    }

private:
    struct Cell {
        int k = 0, j1 = 0, j2 = 0;
        double lambda = 0;
        CoefficientGrid grid;
    };

    std::vector<int> rows(int j, double lam) const {
        std::vector<int> r;
        double f = std::exp2(-lam);
        for (int x = -half_; x < half_; ++x) {
            double u = f * x;
            if (u > w_.support_lo(j) && u < w_.support_hi(j) && w_.piece(j, u) != 0) r.push_back(x);
        }
        return r;
    }

    std::vector<cplx> evaluate(const Cell& c, int R) const {
        const int side = 2 * half_, S = c.grid.S, L = 2 * R + 1;
        auto r1 = rows(c.j1, c.lambda), r2 = rows(c.j2, c.lambda);
        const double f = std::exp2(-c.lambda);
        auto basis = [&](int j, const std::vector<int>& rs) {
            std::vector<cplx> E(rs.size() * L);
            for (std::size_t i = 0; i < rs.size(); ++i) {
                double u = f * rs[i], pc = w_.piece(j, u), ph = 2 * pi * (u - w_.centre(j)) / w_.P;
                for (int n = -R; n <= R; ++n) E[i * L + (n + R)] = pc * std::polar(1.0, ph * n);
            }
            return E;
        };
        auto E1 = basis(c.j1, r1), E2 = basis(c.j2, r2);
        // T = C·E2ᵀ  (L × |r2|), then out = E1·T
        std::vector<cplx> T(std::size_t(L) * r2.size(), 0.0);
        for (int n1 = -R; n1 <= R; ++n1)
            for (int n2 = -R; n2 <= R; ++n2) {
                cplx cv = c.grid.C[std::size_t(n1 + S / 2) * S + (n2 + S / 2)];
                if (cv == cplx{}) continue;
                for (std::size_t q = 0; q < r2.size(); ++q) T[std::size_t(n1 + R) * r2.size() + q] += cv * E2[q * L + (n2 + R)];
            }
        std::vector<cplx> out(std::size_t(side) * side, 0.0);
        for (std::size_t p = 0; p < r1.size(); ++p)
            for (std::size_t q = 0; q < r2.size(); ++q) {
                cplx acc{};
                for (int n = 0; n < L; ++n) acc += E1[p * L + n] * T[std::size_t(n) * r2.size() + q];
                out[std::size_t(r1[p] + half_) * side + (r2[q] + half_)] = acc / double(w_.Q);
            }
        return out;
    }

    WindowSystem w_;
    int half_;
    int kmin_ = 0, kmax_ = 0;
    std::vector<Cell> cells_;
};

inline Symbol box_symbol(std::string name, std::vector<cplx> values, int half) {
    SymbolTable t;
    t.d = 3;
    t.lo = {-half, -half, -half};
    t.shape = {2 * half, 2 * half, 2 * half};
    t.values = std::move(values);
    return table_symbol(std::move(name), std::move(t));
}

}  // namespace detail

struct SplitSymbols {
    Symbol m1, m2, m3;
    int sep = 0, nrange = 0, half = 0;
    double error = 0;  // max|m1+m2+m3 − ab| / max|ab| away from the degenerate planes
    double trunc = 0;
    bool pass = false;
};

struct SplitSweep {
    std::vector<int> nranges;
    std::vector<double> errors;
    bool monotone = false;
};

namespace detail {

inline SplitSymbols assemble_split(const std::vector<std::vector<cplx>>& A, const std::vector<std::vector<cplx>>& B,
                                   int kmin_a, int kmin_b, const Symbol& a, const Symbol& b, int sep, int half) {
    const int side = 2 * half;
    const std::size_t plane = std::size_t(side) * side;
    // cumulative sums indexed by absolute scale
    auto cumulative = [&](const std::vector<std::vector<cplx>>& T) {
        std::vector<std::vector<cplx>> c(T.size(), std::vector<cplx>(plane, 0.0));
        for (std::size_t k = 0; k < T.size(); ++k)
            for (std::size_t p = 0; p < plane; ++p) c[k][p] = (k ? c[k - 1][p] : cplx{}) + T[k][p];
        return c;
    };
    auto cA = cumulative(A), cB = cumulative(B);
    auto cum_at = [&](const std::vector<std::vector<cplx>>& c, int kmin, int kk, std::size_t p) -> cplx {
        int i = kk - kmin;
        if (i < 0) return 0;
        if (i >= int(c.size())) i = int(c.size()) - 1;
        return c[i][p];
    };
    std::vector<cplx> v1(plane * side), v2(plane * side), v3(plane * side);
    std::vector<double> err(side, 0.0), mag(side, 0.0);
    parallel_for(std::size_t(side), [&](std::size_t i1) {
        for (int i2 = 0; i2 < side; ++i2)
            for (int i3 = 0; i3 < side; ++i3) {
                std::size_t pa = i1 * side + i2, pb = std::size_t(i2) * side + i3;
                cplx s1{}, s2{}, s3{};
                for (std::size_t ka = 0; ka < A.size(); ++ka) {
                    int kp = kmin_a + int(ka);
                    cplx av = A[ka][pa];
                    if (av == cplx{}) continue;
                    s1 += av * cum_at(cB, kmin_b, kp - sep, pb);
                    // |k′ − k″| < sep
                    cplx band = cum_at(cB, kmin_b, kp + sep - 1, pb) - cum_at(cB, kmin_b, kp - sep, pb);
                    s3 += av * band;
                }
                for (std::size_t kb = 0; kb < B.size(); ++kb) {
                    int kpp = kmin_b + int(kb);
                    cplx bv = B[kb][pb];
                    if (bv == cplx{}) continue;
                    s2 += bv * cum_at(cA, kmin_a, kpp - sep, pa);
                }
                std::size_t idx = (i1 * side + i2) * side + i3;
                v1[idx] = s1, v2[idx] = s2, v3[idx] = s3;
                long x1 = long(i1) - half, x2 = i2 - half, x3 = i3 - half;
                if ((x1 == 0 && x2 == 0) || (x2 == 0 && x3 == 0)) continue;
                double p1[2] = {double(x1), double(x2)}, p2[2] = {double(x2), double(x3)};
                cplx ab = eval_real(a, p1) * eval_real(b, p2);
                err[i1] = std::max(err[i1], std::abs(s1 + s2 + s3 - ab));
                mag[i1] = std::max(mag[i1], std::abs(ab));
            }
    });
    SplitSymbols out;
    out.sep = sep;
    out.half = half;
    double e = *std::max_element(err.begin(), err.end()), m = *std::max_element(mag.begin(), mag.end());
    out.error = m > 0 ? e / m : e;
    out.m1 = box_symbol("m1", std::move(v1), half);
    out.m2 = box_symbol("m2", std::move(v2), half);
    out.m3 = box_symbol("m3", std::move(v3), half);
    return out;
}

}  // namespace detail

/// m₁: k′ ≥ k″+#, m₂: k″ ≥ k′+#, m₃: |k′−k″| < #, tabulated on {−half..half−1}³.
/// Pairs whose ξ₂-supports cannot meet contribute exact zeros and are skipped.
inline SplitSymbols split_product(const Symbol& a, const Symbol& b, const WindowSystem& w, int sep, int nrange,
                                  double trunc, int half = 32) {
    if (sep < 2) throw std::invalid_argument("separation # must be at least 2");
    if (a.d != 2 || b.d != 2) throw std::invalid_argument("split_product needs arity-2 factors");
    detail::ScaleSeries sa(a, w, half), sb(b, w, half);
    auto out = detail::assemble_split(sa.tables(nrange), sb.tables(nrange), sa.kmin(), sb.kmin(), a, b, sep, half);
    out.nrange = nrange;
    out.trunc = trunc;
    out.pass = out.error <= trunc;
    return out;
}

/// Reconstruction error over several n-ranges, sharing the coefficient grids.
inline SplitSweep split_sweep(const Symbol& a, const Symbol& b, const WindowSystem& w, int sep,
                              const std::vector<int>& nranges, int half = 32) {
    detail::ScaleSeries sa(a, w, half), sb(b, w, half);
    SplitSweep s;
    s.nranges = nranges;
    for (int R : nranges)
        s.errors.push_back(
            detail::assemble_split(sa.tables(R), sb.tables(R), sa.kmin(), sb.kmin(), a, b, sep, half).error);
    s.monotone = true;
    for (std::size_t i = 1; i < s.errors.size(); ++i) s.monotone = s.monotone && s.errors[i] < s.errors[i - 1];
    return s;
}

// ---------------------------------------------------------------------------
// Taylor split of Ψ̂(u − 2^{−g}v)

struct TaylorReport {
    int Mt = 0, gap = 0;
    std::vector<double> term_coefficient;  // max |Ψ̂^{(l)}(u) v^l / l!|; the l-th term is 2^{−g l} times this
    double remainder_max = 0;               // max |R(u,v)|
    double constant = 0;                    // remainder_max / 2^{−g·Mt}
    double identity_error = 0;              // |Σ terms + R − Ψ̂(u−h)|, R from the integral form (u subsampled)
    double expansion_point_error = 0;       // l=0 term at v=0 vs the unexpanded value
};

namespace detail {
// Gauss–Legendre nodes on [0,1], 16 points
inline const std::array<std::pair<double, double>, 16>& gauss16() {
    static const auto t = [] {
        std::array<std::pair<double, double>, 16> r{};
        const int n = 16;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1, p1 = p2;
                }
                double dp = n * (x * p1 - p0) / (x * x - 1);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1, p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1);
            r[i] = {(1 - x) / 2, 1 / ((1 - x * x) * dp * dp)};
        }
        return r;
    }();
    return t;
}
}  // namespace detail

/// Expansion of the j=1 window Ψ̂(u − h), h = 2^{−(k′−k″)}v, v over the window range.
inline TaylorReport taylor_split(const WindowSystem& w, int Mt, int kp, int kpp, int sep = 2) {
    if (Mt < 1 || Mt > 4) throw std::invalid_argument("Taylor order must be in 1..4");
    if (kp < kpp + sep) throw std::invalid_argument("need k' >= k'' + #");
    constexpr int K = 5;
    TaylorReport rep;
    rep.Mt = Mt;
    rep.gap = kp - kpp;
    rep.term_coefficient.assign(Mt, 0.0);
    const double hscale = std::exp2(-double(rep.gap));
    const double vmax = w.M + w.tau;
    const int nu = 801, nv = 41;
    auto psi_jet = [&](double u) {
        auto W = w.W(1, Jet<K>::variable(u));
        return W * W;
    };
    std::vector<double> rem(nu, 0.0), ide(nu, 0.0);
    std::vector<std::vector<double>> coef(nu, std::vector<double>(Mt, 0.0));
    parallel_for(std::size_t(nu), [&](std::size_t iu) {
        double u = w.support_lo(1) + (w.support_hi(1) - w.support_lo(1)) * double(iu) / (nu - 1);
        auto J = psi_jet(u);
        for (int iv = 0; iv < nv; ++iv) {
            double v = -vmax + 2 * vmax * iv / (nv - 1), h = hscale * v;
            double main = 0, pw = 1;
            for (int l = 0; l < Mt; ++l) {
                coef[iu][l] = std::max(coef[iu][l], std::abs(J.c[l] * std::pow(-v, l)));
                main += J.c[l] * pw;
                pw *= -h;
            }
            double exact = w.psi(1, u - h);
            double R = exact - main;
            rem[iu] = std::max(rem[iu], std::abs(R));
            // R = (−h)^{Mt}/(Mt−1)! ∫₀¹ (1−t)^{Mt−1} Ψ̂^{(Mt)}(u − t h) dt, checked on every 8th u
            if (iu % 8) continue;
            constexpr int panels = 16;
            double integral = 0;
            for (int p = 0; p < panels; ++p)
                for (auto [t0, wt] : detail::gauss16()) {
                    double t = (p + t0) / panels;
                    auto Jt = psi_jet(u - t * h);
                    integral += wt / panels * std::pow(1 - t, Mt - 1) * Jt.c[Mt] * std::tgamma(Mt + 1.0);
                }
            double Rint = std::pow(-h, Mt) / std::tgamma(double(Mt)) * integral;
            ide[iu] = std::max(ide[iu], std::abs(main + Rint - exact));
        }
    });
    for (int iu = 0; iu < nu; ++iu) {
        rep.remainder_max = std::max(rep.remainder_max, rem[iu]);
        rep.identity_error = std::max(rep.identity_error, ide[iu]);
        for (int l = 0; l < Mt; ++l) rep.term_coefficient[l] = std::max(rep.term_coefficient[l], coef[iu][l]);
    }
    rep.constant = rep.remainder_max / std::pow(hscale, Mt);
    for (int iu = 0; iu < nu; ++iu) {
        double u = w.support_lo(1) + (w.support_hi(1) - w.support_lo(1)) * double(iu) / (nu - 1);
        rep.expansion_point_error = std::max(rep.expansion_point_error, std::abs(psi_jet(u).c[0] - w.psi(1, u)));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// exact discretization identities

struct IdentityReport {
    cplx lhs{}, rhs{};
    double deviation = 0;  // |lhs − rhs|
    double scale = 0;      // roundoff scale: the discretized side summed in absolute values
    double relative() const { return scale > 0 ? deviation / scale : deviation; }
};

namespace detail {
struct Support {
    std::vector<int> xi;
    std::vector<cplx> c;
};
inline Support nonzero(const Spectrum& s) {
    Support out;
    auto cl = clean_spectrum(s);
    for (int x = cl.lo(); x <= cl.hi(); ++x)
        if (cl[x] != cplx{}) out.xi.push_back(x), out.c.push_back(cl[x]);
    return out;
}
inline void require_budget(std::initializer_list<const SampledFunction*> fs) {
    require_same_grid(fs);
    int total = 0;
    for (auto* f : fs) total += bandwidth(dft(*f));
    if (2 * total >= (*fs.begin())->grid.N) throw std::domain_error("bandwidth budget violated: sum of bandwidths must be < N/2");
}
}  // namespace detail

/// Σ_{ξ₁+ξ₂+ξ₃+ξ₄=0} η̂₁η̂₂η̂₃η̂₄(ξ) η̂₁₄(ξ₁+ξ₄) η̂₂₃(ξ₂+ξ₃) Πf̂ⱼ(ξⱼ)  vs
/// ∫ [(f₁*η₁)(f₄*η₄)]*η₁₄ · [(f₂*η₂)(f₃*η₃)]*η₂₃.
inline IdentityReport verify_calc1(const std::array<SampledFunction, 4>& eta, const SampledFunction& eta14,
                                   const SampledFunction& eta23, const std::array<SampledFunction, 4>& f) {
    detail::require_budget({&f[0], &f[1], &f[2], &f[3]});
    detail::require_same_grid({&eta[0], &eta[1], &eta[2], &eta[3], &eta14, &eta23, &f[0]});
    std::array<Spectrum, 4> e;
    std::array<detail::Support, 4> s;
    for (int j = 0; j < 4; ++j) e[j] = dft(eta[j]), s[j] = detail::nonzero(dft(f[j]));
    auto e14 = dft(eta14), e23 = dft(eta23);
    IdentityReport r;
    for (std::size_t a = 0; a < s[0].xi.size(); ++a)
        for (std::size_t b = 0; b < s[1].xi.size(); ++b)
            for (std::size_t c = 0; c < s[2].xi.size(); ++c) {
                long x1 = s[0].xi[a], x2 = s[1].xi[b], x3 = s[2].xi[c], x4 = -(x1 + x2 + x3);
                auto it = std::lower_bound(s[3].xi.begin(), s[3].xi.end(), int(x4));
                if (it == s[3].xi.end() || *it != x4) continue;
                cplx f4 = s[3].c[it - s[3].xi.begin()];
                cplx t = e[0][int(x1)] * e[1][int(x2)] * e[2][int(x3)] * e[3][int(x4)] * e14.at_or_zero(x1 + x4) *
                         e23.at_or_zero(x2 + x3) * s[0].c[a] * s[1].c[b] * s[2].c[c] * f4;
                r.lhs += t;
            }
    auto mul = [](SampledFunction x, const SampledFunction& y) {
        for (int k = 0; k < x.grid.N; ++k) x[k] *= y[k];
        return x;
    };
    auto L = convolve(mul(convolve(f[0], eta[0]), convolve(f[3], eta[3])), eta14);
    auto Rr = convolve(mul(convolve(f[1], eta[1]), convolve(f[2], eta[2])), eta23);
    for (int k = 0; k < L.grid.N; ++k) {
        r.rhs += L[k] * Rr[k] / double(L.grid.N);
        r.scale += std::abs(L[k] * Rr[k]) / double(L.grid.N);
    }
    r.deviation = std::abs(r.lhs - r.rhs);
    return r;
}

/// L¹-normalized bump at physical scale `len`: len^{-1} φ((x − centre)/len) periodized,
/// φ(y) = e^{−π y²}·e^{2πi·freq·y}.
inline SampledFunction l1_bump(const TorusGrid& g, double len, double centre = 0, double freq = 0) {
    SampledFunction out(g);
    for (int k = 0; k < g.N; ++k) {
        cplx s{};
        for (int p = -8; p <= 8; ++p) {
            double y = (g.x(k) + p - centre) / len;
            if (std::abs(y) > 12) continue;
            s += std::exp(-pi * y * y) * std::polar(1.0, 2 * pi * freq * y);
        }
        out[k] = s / len;
    }
    return out;
}

namespace detail {
// ⟨F, Φ_{I,t}⟩ with Φ_{I,t}(y) = |I|^{1/2}·conj(Φ(x_I + t|I| − y)), at grid offset x = cell index
inline cplx tile_coefficient(const SampledFunction& F, const SampledFunction& Phi, int xcell, double len) {
    const int N = F.grid.N;
    cplx s{};
    for (int y = 0; y < N; ++y) s += F[y] * Phi[((xcell - y) % N + N) % N];
    return std::sqrt(len) * s / double(N);
}
}  // namespace detail

/// ∫Π(F_j*Φ_j) vs the discrete t-average of Σ_{|I|=2^k}|I|^{−1/2}Π⟨F_j,Φ_{I,t,j}⟩,
/// t over the 2^k·N grid offsets inside one interval.
inline IdentityReport verify_calc2(const std::array<SampledFunction, 3>& F, const std::array<SampledFunction, 3>& Phi,
                                   int k) {
    detail::require_same_grid({&F[0], &F[1], &F[2], &Phi[0], &Phi[1], &Phi[2]});
    const int N = F[0].grid.N;
    if (k > 0 || std::ldexp(double(N), k) < 1) throw std::invalid_argument("scale 2^k must be grid representable");
    const int cells = int(std::ldexp(double(N), k));  // grid offsets per interval
    const int count = N / cells;                      // intervals
    const double len = std::ldexp(1.0, k);
    IdentityReport r;
    std::array<SampledFunction, 3> G;
    for (int j = 0; j < 3; ++j) G[j] = convolve(F[j], Phi[j]);
    for (int x = 0; x < N; ++x) r.lhs += G[0][x] * G[1][x] * G[2][x] / double(N);
    std::vector<cplx> terms(std::size_t(cells) * count);
    parallel_for(terms.size(), [&](std::size_t i) {
        int t = int(i % cells), n = int(i / cells);
        int xcell = n * cells + t;
        cplx p = 1;
        for (int j = 0; j < 3; ++j) p *= detail::tile_coefficient(F[j], Phi[j], xcell, len);
        terms[i] = p / std::sqrt(len);
    });
    for (auto& t : terms) {
        r.rhs += t / double(cells);
        r.scale += std::abs(t) / double(cells);
    }
    r.deviation = std::abs(r.lhs - r.rhs);
    return r;
}

struct Calc3Bumps {
    SampledFunction psi1, psi4, psi14;  // L¹-normalized, scale 2^{−k′}
    SampledFunction psi2, psi3, psi23;  // L¹-normalized, scale 2^{−k″}
};

/// Constrained frequency sum vs the double tile sum with inner B_{k″}(f₂,f₃):
///   avg_{t′} Σ_{|I|=2^{−k′}} |I|^{−1/2}⟨f₁,Ψ_{I,t′,1}⟩⟨B,Ψ̃_{I,t′,14}⟩⟨f₄,Ψ_{I,t′,4}⟩,
///   B = avg_{t″} Σ_{|J|=2^{−k″}} |J|^{−1/2}⟨f₂,Ψ_{J,t″,2}⟩⟨f₃,Ψ_{J,t″,3}⟩·conj(Ψ̃_{J,t″,23}),
///   Ψ̃_{I,t′,14}(y) = |I|^{1/2}conj(Ψ₁₄(y − x_I − t′|I|)).
inline IdentityReport verify_calc3(const Calc3Bumps& b, const std::array<SampledFunction, 4>& f, int kp, int kpp,
                                   int sep = 2) {
    if (kp < kpp + sep) throw std::invalid_argument("need k' >= k'' + #");
    detail::require_budget({&f[0], &f[1], &f[2], &f[3]});
    const int N = f[0].grid.N;
    if (kpp < 0 || std::ldexp(1.0, kp) > N) throw std::invalid_argument("scales must be grid representable");
    const int cI = int(std::ldexp(double(N), -kp)), cJ = int(std::ldexp(double(N), -kpp));
    const double lI = std::ldexp(1.0, -kp), lJ = std::ldexp(1.0, -kpp);
    IdentityReport r;
    // frequency side
    {
        std::array<Spectrum, 4> e{dft(b.psi1), dft(b.psi2), dft(b.psi3), dft(b.psi4)};
        auto e14 = dft(b.psi14), e23 = dft(b.psi23);
        std::array<detail::Support, 4> s;
        for (int j = 0; j < 4; ++j) s[j] = detail::nonzero(dft(f[j]));
        for (std::size_t i = 0; i < s[0].xi.size(); ++i)
            for (std::size_t j = 0; j < s[1].xi.size(); ++j)
                for (std::size_t l = 0; l < s[2].xi.size(); ++l) {
                    long x1 = s[0].xi[i], x2 = s[1].xi[j], x3 = s[2].xi[l], x4 = -(x1 + x2 + x3);
                    auto it = std::lower_bound(s[3].xi.begin(), s[3].xi.end(), int(x4));
                    if (it == s[3].xi.end() || *it != x4) continue;
                    r.lhs += e[0][int(x1)] * e[1][int(x2)] * e[2][int(x3)] * e[3][int(x4)] * e14.at_or_zero(x1 + x4) *
                             e23.at_or_zero(x2 + x3) * s[0].c[i] * s[1].c[j] * s[2].c[l] * s[3].c[it - s[3].xi.begin()];
                }
    }
    // B_{k″}(f₂,f₃) on the grid
    // Babs: the same sum in absolute values, for the roundoff scale
    SampledFunction B(f[0].grid);
    std::vector<double> Babs(N, 0.0);
    {
        std::vector<std::vector<cplx>> part(N);
        parallel_for(std::size_t(N), [&](std::size_t xcell) {
            cplx c = detail::tile_coefficient(f[1], b.psi2, int(xcell), lJ) *
                     detail::tile_coefficient(f[2], b.psi3, int(xcell), lJ) / std::sqrt(lJ);
            std::vector<cplx> contrib(N);
            // conj(Ψ̃_{J,t″,23})(x) = |J|^{1/2} Ψ₂₃(x − x_J − t″|J|)
            for (int x = 0; x < N; ++x) contrib[x] = c * std::sqrt(lJ) * b.psi23[((x - int(xcell)) % N + N) % N] / double(cJ);
            part[xcell] = std::move(contrib);
        });
        for (int xc = 0; xc < N; ++xc)
            for (int x = 0; x < N; ++x) B[x] += part[xc][x], Babs[x] += std::abs(part[xc][x]);
    }
    // outer tile sum
    std::vector<cplx> terms(N);
    std::vector<double> mags(N);
    parallel_for(std::size_t(N), [&](std::size_t xcell) {
        cplx a1 = detail::tile_coefficient(f[0], b.psi1, int(xcell), lI);
        cplx a4 = detail::tile_coefficient(f[3], b.psi4, int(xcell), lI);
        // ⟨B, Ψ̃_{I,t′,14}⟩ = ∫ B(y)·|I|^{1/2}Ψ₁₄(y − x) dy
        cplx mid{};
        double mid_abs = 0;
        for (int y = 0; y < N; ++y) {
            cplx p = b.psi14[((y - int(xcell)) % N + N) % N];
            mid += B[y] * p;
            mid_abs += Babs[y] * std::abs(p);
        }
        mid *= std::sqrt(lI) / double(N);
        mid_abs *= std::sqrt(lI) / double(N);
        terms[xcell] = a1 * mid * a4 / std::sqrt(lI);
        mags[xcell] = std::abs(a1) * mid_abs * std::abs(a4) / std::sqrt(lI);
    });
    for (int x = 0; x < N; ++x) {
        r.rhs += terms[x] / double(cI);
        r.scale += mags[x] / double(cI);
    }
    r.deviation = std::abs(r.lhs - r.rhs);
    return r;
}

}  // namespace fpp

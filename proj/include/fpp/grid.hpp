#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "common.hpp"
#include "dyadic_interval.hpp"

namespace fpp {

/// N-point periodic grid, x_k = k/N.
struct TorusGrid {
    int N = 8;
    TorusGrid() = default;
    explicit TorusGrid(int n) : N(n) {
        if (n < 8 || !is_pow2(n)) throw std::invalid_argument("grid size must be a power of two >= 8");
    }
    double x(int k) const { return double(k) / N; }
    bool operator==(const TorusGrid&) const = default;
};

struct SampledFunction {
    TorusGrid grid;
    std::vector<cplx> values;

    SampledFunction() = default;
    explicit SampledFunction(TorusGrid g) : grid(g), values(g.N, cplx{}) {}
    SampledFunction(TorusGrid g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
        if (int(values.size()) != grid.N) throw std::invalid_argument("length(values) != N");
    }
    int size() const { return grid.N; }
    cplx& operator[](int k) { return values[k]; }
    const cplx& operator[](int k) const { return values[k]; }
};

/// Fourier coefficients on centred frequencies −N/2..N/2−1.
struct Spectrum {
    TorusGrid grid;
    std::vector<cplx> coeffs;  // coeffs[xi + N/2]

    Spectrum() = default;
    explicit Spectrum(TorusGrid g) : grid(g), coeffs(g.N, cplx{}) {}
    int lo() const { return -grid.N / 2; }
    int hi() const { return grid.N / 2 - 1; }
    bool contains(long xi) const { return xi >= lo() && xi <= hi(); }
    cplx& operator[](int xi) { return coeffs[xi + grid.N / 2]; }
    const cplx& operator[](int xi) const { return coeffs[xi + grid.N / 2]; }
    cplx at_or_zero(long xi) const { return contains(xi) ? (*this)[int(xi)] : cplx{}; }
};

namespace detail {

// fftw planning is not thread safe; execution on a cached plan is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }
    fftw_plan get(int n0, int n1, int sign) {
        std::lock_guard lock(mu_);
        auto key = std::make_tuple(n0, n1, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::size_t len = std::size_t(n0) * std::max(n1, 1);
        auto* a = fftw_alloc_complex(len);
        auto* b = fftw_alloc_complex(len);
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan p = n1 > 0 ? fftw_plan_dft_2d(n0, n1, a, b, sign, flags)
                             : fftw_plan_dft_1d(n0, a, b, sign, flags);
        fftw_free(a);
        fftw_free(b);
        plans_[key] = p;
        return p;
    }
    ~PlanCache() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

/// Unnormalised FFT in place: out[m] = Σ in[k] e^{sign·2πi mk/n}.
inline void fft_inplace(std::vector<cplx>& v, int sign) {
    std::vector<cplx> out(v.size());
    fftw_execute_dft(detail::PlanCache::instance().get(int(v.size()), 0, sign),
                     detail::as_fftw(v.data()), detail::as_fftw(out.data()));
    v.swap(out);
}

/// Unnormalised 2-D FFT of a row-major n0×n1 array.
inline void fft2_inplace(std::vector<cplx>& v, int n0, int n1, int sign) {
    std::vector<cplx> out(v.size());
    fftw_execute_dft(detail::PlanCache::instance().get(n0, n1, sign),
                     detail::as_fftw(v.data()), detail::as_fftw(out.data()));
    v.swap(out);
}

/// coeffs[ξ] = (1/N) Σ_k f(x_k) e^{−2πi ξ x_k}
inline Spectrum dft(const SampledFunction& f) {
    const int N = f.grid.N;
    std::vector<cplx> v = f.values;
    fft_inplace(v, FFTW_FORWARD);
    Spectrum s(f.grid);
    for (int m = 0; m < N; ++m) {
        int xi = m < N / 2 ? m : m - N;
        s[xi] = v[m] / double(N);
    }
    return s;
}

inline SampledFunction idft(const Spectrum& s) {
    const int N = s.grid.N;
    std::vector<cplx> v(N);
    for (int xi = s.lo(); xi <= s.hi(); ++xi) v[xi < 0 ? xi + N : xi] = s[xi];
    fft_inplace(v, FFTW_BACKWARD);
    return SampledFunction(s.grid, std::move(v));
}

inline double lp_norm(const SampledFunction& f, double p) {
    if (!(p > 0)) throw std::invalid_argument("lp_norm: p must be positive");
    if (std::isinf(p)) {
        double m = 0;
        for (auto& v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0;
    for (auto& v : f.values) s += std::pow(std::abs(v), p);
    return std::pow(s / f.grid.N, 1.0 / p);
}

/// sup_λ λ·|{|g|>λ}| for n equally weighted points of total measure 1.
inline double weak_l1_norm(std::span<const double> absval) {
    std::vector<double> g(absval.begin(), absval.end());
    std::sort(g.begin(), g.end(), std::greater<>());
    double best = 0;
    const double n = double(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) best = std::max(best, g[k] * double(k + 1) / n);
    return best;
}

inline double weak_l1_norm(const SampledFunction& g) {
    std::vector<double> a(g.values.size());
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::abs(g.values[k]);
    return weak_l1_norm(a);
}

/// Uncentred maximal function over grid-aligned torus intervals, O(N²):
/// for each length the window averages are swept with a monotone deque.
inline SampledFunction maximal_function(const SampledFunction& f) {
    const int N = f.grid.N;
    std::vector<double> a(N), pre(2 * N + 1, 0.0);
    for (int k = 0; k < N; ++k) a[k] = std::abs(f.values[k]);
    for (int k = 0; k < 2 * N; ++k) pre[k + 1] = pre[k] + a[k % N];
    std::vector<double> best(a);
    std::vector<double> avg(2 * N);
    for (int L = 2; L <= N; ++L) {
        for (int s = 0; s < N; ++s) avg[s] = (pre[s + L] - pre[s]) / L;
        for (int s = 0; s < N; ++s) avg[s + N] = avg[s];
        // x ∈ [s, s+L−1] (cyclic) ⇔ s ∈ [x−L+1, x]; walk s over N..2N−1 shifted by N
        std::deque<int> dq;
        for (int s = N - L + 1; s < 2 * N; ++s) {
            while (!dq.empty() && avg[dq.back()] <= avg[s]) dq.pop_back();
            dq.push_back(s);
            while (dq.front() <= s - L) dq.pop_front();
            if (s >= N) {
                int x = s - N;
                best[x] = std::max(best[x], avg[dq.front()]);
            }
        }
    }
    SampledFunction out(f.grid);
    for (int k = 0; k < N; ++k) out[k] = best[k];
    return out;
}

/// Torus distance from x to the closed interval J.
inline double torus_dist(double x, const DyadicInterval& J) {
    double a = J.left(), b = J.right();
    if (x >= a && x <= b) return 0.0;
    auto circ = [](double u) {
        u = std::fmod(std::abs(u), 1.0);
        return std::min(u, 1.0 - u);
    };
    return std::min(circ(x - a), circ(x - b));
}

/// (1 + dist(x,J)/|J|)^{−exponent}
inline SampledFunction approx_cutoff(const DyadicInterval& J, const TorusGrid& g, int exponent) {
    if (exponent <= 0) throw std::invalid_argument("approx_cutoff: exponent must be positive");
    SampledFunction out(g);
    for (int k = 0; k < g.N; ++k) out[k] = std::pow(1.0 + torus_dist(g.x(k), J) / J.length(), -exponent);
    return out;
}

/// Largest |ξ| whose coefficient exceeds rel_tol·max|coeff| (0 for the zero function).
inline int bandwidth(const Spectrum& s, double rel_tol = 1e-12) {
    double m = 0;
    for (auto& c : s.coeffs) m = std::max(m, std::abs(c));
    int b = 0;
    if (m == 0) return 0;
    for (int xi = s.lo(); xi <= s.hi(); ++xi)
        if (std::abs(s[xi]) > rel_tol * m) b = std::max(b, std::abs(xi));
    return b;
}

/// Zero the coefficients below rel_tol·max — the exact trigonometric polynomial behind f.
inline Spectrum clean_spectrum(Spectrum s, double rel_tol = 1e-12) {
    double m = 0;
    for (auto& c : s.coeffs) m = std::max(m, std::abs(c));
    for (auto& c : s.coeffs)
        if (std::abs(c) <= rel_tol * m) c = 0;
    return s;
}

/// Trigonometric polynomial with complex Gaussian coefficients on |ξ| ≤ B.
template <class Rng>
SampledFunction random_bandlimited(const TorusGrid& g, int B, Rng& rng) {
    std::normal_distribution<double> nd;
    Spectrum s(g);
    for (int xi = -B; xi <= B; ++xi) s[xi] = cplx(nd(rng), nd(rng));
    return idft(s);
}

inline SampledFunction pure_mode(const TorusGrid& g, int k) {
    SampledFunction f(g);
    for (int j = 0; j < g.N; ++j) f[j] = std::polar(1.0, 2 * pi * double(k) * j / g.N);
    return f;
}

/// Circular convolution (f*g)(x) = ∫ f(y) g(x−y) dy on the torus.
inline SampledFunction convolve(const SampledFunction& f, const SampledFunction& g) {
    Spectrum a = dft(f), b = dft(g);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) a.coeffs[i] *= b.coeffs[i];
    return idft(a);
}

namespace detail {
inline void require_same_grid(std::initializer_list<const SampledFunction*> fs) {
    const TorusGrid& g = (*fs.begin())->grid;
    for (auto* f : fs)
        if (!(f->grid == g)) throw std::invalid_argument("inputs live on different grids");
}
}  // namespace detail

/// ⟨f,g⟩ = ∫ f ḡ
inline cplx inner(const SampledFunction& f, const SampledFunction& g) {
    cplx s{};
    for (int k = 0; k < f.grid.N; ++k) s += f.values[k] * std::conj(g.values[k]);
    return s / double(f.grid.N);
}

/// (f,g) = ∫ f g, no conjugation
inline cplx pairing(const SampledFunction& f, const SampledFunction& g) {
    cplx s{};
    for (int k = 0; k < f.grid.N; ++k) s += f.values[k] * g.values[k];
    return s / double(f.grid.N);
}

}  // namespace fpp

#pragma once

#include <array>
#include <functional>
#include <string>

#include "grid.hpp"
#include "symbols.hpp"

namespace fpp {

enum class Method { naive, separable };

inline std::string to_string(Method m) { return m == Method::naive ? "naive" : "separable"; }

struct TrilinearResult {
    SampledFunction output;
    Method method = Method::naive;
    std::int64_t flops = 0;  // instrumented real-flop count
};

struct FormValue {
    cplx value{};
    std::string which;  // "form", "T*1" .. "T*4"
};

namespace detail {

// Cleaned spectra + bandwidth budget: Σ bandwidths < N/2 keeps every frequency
// sum inside the centred range, so no sum wraps around.
inline std::vector<Spectrum> checked_spectra(std::initializer_list<const SampledFunction*> fs) {
    require_same_grid(fs);
    std::vector<Spectrum> out;
    int total = 0;
    const int N = (*fs.begin())->grid.N;
    for (auto* f : fs) {
        out.push_back(clean_spectrum(dft(*f)));
        total += bandwidth(out.back());
    }
    if (2 * total >= N) throw std::domain_error("bandwidth budget violated: sum of bandwidths must be < N/2");
    return out;
}

// The dense triple sum. m is called only where the coefficient product is nonzero.
template <class Eval>
Spectrum naive_sum(const Spectrum& c1, const Spectrum& c2, const Spectrum& c3, Eval&& m, std::int64_t& flops) {
    const TorusGrid g = c1.grid;
    const int N = g.N, h = N / 2;
    std::vector<std::vector<cplx>> part(N);
    std::vector<std::int64_t> cnt(N, 0);
    parallel_for(std::size_t(N), [&](std::size_t i1) {
        const long x1 = long(i1) - h;
        std::vector<cplx> acc(N, cplx{});
        std::int64_t f = 0;
        const cplx a1 = c1[int(x1)];
        for (long x2 = -h; x2 < h; ++x2) {
            const cplx a12 = a1 * c2[int(x2)];
            for (long x3 = -h; x3 < h; ++x3) {
                const long eta = x1 + x2 + x3;
                if (eta < -h || eta >= h) continue;
                const cplx a123 = a12 * c3[int(x3)];
                f += 12;
                if (a123 == cplx{}) continue;
                acc[eta + h] += m(x1, x2, x3) * a123;
                f += 14;
            }
        }
        part[i1] = std::move(acc);
        cnt[i1] = f;
    });
    Spectrum out(g);
    for (int i = 0; i < N; ++i) {
        for (int k = 0; k < N; ++k) out.coeffs[k] += part[i][k];
        flops += cnt[i];
    }
    return out;
}

inline std::function<cplx(long, long, long)> evaluator(const Symbol& m) {
    if (m.d != 3) throw std::invalid_argument("trilinear operators need an arity-3 symbol");
    if (m.kind == SymbolKind::trivial) return [](long, long, long) { return cplx(1.0); };
    return [&m](long a, long b, long c) {
        std::array<long, 3> x{a, b, c};
        return eval_symbol(m, x);
    };
}

}  // namespace detail

/// Reference O(N³) path: T̂(η) = Σ_{ξ₁+ξ₂+ξ₃=η} m(ξ) f̂₁(ξ₁)f̂₂(ξ₂)f̂₃(ξ₃).
inline TrilinearResult apply_trilinear_naive(const Symbol& m, const SampledFunction& f1, const SampledFunction& f2,
                                             const SampledFunction& f3) {
    auto s = detail::checked_spectra({&f1, &f2, &f3});
    TrilinearResult r;
    r.method = Method::naive;
    r.output = idft(detail::naive_sum(s[0], s[1], s[2], detail::evaluator(m), r.flops));
    return r;
}

/// Flag symbols factor: for each ξ₂ the ξ₁ and ξ₃ sums are two length-N inverse
/// FFTs, so the cost is O(N² log N).
inline TrilinearResult apply_flag_separable(const Symbol& a, const Symbol& b, const SampledFunction& f1,
                                            const SampledFunction& f2, const SampledFunction& f3) {
    if (a.d != 2 || b.d != 2) throw std::invalid_argument("separable path needs arity-2 factors");
    auto s = detail::checked_spectra({&f1, &f2, &f3});
    const TorusGrid g = f1.grid;
    const int N = g.N, h = N / 2;
    const std::int64_t fft_flops = std::int64_t(5) * N * ilog2(N);
    std::vector<std::vector<cplx>> part(N);
    parallel_for(std::size_t(N), [&](std::size_t i2) {
        const long x2 = long(i2) - h;
        Spectrum u(g), w(g);
        for (long x = -h; x < h; ++x) {
            std::array<long, 2> p{x, x2}, q{x2, x};
            const cplx c1 = s[0][int(x)], c3 = s[2][int(x)];
            u[int(x)] = c1 == cplx{} ? cplx{} : eval_symbol(a, p) * c1;
            w[int(x)] = c3 == cplx{} ? cplx{} : eval_symbol(b, q) * c3;
        }
        auto g1 = idft(u), g3 = idft(w);
        std::vector<cplx> acc(N);
        const cplx c2 = s[1][int(x2)];
        for (int k = 0; k < N; ++k)
            acc[k] = c2 * std::polar(1.0, 2 * pi * double(x2) * k / N) * g1[k] * g3[k];
        part[i2] = std::move(acc);
    });
    TrilinearResult r;
    r.method = Method::separable;
    r.output = SampledFunction(g);
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) r.output[k] += part[i][k];
    // per ξ₂: two symbol-weighted vectors (12N), two FFTs, pointwise triple product (20N)
    r.flops = std::int64_t(N) * (12 * N + 2 * fft_flops + 20 * N) + 2 * std::int64_t(N) * N;
    return r;
}

inline TrilinearResult apply(const Symbol& m, const SampledFunction& f1, const SampledFunction& f2,
                             const SampledFunction& f3, Method method) {
    if (method == Method::naive) return apply_trilinear_naive(m, f1, f2, f3);
    if (m.kind == SymbolKind::flag) return apply_flag_separable(*m.a, *m.b, f1, f2, f3);
    if (m.kind == SymbolKind::trivial) return apply_flag_separable(trivial_symbol(2), trivial_symbol(2), f1, f2, f3);
    throw std::invalid_argument("separable path needs a flag or trivial symbol");
}

/// Λ = ∫ T_m(f₁,f₂,f₃)·f₄ (bilinear, no conjugation). Flag and trivial symbols use
/// the separable path, other symbols the naive one.
inline FormValue four_form(const Symbol& m, const SampledFunction& f1, const SampledFunction& f2,
                           const SampledFunction& f3, const SampledFunction& f4) {
    detail::checked_spectra({&f1, &f2, &f3, &f4});
    Method meth = (m.kind == SymbolKind::flag || m.kind == SymbolKind::trivial) ? Method::separable : Method::naive;
    auto t = apply(m, f1, f2, f3, meth);
    return {pairing(t.output, f4), "form"};
}

/// T^{*j}: the trilinear operator with Λ(f₁..f₄) = ∫ T^{*j}(the other three)·f_j.
/// Its symbol is m with the j-th frequency replaced by −(sum of the others).
inline Symbol adjoint_symbol(const Symbol& m, int j) {
    if (j < 1 || j > 4) throw std::invalid_argument("adjoint index must be 1..4");
    if (j == 4 || m.kind == SymbolKind::trivial) return m;
    auto base = std::make_shared<Symbol>(m);
    Symbol s;
    s.d = 3;
    s.kind = SymbolKind::tabulated;
    s.name = m.name + "*" + std::to_string(j);
    s.fn = [base, j](const double* z) {
        double x[3];
        double minus = -(z[0] + z[1] + z[2]);
        if (j == 1) x[0] = minus, x[1] = z[0], x[2] = z[1];
        if (j == 2) x[0] = z[0], x[1] = minus, x[2] = z[1];
        if (j == 3) x[0] = z[0], x[1] = z[1], x[2] = minus;
        // integer arguments: go through eval_symbol so tables are honoured
        std::array<long, 3> xi{std::lround(x[0]), std::lround(x[1]), std::lround(x[2])};
        return eval_symbol(*base, xi);
    };
    return s;
}

inline SampledFunction adjoint_operator(const Symbol& m, int j, const SampledFunction& g1, const SampledFunction& g2,
                                        const SampledFunction& g3) {
    return apply_trilinear_naive(adjoint_symbol(m, j), g1, g2, g3).output;
}

/// Λ evaluated through the j-th adjoint (j=4 is T itself).
inline FormValue adjoint_form(const Symbol& m, int j, const SampledFunction& f1, const SampledFunction& f2,
                              const SampledFunction& f3, const SampledFunction& f4) {
    if (j == 4) {
        auto v = four_form(m, f1, f2, f3, f4);
        v.which = "T*4";
        return v;
    }
    detail::checked_spectra({&f1, &f2, &f3, &f4});
    const SampledFunction* in[4] = {&f1, &f2, &f3, &f4};
    std::vector<const SampledFunction*> rest;
    for (int i = 0; i < 4; ++i)
        if (i != j - 1) rest.push_back(in[i]);
    auto t = adjoint_operator(m, j, *rest[0], *rest[1], *rest[2]);
    return {pairing(t, *in[j - 1]), "T*" + std::to_string(j)};
}

}  // namespace fpp

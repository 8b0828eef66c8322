#include <gtest/gtest.h>

#include "fpp/multilinear.hpp"

using namespace fpp;

namespace {

double sup(const SampledFunction& f) { return lp_norm(f, INFINITY); }

double max_dev(const SampledFunction& a, const SampledFunction& b) {
    double m = 0;
    for (int k = 0; k < a.grid.N; ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

SampledFunction product(const SampledFunction& a, const SampledFunction& b, const SampledFunction& c) {
    SampledFunction out(a.grid);
    for (int k = 0; k < a.grid.N; ++k) out[k] = a[k] * b[k] * c[k];
    return out;
}

// Σ_{ξ1+ξ2+ξ3+ξ4=0} m(ξ1,ξ2,ξ3) Π f̂_j(ξ_j), straight from the coefficients
cplx frequency_side_form(const Symbol& m, const std::array<const SampledFunction*, 4>& f) {
    std::array<Spectrum, 4> s;
    for (int j = 0; j < 4; ++j) s[j] = dft(*f[j]);
    const int h = f[0]->grid.N / 2;
    cplx acc{};
    for (long a = -h; a < h; ++a)
        for (long b = -h; b < h; ++b)
            for (long c = -h; c < h; ++c) {
                long d = -(a + b + c);
                if (!s[3].contains(d)) continue;
                cplx p = s[0][int(a)] * s[1][int(b)] * s[2][int(c)] * s[3][int(d)];
                if (std::abs(p) < 1e-300) continue;
                acc += eval_symbol(m, {a, b, c}) * p;
            }
    return acc;
}

}  // namespace

TEST(Naive, PureModes) {
    TorusGrid g(32);
    auto t = apply_trilinear_naive(trivial_symbol(3), pure_mode(g, 1), pure_mode(g, 2), pure_mode(g, 3));
    EXPECT_LE(max_dev(t.output, pure_mode(g, 6)), 1e-13);
    auto flag = *catalog_symbol("flag(homog0,ratio)", 32);
    auto u = apply_trilinear_naive(flag, pure_mode(g, 1), pure_mode(g, -2), pure_mode(g, 3));
    cplx c = eval_symbol(*flag.a, {1, -2}) * eval_symbol(*flag.b, {-2, 3});
    auto expect = pure_mode(g, 2);
    for (auto& v : expect.values) v *= c;
    EXPECT_LE(max_dev(u.output, expect), 1e-13);
}

TEST(Naive, TrivialCollapseToProduct) {
    TorusGrid g(64);
    for (int s = 0; s < 5; ++s) {
        auto rng = make_rng(20, s);
        auto f1 = random_bandlimited(g, 10, rng), f2 = random_bandlimited(g, 10, rng),
             f3 = random_bandlimited(g, 10, rng);
        auto t = apply_trilinear_naive(trivial_symbol(3), f1, f2, f3);
        EXPECT_LE(max_dev(t.output, product(f1, f2, f3)), 1e-10 * sup(f1) * sup(f2) * sup(f3));
    }
}

TEST(Naive, BandwidthBudgetEnforced) {
    TorusGrid g(32);
    EXPECT_THROW(apply_trilinear_naive(trivial_symbol(3), pure_mode(g, 5), pure_mode(g, 5), pure_mode(g, 6)),
                 std::domain_error);
    EXPECT_NO_THROW(apply_trilinear_naive(trivial_symbol(3), pure_mode(g, 5), pure_mode(g, 5), pure_mode(g, 5)));
    EXPECT_THROW(apply_trilinear_naive(trivial_symbol(3), pure_mode(g, 1), pure_mode(TorusGrid(64), 1), pure_mode(g, 1)),
                 std::invalid_argument);
}

TEST(Separable, TrivialAndAgreementWithNaive) {
    TorusGrid g(64);
    auto rng = make_rng(31);
    auto f1 = random_bandlimited(g, 9, rng), f2 = random_bandlimited(g, 9, rng), f3 = random_bandlimited(g, 9, rng);
    auto t = apply_flag_separable(trivial_symbol(2), trivial_symbol(2), f1, f2, f3);
    EXPECT_LE(max_dev(t.output, product(f1, f2, f3)), 1e-10 * sup(f1) * sup(f2) * sup(f3));
    for (auto& name : {"flag(homog0,homog0)", "flag(ratio,homog0)", "flag(annulus3,ratio)", "flag(trivial,homog0)"}) {
        auto m = *catalog_symbol(name, 64);
        auto a = apply(m, f1, f2, f3, Method::naive);
        auto b = apply(m, f1, f2, f3, Method::separable);
        EXPECT_EQ(b.method, Method::separable);
        EXPECT_LE(max_dev(a.output, b.output), 1e-9 * sup(f1) * sup(f2) * sup(f3)) << name;
    }
}

TEST(Separable, CostReductionAt256) {
    TorusGrid g(256);
    auto rng = make_rng(32);
    auto f1 = random_bandlimited(g, 30, rng), f2 = random_bandlimited(g, 30, rng), f3 = random_bandlimited(g, 30, rng);
    auto m = *catalog_symbol("flag(homog0,ratio)", 256);
    auto a = apply(m, f1, f2, f3, Method::naive);
    auto b = apply(m, f1, f2, f3, Method::separable);
    EXPECT_GE(a.flops, 10 * b.flops);
}

TEST(Separable, IndependentOfThreadCount) {
    TorusGrid g(64);
    auto rng = make_rng(33);
    auto f1 = random_bandlimited(g, 9, rng), f2 = random_bandlimited(g, 9, rng), f3 = random_bandlimited(g, 9, rng);
    auto m = *catalog_symbol("flag(homog0,ratio)", 64);
    setenv("FPP_THREADS", "1", 1);
    auto a = apply(m, f1, f2, f3, Method::separable);
    auto an = apply(m, f1, f2, f3, Method::naive);
    setenv("FPP_THREADS", "3", 1);
    auto b = apply(m, f1, f2, f3, Method::separable);
    auto bn = apply(m, f1, f2, f3, Method::naive);
    unsetenv("FPP_THREADS");
    EXPECT_EQ(a.output.values, b.output.values);
    EXPECT_EQ(an.output.values, bn.output.values);
}

TEST(Form, PureModeOrthogonality) {
    TorusGrid g(32);
    auto t = trivial_symbol(3);
    auto v = four_form(t, pure_mode(g, 1), pure_mode(g, 2), pure_mode(g, 3), pure_mode(g, -6));
    EXPECT_NEAR(std::abs(v.value - 1.0), 0, 1e-13);
    auto w = four_form(t, pure_mode(g, 1), pure_mode(g, 2), pure_mode(g, 3), pure_mode(g, -5));
    EXPECT_LE(std::abs(w.value), 1e-12);
}

TEST(Form, MatchesFrequencySideSum) {
    TorusGrid g(32);
    for (int s = 0; s < 4; ++s) {
        auto rng = make_rng(40, s);
        std::array<SampledFunction, 4> f;
        for (auto& x : f) x = random_bandlimited(g, 3, rng);
        for (auto& name : {"flag(homog0,ratio)", "homog0_3", "trivial"}) {
            auto m = *catalog_symbol(name, 32);
            auto v = four_form(m, f[0], f[1], f[2], f[3]).value;
            auto o = frequency_side_form(m, {&f[0], &f[1], &f[2], &f[3]});
            EXPECT_LE(std::abs(v - o), 1e-12 * std::abs(o)) << name;
        }
    }
}

TEST(Form, Multilinearity) {
    TorusGrid g(32);
    auto rng = make_rng(41);
    std::array<SampledFunction, 4> f;
    for (auto& x : f) x = random_bandlimited(g, 3, rng);
    auto h = random_bandlimited(g, 3, rng);
    auto m = *catalog_symbol("flag(ratio,homog0)", 32);
    const cplx alpha(0.3, -1.2), beta(-0.7, 0.4);
    for (int slot = 0; slot < 4; ++slot) {
        auto mix = f;
        for (int k = 0; k < 32; ++k) mix[slot][k] = alpha * f[slot][k] + beta * h[k];
        auto alt = f;
        alt[slot] = h;
        cplx lhs = four_form(m, mix[0], mix[1], mix[2], mix[3]).value;
        cplx rhs = alpha * four_form(m, f[0], f[1], f[2], f[3]).value + beta * four_form(m, alt[0], alt[1], alt[2], alt[3]).value;
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * (std::abs(lhs) + std::abs(rhs))) << slot;
    }
}

TEST(Adjoint, RoutesAgree) {
    TorusGrid g(64);
    for (int s = 0; s < 3; ++s) {
        auto rng = make_rng(50, s);
        std::array<SampledFunction, 4> f;
        for (auto& x : f) x = random_bandlimited(g, 7, rng);
        for (auto& name : {"flag(homog0,ratio)", "trivial", "homog0_3"}) {
            auto m = *catalog_symbol(name, 64);
            auto ref = four_form(m, f[0], f[1], f[2], f[3]);
            EXPECT_EQ(adjoint_form(m, 4, f[0], f[1], f[2], f[3]).value, ref.value);
            for (int j = 1; j <= 3; ++j) {
                auto v = adjoint_form(m, j, f[0], f[1], f[2], f[3]);
                EXPECT_LE(std::abs(v.value - ref.value), 1e-10 * std::abs(ref.value)) << name << " j=" << j;
            }
        }
    }
    EXPECT_THROW(adjoint_symbol(trivial_symbol(3), 5), std::invalid_argument);
}

TEST(Holder, TrivialSymbol) {
    TorusGrid g(128);
    auto rng = make_rng(60);
    auto f1 = random_bandlimited(g, 12, rng), f2 = random_bandlimited(g, 12, rng), f3 = random_bandlimited(g, 12, rng);
    auto t = apply_trilinear_naive(trivial_symbol(3), f1, f2, f3).output;
    for (auto p : std::vector<std::array<double, 3>>{{3, 3, 3}, {2, 4, 4}, {1, INFINITY, INFINITY}, {2, 2, INFINITY}}) {
        double inv = 0;
        for (double q : p) inv += std::isinf(q) ? 0 : 1 / q;
        double lhs = lp_norm(t, 1 / inv);
        double rhs = lp_norm(f1, p[0]) * lp_norm(f2, p[1]) * lp_norm(f3, p[2]);
        EXPECT_LE(lhs, rhs + 1e-9);
    }
}

#include <gtest/gtest.h>

#include "fpp/decomposition.hpp"

using namespace fpp;

TEST(Jet, ExpAndReciprocal) {
    auto e = exp(Jet<5>::variable(0.3));
    for (int l = 0; l <= 5; ++l) EXPECT_NEAR(e.derivative(l), std::exp(0.3), 1e-13);
    auto r = reciprocal(Jet<5>::variable(2.0));  // 1/x: derivatives (−1)^l l!/x^{l+1}
    for (int l = 0; l <= 5; ++l) EXPECT_NEAR(r.c[l], std::pow(-1.0, l) / std::pow(2.0, l + 1), 1e-15);
}

TEST(Jet, WindowDerivativesMatchFiniteDifferences) {
    auto w = desk_windows();
    for (double u : {-1.3, -0.2, 1.7, 2.4}) {
        auto J = w.W(1, Jet<3>::variable(u));
        const double h = 1e-4;
        double d1 = (w.W(1, u + h) - w.W(1, u - h)) / (2 * h);
        double d2 = (w.W(1, u + h) - 2 * w.W(1, u) + w.W(1, u - h)) / (h * h);
        EXPECT_NEAR(J.c[0], w.W(1, u), 1e-15);
        EXPECT_NEAR(J.derivative(1), d1, 1e-6);
        EXPECT_NEAR(J.derivative(2), d2, 1e-4);
    }
}

TEST(Windows, CoreAndSupport) {
    for (auto w : {desk_windows(), narrow_windows()}) {
        for (int j : {-8, -3, -1, 1, 4, 8}) {
            EXPECT_DOUBLE_EQ(w.W(j, w.centre(j)), 1.0);
            EXPECT_DOUBLE_EQ(w.W(j, w.core_lo(j)), 1.0);
            EXPECT_DOUBLE_EQ(w.W(j, w.core_hi(j)), 1.0);
            EXPECT_EQ(w.W(j, w.support_lo(j) - 1e-9), 0.0);
            EXPECT_EQ(w.W(j, w.support_hi(j) + 1e-9), 0.0);
            EXPECT_NEAR(w.support_hi(j) - w.support_lo(j), w.P, 1e-12);
        }
        EXPECT_THROW(w.check_index(0), std::invalid_argument);
        EXPECT_THROW(w.check_index(9), std::invalid_argument);
    }
    EXPECT_THROW(desk_windows(1), std::invalid_argument);
}

TEST(Partition, LatticeMatchesDirect) {
    for (auto w : {desk_windows(), narrow_windows()}) {
        detail::AtildeLattice lat(w);
        for (long i1 : {-150L, -7L, 0L, 33L, 140L})
            for (long i2 : {-90L, 1L, 64L})
                for (int kap : {0, 3}) {
                    double x1 = std::exp2(kap / double(w.Q)) * i1 * w.h(), x2 = std::exp2(kap / double(w.Q)) * i2 * w.h();
                    EXPECT_NEAR(lat.value(kap, i1, i2), atilde(w, x1, x2), 1e-12);
                }
    }
}

TEST(Partition, LowerBoundAndDilation) {
    auto rep = build_partition(8, TorusGrid(256), 8);
    EXPECT_GE(rep.c0, 0.1);
    EXPECT_TRUE(rep.lower_bound_ok);
    EXPECT_GE(rep.min_value, 0.0);
    EXPECT_LE(rep.diagonal_spread, 0.1);
    EXPECT_TRUE(rep.mihlin.pass) << rep.mihlin.max_constant();
    EXPECT_EQ(eval_symbol(rep.atilde, {0, 0}), cplx(0));
    // exact invariance under 2^{1/Q}
    auto w = desk_windows();
    EXPECT_NEAR(atilde(w, 13.0, -5.0), atilde(w, 13.0 * std::exp2(1.0 / 8), -5.0 * std::exp2(1.0 / 8)), 1e-12);
}

TEST(Partition, CoarseQuadratureReported) {
    auto rep = build_partition(8, TorusGrid(64), 1, Geometry::narrow);
    EXPECT_GE(rep.min_value, 0.0);
    EXPECT_FALSE(rep.lower_bound_ok);
    EXPECT_TRUE(build_partition(8, TorusGrid(64), 8, Geometry::narrow).lower_bound_ok);
}

TEST(Coefficients, NarrowGeometryDeltaForAtilde) {
    auto w = narrow_windows();
    Symbol a = analytic_symbol(2, "atilde", [w](const double* x) { return cplx(atilde(w, x[0], x[1])); });
    for (auto [j1, j2] : std::vector<std::pair<int, int>>{{8, 1}, {-8, -8}, {3, 8}}) {
        auto s = fourier_coefficients(a, w, j1, j2, 1.25, 10);
        for (int n1 = -10; n1 <= 10; ++n1)
            for (int n2 = -10; n2 <= 10; ++n2)
                EXPECT_NEAR(std::abs(s.at(n1, n2) - cplx(n1 == 0 && n2 == 0)), 0.0, 1e-10);
    }
}

TEST(Coefficients, DecayAndReconstruction) {
    auto w = desk_windows();
    auto a = *catalog_symbol("homog0");
    detail::AtildeLattice lat(w);
    double prev = INFINITY;
    for (int R : {5, 10, 20, 30}) {
        auto s = fourier_coefficients(a, w, 8, 3, 2.375, R, &lat);
        EXPECT_LT(s.reconstruction_error, prev);
        prev = s.reconstruction_error;
        EXPECT_GT(s.min_atilde, w.c0_floor);
    }
    EXPECT_LE(prev, 1e-4);
    auto s = fourier_coefficients(a, w, 8, 3, 2.375, 30, &lat);
    EXPECT_GT(s.decay_exponent, 3.0);  // measured; see README for the ≥ 5 target
    EXPECT_THROW(fourier_coefficients(a, w, 8, 3, 2.3, 10, &lat), std::invalid_argument);
    EXPECT_THROW(fourier_coefficients(a, w, 2, 3, 2.0, 10, &lat), std::invalid_argument);
}

TEST(Split, ReconstructionMonotone) {
    auto w = desk_windows();
    auto a = *catalog_symbol("homog0"), b = *catalog_symbol("ratio");
    auto sw = split_sweep(a, b, w, 3, {5, 10, 20, 30}, 16);
    EXPECT_TRUE(sw.monotone);
    EXPECT_LE(sw.errors[2], 1e-3);
}

TEST(Split, ConstantsLiveOnTheDiagonalBand) {
    auto w = desk_windows();
    auto one = trivial_symbol(2);
    auto s = split_product(one, one, w, 3, 20, 1e-3, 16);
    EXPECT_TRUE(s.pass) << s.error;
    for (long x = 1; x < 16; ++x)
        for (long sgn : {1L, -1L}) {
            EXPECT_LE(std::abs(eval_symbol(s.m1, {x, sgn * x, x})), 1e-15);
            EXPECT_LE(std::abs(eval_symbol(s.m2, {x, sgn * x, -x})), 1e-15);
            EXPECT_NEAR(std::abs(eval_symbol(s.m3, {x, sgn * x, x})), 1.0, 1e-3);
        }
    // far from the diagonal the scale-separated pieces carry mass
    EXPECT_GT(std::abs(eval_symbol(s.m1, {15, 0, 1})), 0.5);
    EXPECT_THROW(split_product(one, one, w, 1, 20, 1e-3, 16), std::invalid_argument);
}

TEST(Taylor, RemainderScaling) {
    auto w = desk_windows();
    for (int Mt : {2, 3, 4}) {
        auto r4 = taylor_split(w, Mt, 4, 0, 3), r5 = taylor_split(w, Mt, 5, 0, 3);
        EXPECT_LE(r4.identity_error, 1e-9);
        EXPECT_NEAR(r4.expansion_point_error, 0.0, 1e-15);
        EXPECT_EQ(int(r4.term_coefficient.size()), Mt);
        // within a factor of 2 at gap 4→5; approaching 2^{−Mt} as the gap grows
        double q45 = r5.remainder_max / r4.remainder_max / std::exp2(-Mt);
        EXPECT_GT(q45, 0.5);
        EXPECT_LT(q45, 2.0);
        auto r7 = taylor_split(w, Mt, 7, 0, 3), r8 = taylor_split(w, Mt, 8, 0, 3);
        double q78 = r8.remainder_max / r7.remainder_max / std::exp2(-Mt);
        EXPECT_LT(std::abs(q78 - 1), std::abs(q45 - 1)) << Mt;
    }
    EXPECT_THROW(taylor_split(w, 3, 2, 1, 3), std::invalid_argument);
}

namespace {
std::array<SampledFunction, 4> random_quad(const TorusGrid& g, int B, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::array<SampledFunction, 4> f;
    for (auto& x : f) x = random_bandlimited(g, B, rng);
    return f;
}
}  // namespace

TEST(Calc1, RandomAndDegenerate) {
    TorusGrid g(128);
    for (int s = 0; s < 5; ++s) {
        auto f = random_quad(g, 7, 100 + s);
        std::array<SampledFunction, 4> eta{l1_bump(g, 0.05, 0.1 * s), l1_bump(g, 0.1, 0.3, 2), l1_bump(g, 0.02),
                                            l1_bump(g, 0.07, 0.5, -1)};
        auto r = verify_calc1(eta, l1_bump(g, 0.03, 0.2), l1_bump(g, 0.04, 0.9, 1), f);
        EXPECT_LE(r.relative(), 1e-10);
    }
    // η₁₄ supported far from every achievable ξ₁+ξ₄
    auto f = random_quad(g, 5, 7);
    Spectrum far(g);
    far[40] = 1;
    std::array<SampledFunction, 4> eta{l1_bump(g, 0.05), l1_bump(g, 0.05), l1_bump(g, 0.05), l1_bump(g, 0.05)};
    auto r = verify_calc1(eta, idft(far), l1_bump(g, 0.05), f);
    EXPECT_LE(std::abs(r.lhs), 1e-14);
    EXPECT_LE(std::abs(r.rhs), 1e-14);
}

TEST(Calc2, ConstantsAndRandom) {
    TorusGrid g(64);
    std::array<SampledFunction, 3> F, Phi;
    for (int j = 0; j < 3; ++j) {
        F[j] = SampledFunction(g);
        for (auto& v : F[j].values) v = cplx(j + 1.0, 0.5);
        Phi[j] = SampledFunction(g);
        for (int x = 0; x < 8; ++x) Phi[j][x] = 8.0;  // (1/|I|)χ_{[0,|I|)}, |I| = 1/8
    }
    auto r = verify_calc2(F, Phi, -3);
    EXPECT_NEAR(std::abs(r.lhs - cplx(1, .5) * cplx(2, .5) * cplx(3, .5)), 0, 1e-12);
    EXPECT_LE(r.relative(), 1e-12);
    TorusGrid g2(128);
    auto rng = make_rng(77);
    std::normal_distribution<double> nd;
    for (int j = 0; j < 3; ++j) {
        F[j] = SampledFunction(g2);
        for (auto& v : F[j].values) v = {nd(rng), nd(rng)};
        Phi[j] = l1_bump(g2, 1.0 / 8, 0.01 * j, j);
    }
    EXPECT_LE(verify_calc2(F, Phi, -3).relative(), 1e-10);
    EXPECT_LE(verify_calc2(F, Phi, 0).relative(), 1e-10);
    EXPECT_THROW(verify_calc2(F, Phi, 1), std::invalid_argument);
}

TEST(Calc3, RandomAndZero) {
    TorusGrid g(256);
    Calc3Bumps b{l1_bump(g, 1.0 / 32, 0.01), l1_bump(g, 1.0 / 32, 0.0, 1), l1_bump(g, 1.0 / 32, 0.02, -1),
                 l1_bump(g, 0.25, 0.1),      l1_bump(g, 0.25, 0.0, 2),    l1_bump(g, 0.25, 0.05)};
    auto f = random_quad(g, 20, 3);
    auto r = verify_calc3(b, f, 5, 2, 3);
    EXPECT_LE(r.relative(), 1e-9);
    f[1] = SampledFunction(g);
    auto z = verify_calc3(b, f, 5, 2, 3);
    EXPECT_EQ(z.lhs, cplx(0));
    EXPECT_LE(std::abs(z.rhs), 1e-300);
    EXPECT_THROW(verify_calc3(b, f, 3, 2, 3), std::invalid_argument);
}

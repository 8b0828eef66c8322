#include <gtest/gtest.h>

#include "fpp/dyadic.hpp"

using namespace fpp;

namespace {
const TorusGrid G(256);

SampledFunction rnd(std::uint64_t seed, int B = 120) {
    auto rng = make_rng(seed);
    return random_bandlimited(G, B, rng);
}

const ModelConfig& t1() {
    static ModelConfig c = make_model(Model::T1, G);
    return c;
}

double sup(const SampledFunction& f) { return lp_norm(f, INFINITY); }
}  // namespace

TEST(Families, InvariantsAtConstruction) {
    for (Flavor f : {Flavor::lacunary, Flavor::non_lacunary}) {
        auto fam = make_family(G, dyadic_ladder(-8, -2), f);
        EXPECT_TRUE(fam.violations.empty());
        for (std::size_t i = 0; i < fam.size(); ++i) {
            EXPECT_NEAR(lp_norm(fam.bumps[i], 2), 1.0, 1e-10);
            auto w = fam.omega(fam.intervals[i]);
            for (int xi = -128; xi < 128; ++xi)
                if (fam.spectra[i][xi] != cplx{}) EXPECT_TRUE(w.contains(xi)) << xi;
        }
        // finite, recorded, growing with α
        for (int l = 0; l < 3; ++l)
            for (int a = 1; a < 6; ++a) {
                EXPECT_TRUE(std::isfinite(fam.adapted[l][a]));
                EXPECT_GE(fam.adapted[l][a], fam.adapted[l][a - 1]);
            }
    }
    EXPECT_FALSE(lacunary_shape().dilate(5).contains(0));
    EXPECT_FALSE(lacunary_shape(true).dilate(5).contains(0));
    EXPECT_TRUE(non_lacunary_shape().lo == -non_lacunary_shape().hi);
}

TEST(Families, Rejections) {
    FreqInterval bad{Rational(1, 40), Rational(3, 8)};
    EXPECT_THROW(make_family(G, {DyadicInterval(-3, 0)}, Flavor::lacunary, bad), std::invalid_argument);
    auto fam = make_family(G, {DyadicInterval(-3, 0)}, Flavor::lacunary, bad, false);
    EXPECT_FALSE(fam.violations.empty());
    EXPECT_THROW(make_family(G, {DyadicInterval(-3, 0)}, Flavor::non_lacunary, FreqInterval{Rational(0), Rational(1, 4)}),
                 std::invalid_argument);
    // interval finer than the grid
    EXPECT_THROW(make_family(TorusGrid(8), {DyadicInterval(-5, 0)}, Flavor::lacunary), std::invalid_argument);
    // ω beyond Nyquist
    EXPECT_THROW(make_family(TorusGrid(64), {DyadicInterval(-8, 0)}, Flavor::lacunary), std::invalid_argument);
    // no integer frequency inside ω
    EXPECT_THROW(make_family(G, {DyadicInterval(0, 0)}, Flavor::lacunary), std::invalid_argument);
}

TEST(Models, ValidateFlavours) {
    ModelConfig c = t1();
    EXPECT_THROW(c.validate(Model::T2), std::invalid_argument);
    EXPECT_THROW(c.validate(Model::T1k0), std::invalid_argument);  // no k0
    c.nonlac_J = 2;
    EXPECT_THROW(c.validate(Model::T1), std::invalid_argument);
    EXPECT_THROW(make_model(Model::T1, G, -8, -2, 4), std::invalid_argument);
}

TEST(Models, ZeroAndLinearity) {
    const auto& c = t1();
    auto f1 = rnd(1), f2 = rnd(2), f3 = rnd(3), g = rnd(4);
    EXPECT_EQ(sup(apply_T1(c, SampledFunction(G), f2, f3)), 0.0);
    auto base = apply_T1(c, f1, f2, f3);
    cplx lam(0.7, -1.3);
    for (int slot = 0; slot < 3; ++slot) {
        std::array<SampledFunction, 3> a{f1, f2, f3}, b{f1, f2, f3};
        for (int k = 0; k < G.N; ++k) a[slot][k] = lam * a[slot][k] + g[k];
        b[slot] = g;
        auto lhs = apply_T1(c, a[0], a[1], a[2]), other = apply_T1(c, b[0], b[1], b[2]);
        double dev = 0, sc = 0;
        for (int k = 0; k < G.N; ++k) {
            dev = std::max(dev, std::abs(lhs[k] - lam * base[k] - other[k]));
            sc = std::max(sc, std::abs(lhs[k]));
        }
        EXPECT_LE(dev, 1e-12 * std::max(1.0, sc)) << slot;
    }
    auto c2 = make_model(Model::T2, G);
    EXPECT_EQ(sup(apply_T2(c2, f1, f2, SampledFunction(G))), 0.0);
}

TEST(Models, SinglePairHandExpansion) {
    DyadicInterval I(-6, 5), J(-4, 1);
    ModelConfig c;
    c.I = {make_family(G, {I}, Flavor::lacunary), make_family(G, {I}, Flavor::non_lacunary),
           make_family(G, {I}, Flavor::lacunary)};
    c.J = {make_family(G, {J}, Flavor::non_lacunary), make_family(G, {J}, Flavor::lacunary),
           make_family(G, {J}, Flavor::lacunary)};
    ASSERT_TRUE(admissible(c, Model::T1, I.k, J.k));
    auto f1 = rnd(11), f2 = rnd(12), f3 = rnd(13);
    // B = |J|^{-1/2}⟨f2,Φ¹_J⟩⟨f3,Φ²_J⟩Φ³_J on the grid
    cplx bj = std::pow(J.length(), -0.5) * inner(f2, c.J[0].bumps[0]) * inner(f3, c.J[1].bumps[0]);
    SampledFunction B(G);
    for (int k = 0; k < G.N; ++k) B[k] = bj * c.J[2].bumps[0][k];
    cplx ci = std::pow(I.length(), -0.5) * inner(f1, c.I[0].bumps[0]) * inner(B, c.I[1].bumps[0]);
    auto out = apply_T1(c, f1, f2, f3);
    for (int k = 0; k < G.N; ++k) EXPECT_NEAR(std::abs(out[k] - ci * c.I[2].bumps[0][k]), 0.0, 1e-12 * (1 + std::abs(ci)));
    EXPECT_GT(std::abs(ci), 0.0);

    // k0 variant: the matched k0 for |J| = 4|I| is 3
    c.k0 = 3;
    auto outk = apply_T1_k0(c, f1, f2, f3);
    for (int k = 0; k < G.N; ++k) EXPECT_NEAR(std::abs(outk[k] - out[k]), 0.0, 1e-12 * (1 + std::abs(ci)));
    c.k0 = 2;
    EXPECT_EQ(sup(apply_T1_k0(c, f1, f2, f3)), 0.0);
}

TEST(Models, EmptyConstraintSet) {
    // J strictly finer than I: no ω³_J meets ω²_I
    DyadicInterval I(-3, 2);
    auto Js = dyadic_ladder(-8, -4);
    ModelConfig c;
    c.I = {make_family(G, {I}, Flavor::lacunary), make_family(G, {I}, Flavor::non_lacunary),
           make_family(G, {I}, Flavor::lacunary)};
    c.J = {make_family(G, Js, Flavor::non_lacunary), make_family(G, Js, Flavor::lacunary),
           make_family(G, Js, Flavor::lacunary)};
    EXPECT_EQ(sup(apply_T1(c, rnd(1), rnd(2), rnd(3))), 0.0);
}

TEST(Models, K0BeyondLadderIsZero) {
    ModelConfig c = t1();
    c.k0 = 20;
    EXPECT_EQ(sup(apply_T1_k0(c, rnd(1), rnd(2), rnd(3))), 0.0);
}

TEST(Models, T2IsRelabelledT1) {
    auto c2 = make_model(Model::T2, G, -7, -2);
    ModelConfig c1 = c2;
    std::swap(c1.I[0], c1.I[1]);
    auto f1 = rnd(21), f2 = rnd(22), f3 = rnd(23);
    auto a = apply_T2(c2, f1, f2, f3), b = apply_T1(c1, f3, f1, f2);
    double dev = 0, sc = 0;
    for (int k = 0; k < G.N; ++k) dev = std::max(dev, std::abs(a[k] - b[k])), sc = std::max(sc, std::abs(a[k]));
    EXPECT_GT(sc, 0.0);
    EXPECT_LE(dev, 1e-12 * sc);
}

TEST(Forms, Lambda1Reordering) {
    const auto& c = t1();
    for (int s = 0; s < 3; ++s) {
        auto f1 = rnd(31 + s), f2 = rnd(41 + s), f3 = rnd(51 + s), f4 = rnd(61 + s);
        auto co = lambda1_coefficients(c, Model::T1, f1, f2, f3, f4);
        cplx direct = model_form(c, Model::T1, f1, f2, f3, f4);
        EXPECT_LE(std::abs(co.lambda - direct), 1e-10 * co.magnitude);
        EXPECT_GT(std::abs(direct), 1e-3 * co.magnitude);
        for (int k0 = 2; k0 <= 6; ++k0) {
            ModelConfig ck = c;
            ck.k0 = k0;
            auto cok = lambda1_coefficients(ck, Model::T1k0, f1, f2, f3, f4);
            cplx dk = model_form(ck, Model::T1k0, f1, f2, f3, f4);
            EXPECT_LE(std::abs(cok.lambda - dk), 1e-10 * cok.magnitude) << k0;
        }
    }
    auto co = lambda1_coefficients(c, Model::T1, rnd(1), SampledFunction(G), rnd(3), rnd(4));
    for (auto v : co.a1.a) EXPECT_EQ(v, cplx{});
    EXPECT_EQ(co.lambda, cplx{});
    EXPECT_THROW(lambda1_coefficients(make_model(Model::T2, G), Model::T2, rnd(1), rnd(2), rnd(3), rnd(4)),
                 std::invalid_argument);
}

TEST(Forms, InnerParaproductIdentity) {
    const auto& c = t1();
    auto f1 = rnd(71), f4 = rnd(72);
    auto r = inner_paraproduct(c, Model::T1, f1, f4);
    EXPECT_TRUE(r.holds);
    EXPECT_LE(r.relative(), 1e-10);
    EXPECT_GT(r.active_I, 0u);
    for (int k0 = 2; k0 <= 6; ++k0) {
        ModelConfig ck = c;
        ck.k0 = k0;
        auto rk = inner_paraproduct(ck, Model::T1k0, f1, f4);
        EXPECT_TRUE(rk.holds) << k0;
        EXPECT_LE(rk.relative(), 1e-10) << k0;
    }
}

TEST(Forms, DisjointSupportsGiveZero) {
    // I coarser than every J: ω²_I never meets ω³_J
    auto Is = dyadic_ladder(-3, -2), Js = dyadic_ladder(-8, -5);
    ModelConfig c;
    c.I = {make_family(G, Is, Flavor::lacunary), make_family(G, Is, Flavor::non_lacunary),
           make_family(G, Is, Flavor::lacunary)};
    c.J = {make_family(G, Js, Flavor::non_lacunary), make_family(G, Js, Flavor::lacunary),
           make_family(G, Js, Flavor::lacunary)};
    auto r = inner_paraproduct(c, Model::T1, rnd(1), rnd(2));
    EXPECT_EQ(r.active_I, 0u);
    for (std::size_t j = 0; j < r.a3.size(); ++j) {
        EXPECT_EQ(r.a3[j], cplx{});
        EXPECT_NEAR(std::abs(r.paired[j]), 0.0, 1e-15);
    }
}

TEST(Forms, BrokenLacunaryFamilyIsDetected) {
    ModelConfig c = t1();
    auto Js = c.J[0].intervals;
    c.J[2] = make_family(G, Js, Flavor::lacunary, FreqInterval{Rational(1, 40), Rational(3, 8)}, false);
    EXPECT_THROW(c.validate(Model::T1), std::invalid_argument);
    // bypass validation by marking the violation away to exercise the identity itself
    c.J[2].violations.clear();
    auto r = inner_paraproduct(c, Model::T1, rnd(81), rnd(82));
    EXPECT_FALSE(r.holds);
    EXPECT_GT(r.relative(), 1e-3);
}

TEST(IndexSets, K0PartitionOfT1) {
    const auto& c = t1();
    auto r = index_partition_check(c);
    EXPECT_TRUE(r.exact);
    EXPECT_GT(r.t1_pairs, 0u);
    EXPECT_EQ(r.covered, r.t1_pairs);
    for (auto& [k0, n] : r.per_k0) EXPECT_GE(k0, 2);  // k0 = m + 1 for |J| = 2^m|I|
    ModelConfig wide = c;
    wide.band = 4;
    auto w = index_partition_check(wide);
    EXPECT_FALSE(w.exact);
    EXPECT_GT(w.duplicates, 0u);
}

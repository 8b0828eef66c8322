#include <gtest/gtest.h>

#include "fpp/symbols.hpp"

using namespace fpp;

TEST(Symbols, TrivialEverywhereOne) {
    auto t = trivial_symbol(3);
    for (long a : {-5L, 0L, 7L}) EXPECT_EQ(eval_symbol(t, {a, -a, 3}), cplx(1));
    EXPECT_THROW(eval_symbol(t, {1, 2}), std::invalid_argument);
}

TEST(Symbols, FlagOfTrivials) {
    auto f = flag_symbol(trivial_symbol(2), trivial_symbol(2));
    EXPECT_EQ(f.d, 3);
    EXPECT_EQ(eval_symbol(f, {3, -1, 2}), cplx(1));
    EXPECT_THROW(flag_symbol(trivial_symbol(1), trivial_symbol(2)), std::invalid_argument);
}

TEST(Symbols, FlagIsProductOfTableLookups) {
    SymbolTable ta, tb;
    ta.d = tb.d = 2;
    ta.lo = tb.lo = {-4, -4};
    ta.shape = tb.shape = {8, 8};
    ta.values.resize(64);
    tb.values.resize(64);
    auto rng = make_rng(9);
    std::normal_distribution<double> nd;
    for (auto& v : ta.values) v = {nd(rng), nd(rng)};
    for (auto& v : tb.values) v = {nd(rng), nd(rng)};
    auto f = flag_symbol(table_symbol("a", ta), table_symbol("b", tb));
    // direct lookup: row-major, last index fastest
    auto A = [&](long x, long y) { return ta.values[(x + 4) * 8 + (y + 4)]; };
    auto B = [&](long x, long y) { return tb.values[(x + 4) * 8 + (y + 4)]; };
    EXPECT_EQ(eval_symbol(f, {1, 2, 3}), A(1, 2) * B(2, 3));
    for (long x = -4; x < 4; ++x)
        for (long y = -4; y < 4; ++y)
            for (long z = -4; z < 4; ++z) ASSERT_EQ(eval_symbol(f, {x, y, z}), A(x, y) * B(y, z));
    EXPECT_THROW(eval_symbol(f, {4, 0, 0}), std::out_of_range);
}

TEST(Mihlin, TrivialHasZeroDerivatives) {
    auto rep = mihlin_check(trivial_symbol(2), 4, 1.0);
    for (auto& e : rep.entries) {
        int ord = 0;
        for (int a : e.alpha) ord += a;
        if (ord >= 1) EXPECT_EQ(e.constant, 0.0);
        else EXPECT_DOUBLE_EQ(e.constant, 1.0);
    }
    EXPECT_TRUE(rep.pass);
}

TEST(Mihlin, RatioBoundedWithoutGrowth) {
    auto m = *catalog_symbol("ratio", 256);
    auto small = mihlin_check(m, 2, 50, 32);
    auto large = mihlin_check(m, 2, 50, 128);
    EXPECT_TRUE(small.pass);
    EXPECT_TRUE(large.pass);
    // enlarging the box 4× does not grow the constants
    EXPECT_LE(large.max_constant(), 1.1 * small.max_constant());
}

TEST(Mihlin, UnboundedSymbolFails) {
    auto m = analytic_symbol(2, "xi1sq", [](const double* x) { return cplx(x[0] * x[0]); });
    auto rep = mihlin_check(m, 2, 50);
    EXPECT_FALSE(rep.pass);
    EXPECT_GE(rep.entries[0].constant, 31.0 * 31.0);
}

TEST(Mihlin, CatalogPasses) {
    for (auto& name : mihlin_catalog_names()) {
        auto rep = mihlin_check(*catalog_symbol(name, 128), 2, 50);
        EXPECT_TRUE(rep.pass) << name << " " << rep.max_constant();
    }
    EXPECT_THROW(mihlin_check(trivial_symbol(1), 5, 1), std::invalid_argument);
}

TEST(Mihlin, DilationInvariance) {
    // same box for m and m(2·): homogeneous symbols are exactly invariant, the
    // annulus moves one octave inward and keeps its constants up to discretization
    for (std::string name : {"homog0", "ratio", "annulus6"}) {
        auto m = *catalog_symbol(name);
        auto m2 = dilate(m, 2.0);
        auto r1 = mihlin_check(m, 2, 1e9, 256, 4);
        auto r2 = mihlin_check(m2, 2, 1e9, 256, 4);
        for (std::size_t i = 0; i < r1.entries.size(); ++i) {
            double a = r1.entries[i].constant, b = r2.entries[i].constant;
            EXPECT_NEAR(a, b, 0.1 * std::max(a, b) + 1e-12) << name << " entry " << i;
        }
    }
}

TEST(Catalog, Contents) {
    auto cat = standard_symbols(64);
    EXPECT_EQ(cat.at("trivial").kind, SymbolKind::trivial);
    auto& f = cat.at("flag(homog0,homog0)");
    EXPECT_EQ(f.d, 3);
    EXPECT_EQ(f.kind, SymbolKind::flag);
    EXPECT_FALSE(catalog_symbol("nonsense").has_value());
    auto h = *catalog_symbol("homog0", 64);
    EXPECT_TRUE(mihlin_check(h, 2, 50).pass);
    // tabulated values agree with the analytic evaluator
    double x[2] = {3, -7};
    EXPECT_EQ(eval_symbol(h, {3, -7}), eval_real(h, x));
}

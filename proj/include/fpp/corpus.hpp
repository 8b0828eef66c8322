#pragma once

// Seeded random instances shared by the CLI and the acceptance run.

#include "decomposition.hpp"
#include "multilinear.hpp"

namespace fpp {

template <class Rng>
std::array<SampledFunction, 4> random_quad(const TorusGrid& g, int B, Rng& rng) {
    std::array<SampledFunction, 4> f;
    for (auto& x : f) x = random_bandlimited(g, B, rng);
    return f;
}

namespace detail {
template <class Rng>
SampledFunction random_l1_bump(const TorusGrid& g, double len, Rng& rng) {
    std::uniform_real_distribution<double> c(0, 1), fr(-2, 2);
    return l1_bump(g, len, c(rng), std::round(fr(rng)));
}
}  // namespace detail

/// calc1 on random data: bumps of random width, centre and modulation; bandwidth 12.
inline IdentityReport calc1_instance(const TorusGrid& g, std::uint64_t seed, std::uint64_t index) {
    auto rng = make_rng(seed, index);
    std::uniform_real_distribution<double> w(0.02, 0.1);
    std::array<SampledFunction, 4> eta;
    for (auto& e : eta) e = detail::random_l1_bump(g, w(rng), rng);
    auto e14 = detail::random_l1_bump(g, w(rng), rng), e23 = detail::random_l1_bump(g, w(rng), rng);
    return verify_calc1(eta, e14, e23, random_quad(g, std::min(12, g.N / 10), rng));
}

/// calc2 on random Gaussian data with bumps at a random scale 2^k, k ∈ [−5, −1].
inline IdentityReport calc2_instance(const TorusGrid& g, std::uint64_t seed, std::uint64_t index) {
    auto rng = make_rng(seed, index);
    std::uniform_int_distribution<int> kk(-5, -1);
    const int k = kk(rng);
    std::normal_distribution<double> nd;
    std::array<SampledFunction, 3> F, Phi;
    for (int j = 0; j < 3; ++j) {
        F[j] = SampledFunction(g);
        for (auto& v : F[j].values) v = {nd(rng), nd(rng)};
        Phi[j] = detail::random_l1_bump(g, std::ldexp(1.0, k), rng);
    }
    return verify_calc2(F, Phi, k);
}

/// calc3 with k′ = 5, k″ = 2, # = 3 and random bumps at those scales; bandwidth 20.
inline IdentityReport calc3_instance(const TorusGrid& g, std::uint64_t seed, std::uint64_t index) {
    auto rng = make_rng(seed, index);
    const double lp = 1.0 / 32, lpp = 1.0 / 4;
    Calc3Bumps b{detail::random_l1_bump(g, lp, rng),  detail::random_l1_bump(g, lp, rng),
                 detail::random_l1_bump(g, lp, rng),  detail::random_l1_bump(g, lpp, rng),
                 detail::random_l1_bump(g, lpp, rng), detail::random_l1_bump(g, lpp, rng)};
    return verify_calc3(b, random_quad(g, std::min(20, g.N / 12), rng), 5, 2, 3);
}

struct AdjointInstance {
    std::string symbol;
    std::array<cplx, 5> routes{};  // form, T*1, T*2, T*3, T*4
    double max_relative = 0;       // max pairwise |difference| / |form|
};

/// The five routes to Λ for a random flag symbol and random bandlimited tuple.
inline AdjointInstance adjoint_instance(const TorusGrid& g, int B, std::uint64_t seed, std::uint64_t index) {
    static const std::vector<std::string> names{"flag(homog0,ratio)", "flag(ratio,homog0)", "flag(homog0,homog0)",
                                                "flag(annulus3,ratio)"};
    auto rng = make_rng(seed, index);
    AdjointInstance r;
    r.symbol = names[index % names.size()];
    auto m = *catalog_symbol(r.symbol, g.N);
    auto f = random_quad(g, B, rng);
    r.routes[0] = four_form(m, f[0], f[1], f[2], f[3]).value;
    for (int j = 1; j <= 4; ++j) r.routes[j] = adjoint_form(m, j, f[0], f[1], f[2], f[3]).value;
    const double ref = std::abs(r.routes[0]);
    for (auto& a : r.routes)
        for (auto& b : r.routes) r.max_relative = std::max(r.max_relative, std::abs(a - b) / ref);
    return r;
}

}  // namespace fpp

#pragma once

// Restricted-weak-type experiments, exceptional sets, and the exponent polytopes.

#include <boost/multiprecision/cpp_int.hpp>

#include "size_energy.hpp"

namespace fpp {

// ---------------------------------------------------------------------------
// exponent polytopes

using Exact = boost::multiprecision::cpp_rational;

/// Parses "3/8", "-0.125", "2" exactly.
inline Exact parse_exact(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
    if (s.empty()) throw std::invalid_argument("empty number");
    if (auto slash = s.find('/'); slash != std::string::npos)
        return parse_exact(s.substr(0, slash)) / parse_exact(s.substr(slash + 1));
    bool neg = s[0] == '-';
    if (s[0] == '-' || s[0] == '+') s.erase(0, 1);
    auto dot = s.find('.');
    std::string digits = s, frac;
    if (dot != std::string::npos) digits = s.substr(0, dot), frac = s.substr(dot + 1);
    if ((digits + frac).empty() || (digits + frac).find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("not a number: " + s);
    boost::multiprecision::cpp_int num(digits.empty() ? "0" : digits), den = 1;
    for (char ch : frac) num = num * 10 + (ch - '0'), den *= 10;
    Exact r(num, den);
    return neg ? Exact(-r) : r;
}

/// (1/p1, 1/p2, 1/p3, 1/p4) on the hyperplane S: coordinates sum to 1.
struct ExponentTuple {
    std::array<Exact, 4> q;

    bool on_S() const { return q[0] + q[1] + q[2] + q[3] == 1; }
    std::array<double, 4> to_double() const {
        std::array<double, 4> d;
        for (int i = 0; i < 4; ++i) d[i] = static_cast<double>(q[i]);
        return d;
    }
    static ExponentTuple parse(const std::string& csv) {
        ExponentTuple t;
        std::size_t pos = 0;
        for (int i = 0; i < 4; ++i) {
            auto end = csv.find(',', pos);
            if ((end == std::string::npos) != (i == 3)) throw std::invalid_argument("exponent tuple needs four entries");
            t.q[i] = parse_exact(csv.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
            pos = end + 1;
        }
        return t;
    }
};

enum class Polytope { D, Dtilde };
enum class Membership { interior, boundary, outside };

inline std::string to_string(Membership m) {
    return m == Membership::interior ? "interior" : m == Membership::boundary ? "boundary" : "outside";
}
inline Polytope parse_polytope(const std::string& s) {
    if (s == "D") return Polytope::D;
    if (s == "Dtilde" || s == "D~") return Polytope::Dtilde;
    throw std::invalid_argument("unknown polytope: " + s);
}

struct Vertex {
    std::string name;
    std::array<int, 4> x;
};

inline const std::vector<Vertex>& polytope_vertices(Polytope p) {
    static const std::vector<Vertex> D{{"A11", {-1, 1, 1, 0}}, {"A12", {-1, 1, 0, 1}}, {"A21", {1, -1, 1, 0}},
                                       {"A22", {0, 0, 0, 1}},  {"A31", {1, 1, -1, 0}}, {"A32", {0, 1, -1, 1}},
                                       {"A4", {1, 1, 1, -2}}};
    static const std::vector<Vertex> Dt{{"A22", {0, 0, 0, 1}}, {"G1", {1, 0, 0, 0}}, {"G2", {0, 1, 0, 0}},
                                        {"G3", {0, 0, 1, 0}},  {"A4", {1, 1, 1, -2}}};
    return p == Polytope::D ? D : Dt;
}

inline const Vertex& find_vertex(const std::string& name) {
    for (auto p : {Polytope::D, Polytope::Dtilde})
        for (auto& v : polytope_vertices(p))
            if (v.name == name) return v;
    throw std::invalid_argument("unknown vertex: " + name);
}

inline ExponentTuple centroid(Polytope p) {
    ExponentTuple c;
    const auto& V = polytope_vertices(p);
    for (auto& v : V)
        for (int i = 0; i < 4; ++i) c.q[i] += v.x[i];
    for (auto& x : c.q) x /= Exact(V.size());
    return c;
}

/// vertex + t·(centroid(D) − vertex)
inline ExponentTuple near_vertex(const std::string& name, const Exact& t) {
    const auto& v = find_vertex(name);
    auto c = centroid(Polytope::D);
    ExponentTuple q;
    for (int i = 0; i < 4; ++i) q.q[i] = v.x[i] + t * (c.q[i] - v.x[i]);
    return q;
}

namespace detail {

using P3 = std::array<Exact, 3>;  // S parametrized by the first three coordinates

inline P3 p3(const std::array<int, 4>& x) { return {Exact(x[0]), Exact(x[1]), Exact(x[2])}; }
inline P3 p3(const ExponentTuple& t) { return {t.q[0], t.q[1], t.q[2]}; }
inline P3 sub(const P3& a, const P3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Exact dot(const P3& a, const P3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline P3 cross(const P3& a, const P3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

struct Facet {
    P3 n;
    Exact b;  // n·x ≤ b on the polytope
};

/// Supporting planes through vertex triples with every vertex on one side.
inline std::vector<Facet> facets(Polytope p) {
    const auto& V = polytope_vertices(p);
    std::vector<Facet> out;
    for (std::size_t a = 0; a < V.size(); ++a)
        for (std::size_t b = a + 1; b < V.size(); ++b)
            for (std::size_t c = b + 1; c < V.size(); ++c) {
                P3 A = p3(V[a].x), n = cross(sub(p3(V[b].x), A), sub(p3(V[c].x), A));
                if (n[0] == 0 && n[1] == 0 && n[2] == 0) continue;
                bool le = true, ge = true;
                for (auto& v : V) {
                    Exact s = dot(n, sub(p3(v.x), A));
                    le = le && s <= 0, ge = ge && s >= 0;
                }
                if (le) out.push_back({n, dot(n, A)});
                else if (ge) out.push_back({{-n[0], -n[1], -n[2]}, -dot(n, A)});
            }
    return out;
}

inline void require_on_S(const ExponentTuple& q) {
    if (!q.on_S()) throw std::invalid_argument("exponent tuple is not on S (coordinates must sum to 1)");
}

}  // namespace detail

/// Open interior / boundary / outside of the hull, relative to S, from the facet inequalities.
inline Membership polytope_membership(const ExponentTuple& q, Polytope p) {
    detail::require_on_S(q);
    static const std::vector<detail::Facet> fD = detail::facets(Polytope::D), fDt = detail::facets(Polytope::Dtilde);
    const auto& F = p == Polytope::D ? fD : fDt;
    auto x = detail::p3(q);
    bool strict = true;
    for (auto& f : F) {
        Exact s = detail::dot(f.n, x);
        if (s > f.b) return Membership::outside;
        if (s == f.b) strict = false;
    }
    return strict ? Membership::interior : Membership::boundary;
}

namespace detail {

/// Exact barycentric coordinates of x in the tetrahedron (a,b,c,d), if nondegenerate.
inline std::optional<std::array<Exact, 4>> barycentric(const P3& x, const P3& a, const P3& b, const P3& c, const P3& d) {
    P3 u = sub(b, a), v = sub(c, a), w = sub(d, a), r = sub(x, a);
    Exact det = dot(u, cross(v, w));
    if (det == 0) return std::nullopt;
    Exact l1 = dot(r, cross(v, w)) / det, l2 = dot(u, cross(r, w)) / det, l3 = dot(u, cross(v, r)) / det;
    return std::array<Exact, 4>{1 - l1 - l2 - l3, l1, l2, l3};
}

inline bool in_hull_by_tetrahedra(const P3& x, const std::vector<Vertex>& V) {
    const std::size_t n = V.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                for (std::size_t d = c + 1; d < n; ++d) {
                    auto l = barycentric(x, p3(V[a].x), p3(V[b].x), p3(V[c].x), p3(V[d].x));
                    if (l && std::all_of(l->begin(), l->end(), [](const Exact& t) { return t >= 0; })) return true;
                }
    return false;
}

}  // namespace detail

/// Independent oracle: hull membership by exact barycentric coordinates over every vertex
/// tetrahedron (Carathéodory); interior iff the point pushed slightly away from the vertex
/// centroid is still in the hull. The push is smaller than any facet slack a point with
/// these denominators can have.
inline Membership barycentric_oracle(const ExponentTuple& q, Polytope p) {
    detail::require_on_S(q);
    const auto& V = polytope_vertices(p);
    auto x = detail::p3(q);
    if (!detail::in_hull_by_tetrahedra(x, V)) return Membership::outside;
    auto c = detail::p3(centroid(p));
    boost::multiprecision::cpp_int D = 7 * 5;
    for (auto& t : x) D *= boost::multiprecision::denominator(t);
    Exact t = Exact(1) / (Exact(D) * D * (1 << 20));
    detail::P3 y;
    for (int i = 0; i < 3; ++i) y[i] = x[i] + t * (x[i] - c[i]);
    if (x == c) return Membership::interior;
    return detail::in_hull_by_tetrahedra(y, V) ? Membership::interior : Membership::boundary;
}

/// Random point of S with coordinates q1..q3 multiples of 1/den in [−2, 2].
template <class Rng>
ExponentTuple random_point_on_S(Rng& rng, int den = 32) {
    std::uniform_int_distribution<int> k(-2 * den, 2 * den);
    ExponentTuple t;
    for (int i = 0; i < 3; ++i) t.q[i] = Exact(k(rng), den);
    t.q[3] = 1 - t.q[0] - t.q[1] - t.q[2];
    return t;
}

/// Σ w_v V_v with positive weights, multiples of 1/den (den ≥ number of vertices).
template <class Rng>
ExponentTuple random_interior_combination(Polytope p, Rng& rng, int den = 32) {
    const auto& V = polytope_vertices(p);
    std::vector<int> w(V.size(), 1);
    std::uniform_int_distribution<std::size_t> pick(0, V.size() - 1);
    for (int r = int(V.size()); r < den; ++r) ++w[pick(rng)];
    ExponentTuple t;
    for (std::size_t v = 0; v < V.size(); ++v)
        for (int i = 0; i < 4; ++i) t.q[i] += Exact(w[v] * V[v].x[i], den);
    return t;
}

// ---------------------------------------------------------------------------
// exceptional set

struct ExceptionalSet {
    MeasurableSet omega;
    double C = 0;  // calibrated
    int doublings = 0;
};

/// Ω = ⋃_{j≠d} {M(χ_{E_j}/|E_j|) > C}, C doubled until |Ω| < 1/2.
inline ExceptionalSet exceptional_set(const std::vector<MeasurableSet>& E, int designated, double C) {
    if (designated < 0 || designated >= int(E.size())) throw std::invalid_argument("designated index out of range");
    if (E[designated].measure() != 1.0) throw std::invalid_argument("designated set must have measure 1");
    if (!(C > 0)) throw std::invalid_argument("C must be positive");
    const TorusGrid g = E[designated].grid;
    std::vector<SampledFunction> M;
    for (int j = 0; j < int(E.size()); ++j) {
        if (j == designated) continue;
        if (E[j].empty()) throw std::invalid_argument("empty set in exceptional-set construction");
        auto h = E[j].indicator();
        for (auto& v : h.values) v /= E[j].measure();
        M.push_back(maximal_function(h));
    }
    ExceptionalSet r;
    for (r.C = C;; r.C *= 2, ++r.doublings) {
        if (r.C > std::ldexp(1.0, 20)) throw std::domain_error("exceptional set: C exceeded 2^20 without |Omega| < 1/2");
        r.omega = MeasurableSet(g);
        for (auto& m : M)
            for (int k = 0; k < g.N; ++k)
                if (m[k].real() > r.C) r.omega.cells[k] = 1;
        if (r.omega.measure() < 0.5) return r;
    }
}

// ---------------------------------------------------------------------------
// restricted weak type

struct RwtOptions {
    std::string vertex = "A4";
    Exact offset{1, 20};  // q = vertex + offset·(centroid − vertex)
    int trials = 50;
    std::uint64_t seed = 7;
    double C0 = 1;
    int set_level = 5;  // sets are unions of blocks of length 2^{-set_level}
};

/// The designated (normalized) index of a vertex: its negative coordinate, or 4.
inline int designated_index(const std::string& vertex) {
    const auto& v = find_vertex(vertex);
    for (int i = 0; i < 4; ++i)
        if (v.x[i] < 0) return i;
    return 3;
}

struct RwtInputs {
    std::array<MeasurableSet, 4> E;  // E[d] is the torus
    ExceptionalSet ex;
    MeasurableSet major;  // E'_d = E_d \ Ω
    std::array<SampledFunction, 4> f;
};

/// One trial's sets and functions from stream (seed, trial).
inline RwtInputs rwt_inputs(const TorusGrid& g, int d, const RwtOptions& o, int trial) {
    auto rng = make_rng(o.seed, std::uint64_t(trial));
    std::uniform_real_distribution<double> density(0.05, 0.6);
    RwtInputs in;
    for (int i = 0; i < 4; ++i) in.E[i] = i == d ? MeasurableSet(g, true) : random_dyadic_set(g, o.set_level, density(rng), rng);
    in.ex = exceptional_set({in.E.begin(), in.E.end()}, d, o.C0);
    in.major = in.E[d];
    for (int k = 0; k < g.N; ++k)
        if (in.ex.omega.cells[k]) in.major.cells[k] = 0;
    for (int i = 0; i < 4; ++i) in.f[i] = random_in_X(i == d ? in.major : in.E[i], rng);
    return in;
}

/// f(2^s x) on the 2^s-times finer grid, exactly.
inline SampledFunction compress(const SampledFunction& f, int s) {
    SampledFunction out(TorusGrid(f.grid.N << s));
    for (int k = 0; k < out.grid.N; ++k) out[k] = f[k % f.grid.N];
    return out;
}
inline MeasurableSet compress(const MeasurableSet& E, int s) {
    MeasurableSet out(TorusGrid(E.grid.N << s));
    for (int k = 0; k < out.grid.N; ++k) out.cells[k] = E.cells[k % E.grid.N];
    return out;
}
inline RwtInputs compress(const RwtInputs& in, int s) {
    RwtInputs out;
    for (int i = 0; i < 4; ++i) out.E[i] = compress(in.E[i], s), out.f[i] = compress(in.f[i], s);
    out.ex = {compress(in.ex.omega, s), in.ex.C, in.ex.doublings};
    out.major = compress(in.major, s);
    return out;
}

struct RwtTrial {
    std::array<double, 4> measures{};
    double omega_measure = 0;
    double C = 0;
    cplx lambda{};
    double ratio = 0;
};

struct RwtReport {
    std::string model, vertex;
    int N = 0, designated = 0;
    std::optional<int> k0;
    std::uint64_t seed = 0;
    std::array<double, 4> exponents{};
    std::vector<RwtTrial> trials;
    double max_ratio = 0, median_ratio = 0, calibrated_C = 0;
    bool omega_ok = true;  // |Ω| < 1/2 and E' ∩ Ω = ∅ on every trial
    std::vector<double> layer_mass;  // Σ|J|^{-1/2}|a1a2a3| by dyadic distance of J to Ω^c (T1 models)
};

/// Λ for the experiment: the model form, or ∫f1f2f3f4 for the trivial baseline.
using FormFn = std::function<cplx(const std::array<SampledFunction, 4>&)>;

inline FormFn model_form_fn(const ModelConfig& c, Model m) {
    return [&c, m](const std::array<SampledFunction, 4>& f) { return model_form(c, m, f[0], f[1], f[2], f[3]); };
}
inline FormFn trivial_form_fn() {
    return [](const std::array<SampledFunction, 4>& f) {
        cplx s{};
        for (int k = 0; k < f[0].grid.N; ++k) s += f[0][k] * f[1][k] * f[2][k] * f[3][k];
        return s / double(f[0].grid.N);
    };
}

namespace detail {

inline ExponentTuple checked_target(const RwtOptions& o) {
    auto q = near_vertex(o.vertex, o.offset);
    if (polytope_membership(q, Polytope::D) != Membership::interior)
        throw std::invalid_argument("target exponent is not interior to D; reduce the offset toward the centroid");
    return q;
}

inline RwtTrial score(const RwtInputs& in, int d, const std::array<double, 4>& q, const FormFn& form) {
    RwtTrial t;
    for (int i = 0; i < 4; ++i) t.measures[i] = in.E[i].measure();
    t.omega_measure = in.ex.omega.measure();
    t.C = in.ex.C;
    t.lambda = form(in.f);
    double denom = 1;
    for (int i = 0; i < 4; ++i)
        if (i != d) denom *= std::pow(t.measures[i], q[i]);  // |E_d| = 1
    t.ratio = std::abs(t.lambda) / denom;
    return t;
}

inline void summarize(RwtReport& r) {
    std::vector<double> v;
    for (auto& t : r.trials) {
        v.push_back(t.ratio);
        r.calibrated_C = std::max(r.calibrated_C, t.C);
        r.omega_ok = r.omega_ok && t.omega_measure < 0.5;
    }
    std::sort(v.begin(), v.end());
    if (!v.empty()) r.max_ratio = v.back(), r.median_ratio = v[v.size() / 2];
}

/// Λ1 terms grouped by d with 1 + dist(J, Ω^c)/|J| ∈ [2^d, 2^{d+1}), d = 0 when J meets Ω^c.
inline void add_layers(std::vector<double>& mass, const ModelConfig& c, Model m, const RwtInputs& in) {
    auto L = lambda1_coefficients(c, m, in.f[0], in.f[1], in.f[2], in.f[3]);
    const TorusGrid g = c.grid();
    for (std::size_t t = 0; t < L.a1.size(); ++t) {
        const auto& J = L.a1.intervals[t];
        double dist = INFINITY;
        for (int k = 0; k < g.N; ++k)
            if (!in.ex.omega.cells[k]) dist = std::min(dist, torus_dist(g.x(k), J));
        int layer = std::isfinite(dist) ? int(std::floor(std::log2(1 + dist / J.length()))) : 0;
        if (int(mass.size()) <= layer) mass.resize(layer + 1, 0.0);
        mass[layer] += std::abs(L.a1.a[t] * L.a2.a[t] * L.a3.a[t]) / std::sqrt(J.length());
    }
}

}  // namespace detail

/// Trials of |Λ| / ∏|E_i|^{1/p_i} near a vertex of D, E_d normalized to the torus.
inline RwtReport rwt_experiment(const ModelConfig& c, Model m, const RwtOptions& o, bool layers = false) {
    c.validate(m);
    auto q = detail::checked_target(o).to_double();
    RwtReport r;
    r.model = to_string(m), r.vertex = o.vertex, r.N = c.grid().N, r.designated = designated_index(o.vertex);
    r.k0 = is_k0(m) ? c.k0 : std::nullopt;
    r.seed = o.seed, r.exponents = q;
    r.trials.resize(o.trials);
    auto form = model_form_fn(c, m);
    std::vector<std::vector<double>> lm(o.trials);
    parallel_for(std::size_t(o.trials), [&](std::size_t t) {
        auto in = rwt_inputs(c.grid(), r.designated, o, int(t));
        r.trials[t] = detail::score(in, r.designated, q, form);
        if (in.major.intersects(in.ex.omega)) throw std::logic_error("major subset meets the exceptional set");
        if (layers && is_t1(m)) detail::add_layers(lm[t], c, m, in);
    });
    for (auto& v : lm) {
        if (r.layer_mass.size() < v.size()) r.layer_mass.resize(v.size(), 0.0);
        for (std::size_t d = 0; d < v.size(); ++d) r.layer_mass[d] += v[d];
    }
    detail::summarize(r);
    return r;
}

struct K0Probe {
    std::vector<int> k0;
    std::vector<double> max_ratio;
    double spread = 0;  // max/min of the per-k0 maxima
};

/// Uniformity in k0: the same trials rerun for each k0 on one configuration.
inline K0Probe k0_probe(ModelConfig& c, Model m, const std::vector<int>& ks, const RwtOptions& o) {
    if (!is_k0(m)) throw std::invalid_argument("k0 probe needs a k0 model");
    K0Probe p;
    const auto saved = c.k0;
    for (int k : ks) {
        c.k0 = k;
        p.k0.push_back(k);
        p.max_ratio.push_back(rwt_experiment(c, m, o).max_ratio);
    }
    c.k0 = saved;
    auto [lo, hi] = std::minmax_element(p.max_ratio.begin(), p.max_ratio.end());
    p.spread = *lo > 0 ? *hi / *lo : INFINITY;
    return p;
}

struct DilationReport {
    std::vector<int> scales;
    std::vector<double> max_ratio;
    std::vector<std::vector<double>> ratios;  // per scale, per trial
    double spread = 0;                       // max/min of the per-scale maxima
    double max_trial_drift = 0;              // max over trials of |r_s/r_0 − 1|
};

/// Reruns the trials with every set, function and interval compressed by 2^s.
/// `form_at(s)` returns the form on the grid N·2^s (ladder shifted by −s for model runs).
inline DilationReport dilation_sweep(const TorusGrid& g, const RwtOptions& o, const std::vector<int>& scales,
                                     const std::function<FormFn(int)>& form_at) {
    auto q = detail::checked_target(o).to_double();
    const int d = designated_index(o.vertex);
    DilationReport r;
    std::vector<RwtInputs> base(o.trials);
    parallel_for(std::size_t(o.trials), [&](std::size_t t) { base[t] = rwt_inputs(g, d, o, int(t)); });
    for (int s : scales) {
        if (s < 0 || (std::int64_t(g.N) << s) > (1 << 16)) throw std::invalid_argument("dilation scale out of range");
        FormFn form = form_at(s);
        std::vector<double> ratios(o.trials);
        parallel_for(std::size_t(o.trials), [&](std::size_t t) {
            ratios[t] = detail::score(compress(base[t], s), d, q, form).ratio;
        });
        r.scales.push_back(s);
        r.max_ratio.push_back(*std::max_element(ratios.begin(), ratios.end()));
        r.ratios.push_back(std::move(ratios));
    }
    auto [lo, hi] = std::minmax_element(r.max_ratio.begin(), r.max_ratio.end());
    r.spread = *lo > 0 ? *hi / *lo : INFINITY;
    for (std::size_t s = 1; s < r.ratios.size(); ++s)
        for (int t = 0; t < o.trials; ++t)
            if (r.ratios[0][t] > 0) r.max_trial_drift = std::max(r.max_trial_drift, std::abs(r.ratios[s][t] / r.ratios[0][t] - 1));
    return r;
}

}  // namespace fpp

#pragma once

// JSON formats for functions, symbol tables, families, coefficient families and reports.
// Needs the single-header nlohmann/json on the include path.

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "harness.hpp"
#include "multilinear.hpp"

namespace fpp::io {

using nlohmann::json;

inline json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

inline void write_json(const std::string& path, const json& j) {
    if (path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

namespace detail {
inline json split(const std::vector<cplx>& v) {
    std::vector<double> re(v.size()), im(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) re[i] = v[i].real(), im[i] = v[i].imag();
    return {{"re", re}, {"im", im}};
}
inline std::vector<cplx> join(const json& j, std::size_t n) {
    auto re = j.at("re").get<std::vector<double>>();
    std::vector<double> im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
    if (re.size() != n || im.size() != n) throw std::invalid_argument("re/im length mismatch");
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = {re[i], im[i]};
    return v;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// {"n": N, "re": [...], "im": [...]}

inline json to_json(const SampledFunction& f) {
    json j = detail::split(f.values);
    j["n"] = f.grid.N;
    return j;
}

inline SampledFunction function_from_json(const json& j) {
    TorusGrid g(j.at("n").get<int>());
    return SampledFunction(g, detail::join(j, std::size_t(g.N)));
}

// ---------------------------------------------------------------------------
// {"d": d, "lo": [...], "shape": [...], "re": [...], "im": [...]}; lo defaults to −shape/2

inline json to_json(const SymbolTable& t) {
    json j = detail::split(t.values);
    j["d"] = t.d, j["lo"] = t.lo, j["shape"] = t.shape;
    return j;
}

inline SymbolTable table_from_json(const json& j) {
    SymbolTable t;
    t.d = j.at("d").get<int>();
    t.shape = j.at("shape").get<std::vector<int>>();
    if (t.d < 1 || t.d > 3 || int(t.shape.size()) != t.d) throw std::invalid_argument("symbol table: bad d/shape");
    if (j.contains("lo")) t.lo = j.at("lo").get<std::vector<int>>();
    else
        for (int s : t.shape) t.lo.push_back(-s / 2);
    if (int(t.lo.size()) != t.d) throw std::invalid_argument("symbol table: bad lo");
    t.values = detail::join(j, t.size());
    return t;
}

/// A catalog name, or a path to a table file.
inline Symbol load_symbol(const std::string& spec, int N) {
    if (auto s = catalog_symbol(spec, N)) return *s;
    return table_symbol(spec, table_from_json(read_json(spec)));
}

// ---------------------------------------------------------------------------
// families: (k, n), flavor, ω endpoints as exact rationals

inline std::string to_string(const Rational& r) {
    return r.denominator() == 1 ? std::to_string(r.numerator())
                                : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline Rational rational_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

inline json to_json(const FreqInterval& w) { return json::array({to_string(w.lo), to_string(w.hi)}); }

inline json to_json(const BumpFamily& f) {
    json iv = json::array();
    for (auto& I : f.intervals) iv.push_back({{"k", I.k}, {"n", I.n}, {"omega", to_json(f.omega(I))}});
    return {{"flavor", to_string(f.flavor)}, {"n_grid", f.grid.N}, {"shape", to_json(f.shape)}, {"intervals", iv}};
}

/// Rebuilds a family from its record; ω is recomputed and checked against the stored endpoints.
inline BumpFamily family_from_json(const json& j) {
    Flavor fl = j.at("flavor").get<std::string>() == "lacunary" ? Flavor::lacunary : Flavor::non_lacunary;
    auto sh = j.at("shape");
    FreqInterval shape{rational_from_string(sh.at(0).get<std::string>()), rational_from_string(sh.at(1).get<std::string>())};
    std::vector<DyadicInterval> iv;
    for (auto& r : j.at("intervals")) iv.emplace_back(r.at("k").get<int>(), r.at("n").get<std::int64_t>());
    auto f = make_family(TorusGrid(j.at("n_grid").get<int>()), iv, fl, shape);
    for (auto& r : j.at("intervals")) {
        DyadicInterval I(r.at("k").get<int>(), r.at("n").get<std::int64_t>());
        if (r.contains("omega") && r.at("omega") != to_json(f.omega(I))) throw std::invalid_argument("family record: omega mismatch");
    }
    return f;
}

// ---------------------------------------------------------------------------
// coefficient families: {"intervals": [[k, n], ...], "re": [...], "im": [...], "k0": optional}

inline json to_json(const CoefficientFamily& c) {
    json iv = json::array();
    for (auto& I : c.intervals) iv.push_back({I.k, I.n});
    json j = detail::split(c.a);
    j["intervals"] = iv;
    if (c.k0) j["k0"] = *c.k0;
    return j;
}

inline CoefficientFamily coefficients_from_json(const json& j) {
    CoefficientFamily c;
    for (auto& r : j.at("intervals")) c.intervals.emplace_back(r.at(0).get<int>(), r.at(1).get<std::int64_t>());
    c.a = detail::join(j, c.intervals.size());
    if (j.contains("k0")) c.k0 = j.at("k0").get<int>();
    std::set<DyadicInterval> seen(c.intervals.begin(), c.intervals.end());
    if (seen.size() != c.intervals.size()) throw std::invalid_argument("coefficient family: repeated interval");
    return c;
}

/// One family, or {"families": [f1, f2, f3]}.
inline std::vector<CoefficientFamily> coefficient_file(const json& j) {
    std::vector<CoefficientFamily> out;
    if (j.contains("families"))
        for (auto& f : j.at("families")) out.push_back(coefficients_from_json(f));
    else out.push_back(coefficients_from_json(j));
    return out;
}

// ---------------------------------------------------------------------------
// reports

inline json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json interval_list(const std::vector<DyadicInterval>& v) {
    json a = json::array();
    for (auto& I : v) a.push_back({I.k, I.n});
    return a;
}

inline json to_json(const RwtReport& r) {
    json trials = json::array();
    for (auto& t : r.trials)
        trials.push_back({{"measures", t.measures},
                          {"omega_measure", t.omega_measure},
                          {"C", t.C},
                          {"lambda", cplx_json(t.lambda)},
                          {"ratio", t.ratio}});
    json cfg = {{"model", r.model}, {"vertex", r.vertex}, {"grid", r.N}, {"designated", r.designated + 1},
                {"seed", r.seed},   {"exponents", r.exponents}};
    cfg["k0"] = r.k0 ? json(*r.k0) : json(nullptr);
    return {{"config", cfg},
            {"trials", trials},
            {"max_ratio", r.max_ratio},
            {"median_ratio", r.median_ratio},
            {"calibrated_C", r.calibrated_C},
            {"omega_ok", r.omega_ok},
            {"layer_mass", r.layer_mass}};
}

inline json to_json(const FullPartition& p) {
    json levels = json::array();
    for (auto& L : p.levels) {
        json tops = json::array();
        std::size_t members = 0;
        for (auto& T : L.trees) tops.push_back({T.top.k, T.top.n}), members += T.members.size();
        levels.push_back({{"n", L.n}, {"size", L.size}, {"top_measure", L.top_measure}, {"tops", tops}, {"members", members}});
    }
    return {{"levels", levels},
            {"null_set", interval_list(p.null_set)},
            {"max_constant", p.max_constant},
            {"exact", p.exact},
            {"size_bounds", p.size_bounds}};
}

}  // namespace fpp::io

// fpp: command-line front end.
//
//   fpp apply --symbol 'flag(homog0,ratio)' --f1 a.json --f2 b.json --f3 c.json --method separable --out t.json
//   fpp decompose --a homog0 --b ratio --M 8 --sep 3 --nrange 20 --out split.json
//   fpp verify --suite identities --grid 256 --seed 1
//   fpp model --op T1k0 --k0 3 --levels 7 --grid 256 --seed 5 --out model.json
//   fpp size-energy --coeffs model.json --i 2 --j 1 --theta 1/3,1/3,1/3 --out se.json
//   fpp rwt --model T1 --vertex A4 --trials 50 --grid 256 --seed 7 --out rwt.json
//   fpp polytope --point 0.25,0.5,0.25,0 --which D

#include <CLI11.hpp>

#include <cstdio>

#include "fpp/corpus.hpp"
#include "fpp/io.hpp"

using namespace fpp;
using io::json;

namespace {

TorusGrid grid_of(int N) { return TorusGrid(N); }

int cmd_apply(const std::string& symbol, const std::array<std::string, 3>& files, const std::string& method,
              const std::string& out) {
    std::array<SampledFunction, 3> f;
    for (int i = 0; i < 3; ++i) f[i] = io::function_from_json(io::read_json(files[i]));
    auto m = io::load_symbol(symbol, f[0].grid.N);
    if (method != "naive" && method != "separable") throw std::invalid_argument("method must be naive or separable");
    auto r = apply(m, f[0], f[1], f[2], method == "naive" ? Method::naive : Method::separable);
    json j = io::to_json(r.output);
    j["method"] = to_string(r.method);
    j["flops"] = r.flops;
    j["symbol"] = m.name;
    io::write_json(out, j);
    std::printf("%s via %s: %lld instrumented flops\n", m.name.c_str(), to_string(r.method).c_str(), (long long)r.flops);
    return 0;
}

int cmd_decompose(const std::string& a, const std::string& b, int M, int sep, int nrange, int half, double trunc,
                  const std::string& out) {
    auto w = desk_windows(M);
    auto sa = io::load_symbol(a, 0), sb = io::load_symbol(b, 0);
    if (sa.d != 2 || sb.d != 2) throw std::invalid_argument("decompose needs arity-2 symbols");
    auto s = split_product(sa, sb, w, sep, nrange, trunc, half);
    std::printf("reconstruction error %.3e (target %.1e): %s\n", s.error, trunc, s.pass ? "pass" : "fail");
    if (!out.empty())
        io::write_json(out, {{"a", a}, {"b", b}, {"M", M}, {"sep", sep}, {"nrange", nrange}, {"half", half},
                             {"error", s.error}, {"pass", s.pass},
                             {"m1", io::to_json(*s.m1.table)}, {"m2", io::to_json(*s.m2.table)},
                             {"m3", io::to_json(*s.m3.table)}});
    return s.pass ? 0 : 1;
}

int cmd_verify(const std::string& suite, int N, std::uint64_t seed, int count, const std::string& out) {
    TorusGrid g = grid_of(N);
    json rep;
    bool ok = true;
    auto run = [&](const char* name, double tol, auto&& fn) {
        double worst = 0, worst_abs = 0;
        for (int i = 0; i < count; ++i) {
            IdentityReport r = fn(g, seed, std::uint64_t(i));
            worst = std::max(worst, r.relative());
            worst_abs = std::max(worst_abs, r.deviation);
        }
        bool pass = worst <= tol;
        ok = ok && pass;
        std::printf("%-6s %d instances: max relative deviation %.3e (abs %.3e) tol %.0e %s\n", name, count, worst,
                    worst_abs, tol, pass ? "pass" : "FAIL");
        rep[name] = {{"max_relative", worst}, {"max_abs", worst_abs}, {"tol", tol}, {"pass", pass}};
    };
    if (suite == "identities" || suite == "all") {
        run("calc1", 1e-10, calc1_instance);
        run("calc2", 1e-10, calc2_instance);
        run("calc3", 1e-9, calc3_instance);
    }
    if (suite == "adjoint" || suite == "all") {
        double worst = 0;
        TorusGrid ga(std::min(N, 64));
        for (int i = 0; i < count; ++i) worst = std::max(worst, adjoint_instance(ga, 7, seed, std::uint64_t(i)).max_relative);
        bool pass = worst <= 1e-10;
        ok = ok && pass;
        std::printf("adjoint %d instances at N=%d: max relative spread %.3e %s\n", count, ga.N, worst, pass ? "pass" : "FAIL");
        rep["adjoint"] = {{"max_relative", worst}, {"pass", pass}};
    }
    if (rep.is_null()) throw std::invalid_argument("suite must be identities, adjoint or all");
    if (!out.empty()) io::write_json(out, rep);
    return ok ? 0 : 1;
}

int cmd_model(const std::string& op, std::optional<int> k0, int levels, int N, int nonlac_J, std::uint64_t seed,
              const std::string& out) {
    Model m = parse_model(op);
    TorusGrid g = grid_of(N);
    const int kmin = -ilog2(N), kmax = kmin + levels - 1;
    auto c = make_model(m, g, kmin, kmax, nonlac_J, k0);
    auto rng = make_rng(seed);
    auto f = random_quad(g, N / 2 - 1, rng);
    auto T = apply_model(c, m, f[0], f[1], f[2]);
    cplx lam = model_form(c, m, f[0], f[1], f[2], f[3]);
    std::printf("%s on N=%d, scales [%d,%d]: Lambda = %.6e%+.6ei\n", op.c_str(), N, kmin, kmax, lam.real(), lam.imag());
    json j{{"op", op}, {"grid", N}, {"kmin", kmin}, {"kmax", kmax}, {"seed", seed}, {"nonlac_J", nonlac_J},
           {"lambda", io::cplx_json(lam)}, {"output", io::to_json(T)}};
    j["k0"] = k0 ? json(*k0) : json(nullptr);
    json fams = json::object();
    for (int s = 0; s < 3; ++s) {
        fams["I" + std::to_string(s + 1)] = io::to_json(c.I[s]);
        fams["J" + std::to_string(s + 1)] = io::to_json(c.J[s]);
    }
    j["bump_families"] = fams;
    if (is_t1(m)) {
        auto L = lambda1_coefficients(c, m, f[0], f[1], f[2], f[3]);
        double dev = std::abs(L.lambda - lam);
        std::printf("  reordered sum deviation %.3e (scale %.3e)\n", dev, L.magnitude);
        auto ip = inner_paraproduct(c, m, f[0], f[3]);
        std::printf("  inner paraproduct identity relative %.3e over %zu active I\n", ip.relative(), ip.active_I);
        j["reordering"] = {{"deviation", dev}, {"scale", L.magnitude}};
        j["inner_paraproduct"] = {{"relative", ip.relative()}, {"holds", ip.holds}};
        j["families"] = {io::to_json(L.a1), io::to_json(L.a2), io::to_json(L.a3)};
        auto P = index_partition_check(c);
        std::printf("  k0 classes partition the T1 index set: %s (%zu pairs)\n", P.exact ? "yes" : "no", P.t1_pairs);
        j["index_partition"] = {{"exact", P.exact}, {"pairs", P.t1_pairs}, {"duplicates", P.duplicates}, {"missing", P.missing}};
    }
    if (!out.empty()) io::write_json(out, j);
    return 0;
}

int cmd_size_energy(const std::string& file, int i, int j, std::optional<int> k0, const std::string& theta,
                    const std::string& out) {
    auto fams = io::coefficient_file(io::read_json(file));
    SizeEnergyParams p;
    p.i = i, p.j = j, p.k0 = k0, p.theta = parse_theta(theta);
    p.validate();
    if (fams.size() != 1 && fams.size() != 3) throw std::invalid_argument("coefficient file must hold one or three families");
    const auto& f = fams.size() == 3 ? fams[i - 1] : fams[0];
    if (k0 && f.k0 && *f.k0 != *k0) throw std::invalid_argument("--k0 does not match the file");
    auto er = energy_report(f, p);
    double sz = size(f, p);
    std::printf("slot %d (j=%d, %s): size %.6e, energy %.6e at level n=%d over %zu intervals\n", i, j,
                p.square() ? "square function" : "coefficient sup", sz, er.energy, er.level, er.chain.size());
    json rep{{"i", i}, {"j", j}, {"theta", p.theta}, {"size", sz}, {"energy", er.energy}, {"level", er.level},
             {"chain", io::interval_list(er.chain)}, {"intervals", f.size()}};
    rep["k0"] = k0 ? json(*k0) : json(nullptr);
    if (p.square()) {
        auto jn = john_nirenberg_compare(f, p);
        rep["john_nirenberg"] = {{"weak_size", jn.weak_size}, {"l2_size", jn.l2_size}, {"ratio", jn.ratio()}};
    }
    if (sz > 0) {
        auto part = full_partition(f, p);
        std::printf("  stopping-time partition: %zu levels, max top-measure constant %.3f, exact %s\n", part.levels.size(),
                    part.max_constant, part.exact ? "yes" : "no");
        rep["partition"] = io::to_json(part);
    }
    if (fams.size() == 3) {
        auto ae = abstract_estimate_check({fams[0], fams[1], fams[2]}, p);
        std::printf("  |Lambda| = %.6e, size/energy bound %.6e, ratio %.4f\n", ae.lhs, ae.rhs, ae.ratio());
        rep["estimate"] = {{"lhs", ae.lhs}, {"rhs", ae.rhs}, {"ratio", ae.ratio()}, {"sizes", ae.sizes}, {"energies", ae.energies}};
    }
    if (!out.empty()) io::write_json(out, rep);
    return 0;
}

int cmd_rwt(const std::string& model, const std::string& vertex, int trials, int N, std::uint64_t seed,
            std::optional<int> k0, int nonlac_J, const std::string& offset, int levels, const std::string& out) {
    Model m = parse_model(model);
    TorusGrid g = grid_of(N);
    const int kmin = -ilog2(N);
    auto c = make_model(m, g, kmin, kmin + levels - 1, nonlac_J, is_k0(m) ? (k0 ? k0 : std::optional<int>(3)) : std::nullopt);
    RwtOptions o;
    o.vertex = vertex, o.trials = trials, o.seed = seed, o.offset = parse_exact(offset);
    auto r = rwt_experiment(c, m, o, is_t1(m));
    auto q = r.exponents;
    std::printf("%s near %s, 1/p = (%.4f, %.4f, %.4f, %.4f), %d trials: max ratio %.4e, median %.4e, C %.0f, |Omega|<1/2 %s\n",
                model.c_str(), vertex.c_str(), q[0], q[1], q[2], q[3], trials, r.max_ratio, r.median_ratio,
                r.calibrated_C, r.omega_ok ? "yes" : "NO");
    if (!out.empty()) io::write_json(out, io::to_json(r));
    return r.omega_ok ? 0 : 1;
}

int cmd_polytope(const std::string& point, const std::string& which) {
    auto q = ExponentTuple::parse(point);
    auto p = parse_polytope(which);
    auto a = polytope_membership(q, p), b = barycentric_oracle(q, p);
    std::printf("%s (oracle: %s)\n", to_string(a).c_str(), to_string(b).c_str());
    return a == b ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flag paraproduct numerics"};
    app.require_subcommand(1);

    std::string symbol, method = "separable", out;
    std::array<std::string, 3> files;
    auto* ap = app.add_subcommand("apply", "apply a trilinear multiplier to three sampled functions");
    ap->add_option("--symbol", symbol, "catalog name or table file")->required();
    ap->add_option("--f1", files[0])->required();
    ap->add_option("--f2", files[1])->required();
    ap->add_option("--f3", files[2])->required();
    ap->add_option("--method", method)->check(CLI::IsMember({"naive", "separable"}));
    ap->add_option("--out", out)->required();

    std::string a, b;
    int M = 8, sep = 3, nrange = 20, half = 16;
    double trunc = 1e-3;
    auto* de = app.add_subcommand("decompose", "three-way split of a(x1,x2)·b(x2,x3)");
    de->add_option("--a", a)->required();
    de->add_option("--b", b)->required();
    de->add_option("--M", M);
    de->add_option("--sep", sep);
    de->add_option("--nrange", nrange);
    de->add_option("--half", half, "tables cover {-half..half-1}^3");
    de->add_option("--trunc", trunc, "reconstruction target");
    de->add_option("--out", out);

    std::string suite = "identities";
    int N = 256, count = 20;
    std::uint64_t seed = 1;
    auto* ve = app.add_subcommand("verify", "randomized checks of the exact discretization identities");
    ve->add_option("--suite", suite)->check(CLI::IsMember({"identities", "adjoint", "all"}));
    ve->add_option("--grid", N);
    ve->add_option("--seed", seed);
    ve->add_option("--count", count);
    ve->add_option("--out", out);

    std::string op = "T1";
    std::optional<int> k0;
    int levels = 7, nonlac_J = 1;
    auto* mo = app.add_subcommand("model", "evaluate a model operator and its identities on random inputs");
    mo->add_option("--op", op)->check(CLI::IsMember({"T1", "T1k0", "T2", "T2k0"}));
    mo->add_option("--k0", k0);
    mo->add_option("--levels", levels);
    mo->add_option("--grid", N);
    mo->add_option("--nonlac-j", nonlac_J, "which J-family is non-lacunary (1..3)");
    mo->add_option("--seed", seed);
    mo->add_option("--out", out);

    std::string coeffs, theta = "1/3,1/3,1/3";
    int si = 1, sj = 1;
    auto* se = app.add_subcommand("size-energy", "size, energy and stopping-time partition of a coefficient family");
    se->add_option("--coeffs", coeffs)->required();
    se->add_option("--i", si)->check(CLI::Range(1, 3));
    se->add_option("--j", sj)->check(CLI::Range(1, 3));
    se->add_option("--k0", k0);
    se->add_option("--theta", theta);
    se->add_option("--out", out);

    std::string model = "T1", vertex = "A4", offset = "1/20";
    int trials = 50;
    auto* rw = app.add_subcommand("rwt", "restricted-weak-type trials near a vertex of D");
    rw->add_option("--model", model)->check(CLI::IsMember({"T1", "T1k0", "T2", "T2k0"}));
    rw->add_option("--vertex", vertex);
    rw->add_option("--trials", trials);
    rw->add_option("--grid", N);
    rw->add_option("--seed", seed);
    rw->add_option("--k0", k0);
    rw->add_option("--nonlac-j", nonlac_J);
    rw->add_option("--offset", offset, "fraction of the way from the vertex to the centroid");
    rw->add_option("--levels", levels);
    rw->add_option("--out", out);

    std::string point, which = "D";
    auto* po = app.add_subcommand("polytope", "classify an exponent tuple against D or Dtilde");
    po->add_option("--point", point)->required();
    po->add_option("--which", which)->check(CLI::IsMember({"D", "Dtilde"}));

    CLI11_PARSE(app, argc, argv);
    try {
        if (*ap) return cmd_apply(symbol, files, method, out);
        if (*de) return cmd_decompose(a, b, M, sep, nrange, half, trunc, out);
        if (*ve) return cmd_verify(suite, N, seed, count, out);
        if (*mo) return cmd_model(op, k0, levels, N, nonlac_J, seed, out);
        if (*se) return cmd_size_energy(coeffs, si, sj, k0, theta, out);
        if (*rw) {
            if (!rw->count("--nonlac-j")) nonlac_J = 3;
            return cmd_rwt(model, vertex, trials, N, seed, k0, nonlac_J, offset, levels, out);
        }
        if (*po) return cmd_polytope(point, which);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace fpp {

/// Dense table over the integer box lo[i] .. lo[i]+shape[i]-1.
struct SymbolTable {
    int d = 0;
    std::vector<int> lo, shape;
    std::vector<cplx> values;  // row-major, last index fastest

    std::size_t size() const {
        std::size_t s = 1;
        for (int n : shape) s *= std::size_t(n);
        return s;
    }
    std::optional<std::size_t> index(std::span<const long> xi) const {
        std::size_t idx = 0;
        for (int i = 0; i < d; ++i) {
            long o = xi[i] - lo[i];
            if (o < 0 || o >= shape[i]) return std::nullopt;
            idx = idx * std::size_t(shape[i]) + std::size_t(o);
        }
        return idx;
    }
};

enum class SymbolKind { trivial, tabulated, flag };

/// A symbol on frequency tuples. Tabulated symbols carry a table, an analytic
/// evaluator for real arguments, or both; flag symbols are a(ξ₁,ξ₂)·b(ξ₂,ξ₃).
struct Symbol {
    int d = 1;
    SymbolKind kind = SymbolKind::trivial;
    std::string name;
    std::function<cplx(const double*)> fn;
    std::shared_ptr<const SymbolTable> table;
    std::shared_ptr<const Symbol> a, b;
};

inline Symbol trivial_symbol(int d) {
    if (d < 1 || d > 3) throw std::invalid_argument("arity must be 1..3");
    Symbol s;
    s.d = d;
    s.kind = SymbolKind::trivial;
    s.name = "trivial";
    return s;
}

inline Symbol analytic_symbol(int d, std::string name, std::function<cplx(const double*)> fn) {
    Symbol s;
    s.d = d;
    s.kind = SymbolKind::tabulated;
    s.name = std::move(name);
    s.fn = std::move(fn);
    return s;
}

inline Symbol flag_symbol(Symbol a, Symbol b) {
    if (a.d != 2 || b.d != 2) throw std::invalid_argument("flag factors must have arity 2");
    Symbol s;
    s.d = 3;
    s.kind = SymbolKind::flag;
    s.name = "flag(" + a.name + "," + b.name + ")";
    s.a = std::make_shared<Symbol>(std::move(a));
    s.b = std::make_shared<Symbol>(std::move(b));
    return s;
}

/// Attach a table over the centred box {−half..half−1}^d, built from fn.
inline Symbol tabulate(Symbol s, int half) {
    if (s.kind != SymbolKind::tabulated || !s.fn) return s;
    auto t = std::make_shared<SymbolTable>();
    t->d = s.d;
    t->lo.assign(s.d, -half);
    t->shape.assign(s.d, 2 * half);
    t->values.resize(t->size());
    std::vector<double> x(s.d);
    for (std::size_t idx = 0; idx < t->values.size(); ++idx) {
        std::size_t r = idx;
        for (int i = s.d - 1; i >= 0; --i) {
            x[i] = double(long(r % t->shape[i]) + t->lo[i]);
            r /= t->shape[i];
        }
        t->values[idx] = s.fn(x.data());
    }
    s.table = std::move(t);
    return s;
}

inline Symbol table_symbol(std::string name, SymbolTable t) {
    Symbol s;
    s.d = t.d;
    s.kind = SymbolKind::tabulated;
    s.name = std::move(name);
    s.table = std::make_shared<SymbolTable>(std::move(t));
    return s;
}

namespace detail {
// multilinear interpolation inside the table box
inline std::optional<cplx> interp(const SymbolTable& t, const double* x) {
    std::array<long, 3> base{};
    std::array<double, 3> w{};
    for (int i = 0; i < t.d; ++i) {
        double u = x[i] - t.lo[i];
        if (u < 0 || u > t.shape[i] - 1) return std::nullopt;
        long b = std::min<long>(long(std::floor(u)), t.shape[i] - 2 < 0 ? 0 : t.shape[i] - 2);
        base[i] = b;
        w[i] = u - double(b);
    }
    cplx acc{};
    for (int corner = 0; corner < (1 << t.d); ++corner) {
        double wt = 1;
        std::array<long, 3> xi{};
        for (int i = 0; i < t.d; ++i) {
            int bit = (corner >> i) & 1;
            wt *= bit ? w[i] : 1 - w[i];
            xi[i] = base[i] + bit + t.lo[i];
        }
        if (wt == 0) continue;
        auto idx = t.index(std::span<const long>(xi.data(), t.d));
        if (!idx) return std::nullopt;
        acc += wt * t.values[*idx];
    }
    return acc;
}
}  // namespace detail

/// m(ξ) at an integer frequency tuple.
inline cplx eval_symbol(const Symbol& m, std::span<const long> xi) {
    if (long(xi.size()) != m.d) throw std::invalid_argument("eval_symbol: arity mismatch");
    switch (m.kind) {
        case SymbolKind::trivial: return 1.0;
        case SymbolKind::flag: {
            std::array<long, 2> p{xi[0], xi[1]}, q{xi[1], xi[2]};
            return eval_symbol(*m.a, p) * eval_symbol(*m.b, q);
        }
        case SymbolKind::tabulated: {
            if (m.table)
                if (auto idx = m.table->index(xi)) return m.table->values[*idx];
            if (m.fn) {
                std::array<double, 3> x{};
                for (int i = 0; i < m.d; ++i) x[i] = double(xi[i]);
                return m.fn(x.data());
            }
            throw std::out_of_range("eval_symbol: frequency outside table");
        }
    }
    return 0;
}

inline cplx eval_symbol(const Symbol& m, std::initializer_list<long> xi) {
    std::vector<long> v(xi);
    return eval_symbol(m, std::span<const long>(v));
}

/// m at real arguments (analytic evaluator, else table interpolation).
inline cplx eval_real(const Symbol& m, const double* x) {
    switch (m.kind) {
        case SymbolKind::trivial: return 1.0;
        case SymbolKind::flag: {
            double p[2] = {x[0], x[1]}, q[2] = {x[1], x[2]};
            return eval_real(*m.a, p) * eval_real(*m.b, q);
        }
        case SymbolKind::tabulated:
            if (m.fn) return m.fn(x);
            if (m.table)
                if (auto v = detail::interp(*m.table, x)) return *v;
            throw std::out_of_range("eval_real: argument outside table");
    }
    return 0;
}

/// m(factor·ξ)
inline Symbol dilate(const Symbol& m, double factor) {
    auto base = std::make_shared<Symbol>(m);
    return analytic_symbol(m.d, m.name + "∘" + std::to_string(factor), [base, factor, d = m.d](const double* x) {
        double y[3];
        for (int i = 0; i < d; ++i) y[i] = factor * x[i];
        return eval_real(*base, y);
    });
}

// ---------------------------------------------------------------------------
// Mihlin check

struct MihlinEntry {
    std::vector<int> alpha;
    double constant = 0;
};

struct MihlinReport {
    std::vector<MihlinEntry> entries;
    double budget = 0;
    int max_order = 0;
    bool pass = false;
    double max_constant() const {
        double m = 0;
        for (auto& e : entries) m = std::max(m, e.constant);
        return m;
    }
};

namespace detail {
inline std::vector<std::vector<int>> multi_indices(int d, int max_order) {
    std::vector<std::vector<int>> out;
    std::vector<int> a(d, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == d) {
            out.push_back(a);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            a[i] = v;
            rec(i + 1, left - v);
        }
        a[i] = 0;
    };
    rec(0, max_order);
    std::sort(out.begin(), out.end(), [](auto& x, auto& y) {
        int sx = 0, sy = 0;
        for (int v : x) sx += v;
        for (int v : y) sy += v;
        return sx != sy ? sx < sy : x < y;
    });
    return out;
}

// ((E − E⁻¹)/2)^a as offset → weight
inline std::vector<std::pair<int, double>> central_stencil(int a) {
    std::vector<std::pair<int, double>> st;
    double binom = 1;
    for (int r = 0; r <= a; ++r) {
        st.push_back({a - 2 * r, ((r % 2) ? -binom : binom) / std::ldexp(1.0, a)});
        binom = binom * (a - r) / (r + 1);
    }
    return st;
}
}  // namespace detail

/// sup_ξ |ξ|^{|α|}·|Δ^α m(ξ)| over the box {−half..half−1}^d minus |ξ|_∞ < exclude.
/// Points whose stencil leaves the evaluable region are skipped.
inline MihlinReport mihlin_check(const Symbol& m, int max_order, double budget, int half = 32, int exclude = 4) {
    if (max_order < 0 || max_order > 4) throw std::invalid_argument("max_order must be in 0..4");
    const int d = m.d, pad = max_order;
    const int side = 2 * (half + pad);
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= side;
    std::vector<cplx> val(total);
    std::vector<char> ok(total, 0);
    auto unflat = [&](std::size_t idx, long* xi) {
        for (int i = d - 1; i >= 0; --i) {
            xi[i] = long(idx % side) - half - pad;
            idx /= side;
        }
    };
    parallel_for(total, [&](std::size_t idx) {
        long xi[3];
        unflat(idx, xi);
        try {
            val[idx] = eval_symbol(m, std::span<const long>(xi, d));
            ok[idx] = 1;
        } catch (const std::out_of_range&) {
        }
    });
    std::vector<std::size_t> stride(d, 1);
    for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * side;

    MihlinReport rep;
    rep.budget = budget;
    rep.max_order = max_order;
    for (auto& alpha : detail::multi_indices(d, max_order)) {
        int order = 0;
        for (int v : alpha) order += v;
        // expand tensor stencil
        std::vector<std::pair<long, double>> st{{0, 1.0}};
        for (int i = 0; i < d; ++i) {
            std::vector<std::pair<long, double>> nxt;
            for (auto& [off, w] : st)
                for (auto& [o, w2] : detail::central_stencil(alpha[i])) nxt.push_back({off + long(o) * long(stride[i]), w * w2});
            st.swap(nxt);
        }
        double best = 0;
        for (std::size_t idx = 0; idx < total; ++idx) {
            long xi[3];
            unflat(idx, xi);
            bool inside = true, far = false;
            double r2 = 0;
            for (int i = 0; i < d; ++i) {
                if (xi[i] < -half || xi[i] >= half) inside = false;
                if (std::abs(xi[i]) >= exclude) far = true;
                r2 += double(xi[i]) * double(xi[i]);
            }
            if (!inside || !far) continue;
            cplx acc{};
            bool good = true;
            for (auto& [off, w] : st) {
                long j = long(idx) + off;
                if (!ok[j]) {
                    good = false;
                    break;
                }
                acc += w * val[j];
            }
            if (!good) continue;
            best = std::max(best, std::pow(std::sqrt(r2), order) * std::abs(acc));
        }
        rep.entries.push_back({alpha, best});
    }
    rep.pass = std::isfinite(rep.max_constant()) && rep.max_constant() <= budget;
    return rep;
}

// ---------------------------------------------------------------------------
// catalog

namespace detail {
inline double bump01(double t) { return std::abs(t) < 1 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }
}

/// Named catalog: trivial, homog0, ratio, annulus<k>, tanh1 (d=1), homog0_3 (d=3);
/// `flag(x,y)` combines two arity-2 entries. Arity-2 tables cover {−N/2..N/2−1}².
inline std::optional<Symbol> catalog_symbol(const std::string& name, int N = 0) {
    auto tab = [N](Symbol s) { return N > 0 && s.d == 2 ? tabulate(std::move(s), N / 2) : s; };
    if (name == "trivial") return trivial_symbol(3);
    if (name == "trivial1") return trivial_symbol(1);
    if (name == "trivial2") return trivial_symbol(2);
    if (name == "homog0")
        return tab(analytic_symbol(2, name, [](const double* x) {
            double th = std::atan2(x[1], x[0]);
            return cplx(std::exp(-(1.0 - std::cos(th - pi / 4))));
        }));
    if (name == "ratio")
        return tab(analytic_symbol(2, name, [](const double* x) {
            double r2 = x[0] * x[0] + x[1] * x[1];
            return cplx(r2 == 0 ? 0.5 : x[0] * x[0] / r2);
        }));
    if (name.rfind("annulus", 0) == 0 && name.size() > 7) {
        int k = std::stoi(name.substr(7));
        return tab(analytic_symbol(2, name, [k](const double* x) {
            double r = std::hypot(x[0], x[1]);
            if (r == 0) return cplx(0);
            return cplx(detail::bump01(std::log2(r) - k));
        }));
    }
    if (name == "tanh1")
        return analytic_symbol(1, name, [](const double* x) { return cplx(std::tanh(x[0] / 4)); });
    if (name == "homog0_3")
        return analytic_symbol(3, name, [](const double* x) {
            double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
            if (r == 0) return cplx(std::exp(-1.0));
            double c = (x[0] + x[1] + x[2]) / (r * std::sqrt(3.0));
            return cplx(std::exp(-(1.0 - c)));
        });
    if (name.rfind("flag(", 0) == 0 && name.back() == ')') {
        std::string inner = name.substr(5, name.size() - 6);
        int depth = 0;
        for (std::size_t i = 0; i < inner.size(); ++i) {
            if (inner[i] == '(') ++depth;
            if (inner[i] == ')') --depth;
            if (inner[i] == ',' && depth == 0) {
                auto a = catalog_symbol(inner.substr(0, i), N);
                auto b = catalog_symbol(inner.substr(i + 1), N);
                if (!a || !b) return std::nullopt;
                if (a->kind == SymbolKind::trivial) a = trivial_symbol(2);
                if (b->kind == SymbolKind::trivial) b = trivial_symbol(2);
                return flag_symbol(*a, *b);
            }
        }
    }
    return std::nullopt;
}

/// The catalog names that are arity-2 Mihlin symbols (used by sweeps).
inline std::vector<std::string> mihlin_catalog_names() { return {"homog0", "ratio", "annulus3"}; }

inline std::map<std::string, Symbol> standard_symbols(int N = 0) {
    std::map<std::string, Symbol> out;
    for (std::string n : {"trivial", "trivial2", "homog0", "ratio", "annulus3", "tanh1", "homog0_3",
                          "flag(homog0,homog0)", "flag(ratio,homog0)", "flag(trivial,trivial)"})
        out.emplace(n, *catalog_symbol(n, N));
    return out;
}

}  // namespace fpp

#pragma once

// Dyadic model operators T1, T1k0, T2, T2k0, their forms and the inner
// paraproducts used to control the third coefficient family.

#include <array>
#include <map>
#include <optional>

#include <boost/rational.hpp>

#include "grid.hpp"

namespace fpp {

using Rational = boost::rational<std::int64_t>;

/// Closed frequency interval [lo, hi] with exact endpoints.
struct FreqInterval {
    Rational lo, hi;
    Rational length() const { return hi - lo; }
    Rational centre() const { return (lo + hi) / 2; }
    bool contains(Rational x) const { return lo <= x && x <= hi; }
    bool intersects(const FreqInterval& o) const { return lo <= o.hi && o.lo <= hi; }
    /// c·ω: same centre, c times the length
    FreqInterval dilate(Rational c) const {
        Rational m = centre(), h = length() / 2 * c;
        return {m - h, m + h};
    }
    /// distance from 0 (0 if 0 ∈ ω)
    Rational dist0() const {
        if (contains(0)) return 0;
        return lo > 0 ? lo : -hi;
    }
    FreqInterval scaled(std::int64_t f) const { return {lo * f, hi * f}; }
    bool operator==(const FreqInterval&) const = default;
};

inline double to_double(Rational r) { return boost::rational_cast<double>(r); }

enum class Flavor { lacunary, non_lacunary };
inline std::string to_string(Flavor f) { return f == Flavor::lacunary ? "lacunary" : "non-lacunary"; }

/// ω in units of |I|^{-1}.
inline FreqInterval non_lacunary_shape() { return {Rational(-1, 8), Rational(1, 8)}; }
inline FreqInterval lacunary_shape(bool negative = false) {
    FreqInterval w{Rational(1, 5), Rational(29, 100)};
    return negative ? FreqInterval{-w.hi, -w.lo} : w;
}

/// All dyadic intervals of lengths 2^k, k ∈ [kmin, kmax].
inline std::vector<DyadicInterval> dyadic_ladder(int kmin, int kmax) {
    std::vector<DyadicInterval> out;
    for (int k = kmin; k <= kmax; ++k)
        for (std::int64_t n = 0; n < (std::int64_t{1} << -k); ++n) out.emplace_back(k, n);
    return out;
}

/// Each interval of the ladder kept with probability p (at least one kept).
template <class Rng>
std::vector<DyadicInterval> random_collection(int kmin, int kmax, double p, Rng& rng) {
    std::bernoulli_distribution keep(p);
    std::vector<DyadicInterval> out;
    for (auto& I : dyadic_ladder(kmin, kmax))
        if (keep(rng)) out.push_back(I);
    if (out.empty()) out.emplace_back(kmax, 0);
    return out;
}

struct BumpFamily {
    Flavor flavor = Flavor::lacunary;
    TorusGrid grid;
    FreqInterval shape;  // ω_I = shape·|I|^{-1}
    std::vector<DyadicInterval> intervals;
    std::vector<Spectrum> spectra;
    std::vector<SampledFunction> bumps;
    std::map<DyadicInterval, std::size_t> index;
    // adapted[l][α] = max over I, x of |Φ_I^{(l)}(x)|·|I|^{1/2+l}·(1 + dist(x,I)/|I|)^α
    std::array<std::array<double, 6>, 3> adapted{};
    std::vector<std::string> violations;  // empty when the flavor's invariants hold

    FreqInterval omega(int k) const { return shape.scaled(std::int64_t{1} << -k); }
    FreqInterval omega(const DyadicInterval& I) const { return omega(I.k); }
    std::size_t size() const { return intervals.size(); }
    double max_adapted() const {
        double m = 0;
        for (auto& r : adapted)
            for (double v : r) m = std::max(m, v);
        return m;
    }
};

namespace detail {

inline double raised_cosine(double s) { return std::abs(s) < 1 ? std::pow(std::cos(pi * s / 2), 2) : 0.0; }

/// Integer frequencies strictly inside ω.
inline std::pair<int, int> open_integer_range(const FreqInterval& w) {
    int lo = int(std::floor(to_double(w.lo))) + 1, hi = int(std::ceil(to_double(w.hi))) - 1;
    return {lo, hi};
}

inline std::vector<std::string> flavor_violations(Flavor f, const FreqInterval& shape) {
    std::vector<std::string> v;
    if (!(shape.lo < shape.hi)) v.push_back("empty frequency interval");
    if (f == Flavor::non_lacunary) {
        if (shape.lo != -shape.hi) v.push_back("omega not symmetric about 0");
        if (shape.length() < Rational(1, 4) || shape.length() > 4) v.push_back("|omega| not within a factor 4 of 1/|I|");
    } else {
        if (shape.dilate(5).contains(0)) v.push_back("0 in 5*omega");
    }
    return v;
}

inline void measure_adaptedness(BumpFamily& fam) {
    const int N = fam.grid.N;
    for (auto& r : fam.adapted) r.fill(0.0);
    std::vector<std::array<std::array<double, 6>, 3>> per(fam.size());
    parallel_for(fam.size(), [&](std::size_t i) {
        const auto& I = fam.intervals[i];
        const double len = I.length();
        std::vector<double> weight(N);
        for (int x = 0; x < N; ++x) weight[x] = 1 + torus_dist(fam.grid.x(x), I) / len;
        auto& out = per[i];
        for (auto& r : out) r.fill(0.0);
        for (int l = 0; l < 3; ++l) {
            Spectrum d = fam.spectra[i];
            if (l > 0)
                for (int xi = d.lo(); xi <= d.hi(); ++xi) d[xi] *= std::pow(cplx(0, 2 * pi * xi), l);
            auto g = idft(d);
            const double norm = std::pow(len, 0.5 + l);
            for (int x = 0; x < N; ++x) {
                double v = std::abs(g[x]) * norm;
                for (int a = 0; a < 6; ++a) out[l][a] = std::max(out[l][a], v * std::pow(weight[x], a));
            }
        }
    });
    for (auto& p : per)
        for (int l = 0; l < 3; ++l)
            for (int a = 0; a < 6; ++a) fam.adapted[l][a] = std::max(fam.adapted[l][a], p[l][a]);
}

}  // namespace detail

/// L²-normalized bumps Φ̂_I(ξ) = c·φ((ξ − centre ω_I)/(|ω_I|/2))·e^{−2πiξ·mid(I)} with the
/// raised-cosine mother φ. Spectra vanish outside ω_I exactly. With enforce, a
/// flavor violation throws; otherwise it is recorded in `violations`.
inline BumpFamily make_family(const TorusGrid& grid, std::vector<DyadicInterval> intervals, Flavor flavor,
                              std::optional<FreqInterval> shape = std::nullopt, bool enforce = true) {
    BumpFamily fam;
    fam.flavor = flavor;
    fam.grid = grid;
    fam.shape = shape ? *shape : (flavor == Flavor::lacunary ? lacunary_shape() : non_lacunary_shape());
    fam.violations = detail::flavor_violations(flavor, fam.shape);
    if (enforce && !fam.violations.empty()) throw std::invalid_argument("family: " + fam.violations.front());
    std::sort(intervals.begin(), intervals.end());
    intervals.erase(std::unique(intervals.begin(), intervals.end()), intervals.end());
    fam.intervals = std::move(intervals);
    const int N = grid.N;
    for (std::size_t i = 0; i < fam.intervals.size(); ++i) {
        const auto& I = fam.intervals[i];
        if (I.cell_count(N) < 1) throw std::invalid_argument("grid too coarse for interval scale");
        auto w = fam.omega(I);
        auto [lo, hi] = detail::open_integer_range(w);
        if (lo > hi) throw std::invalid_argument("no integer frequency inside omega at scale 2^" + std::to_string(I.k));
        if (lo < -N / 2 || hi > N / 2 - 1) throw std::invalid_argument("omega exceeds Nyquist at scale 2^" + std::to_string(I.k));
        const double c = to_double(w.centre()), h = to_double(w.length()) / 2, mid = I.left() + I.length() / 2;
        Spectrum s(grid);
        double nrm = 0;
        for (int xi = lo; xi <= hi; ++xi) {
            double a = detail::raised_cosine((xi - c) / h);
            s[xi] = std::polar(a, -2 * pi * xi * mid);
            nrm += a * a;
        }
        if (nrm == 0) throw std::invalid_argument("degenerate bump");
        for (auto& v : s.coeffs) v /= std::sqrt(nrm);
        fam.index[I] = i;
        fam.bumps.push_back(idft(s));
        fam.spectra.push_back(std::move(s));
    }
    detail::measure_adaptedness(fam);
    return fam;
}

/// ⟨f, Φ⟩ = ∫ f Φ̄, evaluated on Φ's frequency support.
inline cplx coefficient(const Spectrum& f, const Spectrum& phi) {
    cplx s{};
    for (int xi = phi.lo(); xi <= phi.hi(); ++xi)
        if (phi[xi] != cplx{}) s += f[xi] * std::conj(phi[xi]);
    return s;
}

// ---------------------------------------------------------------------------
// model configurations

enum class Model { T1, T1k0, T2, T2k0 };
inline std::string to_string(Model m) {
    switch (m) {
        case Model::T1: return "T1";
        case Model::T1k0: return "T1k0";
        case Model::T2: return "T2";
        case Model::T2k0: return "T2k0";
    }
    return "?";
}
inline Model parse_model(const std::string& s) {
    for (Model m : {Model::T1, Model::T1k0, Model::T2, Model::T2k0})
        if (to_string(m) == s) return m;
    throw std::invalid_argument("unknown model: " + s);
}
inline bool is_k0(Model m) { return m == Model::T1k0 || m == Model::T2k0; }
inline bool is_t1(Model m) { return m == Model::T1 || m == Model::T1k0; }

struct ModelConfig {
    std::array<BumpFamily, 3> I, J;
    int nonlac_J = 1;           // which 𝓙-family (1..3) is non-lacunary
    std::optional<int> k0;      // for the k0 variants
    int sep = 2;                // k0 ≥ sep is the far part; k0 < sep the near-diagonal band
    Rational band = 2;          // 2^{k0}|ω³_J| ~ |ω_I| means 1 ≤ ratio < band

    const TorusGrid& grid() const { return I[0].grid; }

    /// Throws invalid_argument when the families do not fit the model.
    void validate(Model m) const {
        const int nl = is_t1(m) ? 1 : 0;  // 0-based slot of the non-lacunary 𝓘-family
        for (int s = 0; s < 3; ++s) {
            Flavor want = s == nl ? Flavor::non_lacunary : Flavor::lacunary;
            if (I[s].flavor != want || !I[s].violations.empty())
                throw std::invalid_argument("I-family " + std::to_string(s + 1) + " must be " + to_string(want));
            Flavor wantJ = s + 1 == nonlac_J ? Flavor::non_lacunary : Flavor::lacunary;
            if (J[s].flavor != wantJ || !J[s].violations.empty())
                throw std::invalid_argument("J-family " + std::to_string(s + 1) + " must be " + to_string(wantJ));
            if (!(I[s].grid == grid()) || !(J[s].grid == grid())) throw std::invalid_argument("families on different grids");
            if (I[s].intervals != I[0].intervals) throw std::invalid_argument("I-families must share intervals");
            if (J[s].intervals != J[0].intervals) throw std::invalid_argument("J-families must share intervals");
        }
        if (is_k0(m) && (!k0 || *k0 < 1)) throw std::invalid_argument("k0 must be a positive integer");
        if (band <= 1) throw std::invalid_argument("band factor must exceed 1");
    }
};

/// Default configuration: both collections are the full ladder k ∈ [kmin, kmax].
inline ModelConfig make_model(Model m, const TorusGrid& g, int kmin = -8, int kmax = -2, int nonlac_J = 1,
                              std::optional<int> k0 = std::nullopt) {
    if (nonlac_J < 1 || nonlac_J > 3) throw std::invalid_argument("nonlac_J must be 1, 2 or 3");
    auto Iset = dyadic_ladder(kmin, kmax), Jset = Iset;
    ModelConfig c;
    const int nl = is_t1(m) ? 1 : 0;
    // complex bumps: the frequency of ⟨g,Φ_a⟩⟨h,Φ_b⟩ as a function of position is ω_a + ω_b,
    // which must meet the output bump's ω for the sum to be nonzero
    const std::array<bool, 3> negI{false, false, false}, negJ{false, nonlac_J == 3, false};
    for (int s = 0; s < 3; ++s) {
        c.I[s] = s == nl ? make_family(g, Iset, Flavor::non_lacunary) : make_family(g, Iset, Flavor::lacunary, lacunary_shape(negI[s]));
        c.J[s] = s + 1 == nonlac_J ? make_family(g, Jset, Flavor::non_lacunary)
                                   : make_family(g, Jset, Flavor::lacunary, lacunary_shape(negJ[s]));
    }
    c.nonlac_J = nonlac_J;
    c.k0 = k0;
    c.validate(m);
    return c;
}

// ---------------------------------------------------------------------------
// admissibility (depends on scales only)

/// The 𝓘-family whose ω is compared with ω³_J: Φ² for T1, Φ¹ for T2.
inline const BumpFamily& key_family(const ModelConfig& c, Model m) { return is_t1(m) ? c.I[1] : c.I[0]; }

/// Whether J-scale kJ feeds I-scale kI; k0 overrides the configured value.
inline bool admissible(const ModelConfig& c, Model m, int kI, int kJ, std::optional<int> k0 = std::nullopt) {
    FreqInterval wI = key_family(c, m).omega(kI), wJ = c.J[2].omega(kJ);
    if (!wJ.intersects(wI)) return false;
    if (!is_k0(m)) return wJ.length() <= wI.length();
    const int k = k0 ? *k0 : *c.k0;
    Rational ratio = wI.length() / (wJ.length() * (std::int64_t{1} << k));
    return 1 <= ratio && ratio < c.band;
}

namespace detail {
inline std::vector<int> scales(const BumpFamily& f) {
    std::vector<int> k;
    for (auto& I : f.intervals) k.push_back(I.k);
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// operators

/// The generic model: T1 when the inner paraproduct feeds slot 2, T2 when it feeds slot 1.
inline SampledFunction apply_model(const ModelConfig& c, Model m, const SampledFunction& f1, const SampledFunction& f2,
                                   const SampledFunction& f3) {
    c.validate(m);
    detail::require_same_grid({&f1, &f2, &f3});
    if (!(f1.grid == c.grid())) throw std::invalid_argument("inputs and families on different grids");
    const TorusGrid g = c.grid();
    // the inner pair (g1,g2) → B, the outer function h
    const SampledFunction &g1 = is_t1(m) ? f2 : f1, &g2 = is_t1(m) ? f3 : f2, &h = is_t1(m) ? f1 : f3;
    Spectrum s1 = dft(g1), s2 = dft(g2), sh = dft(h);

    const auto& JF = c.J;
    std::vector<cplx> cJ(JF[0].size());
    parallel_for(cJ.size(), [&](std::size_t j) {
        cJ[j] = std::pow(JF[0].intervals[j].length(), -0.5) * coefficient(s1, JF[0].spectra[j]) * coefficient(s2, JF[1].spectra[j]);
    });
    // B for each I-scale, as a spectrum
    std::map<int, Spectrum> Bscale;
    for (int kI : detail::scales(c.I[0])) {
        Spectrum B(g);
        for (std::size_t j = 0; j < cJ.size(); ++j)
            if (admissible(c, m, kI, JF[0].intervals[j].k))
                for (int xi = B.lo(); xi <= B.hi(); ++xi) B[xi] += cJ[j] * JF[2].spectra[j][xi];
        Bscale.emplace(kI, std::move(B));
    }
    const BumpFamily& key = key_family(c, m);
    const BumpFamily& other = is_t1(m) ? c.I[0] : c.I[1];
    std::vector<cplx> cI(c.I[0].size());
    parallel_for(cI.size(), [&](std::size_t i) {
        const auto& I = c.I[0].intervals[i];
        cI[i] = std::pow(I.length(), -0.5) * coefficient(sh, other.spectra[i]) * coefficient(Bscale.at(I.k), key.spectra[i]);
    });
    Spectrum out(g);
    for (std::size_t i = 0; i < cI.size(); ++i)
        for (int xi = out.lo(); xi <= out.hi(); ++xi) out[xi] += cI[i] * c.I[2].spectra[i][xi];
    return idft(out);
}

inline SampledFunction apply_T1(const ModelConfig& c, const SampledFunction& f1, const SampledFunction& f2,
                                const SampledFunction& f3) {
    return apply_model(c, Model::T1, f1, f2, f3);
}
inline SampledFunction apply_T1_k0(const ModelConfig& c, const SampledFunction& f1, const SampledFunction& f2,
                                   const SampledFunction& f3) {
    return apply_model(c, Model::T1k0, f1, f2, f3);
}
inline SampledFunction apply_T2(const ModelConfig& c, const SampledFunction& f1, const SampledFunction& f2,
                                const SampledFunction& f3) {
    return apply_model(c, Model::T2, f1, f2, f3);
}
inline SampledFunction apply_T2_k0(const ModelConfig& c, const SampledFunction& f1, const SampledFunction& f2,
                                   const SampledFunction& f3) {
    return apply_model(c, Model::T2k0, f1, f2, f3);
}

/// Λ(f1..f4) = ∫ T(f1,f2,f3)·f4
inline cplx model_form(const ModelConfig& c, Model m, const SampledFunction& f1, const SampledFunction& f2,
                       const SampledFunction& f3, const SampledFunction& f4) {
    return pairing(apply_model(c, m, f1, f2, f3), f4);
}

// ---------------------------------------------------------------------------
// reordered form

struct CoefficientFamily {
    std::vector<DyadicInterval> intervals;
    std::vector<cplx> a;
    std::optional<int> k0;

    std::size_t size() const { return intervals.size(); }
};

struct Lambda1Coefficients {
    CoefficientFamily a1, a2, a3;
    cplx lambda{};         // Σ_J |J|^{-1/2} a1 a2 a3
    double magnitude = 0;  // Σ_J |J|^{-1/2}|a1 a2|·Σ_I |c_I ⟨Φ³_J,Φ²_I⟩|, the roundoff scale of lambda
};

/// ⟨Φ, Ψ⟩ through the spectra.
inline cplx gram(const Spectrum& phi, const Spectrum& psi) {
    cplx s{};
    for (int xi = phi.lo(); xi <= phi.hi(); ++xi)
        if (phi[xi] != cplx{} && psi[xi] != cplx{}) s += phi[xi] * std::conj(psi[xi]);
    return s;
}

/// a¹_J = ⟨f2,Φ¹_J⟩, a²_J = ⟨f3,Φ²_J⟩ and a³_J the nested I-sum paired with Φ³_J,
/// with (f4, Φ³_I) the bilinear pairing so that Λ matches ∫T·f4.
inline Lambda1Coefficients lambda1_coefficients(const ModelConfig& c, Model m, const SampledFunction& f1,
                                                const SampledFunction& f2, const SampledFunction& f3,
                                                const SampledFunction& f4) {
    if (!is_t1(m)) throw std::invalid_argument("the reordered form is defined for T1 and T1k0");
    c.validate(m);
    detail::require_same_grid({&f1, &f2, &f3, &f4});
    Spectrum s1 = dft(f1), s2 = dft(f2), s3 = dft(f3);
    // (f4, Φ) = ⟨f4, Φ̄⟩
    SampledFunction f4c(f4.grid);
    for (int k = 0; k < f4.grid.N; ++k) f4c[k] = std::conj(f4[k]);
    Spectrum s4c = dft(f4c);
    const std::size_t nI = c.I[0].size(), nJ = c.J[0].size();
    std::vector<cplx> cI(nI);
    for (std::size_t i = 0; i < nI; ++i)
        cI[i] = std::pow(c.I[0].intervals[i].length(), -0.5) * coefficient(s1, c.I[0].spectra[i]) *
                std::conj(coefficient(s4c, c.I[2].spectra[i]));
    Lambda1Coefficients r;
    for (auto* a : {&r.a1, &r.a2, &r.a3}) {
        a->intervals = c.J[0].intervals;
        a->a.assign(nJ, cplx{});
        a->k0 = is_k0(m) ? c.k0 : std::nullopt;
    }
    std::vector<double> a3abs(nJ, 0.0);
    parallel_for(nJ, [&](std::size_t j) {
        const auto& J = c.J[0].intervals[j];
        r.a1.a[j] = coefficient(s2, c.J[0].spectra[j]);
        r.a2.a[j] = coefficient(s3, c.J[1].spectra[j]);
        cplx acc{};
        for (std::size_t i = 0; i < nI; ++i)
            if (admissible(c, m, c.I[0].intervals[i].k, J.k)) {
                cplx t = cI[i] * gram(c.J[2].spectra[j], c.I[1].spectra[i]);
                acc += t;
                a3abs[j] += std::abs(t);
            }
        r.a3.a[j] = acc;
    });
    for (std::size_t j = 0; j < nJ; ++j) {
        const double w = std::pow(c.J[0].intervals[j].length(), -0.5);
        r.lambda += w * r.a1.a[j] * r.a2.a[j] * r.a3.a[j];
        r.magnitude += w * std::abs(r.a1.a[j] * r.a2.a[j]) * a3abs[j];
    }
    return r;
}

// ---------------------------------------------------------------------------
// inner paraproducts

struct InnerParaproductReport {
    SampledFunction B;
    std::vector<cplx> a3;      // nested I-sums, one per J
    std::vector<cplx> paired;  // ∫ B·Φ³_J
    std::size_t active_I = 0;  // |Ĩ|
    double max_deviation = 0;
    double scale = 0;  // max(‖B‖₂, max|a3|)
    bool holds = false;
    double relative() const { return scale > 0 ? max_deviation / scale : max_deviation; }
};

namespace detail {

/// Ψ̂ ≡ 1 on ω, smooth, vanishing outside 2ω.
inline double plateau(double xi, double c, double h) {
    double t = (std::abs(xi - c) - h) / h;  // 0 at ω's edge, 1 at 2ω's edge
    if (t <= 0) return 1;
    if (t >= 1) return 0;
    return std::pow(std::cos(pi * t / 2), 2);
}

/// For the k0 variant: the unique J-scale matched to each I-scale (none if absent).
inline std::map<int, int> matched_scales(const ModelConfig& c, Model m) {
    std::map<int, int> out;
    for (int kI : scales(c.I[0]))
        for (int kJ : scales(c.J[0]))
            if (admissible(c, m, kI, kJ)) {
                if (out.count(kI)) throw std::domain_error("several J-scales match one I-scale; refine the band");
                out[kI] = kJ;
            }
    return out;
}

}  // namespace detail

/// Φ̃²_I = 2^{k0/2}·Φ²_I * Ψ_{|I|,k0}, with Ψ̂ ≡ 1 on ω³ of the matched J-scale and
/// supported in its double.
inline Spectrum tilde_bump(const ModelConfig& c, Model m, std::size_t i, int kJ) {
    auto w = c.J[2].omega(kJ);
    const double cen = to_double(w.centre()), h = to_double(w.length()) / 2;
    Spectrum s = key_family(c, m).spectra[i];
    for (int xi = s.lo(); xi <= s.hi(); ++xi) s[xi] *= std::exp2(*c.k0 / 2.0) * detail::plateau(xi, cen, h);
    return s;
}

/// B(f1,f4) = Σ_{I∈Ĩ} |I|^{-1/2}⟨f1,Φ¹_I⟩(f4,Φ³_I)·conj(Φ²_I), and the check
/// a³_J = ∫ B·Φ³_J for every J. In the k0 variant Φ²_I is replaced by 2^{-k0/2}Φ̃²_I.
inline InnerParaproductReport inner_paraproduct(const ModelConfig& c, Model m, const SampledFunction& f1,
                                                const SampledFunction& f4, double tol = 1e-9) {
    if (!is_t1(m)) throw std::invalid_argument("inner paraproducts are defined for T1 and T1k0");
    const TorusGrid g = c.grid();
    // the coefficient families do not involve f2, f3
    SampledFunction one(g);
    auto coeffs = lambda1_coefficients(c, m, f1, one, one, f4);
    InnerParaproductReport r;
    r.a3 = coeffs.a3.a;

    SampledFunction f4c(g);
    for (int k = 0; k < g.N; ++k) f4c[k] = std::conj(f4[k]);
    Spectrum s1 = dft(f1), s4c = dft(f4c);
    std::map<int, int> match;
    if (is_k0(m)) match = detail::matched_scales(c, m);

    Spectrum Bhat(g);  // spectrum of Σ coef·Φ²_I (conjugated at the end)
    for (std::size_t i = 0; i < c.I[0].size(); ++i) {
        const auto& I = c.I[0].intervals[i];
        bool active = false;
        for (int kJ : detail::scales(c.J[0])) active = active || admissible(c, m, I.k, kJ);
        if (!active) continue;
        ++r.active_I;
        cplx coef = std::pow(I.length(), -0.5) * coefficient(s1, c.I[0].spectra[i]) * std::conj(coefficient(s4c, c.I[2].spectra[i]));
        if (!is_k0(m)) {
            for (int xi = Bhat.lo(); xi <= Bhat.hi(); ++xi) Bhat[xi] += std::conj(coef) * c.I[1].spectra[i][xi];
        } else {
            Spectrum t = tilde_bump(c, m, i, match.at(I.k));
            for (int xi = Bhat.lo(); xi <= Bhat.hi(); ++xi) Bhat[xi] += std::exp2(-*c.k0 / 2.0) * std::conj(coef) * t[xi];
        }
    }
    auto Bc = idft(Bhat);
    r.B = SampledFunction(g);
    for (int k = 0; k < g.N; ++k) r.B[k] = std::conj(Bc[k]);
    r.paired.resize(c.J[0].size());
    for (std::size_t j = 0; j < c.J[0].size(); ++j) {
        r.paired[j] = pairing(r.B, c.J[2].bumps[j]);
        r.max_deviation = std::max(r.max_deviation, std::abs(r.paired[j] - r.a3[j]));
        r.scale = std::max(r.scale, std::abs(r.a3[j]));
    }
    r.scale = std::max(r.scale, lp_norm(r.B, 2));
    r.holds = r.max_deviation <= tol * std::max(1.0, r.scale);
    return r;
}

// ---------------------------------------------------------------------------
// index sets

struct IndexPartitionReport {
    std::size_t t1_pairs = 0;    // admissible (I,J) pairs of T1
    std::size_t covered = 0;     // T1 pairs claimed by exactly one k0
    std::size_t duplicates = 0;  // pairs claimed by several k0
    std::size_t missing = 0;     // T1 pairs claimed by none
    std::size_t extraneous = 0;  // pairs claimed by some k0 but not in T1
    std::size_t near_band = 0;   // pairs with k0 < sep
    std::map<int, std::size_t> per_k0;
    bool exact = false;
};

/// Whether {T1k0 pairs : 1 ≤ k0 ≤ kmax} partitions T1's pairs (exact set equality).
inline IndexPartitionReport index_partition_check(const ModelConfig& c, int kmax = 40) {
    IndexPartitionReport r;
    for (auto& I : c.I[0].intervals)
        for (auto& J : c.J[0].intervals) {
            bool in = admissible(c, Model::T1, I.k, J.k);
            int hits = 0, which = 0;
            for (int k0 = 1; k0 <= kmax; ++k0)
                if (admissible(c, Model::T1k0, I.k, J.k, k0)) ++hits, which = k0;
            r.t1_pairs += in;
            if (hits > 1) ++r.duplicates;
            if (in && hits == 0) ++r.missing;
            if (!in && hits > 0) ++r.extraneous;
            if (in && hits == 1) {
                ++r.covered;
                ++r.per_k0[which];
                if (which < c.sep) ++r.near_band;
            }
        }
    r.exact = r.duplicates == 0 && r.missing == 0 && r.extraneous == 0 && r.covered == r.t1_pairs;
    return r;
}

}  // namespace fpp

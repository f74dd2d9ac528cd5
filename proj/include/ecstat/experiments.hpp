#pragma once

// Desk-scale reproductions of the statistical claims: each run pairs a
// prediction (densities / singular series) with an observation (census or
// class-number sums) and emits ComparisonRecords.  Exact identities compare
// as rationals; asymptotic statements are diagnostics with bands.

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "ecstat/census.hpp"
#include "ecstat/constants.hpp"
#include "ecstat/density.hpp"

namespace ecstat {

struct ExactOrReal {
    bool is_exact = false;
    Rat exact = 0;
    double real = 0.0;

    static ExactOrReal from_rat(const Rat& q) { return {true, q, rat_to_double(q)}; }
    static ExactOrReal from_real(double v) { return {false, 0, v}; }
    double as_double() const { return is_exact ? rat_to_double(exact) : real; }
};

struct ComparisonRecord {
    std::string label;
    ExactOrReal predicted, observed;
    double abs_err = 0.0, rel_err = 0.0;
    bool both_exact = false;
    bool exact_equal = false;  // meaningful when both_exact
    std::map<std::string, std::string> metadata;

    void finish() {
        double p = predicted.as_double(), o = observed.as_double();
        abs_err = std::abs(p - o);
        // against a zero prediction the quantities compared here are masses,
        // so the absolute error doubles as the relative one (keeps JSON finite)
        rel_err = (p != 0.0) ? abs_err / std::abs(p) : abs_err;
        both_exact = predicted.is_exact && observed.is_exact;
        exact_equal = both_exact && predicted.exact == observed.exact;
    }
};

struct HistogramRecord {
    i64 p = 0;
    std::vector<double> edges;            // in [-1, 1], strictly increasing
    std::vector<Rat> empirical_masses;    // exact, sum to 1
    std::vector<double> semicircle_masses;
    double sup_deviation = 0.0;
};

// ---------------------------------------------------------------------------
// Numeric helpers
// ---------------------------------------------------------------------------
namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
    if (b <= a) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// semicircle measure of [a, b] within [-1, 1], in closed form
inline double semicircle_mass(double a, double b) {
    a = std::clamp(a, -1.0, 1.0);
    b = std::clamp(b, -1.0, 1.0);
    if (b <= a) return 0.0;
    auto F = [](double u) { return (u * std::sqrt(1.0 - u * u) + std::asin(u)) / 2.0; };
    return (2.0 / std::numbers::pi) * (F(b) - F(a));
}

// Memoizing Kronecker class number lookup for repeated H(t^2 - 4p) sums.
struct HCache {
    std::map<i64, Rat> memo;
    const Rat& operator()(i64 D) {
        auto it = memo.find(D);
        if (it != memo.end()) return it->second;
        return memo.emplace(D, kronecker_class_number(D)).first->second;
    }
};

// strict Hasse window: p and N compatible as (prime, group order)
inline bool in_hasse_window(i64 p, i64 N) {
    i64 t = p + 1 - N;
    return t * t < 4 * p;
}

}  // namespace detail

inline double integral_sqrt_log(double x) {
    // int_2^x du / (2 sqrt(u) log u)
    if (x <= 2.0) return 0.0;
    return detail::integrate([](double u) { return 1.0 / (2.0 * std::sqrt(u) * std::log(u)); },
                             2.0, x);
}

inline double integral_log_squared(double x) {
    // int_2^x du / log^2 u
    if (x <= 2.0) return 0.0;
    return detail::integrate([](double u) { return 1.0 / (std::log(u) * std::log(u)); }, 2.0, x);
}

inline double integral_aliquot(double a, double b, int d) {
    // int_a^b du / (2 sqrt(u) log^d u)
    if (b <= a) return 0.0;
    return detail::integrate(
        [d](double u) { return 1.0 / (2.0 * std::sqrt(u) * std::pow(std::log(u), d)); }, a, b);
}

// ---------------------------------------------------------------------------
// Lang-Trotter average
// ---------------------------------------------------------------------------
inline ComparisonRecord run_lt_average(i64 t, i64 x, i64 z) {
    ComparisonRecord rec;
    rec.label = "lt_average";
    rec.metadata = {{"t", std::to_string(t)}, {"x", std::to_string(x)}, {"z", std::to_string(z)}};
    detail::HCache H;
    Rat observed = 0;
    for (u64 p : primes_up_to((u64)std::max<i64>(x, 0))) {
        if (p < 5) continue;
        i64 D = t * t - 4 * (i64)p;
        if (t * t >= 4 * (i64)p) continue;
        observed += H(D) / Int(p);
    }
    rec.observed = ExactOrReal::from_rat(observed);
    double c = constant(lt_kind(t), z).value;
    rec.predicted = ExactOrReal::from_real(c * integral_sqrt_log((double)x));
    rec.metadata["constant"] = std::to_string(c);
    rec.finish();
    return rec;
}

// ---------------------------------------------------------------------------
// Vertical Sato-Tate
// ---------------------------------------------------------------------------
inline std::pair<HistogramRecord, ComparisonRecord> run_sato_tate(i64 p, int bins,
                                                                  CensusOptions opt = {}) {
    if (bins < 1) throw domain_error("run_sato_tate: bins >= 1");
    CensusResult census = run_census(p, opt);
    HistogramRecord h;
    h.p = p;
    double scale = 2.0 * std::sqrt((double)p);
    for (int i = 0; i <= bins; ++i) h.edges.push_back(-1.0 + 2.0 * i / bins);
    h.empirical_masses.assign(bins, 0);
    h.semicircle_masses.assign(bins, 0.0);
    for (auto& [t, n] : census.trace_pairs) {
        double u = (double)t / scale;
        int b = std::min<int>(bins - 1, (int)std::floor((u + 1.0) / 2.0 * bins));
        h.empirical_masses[b] += Rat(n, census.pair_count);
    }
    h.sup_deviation = 0.0;
    for (int i = 0; i < bins; ++i) {
        h.semicircle_masses[i] = detail::semicircle_mass(h.edges[i], h.edges[i + 1]);
        h.sup_deviation = std::max(
            h.sup_deviation, std::abs(rat_to_double(h.empirical_masses[i]) - h.semicircle_masses[i]));
    }
    ComparisonRecord rec;
    rec.label = "sato_tate_hist";
    rec.metadata = {{"p", std::to_string(p)}, {"bins", std::to_string(bins)}};
    rec.predicted = ExactOrReal::from_real(0.0);
    rec.observed = ExactOrReal::from_real(h.sup_deviation);
    rec.finish();
    return {h, rec};
}

inline ComparisonRecord run_sato_tate_interval(i64 p, double alpha, double beta,
                                               CensusOptions opt = {}) {
    if (alpha > beta || alpha < -1.0 || beta > 1.0)
        throw domain_error("run_sato_tate_interval: need -1 <= alpha <= beta <= 1");
    CensusResult census = run_census(p, opt);
    Rat mass = 0;
    double scale = 2.0 * std::sqrt((double)p);
    for (auto& [t, n] : census.trace_pairs) {
        double u = (double)t / scale;
        if (u >= alpha && u <= beta) mass += Rat(n, census.pair_count);
    }
    ComparisonRecord rec;
    rec.label = "sato_tate_interval";
    rec.metadata = {{"p", std::to_string(p)},
                    {"alpha", std::to_string(alpha)},
                    {"beta", std::to_string(beta)}};
    if (beta - alpha < 0.05) rec.metadata["below_min_length"] = "true";
    rec.observed = ExactOrReal::from_rat(mass);
    rec.predicted = ExactOrReal::from_real(detail::semicircle_mass(alpha, beta));
    rec.finish();
    return rec;
}

// ---------------------------------------------------------------------------
// Per-prime experiments
// ---------------------------------------------------------------------------
enum class PerPrimeKind { koblitz, cyclicity, trace_mod, deuring_full };

inline ComparisonRecord run_per_prime(i64 p, PerPrimeKind kind, i64 trace_t = 0, i64 trace_N = 1,
                                      i64 z = 10000, CensusOptions opt = {}) {
    ComparisonRecord rec;
    rec.metadata["p"] = std::to_string(p);
    switch (kind) {
        case PerPrimeKind::koblitz: {
            rec.label = "koblitz";
            CensusResult c = run_census(p, opt);
            rec.observed = ExactOrReal::from_rat(Rat(c.prime_order_pairs, c.pair_count));
            double cgm = constant(gm_kind(p), z).value;
            rec.predicted = ExactOrReal::from_real(cgm / std::log((double)p));
            rec.metadata["z"] = std::to_string(z);
            break;
        }
        case PerPrimeKind::cyclicity: {
            rec.label = "cyclicity";
            opt.with_shapes = true;
            CensusResult c = run_census(p, opt);
            rec.observed = ExactOrReal::from_rat(Rat(c.cyclic_pairs, c.pair_count));
            rec.predicted = ExactOrReal::from_rat(cyclic_constant_closed_form(p));
            break;
        }
        case PerPrimeKind::trace_mod: {
            rec.label = "trace_mod";
            rec.metadata["t"] = std::to_string(trace_t);
            rec.metadata["N"] = std::to_string(trace_N);
            if (trace_N < 1) throw domain_error("trace_mod: N >= 1");
            if (mod_floor(p, trace_N) == 0 && trace_N > 1)
                throw domain_error("trace_mod: p | N unsupported");
            auto dist = empirical_distribution(p, Statistic::trace_mod, trace_N, trace_t, opt);
            rec.observed = ExactOrReal::from_rat(dist.masses.at("true"));
            // lambda via CRT over the prime powers of N
            Rat num = 1, den = 1;
            for (auto [ell, e] : factorize((u64)trace_N).factors) {
                PrimePower level((i64)ell, e);
                MatrixConstraint top;
                top.trace = mod_floor(trace_t, level.value);
                top.det = mod_floor(p, level.value);
                top.invertible_only = true;
                MatrixConstraint det_only;
                det_only.det = mod_floor(p, level.value);
                det_only.invertible_only = true;
                num *= Rat(count_constrained(top, level).count);
                den *= Rat(count_constrained(det_only, level).count);
            }
            rec.predicted = ExactOrReal::from_rat(num / den);
            break;
        }
        case PerPrimeKind::deuring_full: {
            rec.label = "deuring_full";
            CensusResult c = run_census(p, opt);
            detail::HCache H;
            bool all_equal = true;
            i64 tmax = isqrt(4 * p - 1);
            double max_abs = 0.0;
            for (i64 t = -tmax; t <= tmax; ++t) {
                Rat pred = H(t * t - 4 * p) / Int(p);
                i64 cnt = c.trace_pairs.count(t) ? c.trace_pairs.at(t) : 0;
                Rat obs = Rat(cnt, c.pair_count);
                if (pred != obs) all_equal = false;
                max_abs = std::max(max_abs, std::abs(rat_to_double(pred - obs)));
            }
            rec.predicted = ExactOrReal::from_rat(1);
            rec.observed = ExactOrReal::from_rat(all_equal ? Rat(1) : Rat(0));
            rec.metadata["max_abs_err"] = std::to_string(max_abs);
            rec.metadata["traces"] = std::to_string(2 * tmax + 1);
            break;
        }
    }
    rec.finish();
    return rec;
}

// ---------------------------------------------------------------------------
// Sums over primes: fixed point count, fixed group, aliquot cycles
// ---------------------------------------------------------------------------
inline ComparisonRecord run_men(i64 N, i64 z = 10000) {
    ComparisonRecord rec;
    rec.label = "men";
    rec.metadata = {{"N", std::to_string(N)}, {"z", std::to_string(z)}};
    detail::HCache H;
    Rat observed = 0;
    int window_primes = 0;
    // N^- < p < N^+ strictly, as integers: (p + 1 - N)^2 < 4p
    for (i64 p = std::max<i64>(5, N - 2 * isqrt(N)); p <= N + 2 * isqrt(N) + 2; ++p) {
        if (!is_prime_u64((u64)p)) continue;
        if (!detail::in_hasse_window(p, N)) continue;
        i64 t = p + 1 - N;
        observed += H(t * t - 4 * p) / Int(p);
        ++window_primes;
    }
    rec.observed = ExactOrReal::from_rat(observed);
    double CN = constant(men_kind(N), z).value;
    rec.predicted = ExactOrReal::from_real(CN / std::log((double)N));
    rec.metadata["window_primes"] = std::to_string(window_primes);
    rec.finish();
    return rec;
}

inline ComparisonRecord run_meg(i64 m, i64 k, i64 z = 10000) {
    ComparisonRecord rec;
    rec.label = "meg";
    rec.metadata = {{"m", std::to_string(m)}, {"k", std::to_string(k)}, {"z", std::to_string(z)}};
    GroupShape shape{m, k};
    i64 N = shape.N();
    Rat observed = 0;
    int window_primes = 0;
    for (i64 p = std::max<i64>(5, N - 2 * isqrt(N)); p <= N + 2 * isqrt(N) + 2; ++p) {
        if (!is_prime_u64((u64)p)) continue;
        if (!detail::in_hasse_window(p, N)) continue;
        observed += schoof_group_mass(shape, p);
        ++window_primes;
    }
    rec.observed = ExactOrReal::from_rat(observed);
    double CG = constant(meg_kind(m, k), z).value;
    rec.predicted = ExactOrReal::from_real(CG / std::log((double)N));
    rec.metadata["window_primes"] = std::to_string(window_primes);
    rec.finish();
    return rec;
}

// Aliquot cycles: windowed (x < p_1 <= 2x) or cumulative (p_1 <= x) variants.
inline ComparisonRecord run_aliquot(int d, i64 x, bool windowed = true, i64 z = 2048) {
    if (d != 2 && d != 3) throw domain_error("run_aliquot: desk scale supports d in {2, 3}");
    ComparisonRecord rec;
    rec.label = windowed ? "aliquot_windowed" : "aliquot_cumulative";
    rec.metadata = {{"d", std::to_string(d)}, {"x", std::to_string(x)}, {"z", std::to_string(z)}};
    detail::HCache H;

    auto mass = [&](i64 p, i64 pn) {  // P(|E(F_p)| = pn)
        i64 t = p + 1 - pn;
        return H(t * t - 4 * p) / Int(p);
    };
    auto window_of = [&](i64 p) {
        std::vector<i64> out;
        for (i64 q = std::max<i64>(2, p - 2 * isqrt(p)); q <= p + 2 * isqrt(p) + 2; ++q) {
            i64 t = p + 1 - q;
            if (t * t < 4 * p && is_prime_u64((u64)q)) out.push_back(q);
        }
        return out;
    };

    Rat observed = 0;
    i64 cycles = 0;
    i64 lo = windowed ? x + 1 : 2, hi = windowed ? 2 * x : x;
    for (i64 p1 = lo; p1 <= hi; ++p1) {
        if (p1 < 5 || !is_prime_u64((u64)p1)) continue;
        if (d == 2) {
            for (i64 p2 : window_of(p1)) {
                if (p2 == p1 || p2 < 5) continue;
                i64 t = p2 + 1 - p1;
                if (t * t >= 4 * p2) continue;  // p1 must sit in p2's window too
                observed += mass(p1, p2) * mass(p2, p1);
                ++cycles;
            }
        } else {
            for (i64 p2 : window_of(p1)) {
                if (p2 == p1 || p2 < 5) continue;
                for (i64 p3 : window_of(p2)) {
                    if (p3 == p1 || p3 == p2 || p3 < 5) continue;
                    i64 t = p3 + 1 - p1;
                    if (t * t >= 4 * p3) continue;
                    observed += mass(p1, p2) * mass(p2, p3) * mass(p3, p1);
                    ++cycles;
                }
            }
        }
    }
    rec.observed = ExactOrReal::from_rat(observed);
    double C = constant(aliquot_kind(d), z).value;
    double integral = windowed ? integral_aliquot((double)x, 2.0 * (double)x, d)
                               : integral_aliquot(2.0, (double)x, d);
    rec.predicted = ExactOrReal::from_real(C * integral);
    rec.metadata["cycles"] = std::to_string(cycles);
    rec.metadata["constant"] = std::to_string(C);
    rec.finish();
    return rec;
}

}  // namespace ecstat

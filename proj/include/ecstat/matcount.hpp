#pragma once

// Exact counting of 2x2 matrices over Z/ell^r Z with trace / determinant /
// congruence constraints.  Brute-force enumeration is the oracle; the
// combinatorial closed formulas (via N_D sums) are the fast path; CRT glues
// prime-power levels.

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "ecstat/arith.hpp"
#include "ecstat/common.hpp"
#include "ecstat/quadform.hpp"

namespace ecstat {

inline Int gl2_order(i64 ell, int r) {
    if (r < 1) throw domain_error("gl2_order: r must be >= 1");
    Int l = ell;
    return int_pow(l, 4 * (r - 1)) * (l * l - 1) * (l * l - l);
}

enum class CountMethod { bruteforce, closed_formula, crt };

struct CountResult {
    Int count;
    PrimePower level;
    CountMethod method = CountMethod::closed_formula;
    // Level at which the normalized sequence is provably constant
    // (max(nu_ell(D)+1, r) for closed counts).
    int stabilized_level = 0;
};

struct MatrixConstraint {
    std::optional<i64> trace;                  // tr(sigma) = t mod ell^r
    std::optional<i64> det;                    // det(sigma) = u mod ell^r
    int congruent_to_identity_mod = 0;         // sigma = I mod ell^a
    std::optional<int> not_congruent_to_identity_mod;  // sigma != I mod ell^b
    bool exclude_zero_mod_ell = false;         // sigma != 0 mod ell
    bool invertible_only = false;
    std::function<bool(i64, i64)> custom_predicate;  // on (tr, det) residues
};

struct MatcountBudget {
    u64 brute_ops = u64(1) << 24;        // ell^{4r} cap for full enumeration
    u64 assembly_classes = u64(1) << 22; // ell^{2r} cap for (t,u)-class sums
};

inline MatcountBudget& matcount_budget() {
    static MatcountBudget b;
    return b;
}

// ---------------------------------------------------------------------------
// Brute-force (tr, det) table for one level, cached.  The matrix space is
// enumerated exhaustively; the (b, c) product histogram collapses the inner
// two loops of the ell^{4r} pass.
// ---------------------------------------------------------------------------
namespace detail {

inline const std::vector<i64>& trace_det_table(i64 ell, int r) {
    static std::map<std::pair<i64, int>, std::vector<i64>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(ell, r);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    i64 q = ipow(ell, r);
    if ((u64)q * q * q * q > matcount_budget().brute_ops)
        throw budget_error("trace_det_table: ell^{4r} exceeds brute-force budget");
    std::vector<i64> prod_hist(q, 0);
    for (i64 b = 0; b < q; ++b)
        for (i64 c = 0; c < q; ++c) prod_hist[(i64)((u128)((u64)b) * (u64)c % (u64)q)]++;
    std::vector<i64> table((size_t)q * q, 0);
    for (i64 a = 0; a < q; ++a) {
        for (i64 d = 0; d < q; ++d) {
            i64 t = (a + d) % q;
            i64 ad = (i64)((u128)((u64)a) * (u64)d % (u64)q);
            i64* row = table.data() + (size_t)t * q;
            // det u = ad - bc
            for (i64 v = 0; v < q; ++v) {
                i64 u = ad - v;
                if (u < 0) u += q;
                row[u] += prod_hist[v];
            }
        }
    }
    return cache.emplace(key, std::move(table)).first->second;
}

// nu_ell of an i64 that may be zero; "zero" maps to a sentinel >= cap.
inline int valuation_capped(i64 x, i64 ell, int cap) {
    if (x == 0) return cap;
    int v = 0;
    while (x % ell == 0 && v < cap) { x /= ell; ++v; }
    return v;
}

// Exact count of C(t, u, 1; ell^r) from the N_D solution counts:
//   ell^{2r} + sum_{j=1}^{min(r, nu+1)} (N_D(ell^j) - N_D(ell^{j-1})) ell^{2r-j}
inline Int closed_count_n1(i64 t, i64 u, i64 ell, int r) {
    i64 D = t * t - 4 * u;
    int nu = valuation_capped(D, ell, r + 1);
    int jmax = std::min(r, nu + 1);
    Int total = int_pow(Int(ell), 2 * r);
    i64 prev = detail::sqrt_count_prime_power(D, ell, 0);
    for (int j = 1; j <= jmax; ++j) {
        i64 cur = detail::sqrt_count_prime_power(D, ell, j);
        total += Int(cur - prev) * int_pow(Int(ell), 2 * r - j);
        prev = cur;
    }
    return total;
}

// Exact count of C(t, u, n; ell^r) where a = nu_ell(n), any r >= 1.
inline Int closed_count(i64 t, i64 u, int a, i64 ell, int r) {
    if (a == 0) return closed_count_n1(t, u, ell, r);
    if (r <= a) {
        // sigma = I mod ell^r exactly
        i64 q = ipow(ell, r);
        return (mod_floor(t - 2, q) == 0 && mod_floor(u - 1, q) == 0) ? Int(1) : Int(0);
    }
    i64 la = ipow(ell, a);
    i64 q = ipow(ell, r);
    if (r < 2 * a) {
        // det(I + ell^a tau) = 1 + ell^a tr(tau) mod ell^r here
        if (mod_floor(t - 2, la) != 0) return 0;
        if (mod_floor(u + 1 - t, q) != 0) return 0;
        return int_pow(Int(ell), 3 * (r - a));
    }
    if (mod_floor(t - 2, la) != 0) return 0;
    if (mod_floor(u + 1 - t, la * la) != 0) return 0;
    // Division of the residue (t-2) mod ell^r by ell^a is well-defined mod ell^{r-a}.
    i64 t1 = mod_floor(mod_floor(t - 2, q) / la, ipow(ell, r - a));
    i64 u1 = mod_floor(mod_floor(u + 1 - t, q) / (la * la), ipow(ell, r - 2 * a));
    // Sum over determinant lifts u2 = u1 mod ell^{r-2a}, u2 mod ell^{r-a}.
    Int total = 0;
    i64 step = ipow(ell, r - 2 * a);
    i64 top = ipow(ell, r - a);
    for (i64 u2 = u1; u2 < top; u2 += step) total += closed_count_n1(t1, u2, ell, r - a);
    return total;
}

// Count of sigma in C(t, u, 1; ell^r) with sigma = 0 mod ell.
inline Int zero_class_count(i64 t, i64 u, i64 ell, int r) {
    if (r == 1) return (mod_floor(t, ell) == 0 && mod_floor(u, ell) == 0) ? Int(1) : Int(0);
    i64 q = ipow(ell, r);
    if (mod_floor(t, ell) != 0 || mod_floor(u, ell * ell) != 0) return 0;
    i64 t1 = mod_floor(mod_floor(t, q) / ell, ipow(ell, r - 1));
    i64 u1 = mod_floor(mod_floor(u, q) / (ell * ell), ipow(ell, r - 2));
    Int total = 0;
    i64 step = ipow(ell, r - 2);
    i64 top = ipow(ell, r - 1);
    for (i64 u2 = u1; u2 < top; u2 += step) total += closed_count_n1(t1, u2, ell, r - 1);
    return total;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// count_fixed_trace_det: #{sigma in M_2(Z/ell^r) : tr = t, det = u,
//                          sigma = I mod ell^{nu_ell(n)}}
// ---------------------------------------------------------------------------
inline CountResult count_fixed_trace_det(i64 t, i64 u, i64 n, PrimePower level,
                                         CountMethod mode = CountMethod::closed_formula) {
    i64 ell = level.ell;
    int r = level.r;
    i64 q = level.value;
    if (n < 1) throw domain_error("count_fixed_trace_det: n must be positive");
    if (q > (i64(1) << 31)) throw budget_error("count_fixed_trace_det: level too large");
    int a = (n == 1) ? 0 : detail::valuation_capped(n, ell, r + 1);
    t = mod_floor(t, q);
    u = mod_floor(u, q);

    CountResult res;
    res.level = level;
    i64 D = t * t - 4 * u;
    int nu = detail::valuation_capped(D, ell, 64);
    res.stabilized_level = std::max(nu + 1, r);

    if (mode == CountMethod::bruteforce) {
        int s = r - std::min(a, r);
        if ((u64)ipow(ell, 4 * s) > matcount_budget().brute_ops)
            throw budget_error("count_fixed_trace_det: brute-force budget exceeded");
        if (a == 0) {
            res.count = detail::trace_det_table(ell, r)[(size_t)t * q + u];
            res.method = CountMethod::bruteforce;
            return res;
        }
        i64 qa = ipow(ell, std::min(a, r));
        i64 qs = ipow(ell, s);
        i64 cnt = 0;
        // sigma = I + ell^a tau, tau over M_2(Z/ell^{r-a})
        for (i64 x = 0; x < qs; ++x)
            for (i64 y = 0; y < qs; ++y)
                for (i64 z = 0; z < qs; ++z)
                    for (i64 w = 0; w < qs; ++w) {
                        i64 tr = mod_floor(2 + qa * (x + w), q);
                        i64 det = mod_floor((1 + qa * x) * (1 + qa * w) - qa * qa * y * z, q);
                        if (tr == t && det == u) ++cnt;
                    }
        res.count = cnt;
        res.method = CountMethod::bruteforce;
        return res;
    }

    if (a > 0 && r <= nu)
        throw unstabilized_error("count_fixed_trace_det: closed mode below stabilization level");
    res.count = detail::closed_count(t, u, a, ell, r);
    res.method = CountMethod::closed_formula;
    return res;
}

// ---------------------------------------------------------------------------
// count_constrained: exact count in M_2 or GL_2 under a MatrixConstraint.
// ---------------------------------------------------------------------------
inline CountResult count_constrained(const MatrixConstraint& cons, PrimePower level) {
    i64 ell = level.ell;
    int r = level.r;
    i64 q = level.value;
    int a = std::min(cons.congruent_to_identity_mod, r);
    CountResult res;
    res.level = level;
    res.stabilized_level = r;

    // Brute-force path: enumerate sigma = I + ell^a tau directly.
    int s = r - a;
    if ((u64)ipow(ell, 4 * s) <= matcount_budget().brute_ops) {
        i64 qa = ipow(ell, a);
        i64 qs = ipow(ell, s);
        std::optional<i64> want_t, want_u;
        if (cons.trace) want_t = mod_floor(*cons.trace, q);
        if (cons.det) want_u = mod_floor(*cons.det, q);
        int bex = cons.not_congruent_to_identity_mod ? *cons.not_congruent_to_identity_mod : 0;
        i64 cnt = 0;
        for (i64 x = 0; x < qs; ++x)
            for (i64 y = 0; y < qs; ++y)
                for (i64 z = 0; z < qs; ++z)
                    for (i64 w = 0; w < qs; ++w) {
                        i64 m00 = mod_floor(1 + qa * x, q), m01 = mod_floor(qa * y, q);
                        i64 m10 = mod_floor(qa * z, q), m11 = mod_floor(1 + qa * w, q);
                        i64 tr = (m00 + m11) % q;
                        i64 det = mod_floor(m00 * m11 - m01 * m10, q);
                        if (want_t && tr != *want_t) continue;
                        if (want_u && det != *want_u) continue;
                        if (bex > 0) {
                            i64 qb = ipow(ell, std::min(bex, r));
                            if (mod_floor(m00 - 1, qb) == 0 && m01 % qb == 0 &&
                                m10 % qb == 0 && mod_floor(m11 - 1, qb) == 0)
                                continue;
                        }
                        if (cons.exclude_zero_mod_ell && m00 % ell == 0 && m01 % ell == 0 &&
                            m10 % ell == 0 && m11 % ell == 0)
                            continue;
                        if (cons.invertible_only && det % ell == 0) continue;
                        if (cons.custom_predicate && !cons.custom_predicate(tr, det)) continue;
                        ++cnt;
                    }
        res.count = cnt;
        res.method = CountMethod::bruteforce;
        return res;
    }

    // Closed assembly: sum closed-formula counts over (t, u) residue classes.
    i64 nt = cons.trace ? 1 : q;
    i64 nu_ = cons.det ? 1 : q;
    if ((u64)nt * (u64)nu_ > matcount_budget().assembly_classes)
        throw budget_error("count_constrained: infeasible level");
    int bex = cons.not_congruent_to_identity_mod ? std::min(*cons.not_congruent_to_identity_mod, r)
                                                 : 0;
    if (bex > 0 && bex <= a) {
        // sigma = I mod ell^a already forces sigma = I mod ell^bex
        res.count = 0;
        res.method = CountMethod::closed_formula;
        return res;
    }
    Int total = 0;
    for (i64 ti = 0; ti < nt; ++ti) {
        i64 t = cons.trace ? mod_floor(*cons.trace, q) : ti;
        for (i64 ui = 0; ui < nu_; ++ui) {
            i64 u = cons.det ? mod_floor(*cons.det, q) : ui;
            if (cons.invertible_only && u % ell == 0) continue;
            if (cons.custom_predicate && !cons.custom_predicate(t, u)) continue;
            Int c = detail::closed_count(t, u, a, ell, r);
            if (bex > a) {
                // remove sigma = I mod ell^bex
                c -= detail::closed_count(t, u, bex, ell, r);
            }
            if (cons.exclude_zero_mod_ell && a == 0) c -= detail::zero_class_count(t, u, ell, r);
            total += c;
        }
    }
    res.count = total;
    res.method = CountMethod::closed_formula;
    return res;
}

// ---------------------------------------------------------------------------
// count_crt: product of per-prime-power constrained counts for a squarefree-
// factorizable modulus q.
// ---------------------------------------------------------------------------
inline Int count_crt(const std::vector<std::pair<PrimePower, MatrixConstraint>>& parts, i64 q) {
    i64 check = 1;
    Int prod = 1;
    for (const auto& [pp, cons] : parts) {
        check *= pp.value;
        prod *= count_constrained(cons, pp).count;
    }
    if (check != q) throw domain_error("count_crt: prime powers do not multiply to q");
    return prod;
}

}  // namespace ecstat

#pragma once

// Exhaustive census of elliptic curves over F_p (p >= 5) as nonsingular short
// Weierstrass pairs y^2 = x^3 + ax + b: point counts, traces, group shapes,
// and exact empirical distributions under the pair-counting measure.
//
// The full (a, b) grid decomposes into twist orbits (a, b) ~ (c^4 a, c^6 b);
// invariants are computed once per orbit and weighted by the orbit size, which
// reproduces the per-pair tallies exactly.  The naive per-pair path is kept as
// the oracle for cross-checks and for streaming dumps.

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <numeric>
#include <thread>
#include <vector>

#include "ecstat/arith.hpp"
#include "ecstat/common.hpp"
#include "ecstat/density.hpp"

namespace ecstat {

struct CurveRecord {
    i64 p, a, b;
    i64 N;  // group order including the point at infinity
    i64 t;  // trace p + 1 - N
    GroupShape shape;
};

enum class Statistic { trace, group, cyclic, prime_order, trace_mod };

struct EmpiricalDistribution {
    i64 p;
    Statistic statistic;
    i64 mod_N = 0, mod_t = 0;            // for trace_mod
    std::map<std::string, Rat> masses;   // key -> exact mass, denominators | p^2-p
    i64 support_size = 0;
};

// ---------------------------------------------------------------------------
// Per-field tables
// ---------------------------------------------------------------------------
struct FieldContext {
    i64 p;
    std::vector<signed char> chi;  // quadratic character, chi[0] = 0
    std::vector<i64> sqrt_of;      // one square root per residue, -1 if none

    explicit FieldContext(i64 p_) : p(p_) {
        if (p < 5) throw domain_error("FieldContext: p must be >= 5");
        if (!is_prime_u64((u64)p)) throw domain_error("FieldContext: p must be prime");
        chi.assign(p, -1);
        sqrt_of.assign(p, -1);
        chi[0] = 0;
        for (i64 x = 0; x < p; ++x) {
            i64 sq = x * x % p;
            if (sqrt_of[sq] < 0) sqrt_of[sq] = x;
            if (sq) chi[sq] = 1;
        }
    }

    i64 nonresidue() const {
        for (i64 n = 2; n < p; ++n)
            if (chi[n] < 0) return n;
        return -1;
    }
};

inline bool is_singular_pair(i64 p, i64 a, i64 b) {
    return mod_floor(4 * a % p * a % p * a + 27 * b % p * b, p) == 0;
}

// Streams nonsingular pairs in (a, b)-lexicographic order; returns the count.
inline i64 nonsingular_pairs(i64 p, const std::function<void(i64, i64)>& sink = nullptr) {
    if (p < 5 || !is_prime_u64((u64)p))
        throw domain_error("nonsingular_pairs: p must be a prime >= 5");
    i64 count = 0;
    for (i64 a = 0; a < p; ++a)
        for (i64 b = 0; b < p; ++b) {
            if (is_singular_pair(p, a, b)) continue;
            ++count;
            if (sink) sink(a, b);
        }
    return count;
}

namespace detail {

// N = p + 1 + sum_x chi(x^3 + ax + b); also reports the number of roots of
// the cubic (zeros of the character argument).
inline i64 point_count_ctx(const FieldContext& F, i64 a, i64 b, int* cubic_roots = nullptr) {
    i64 p = F.p;
    i64 s = 0;
    int roots = 0;
    for (i64 x = 0; x < p; ++x) {
        i64 v = (x * x % p * x + a * x + b) % p;
        int c = F.chi[v];
        s += c;
        if (c == 0) ++roots;
    }
    if (cubic_roots) *cubic_roots = roots;
    return p + 1 + s;
}

// ---- affine curve arithmetic (small p) ----
struct APoint {
    i64 x = 0, y = 0;
    bool inf = true;
};

inline i64 inv_mod(i64 a, i64 p) {
    i64 t = 0, nt = 1, r = p, nr = mod_floor(a, p);
    while (nr != 0) {
        i64 qq = r / nr;
        t -= qq * nt; std::swap(t, nt);
        r -= qq * nr; std::swap(r, nr);
    }
    return mod_floor(t, p);
}

inline APoint ec_add(const APoint& P, const APoint& Q, i64 a, i64 p) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    i64 lam;
    if (P.x == Q.x) {
        if ((P.y + Q.y) % p == 0) return {};  // P + (-P) = O
        lam = (3 * P.x % p * P.x + a) % p * inv_mod(2 * P.y, p) % p;
    } else {
        lam = mod_floor(Q.y - P.y, p) * inv_mod(mod_floor(Q.x - P.x, p), p) % p;
    }
    i64 x3 = mod_floor(lam * lam - P.x - Q.x, p);
    i64 y3 = mod_floor(lam * (P.x - x3) - P.y, p);
    return {x3, y3, false};
}

inline APoint ec_mul(i64 k, APoint P, i64 a, i64 p) {
    APoint R;
    while (k > 0) {
        if (k & 1) R = ec_add(R, P, a, p);
        P = ec_add(P, P, a, p);
        k >>= 1;
    }
    return R;
}

inline i64 point_order(const APoint& P, i64 N, const Factorization& factN, i64 a, i64 p) {
    i64 o = N;
    for (auto [q, e] : factN.factors) {
        while (o % (i64)q == 0) {
            if (ec_mul(o / (i64)q, P, a, p).inf) o /= (i64)q;
            else break;
        }
    }
    return o;
}

// Group shape via the order-lcm scan.  The 2-part of m is settled for free by
// the cubic root count (E[2] is full iff the cubic splits); the remaining
// ambiguity is resolved by scanning point orders, exiting as soon as only one
// candidate m stays feasible.
inline GroupShape shape_ctx(const FieldContext& F, i64 a, i64 b, i64 N, int cubic_roots) {
    i64 p = F.p;
    auto factN = factorize((u64)N);
    i64 sq = 1;
    for (auto [q, e] : factN.factors)
        for (int i = 0; i < e / 2; ++i) sq *= (i64)q;
    std::vector<i64> cands;
    for (u64 d : divisors(factorize((u64)sq)))
        if ((p - 1) % (i64)d == 0) cands.push_back((i64)d);
    bool two_torsion_full = (cubic_roots == 3);
    std::erase_if(cands, [&](i64 m) {
        return two_torsion_full ? (m % 2 != 0) : (m % 2 == 0);
    });
    // full 2-torsion forces 4 | N and 2 | p-1, so m = 2 survives the filter;
    // otherwise m = 1 does
    if (cands.empty()) throw domain_error("shape_ctx: inconsistent 2-torsion data");
    if (cands.size() == 1) return GroupShape{cands[0], N / (cands[0] * cands[0])};

    i64 L = 1;
    i64 last_feasible = cands.back();
    for (i64 x = 0; x < p; ++x) {
        i64 v = (x * x % p * x + a * x + b) % p;
        if (F.chi[v] < 0) continue;
        APoint P{x, F.sqrt_of[v], false};
        L = std::lcm(L, point_order(P, N, factN, a, p));
        int feasible = 0;
        for (i64 m : cands)
            if ((N / m) % L == 0) { ++feasible; last_feasible = m; }
        if (feasible == 1) return GroupShape{last_feasible, N / (last_feasible * last_feasible)};
    }
    // Full scan: L is the exact exponent, m = N/L is the largest feasible.
    i64 best = 1;
    for (i64 m : cands)
        if ((N / m) % L == 0) best = std::max(best, m);
    return GroupShape{best, N / (best * best)};
}

inline i64 primitive_root(i64 p) {
    auto f = factorize((u64)(p - 1));
    for (i64 g = 2; g < p; ++g) {
        bool ok = true;
        for (auto [q, e] : f.factors)
            if (powmod((u64)g, (u64)((p - 1) / (i64)q), (u64)p) == 1) { ok = false; break; }
        if (ok) return g;
    }
    throw domain_error("primitive_root: none found");
}

}  // namespace detail

// One-off operations (build the field tables per call).
inline i64 point_count(i64 p, i64 a, i64 b) {
    if (is_singular_pair(p, a, b)) throw domain_error("point_count: singular pair");
    FieldContext F(p);
    return detail::point_count_ctx(F, mod_floor(a, p), mod_floor(b, p));
}

inline GroupShape group_shape(i64 p, i64 a, i64 b) {
    if (is_singular_pair(p, a, b)) throw domain_error("group_shape: singular pair");
    FieldContext F(p);
    a = mod_floor(a, p);
    b = mod_floor(b, p);
    int roots = 0;
    i64 N = detail::point_count_ctx(F, a, b, &roots);
    return detail::shape_ctx(F, a, b, N, roots);
}

// ---------------------------------------------------------------------------
// Census
// ---------------------------------------------------------------------------
struct CensusResult {
    i64 p = 0;
    i64 pair_count = 0;                      // p^2 - p
    std::map<i64, i64> trace_pairs;          // t -> number of pairs
    std::map<GroupShape, i64> shape_pairs;   // (m,k) -> number of pairs
    i64 cyclic_pairs = 0;
    i64 prime_order_pairs = 0;
    bool with_shapes = false;
};

struct CensusOptions {
    bool with_shapes = false;
    unsigned workers = 0;  // 0 = hardware concurrency
};

// Exact census via twist orbits; tallies are identical to the per-pair scan.
inline CensusResult run_census(i64 p, CensusOptions opt = {}) {
    FieldContext F(p);
    struct Rep { i64 a, b, weight; };
    std::vector<Rep> reps;
    i64 d = F.nonresidue();
    i64 d2 = d * d % p, d3 = d2 * d % p;
    i64 c1728 = mod_floor(1728, p);
    for (i64 j = 0; j < p; ++j) {
        if (j == 0 || j == c1728) continue;
        i64 kk = j * detail::inv_mod(mod_floor(c1728 - j, p), p) % p;
        i64 a0 = 3 * kk % p, b0 = 2 * kk % p;
        reps.push_back({a0, b0, (p - 1) / 2});
        reps.push_back({d2 * a0 % p, d3 * b0 % p, (p - 1) / 2});
    }
    i64 g = detail::primitive_root(p);
    i64 g6 = std::gcd<i64, i64>(6, p - 1);
    for (i64 i = 0; i < g6; ++i)
        reps.push_back({0, (i64)powmod((u64)g, (u64)i, (u64)p), (p - 1) / g6});
    i64 g4 = std::gcd<i64, i64>(4, p - 1);
    for (i64 i = 0; i < g4; ++i)
        reps.push_back({(i64)powmod((u64)g, (u64)i, (u64)p), 0, (p - 1) / g4});

    struct RepResult {
        i64 t, weight;
        GroupShape shape;
        bool prime_N;
    };
    std::vector<RepResult> results(reps.size());
    unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, (unsigned)reps.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= reps.size()) break;
            const Rep& rep = reps[i];
            int roots = 0;
            i64 N = detail::point_count_ctx(F, rep.a, rep.b, &roots);
            RepResult rr;
            rr.t = p + 1 - N;
            rr.weight = rep.weight;
            rr.prime_N = is_prime_u64((u64)N);
            rr.shape = opt.with_shapes ? detail::shape_ctx(F, rep.a, rep.b, N, roots)
                                       : GroupShape{1, N};
            results[i] = rr;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    CensusResult res;
    res.p = p;
    res.with_shapes = opt.with_shapes;
    for (const auto& rr : results) {  // fixed order merge
        res.pair_count += rr.weight;
        res.trace_pairs[rr.t] += rr.weight;
        if (rr.prime_N) res.prime_order_pairs += rr.weight;
        if (opt.with_shapes) {
            res.shape_pairs[rr.shape] += rr.weight;
            if (rr.shape.m == 1) res.cyclic_pairs += rr.weight;
        }
    }
    return res;
}

// Per-pair census, the oracle for the orbit decomposition.
inline CensusResult naive_census(i64 p, bool with_shapes = false) {
    FieldContext F(p);
    CensusResult res;
    res.p = p;
    res.with_shapes = with_shapes;
    for (i64 a = 0; a < p; ++a)
        for (i64 b = 0; b < p; ++b) {
            if (is_singular_pair(p, a, b)) continue;
            int roots = 0;
            i64 N = detail::point_count_ctx(F, a, b, &roots);
            res.pair_count++;
            res.trace_pairs[p + 1 - N]++;
            if (is_prime_u64((u64)N)) res.prime_order_pairs++;
            if (with_shapes) {
                GroupShape s = detail::shape_ctx(F, a, b, N, roots);
                res.shape_pairs[s]++;
                if (s.m == 1) res.cyclic_pairs++;
            }
        }
    return res;
}

// Streams CurveRecords in (a, b)-lexicographic order.
inline void enumerate_curves(i64 p, bool with_shapes,
                             const std::function<void(const CurveRecord&)>& sink) {
    FieldContext F(p);
    for (i64 a = 0; a < p; ++a)
        for (i64 b = 0; b < p; ++b) {
            if (is_singular_pair(p, a, b)) continue;
            int roots = 0;
            i64 N = detail::point_count_ctx(F, a, b, &roots);
            CurveRecord rec{p, a, b, N, p + 1 - N,
                            with_shapes ? detail::shape_ctx(F, a, b, N, roots)
                                        : GroupShape{1, N}};
            sink(rec);
        }
}

// ---------------------------------------------------------------------------
// Empirical distributions (exact rationals over p^2 - p)
// ---------------------------------------------------------------------------
inline EmpiricalDistribution empirical_distribution(i64 p, Statistic stat, i64 mod_N = 1,
                                                    i64 mod_t = 0, CensusOptions opt = {}) {
    if (stat == Statistic::trace_mod && mod_N < 1)
        throw domain_error("empirical_distribution: trace_mod needs modulus >= 1");
    opt.with_shapes = (stat == Statistic::group || stat == Statistic::cyclic);
    CensusResult c = run_census(p, opt);
    EmpiricalDistribution d;
    d.p = p;
    d.statistic = stat;
    d.mod_N = mod_N;
    d.mod_t = mod_t;
    Rat total(1, c.pair_count);
    switch (stat) {
        case Statistic::trace:
            for (auto& [t, n] : c.trace_pairs) d.masses[std::to_string(t)] = Rat(n) * total;
            break;
        case Statistic::group:
            for (auto& [s, n] : c.shape_pairs)
                d.masses[std::to_string(s.m) + "," + std::to_string(s.k)] = Rat(n) * total;
            break;
        case Statistic::cyclic:
            d.masses["true"] = Rat(c.cyclic_pairs) * total;
            d.masses["false"] = Rat(c.pair_count - c.cyclic_pairs) * total;
            break;
        case Statistic::prime_order:
            d.masses["true"] = Rat(c.prime_order_pairs) * total;
            d.masses["false"] = Rat(c.pair_count - c.prime_order_pairs) * total;
            break;
        case Statistic::trace_mod: {
            i64 hit = 0;
            for (auto& [t, n] : c.trace_pairs)
                if (mod_floor(t - mod_t, mod_N) == 0) hit += n;
            d.masses["true"] = Rat(hit) * total;
            d.masses["false"] = Rat(c.pair_count - hit) * total;
            break;
        }
    }
    d.support_size = (i64)d.masses.size();
    return d;
}

}  // namespace ecstat

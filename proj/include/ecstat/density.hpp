#pragma once

// The probability masses: archimedean (semicircle) density, exact local
// densities f_ell, their starred and group variants, and the exact global
// masses through Deuring / Schoof class-number formulas.

#include <cmath>
#include <numbers>

#include "ecstat/arith.hpp"
#include "ecstat/common.hpp"
#include "ecstat/matcount.hpp"
#include "ecstat/quadform.hpp"

namespace ecstat {

struct GroupShape {
    i64 m = 1;
    i64 k = 1;
    i64 N() const { return m * m * k; }
    auto operator<=>(const GroupShape&) const = default;
};

struct LocalFactor {
    i64 ell;
    Rat value;
    int stabilized_at;  // level r at which the defining sequence is constant
    Rat delta;          // value - 1
};

// f_inf(t, p): semicircle mass at trace t, zero outside the Hasse interval.
inline double archimedean_density(i64 t, i64 p) {
    if (t * t >= 4 * p) return 0.0;
    return std::sqrt((double)(4 * p - t * t)) / (2.0 * std::numbers::pi * (double)p);
}

namespace detail {

// f_ell(t1, u1, 1) = (1 + 1/ell)^{-1} sum_{j>=0} N_D(ell^j)/ell^j, exact.
// The sum terminates: N_D(ell^j) is constant for j > nu_ell(D); for D = 0 the
// geometric tail is summed in closed form.
inline Rat local_density_n1(i64 t1, i64 u1, i64 ell) {
    i64 D = t1 * t1 - 4 * u1;
    if (D == 0) return Rat(ell, ell - 1);
    int nu = p_adic_valuation(D, ell);
    Rat sum = 0, weight = 1;
    i64 last = 0;
    for (int j = 0; j <= nu + 1; ++j) {
        last = detail::sqrt_count_prime_power(D, ell, j);
        sum += Rat(last) * weight;
        weight /= ell;
    }
    sum += Rat(last) * weight * ell / (ell - 1);
    return sum * ell / (ell + 1);
}

}  // namespace detail

// f_ell(t, u, n): the stabilized limit of ell^r phi(ell^r) |C(t,u,n;ell^r)| /
// |GL_2(Z/ell^r Z)|, as an exact rational.  Zero when the compatibility
// conditions u = 1 (mod ell^a), u + 1 = t (mod ell^{2a}) fail at ell.
inline LocalFactor local_density(i64 t, i64 u, i64 n, i64 ell) {
    if (n < 1) throw domain_error("local_density: n must be positive");
    int a = (n == 1) ? 0 : detail::valuation_capped(n, ell, 62);
    i64 D = t * t - 4 * u;
    int level = (D == 0) ? 1 : p_adic_valuation(D, ell) + 1;
    LocalFactor f{ell, 0, level, 0};
    i64 la = ipow(ell, a);
    if (a > 0 && (mod_floor(u - 1, la) != 0 || mod_floor(u + 1 - t, la * la) != 0)) {
        f.delta = -1;
        return f;
    }
    i64 t1 = (a == 0) ? t : (t - 2) / la;
    i64 u1 = (a == 0) ? u : (u + 1 - t) / (la * la);
    f.value = detail::local_density_n1(t1, u1, ell) / la;
    f.delta = f.value - 1;
    return f;
}

// f*_ell(t1, u1, 1): as f_ell but counting only sigma != 0 mod ell.
// Identity: f* = f_ell(t1,u1,1) - f_ell(t1/ell, u1/ell^2, 1)/ell, second term
// present only when ell | t1 and ell^2 | u1.
inline LocalFactor local_density_star(i64 t1, i64 u1, i64 ell) {
    i64 D = t1 * t1 - 4 * u1;
    int level = (D == 0) ? 1 : p_adic_valuation(D, ell) + 1;
    Rat v = detail::local_density_n1(t1, u1, ell);
    if (mod_floor(t1, ell) == 0 && mod_floor(u1, ell * ell) == 0)
        v -= detail::local_density_n1(t1 / ell, u1 / (ell * ell), ell) / ell;
    return LocalFactor{ell, v, level, v - 1};
}

// f_ell(G, p) = f_ell(t, p, m) - f_ell(t, p, ell*m)  (inclusion-exclusion),
// with t = p + 1 - m^2 k.  Vanishes when p != 1 (mod ell^{nu_ell(m)}).
inline LocalFactor group_local_density(const GroupShape& shape, i64 p, i64 ell) {
    i64 t = p + 1 - shape.N();
    int num = (shape.m == 1) ? 0 : detail::valuation_capped(shape.m, ell, 62);
    if (num > 0 && mod_floor(p - 1, ipow(ell, num)) != 0) {
        i64 D = t * t - 4 * p;
        int level = (D == 0) ? 1 : p_adic_valuation(D, ell) + 1;
        return LocalFactor{ell, 0, level, -1};
    }
    LocalFactor f = local_density(t, p, shape.m, ell);
    LocalFactor g = local_density(t, p, ell * shape.m, ell);
    f.value -= g.value;
    f.delta = f.value - 1;
    return f;
}

// Deuring: P(a_p = t) = H(t^2 - 4p)/p inside the Hasse interval, else 0.
inline Rat deuring_mass(i64 t, i64 p) {
    if (t * t >= 4 * p) return 0;
    return kronecker_class_number(t * t - 4 * p) / p;
}

// P(a_p = t and E[n] full) = H((t^2-4p)/n^2)/p when |t| < 2 sqrt(p),
// n | p - 1 and n^2 | p + 1 - t; else 0.
inline Rat full_torsion_mass(i64 t, i64 n, i64 p) {
    if (n < 1) throw domain_error("full_torsion_mass: n must be positive");
    if (t * t >= 4 * p) return 0;
    if (mod_floor(p - 1, n) != 0) return 0;
    if (mod_floor(p + 1 - t, n * n) != 0) return 0;
    i64 D = t * t - 4 * p;
    return kronecker_class_number(D / (n * n)) / p;
}

// P(E(F_p) iso Z/m x Z/mk) = (1/p) sum_{j^2 | k} mu(j) H((t^2-4p)/(jm)^2),
// with the same vanishing conventions as full_torsion_mass per term.
inline Rat schoof_group_mass(const GroupShape& shape, i64 p) {
    i64 t = p + 1 - shape.N();
    Rat mass = 0;
    for (i64 j = 1; j * j <= shape.k; ++j) {
        if (shape.k % (j * j) != 0) continue;
        int mu = moebius((u64)j);
        if (mu == 0) continue;
        mass += mu * full_torsion_mass(t, j * shape.m, p);
    }
    return mass;
}

// All shapes with positive Schoof mass at p: m | p-1, N = m^2 k in the Hasse
// interval.
inline std::vector<GroupShape> valid_shapes(i64 p) {
    std::vector<GroupShape> shapes;
    i64 tmax = isqrt(4 * p - 1);  // |t| <= tmax strictly inside Hasse
    for (i64 m = 1; m * m <= p + 1 + tmax; ++m) {
        if ((p - 1) % m != 0) continue;
        for (i64 N = p + 1 - tmax; N <= p + 1 + tmax; ++N) {
            if (N < 1 || N % (m * m) != 0) continue;
            shapes.push_back(GroupShape{m, N / (m * m)});
        }
    }
    return shapes;
}

}  // namespace ecstat

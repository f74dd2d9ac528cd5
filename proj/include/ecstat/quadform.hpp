#pragma once

// Binary quadratic forms, class numbers h / unit counts w, the solution
// counter N_D(m), Kronecker class numbers H(D), and the class-number-formula
// Euler product cross-check.

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "ecstat/arith.hpp"
#include "ecstat/common.hpp"

namespace ecstat {

struct Discriminant {
    i64 D;
    int residue;  // D mod 4, in {0, 1}
    Factorization abs_factorization;

    explicit Discriminant(i64 d) : D(d) {
        if (d >= 0) throw domain_error("Discriminant: must be negative");
        residue = (int)mod_floor(d, 4);
        if (residue != 0 && residue != 1)
            throw domain_error("Discriminant: must be 0 or 1 mod 4");
        abs_factorization = factorize((u64)(-d));
    }
};

struct QuadraticForm {
    i64 a, b, c;
    i64 discriminant() const { return b * b - 4 * a * c; }
    bool operator==(const QuadraticForm&) const = default;
};

struct ClassNumberResult {
    i64 h;                            // class number
    int w;                            // unit count: 6, 4 or 2
    std::vector<QuadraticForm> forms; // reduced primitive representatives
};

// ---------------------------------------------------------------------------
// N_D(m) = #{0 <= x < 2m : x^2 = D mod 4m}; 0 for D = 2,3 mod 4, otherwise
// multiplicative in m.  Enumeration for small m, prime-power valuation
// formulas (Hensel structure) beyond.
// ---------------------------------------------------------------------------
inline i64 brute_sqrt_count(i64 D, i64 m) {
    i64 cnt = 0;
    i64 mod = 4 * m;
    for (i64 x = 0; x < 2 * m; ++x)
        if (mod_floor(x * x - D, mod) == 0) ++cnt;
    return cnt;
}

namespace detail {

// #{x mod 2^s : x^2 = D mod 2^s} for s >= 0.
inline i64 count_sqrt_mod_2pow(i64 D, int s) {
    if (s == 0) return 1;
    i64 mod = ipow(2, s);
    i64 d = mod_floor(D, mod);
    if (d == 0) return ipow(2, s / 2);  // x = 0 mod 2^ceil(s/2)
    int nu = 0;
    while (d % 2 == 0) { d /= 2; ++nu; }
    if (nu & 1) return 0;
    int s1 = s - nu;  // modulus left for the odd part
    i64 c;
    if (s1 == 1) c = 1;
    else if (s1 == 2) c = (d % 4 == 1) ? 2 : 0;
    else c = (d % 8 == 1) ? 4 : 0;
    return c * ipow(2, nu / 2);
}

// #{x mod ell^j : x^2 = D mod ell^j} for odd prime ell.
inline i64 count_sqrt_mod_oddpow(i64 D, i64 ell, int j) {
    if (j == 0) return 1;
    i64 mod = ipow(ell, j);
    i64 d = mod_floor(D, mod);
    if (d == 0) return ipow(ell, j / 2);
    int nu = 0;
    while (d % ell == 0) { d /= ell; ++nu; }
    if (nu & 1) return 0;
    if (kronecker_symbol(d, (u64)ell) != 1) return 0;
    return 2 * ipow(ell, nu / 2);
}

inline i64 sqrt_count_prime_power(i64 D, i64 ell, int j) {
    if (ell == 2) return count_sqrt_mod_2pow(D, j + 2) / 2;
    // Odd prime power: the mod-4 condition fixes the parity of x, and CRT
    // leaves exactly the solutions of x^2 = D mod ell^j.
    return count_sqrt_mod_oddpow(D, ell, j);
}

}  // namespace detail

inline i64 sqrt_count(i64 D, i64 m) {
    if (m < 1) throw domain_error("sqrt_count: m must be positive");
    int d4 = (int)mod_floor(D, 4);
    if (d4 == 2 || d4 == 3) return 0;
    if (4 * m <= 1000000) return brute_sqrt_count(D, m);
    i64 prod = 1;
    for (auto [p, e] : factorize((u64)m).factors) {
        prod *= detail::sqrt_count_prime_power(D, (i64)p, e);
        if (prod == 0) return 0;
    }
    return prod;
}

// ---------------------------------------------------------------------------
// Reduced primitive forms and class numbers by exhaustive scan over
// |b| <= a <= sqrt(|Delta|/3).
// ---------------------------------------------------------------------------
inline std::vector<QuadraticForm> reduced_primitive_forms(const Discriminant& delta) {
    std::vector<QuadraticForm> forms;
    i64 D = delta.D;
    i64 amax = isqrt(-D / 3);
    for (i64 a = 1; a <= amax; ++a) {
        for (i64 b = -a; b <= a; ++b) {
            if (mod_floor(b - D, 2) != 0) continue;  // b = D mod 2
            i64 num = b * b - D;
            if (num % (4 * a) != 0) continue;
            i64 c = num / (4 * a);
            if (c < a) continue;
            if ((b < 0) && (b == -a || a == c)) continue;  // sign normalization
            if (std::gcd(std::gcd(a, std::abs(b)), c) != 1) continue;
            forms.push_back({a, b, c});
        }
    }
    return forms;
}

inline int unit_count(i64 delta) {
    if (delta == -3) return 6;
    if (delta == -4) return 4;
    return 2;
}

inline ClassNumberResult class_number(const Discriminant& delta) {
    ClassNumberResult r;
    r.forms = reduced_primitive_forms(delta);
    r.h = (i64)r.forms.size();
    r.w = unit_count(delta.D);
    return r;
}

// H(D) = sum over d^2 | D with D/d^2 a discriminant of h(D/d^2) / w(D/d^2).
inline Rat kronecker_class_number(const Discriminant& delta) {
    i64 D = delta.D;
    // d must divide the square part of |D|.
    u64 sq = 1;
    for (auto [p, e] : delta.abs_factorization.factors)
        for (int i = 0; i < e / 2; ++i) sq *= p;
    Rat H = 0;
    for (u64 d : divisors(factorize(sq))) {
        i64 sub = D / (i64)(d * d);
        int m4 = (int)mod_floor(sub, 4);
        if (m4 != 0 && m4 != 1) continue;
        auto cn = class_number(Discriminant(sub));
        H += Rat(cn.h, cn.w);
    }
    return H;
}

inline Rat kronecker_class_number(i64 D) { return kronecker_class_number(Discriminant(D)); }

// ---------------------------------------------------------------------------
// Truncation of H(D) = sqrt(|D|)/(2 pi) * prod_ell (1+1/ell)^{-1} *
// sum_j N_D(ell^j)/ell^j.  The product is evaluated over primes in increasing
// order; it converges conditionally, so the ordering is part of the contract.
// ---------------------------------------------------------------------------

// Exact local factor (1+1/ell)^{-1} sum_{j>=0} N_D(ell^j)/ell^j; the inner sum
// terminates because N_D(ell^j) is constant for j > nu_ell(D).
inline Rat cnf_local_factor(const Discriminant& delta, i64 ell) {
    int nu = 0;
    i64 D = delta.D;
    i64 a = -D;
    while (a % ell == 0) { a /= ell; ++nu; }
    Rat sum = 0;
    Rat weight = 1;
    i64 last = 0;
    for (int j = 0; j <= nu + 1; ++j) {
        last = sqrt_count(D, ipow(ell, j));
        sum += Rat(last) * weight;
        weight /= ell;
    }
    // geometric tail with the stabilized value
    sum += Rat(last) * weight / (ell - 1) * ell;
    return sum / (Rat(ell + 1, ell));
}

inline double cnf_partial_product(const Discriminant& delta, i64 z,
                                  std::vector<std::pair<i64, double>>* trajectory = nullptr) {
    double value = std::sqrt((double)(-delta.D)) / (2.0 * std::numbers::pi);
    if (z < 2) return value;
    for (u64 ell : primes_up_to((u64)z)) {
        value *= rat_to_double(cnf_local_factor(delta, (i64)ell));
        if (trajectory) trajectory->push_back({(i64)ell, value});
    }
    return value;
}

}  // namespace ecstat

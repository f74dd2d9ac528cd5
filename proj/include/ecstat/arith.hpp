#pragma once

// Exact integer utilities: Kronecker symbols, valuations, factorization,
// modular arithmetic, prime sieves.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <utility>
#include <vector>

#include "ecstat/common.hpp"

namespace ecstat {

inline u64 mulmod(u64 a, u64 b, u64 m) { return (u128)a * b % m; }

inline u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

inline i64 mod_floor(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

// ---------------------------------------------------------------------------
// Kronecker symbol (D|n), extended to all D and n >= 0.
// (D|0) = 1 iff D = +-1; (D|2) = 0, 1, -1 for D = 0, +-1, +-3 mod 8.
// ---------------------------------------------------------------------------
inline int kronecker_symbol(i64 D, u64 n) {
    if (n == 0) return (D == 1 || D == -1) ? 1 : 0;
    if (D % 2 == 0 && n % 2 == 0) return 0;
    int sign = 1;
    int v = 0;
    while ((n & 1) == 0) { n >>= 1; ++v; }
    if (v & 1) {
        int m8 = (int)mod_floor(D, 8);
        if (m8 == 3 || m8 == 5) sign = -sign;  // (D|2) = -1 for D = +-3 mod 8
    }
    // Jacobi symbol for odd n; periodic in D mod n.
    u64 a = (u64)mod_floor(D, (i64)n);
    while (a != 0) {
        int t = 0;
        while ((a & 1) == 0) { a >>= 1; ++t; }
        if (t & 1) {
            if (n % 8 == 3 || n % 8 == 5) sign = -sign;
        }
        if (a % 4 == 3 && n % 4 == 3) sign = -sign;
        u64 tmp = n % a;
        n = a;
        a = tmp;
    }
    return n == 1 ? sign : 0;
}

// ---------------------------------------------------------------------------
// p-adic valuation of a nonzero integer.
// ---------------------------------------------------------------------------
inline int p_adic_valuation(i64 n, i64 ell) {
    if (n == 0) throw domain_error("p_adic_valuation: n = 0 has infinite valuation");
    if (n < 0) n = -n;
    int v = 0;
    while (n % ell == 0) { n /= ell; ++v; }
    return v;
}

inline int p_adic_valuation(Int n, const Int& ell) {
    if (n == 0) throw domain_error("p_adic_valuation: n = 0 has infinite valuation");
    if (n < 0) n = -n;
    int v = 0;
    while (n % ell == 0) { n /= ell; ++v; }
    return v;
}

// ---------------------------------------------------------------------------
// Primes
// ---------------------------------------------------------------------------
inline const std::vector<u64>& small_primes() {
    static std::vector<u64> primes = [] {
        const int N = 1 << 20;
        std::vector<bool> comp(N, false);
        std::vector<u64> ps;
        for (int i = 2; i < N; ++i) {
            if (!comp[i]) {
                ps.push_back(i);
                for (i64 j = (i64)i * i; j < N; j += i) comp[j] = true;
            }
        }
        return ps;
    }();
    return primes;
}

inline std::vector<u64> primes_up_to(u64 n) {
    std::vector<bool> comp(n + 1, false);
    std::vector<u64> ps;
    for (u64 i = 2; i <= n; ++i) {
        if (!comp[i]) {
            ps.push_back(i);
            for (u64 j = i * i; j <= n; j += i) comp[j] = true;
        }
    }
    return ps;
}

// Deterministic Miller-Rabin, valid for all n < 2^64.
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull})
        if (n % p == 0) return n == p;
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------
struct PrimePower {
    i64 ell = 2;   // prime
    int r = 1;     // exponent
    i64 value = 2; // ell^r

    PrimePower() = default;
    PrimePower(i64 ell_, int r_) : ell(ell_), r(r_) {
        if (ell < 2 || !is_prime_u64((u64)ell)) throw domain_error("PrimePower: ell must be prime");
        if (r < 0) throw domain_error("PrimePower: negative exponent");
        value = 1;
        for (int i = 0; i < r; ++i) {
            if (value > (i64)2e18 / ell) throw domain_error("PrimePower: overflow");
            value *= ell;
        }
    }
};

struct Factorization {
    u64 n = 1;
    std::vector<std::pair<u64, int>> factors;  // (prime, exponent), primes increasing
};

namespace detail {
// Brent's cycle-finding rho with fixed deterministic increments.
inline u64 pollard_rho(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        u64 x = 2, y = 2, d = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            u64 diff = x > y ? x - y : y - x;
            d = std::gcd(diff, n);
        }
        if (d != n) return d;
    }
}

inline void factor_rec(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) { out.push_back(n); return; }
    u64 d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}
}  // namespace detail

inline Factorization factorize(u64 n) {
    if (n == 0) throw domain_error("factorize: n must be positive");
    Factorization f;
    f.n = n;
    u64 m = n;
    std::vector<u64> primes;
    for (u64 p : small_primes()) {
        if (p * p > m) break;
        while (m % p == 0) { primes.push_back(p); m /= p; }
    }
    if (m > 1) {
        if (is_prime_u64(m)) primes.push_back(m);
        else detail::factor_rec(m, primes);
    }
    std::sort(primes.begin(), primes.end());
    for (u64 p : primes) {
        if (!f.factors.empty() && f.factors.back().first == p) f.factors.back().second++;
        else f.factors.push_back({p, 1});
    }
    return f;
}

inline u64 factorization_value(const Factorization& f) {
    u64 v = 1;
    for (auto [p, e] : f.factors)
        for (int i = 0; i < e; ++i) v *= p;
    return v;
}

inline std::vector<u64> divisors(const Factorization& f) {
    std::vector<u64> ds = {1};
    for (auto [p, e] : f.factors) {
        size_t base = ds.size();
        u64 pe = 1;
        for (int i = 1; i <= e; ++i) {
            pe *= p;
            for (size_t j = 0; j < base; ++j) ds.push_back(ds[j] * pe);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

inline u64 euler_phi(u64 n) {
    auto f = factorize(n);
    u64 r = n;
    for (auto [p, e] : f.factors) r = r / p * (p - 1);
    return r;
}

inline int moebius(u64 n) {
    auto f = factorize(n);
    for (auto [p, e] : f.factors)
        if (e > 1) return 0;
    return f.factors.size() % 2 == 0 ? 1 : -1;
}

inline i64 ipow(i64 b, int e) {
    i64 r = 1;
    while (e-- > 0) r *= b;
    return r;
}

inline Int int_pow(Int b, int e) {
    Int r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// floor(sqrt(n)) for n >= 0
inline i64 isqrt(i64 n) {
    if (n < 0) throw domain_error("isqrt: negative");
    i64 r = (i64)std::sqrt((double)n);
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

}  // namespace ecstat

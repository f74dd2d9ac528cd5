#pragma once

// Root counting rho_f(ell^r), quadratic character sums, and detection of
// square polynomial forms modulo ell for multivariate integer polynomials.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ecstat/arith.hpp"
#include "ecstat/common.hpp"

namespace ecstat {

// Sparse integer polynomial in d variables: exponent vector -> coefficient.
struct IntPolynomial {
    int d = 1;
    std::map<std::vector<int>, i64> terms;  // no zero coefficients stored

    static IntPolynomial zero(int d) { return IntPolynomial{d, {}}; }

    void add_term(std::vector<int> e, i64 c) {
        if ((int)e.size() != d) throw domain_error("IntPolynomial: bad exponent vector");
        auto it = terms.find(e);
        i64 v = (it == terms.end() ? 0 : it->second) + c;
        if (v == 0) {
            if (it != terms.end()) terms.erase(it);
        } else {
            terms[std::move(e)] = v;
        }
    }

    int degree() const {
        int m = 0;
        for (auto& [e, c] : terms) {
            int s = 0;
            for (int x : e) s += x;
            m = std::max(m, s);
        }
        return m;
    }

    i64 content() const {
        i64 g = 0;
        for (auto& [e, c] : terms) g = std::gcd(g, std::abs(c));
        return g;
    }

    i64 height() const {
        i64 h = 0;
        for (auto& [e, c] : terms) h = std::max(h, std::abs(c));
        return h;
    }

    bool is_zero_mod(i64 ell) const {
        for (auto& [e, c] : terms)
            if (mod_floor(c, ell) != 0) return false;
        return true;
    }

    i64 eval_mod(const std::vector<i64>& x, i64 m) const {
        i64 total = 0;
        for (auto& [e, c] : terms) {
            i64 v = mod_floor(c, m);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < e[i]; ++j) v = v * x[i] % m;
            total = (total + v) % m;
        }
        return total;
    }
};

// ---------------------------------------------------------------------------
// Plain-text parser: `d=2; 3*x1^2*x2 - 4*x2 + 1`
// ---------------------------------------------------------------------------
inline IntPolynomial parse_polynomial(const std::string& text) {
    auto semi = text.find(';');
    if (semi == std::string::npos) throw domain_error("parse_polynomial: missing 'd=...;'");
    std::string head = text.substr(0, semi);
    auto eq = head.find('=');
    if (eq == std::string::npos || head.find('d') == std::string::npos)
        throw domain_error("parse_polynomial: header must be 'd=<vars>'");
    int d = std::stoi(head.substr(eq + 1));
    if (d < 1 || d > 16) throw domain_error("parse_polynomial: d out of range");
    IntPolynomial f = IntPolynomial::zero(d);

    std::string body = text.substr(semi + 1);
    size_t i = 0;
    auto skip_ws = [&] { while (i < body.size() && std::isspace((unsigned char)body[i])) ++i; };
    skip_ws();
    bool first = true;
    while (i < body.size()) {
        int sign = 1;
        skip_ws();
        if (body[i] == '+' || body[i] == '-') {
            sign = (body[i] == '-') ? -1 : 1;
            ++i;
        } else if (!first) {
            throw domain_error("parse_polynomial: expected '+' or '-'");
        }
        first = false;
        skip_ws();
        i64 coeff = 1;
        bool saw_coeff = false;
        if (i < body.size() && std::isdigit((unsigned char)body[i])) {
            i64 v = 0;
            while (i < body.size() && std::isdigit((unsigned char)body[i]))
                v = v * 10 + (body[i++] - '0');
            coeff = v;
            saw_coeff = true;
        }
        std::vector<int> e(d, 0);
        bool saw_var = false;
        for (;;) {
            skip_ws();
            if (i < body.size() && body[i] == '*') {
                ++i;
                skip_ws();
            }
            if (i >= body.size() || body[i] != 'x') break;
            ++i;
            int idx = 0;
            while (i < body.size() && std::isdigit((unsigned char)body[i]))
                idx = idx * 10 + (body[i++] - '0');
            if (idx < 1 || idx > d) throw domain_error("parse_polynomial: bad variable index");
            int pw = 1;
            skip_ws();
            if (i < body.size() && body[i] == '^') {
                ++i;
                skip_ws();
                pw = 0;
                while (i < body.size() && std::isdigit((unsigned char)body[i]))
                    pw = pw * 10 + (body[i++] - '0');
            }
            e[idx - 1] += pw;
            saw_var = true;
        }
        if (!saw_coeff && !saw_var) throw domain_error("parse_polynomial: empty term");
        f.add_term(std::move(e), sign * coeff);
        skip_ws();
    }
    return f;
}

inline std::string polynomial_to_string(const IntPolynomial& f) {
    std::ostringstream os;
    os << "d=" << f.d << ";";
    if (f.terms.empty()) {
        os << " 0";
        return os.str();
    }
    bool first = true;
    for (auto it = f.terms.rbegin(); it != f.terms.rend(); ++it) {
        i64 c = it->second;
        os << (first ? (c < 0 ? " -" : " ") : (c < 0 ? " - " : " + "));
        first = false;
        i64 a = std::abs(c);
        bool any_var = false;
        for (int x : it->first)
            if (x) any_var = true;
        if (a != 1 || !any_var) os << a;
        bool lead = (a != 1 || !any_var);
        for (int i = 0; i < f.d; ++i) {
            if (it->first[i] == 0) continue;
            if (lead) os << "*";
            os << "x" << (i + 1);
            if (it->first[i] > 1) os << "^" << it->first[i];
            lead = true;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// rho_f(ell^r): exact root count by exhaustive enumeration (budget ell^{rd}).
// The scan collapses the last coordinate to a univariate line and walks it
// with finite differences.
// ---------------------------------------------------------------------------
inline i64 root_count(const IntPolynomial& f, i64 ell, int r, u64 budget = u64(1) << 24) {
    if (r < 1) throw domain_error("root_count: r >= 1");
    double bits = f.d * r * std::log2((double)ell);
    if (bits > std::log2((double)budget) + 1e-9)
        throw budget_error("root_count: ell^{rd} exceeds the enumeration budget");
    i64 m = ipow(ell, r);

    // coefficients of f as a polynomial in x_d
    int dd = f.d;
    int deg_last = 0;
    for (auto& [e, c] : f.terms) deg_last = std::max(deg_last, e[dd - 1]);
    std::vector<IntPolynomial> coeff(deg_last + 1, IntPolynomial::zero(std::max(1, dd - 1)));
    for (auto& [e, c] : f.terms) {
        std::vector<int> pre(e.begin(), e.end() - 1);
        if (pre.empty()) pre = {0};
        coeff[e[dd - 1]].add_term(pre, c);
    }

    i64 count = 0;
    std::vector<i64> prefix(std::max(1, dd - 1), 0);
    std::vector<i64> c_at(deg_last + 1);
    std::vector<i64> diffs(deg_last + 1);
    for (;;) {
        for (int j = 0; j <= deg_last; ++j) c_at[j] = coeff[j].eval_mod(prefix, m);
        // finite differences: evaluate the univariate at 0..deg, then walk
        std::vector<i64> vals(deg_last + 1);
        for (int x = 0; x <= deg_last; ++x) {
            i64 v = 0;
            for (int j = deg_last; j >= 0; --j) v = (v * x + c_at[j]) % m;
            vals[x] = v;
        }
        for (int lvl = 0; lvl <= deg_last; ++lvl) {
            diffs[lvl] = vals[0];
            for (int j = 0; j + 1 <= deg_last - lvl; ++j)
                vals[j] = mod_floor(vals[j + 1] - vals[j], m);
        }
        // diffs[0] = f(0), and repeated prefix-sum recovers consecutive values
        for (i64 x = 0; x < m; ++x) {
            if (diffs[0] == 0) ++count;
            for (int lvl = 0; lvl < deg_last; ++lvl) {
                diffs[lvl] += diffs[lvl + 1];
                if (diffs[lvl] >= m) diffs[lvl] -= m;
            }
        }
        if (dd == 1) break;
        int pos = 0;
        while (pos < dd - 1 && ++prefix[pos] >= m) prefix[pos++] = 0;
        if (pos == dd - 1) break;
    }
    return count;
}

// ---------------------------------------------------------------------------
// character_sum: sum over (Z/ell)^d of the Legendre symbol of f.
// ---------------------------------------------------------------------------
inline i64 character_sum(const IntPolynomial& f, i64 ell, u64 budget = u64(1) << 24) {
    if (ell == 2 || !is_prime_u64((u64)ell))
        throw domain_error("character_sum: ell must be an odd prime");
    double bits = f.d * std::log2((double)ell);
    if (bits > std::log2((double)budget) + 1e-9)
        throw budget_error("character_sum: ell^d exceeds the enumeration budget");
    std::vector<signed char> chi(ell, -1);
    chi[0] = 0;
    for (i64 x = 1; x < ell; ++x) chi[x * x % ell] = 1;

    int dd = f.d;
    int deg_last = 0;
    for (auto& [e, c] : f.terms) deg_last = std::max(deg_last, e[dd - 1]);
    std::vector<IntPolynomial> coeff(deg_last + 1, IntPolynomial::zero(std::max(1, dd - 1)));
    for (auto& [e, c] : f.terms) {
        std::vector<int> pre(e.begin(), e.end() - 1);
        if (pre.empty()) pre = {0};
        coeff[e[dd - 1]].add_term(pre, c);
    }

    i64 total = 0;
    std::vector<i64> prefix(std::max(1, dd - 1), 0);
    for (;;) {
        std::vector<i64> c_at(deg_last + 1);
        for (int j = 0; j <= deg_last; ++j) c_at[j] = coeff[j].eval_mod(prefix, ell);
        for (i64 x = 0; x < ell; ++x) {
            i64 v = 0;
            for (int j = deg_last; j >= 0; --j) v = (v * x + c_at[j]) % ell;
            total += chi[v];
        }
        if (dd == 1) break;
        int pos = 0;
        while (pos < dd - 1 && ++prefix[pos] >= ell) prefix[pos++] = 0;
        if (pos == dd - 1) break;
    }
    return total;
}

// ---------------------------------------------------------------------------
// square_form_test: decide whether f = c * g^2 over F_ell, returning a
// verified witness.
// ---------------------------------------------------------------------------
struct SquareFormWitness {
    i64 c;             // unit mod ell
    IntPolynomial g;   // over F_ell (coefficients reduced)
};

namespace detail {

inline IntPolynomial poly_mod(const IntPolynomial& f, i64 ell) {
    IntPolynomial g = IntPolynomial::zero(f.d);
    for (auto& [e, c] : f.terms) {
        i64 v = mod_floor(c, ell);
        if (v) g.add_term(e, v);
    }
    return g;
}

inline IntPolynomial poly_mul_mod(const IntPolynomial& a, const IntPolynomial& b, i64 ell) {
    IntPolynomial out = IntPolynomial::zero(a.d);
    for (auto& [ea, ca] : a.terms)
        for (auto& [eb, cb] : b.terms) {
            std::vector<int> e(a.d);
            for (int i = 0; i < a.d; ++i) e[i] = ea[i] + eb[i];
            out.add_term(std::move(e), ca * cb % ell);
        }
    return poly_mod(out, ell);
}

// substitute x_i -> x_i + n_i
inline IntPolynomial poly_shift_mod(const IntPolynomial& f, const std::vector<i64>& n, i64 ell) {
    IntPolynomial out = IntPolynomial::zero(f.d);
    for (auto& [e, c] : f.terms) {
        // expand prod_i (x_i + n_i)^{e_i}
        std::vector<std::pair<std::vector<int>, i64>> acc = {{std::vector<int>(f.d, 0),
                                                              mod_floor(c, ell)}};
        for (int i = 0; i < f.d; ++i) {
            if (e[i] == 0) continue;
            // binomial row for (x + n_i)^{e_i}, built by Pascal's triangle so
            // rows reduce correctly when ell divides an index
            std::vector<i64> binom(e[i] + 1, 0);
            binom[0] = 1;
            for (int row = 1; row <= e[i]; ++row)
                for (int k = row; k >= 1; --k) binom[k] = (binom[k] + binom[k - 1]) % ell;
            std::vector<i64> npow(e[i] + 1);
            npow[0] = 1;
            for (int k = 1; k <= e[i]; ++k) npow[k] = npow[k - 1] * mod_floor(n[i], ell) % ell;
            std::vector<std::pair<std::vector<int>, i64>> next;
            for (auto& [ee, cc] : acc)
                for (int k = 0; k <= e[i]; ++k) {
                    auto e2 = ee;
                    e2[i] += e[i] - k;
                    next.push_back({std::move(e2), cc * binom[k] % ell * npow[k] % ell});
                }
            acc = std::move(next);
        }
        for (auto& [ee, cc] : acc)
            if (cc % ell) out.add_term(ee, mod_floor(cc, ell));
    }
    return poly_mod(out, ell);
}

}  // namespace detail

inline std::optional<SquareFormWitness> square_form_test(const IntPolynomial& f, i64 ell,
                                                         bool* found_shift = nullptr) {
    if (ell == 2 || !is_prime_u64((u64)ell))
        throw domain_error("square_form_test: ell must be an odd prime");
    if (f.is_zero_mod(ell)) throw domain_error("square_form_test: f is zero mod ell");
    IntPolynomial fmod = detail::poly_mod(f, ell);
    int m = fmod.degree();
    if (m % 2 != 0) return std::nullopt;  // deg(c g^2) is even over a field
    int M = m / 2;

    // normalization shift: f(n) != 0 with n in [0, m]^d (always exists)
    std::vector<i64> shift(f.d, 0);
    bool found = false;
    std::vector<int> idx(f.d, 0);
    for (;;) {
        std::vector<i64> n(idx.begin(), idx.end());
        if (fmod.eval_mod(n, ell) != 0) {
            shift = n;
            found = true;
            break;
        }
        int pos = 0;
        while (pos < f.d && ++idx[pos] > std::max(1, m)) idx[pos++] = 0;
        if (pos == f.d) break;
    }
    if (found_shift) *found_shift = found;
    if (!found) return std::nullopt;  // cannot normalize (degenerate over F_ell)

    IntPolynomial ftil = detail::poly_shift_mod(fmod, shift, ell);
    i64 c = ftil.eval_mod(std::vector<i64>(f.d, 0), ell);
    i64 cinv = (i64)powmod((u64)c, (u64)(ell - 2), (u64)ell);
    for (auto& [e, v] : ftil.terms) ftil.terms[e] = v * cinv % ell;

    // solve g with g(0) = 1 by the graded coefficient recursion
    IntPolynomial g = IntPolynomial::zero(f.d);
    g.add_term(std::vector<int>(f.d, 0), 1);
    i64 inv2 = (i64)powmod(2, (u64)(ell - 2), (u64)ell);
    // enumerate exponent vectors of total degree 1..M in graded order
    std::vector<std::vector<int>> monos;
    {
        std::vector<int> e(f.d, 0);
        for (;;) {
            int s = 0;
            for (int x : e) s += x;
            if (s >= 1 && s <= M) monos.push_back(e);
            int pos = 0;
            while (pos < f.d && ++e[pos] > M) e[pos++] = 0;
            if (pos == f.d) break;
        }
        std::sort(monos.begin(), monos.end(), [](const auto& a, const auto& b) {
            int sa = 0, sb = 0;
            for (int x : a) sa += x;
            for (int x : b) sb += x;
            return sa != sb ? sa < sb : a < b;
        });
    }
    for (const auto& k : monos) {
        // 2 a_k = ftil_k - sum_{i + j = k, i, j != 0} a_i a_j
        i64 rhs = 0;
        auto it = ftil.terms.find(k);
        if (it != ftil.terms.end()) rhs = it->second;
        for (auto& [ei, ai] : g.terms) {
            bool zero_i = true, fits = true;
            std::vector<int> ej(f.d);
            for (int x = 0; x < f.d; ++x) {
                if (ei[x] > 0) zero_i = false;
                ej[x] = k[x] - ei[x];
                if (ej[x] < 0) fits = false;
            }
            if (zero_i || !fits) continue;
            bool zero_j = true;
            for (int x : ej)
                if (x > 0) zero_j = false;
            if (zero_j) continue;
            auto jt = g.terms.find(ej);
            if (jt != g.terms.end()) rhs = mod_floor(rhs - ai * jt->second, ell);
        }
        i64 ak = rhs % ell * inv2 % ell;
        if (ak) g.add_term(k, ak);
    }
    // verify c * g(x - n)^2 = f mod ell by re-expansion
    std::vector<i64> unshift(f.d);
    for (int i = 0; i < f.d; ++i) unshift[i] = mod_floor(-shift[i], ell);
    IntPolynomial gback = detail::poly_shift_mod(g, unshift, ell);
    IntPolynomial sq = detail::poly_mul_mod(gback, gback, ell);
    for (auto& [e, v] : sq.terms) sq.terms[e] = v * c % ell;
    IntPolynomial check = detail::poly_mod(sq, ell);
    if (!(check.terms == fmod.terms)) return std::nullopt;
    return SquareFormWitness{c, gback};
}

// ---------------------------------------------------------------------------
// Seeded corpus of random polynomials (deterministic across runs).
// ---------------------------------------------------------------------------
inline std::vector<IntPolynomial> polynomial_corpus(int d, int count, int max_degree,
                                                    u64 seed = 0) {
    std::mt19937_64 rng(0xec57a7 + seed * 1000003ull + (u64)d * 131 + (u64)max_degree);
    std::vector<IntPolynomial> out;
    out.reserve(count);
    while ((int)out.size() < count) {
        IntPolynomial f = IntPolynomial::zero(d);
        int deg = 1 + (int)(rng() % (u64)max_degree);
        // ensure the top total degree is realized
        std::vector<int> top(d, 0);
        int rem = deg;
        for (int i = 0; i + 1 < d; ++i) {
            int e = (int)(rng() % (u64)(rem + 1));
            top[i] = e;
            rem -= e;
        }
        top[d - 1] = rem;
        i64 c = (i64)(rng() % 41) - 20;
        if (c == 0) c = 7;
        f.add_term(top, c);
        int extra = 2 + (int)(rng() % 6);
        for (int t = 0; t < extra; ++t) {
            std::vector<int> e(d, 0);
            int dg = (int)(rng() % (u64)(deg + 1));
            int r2 = dg;
            for (int i = 0; i + 1 < d; ++i) {
                int ee = (int)(rng() % (u64)(r2 + 1));
                e[i] = ee;
                r2 -= ee;
            }
            e[d - 1] = r2;
            i64 cc = (i64)(rng() % 41) - 20;
            if (cc) f.add_term(e, cc);
        }
        if (!f.terms.empty()) out.push_back(std::move(f));
    }
    return out;
}

}  // namespace ecstat

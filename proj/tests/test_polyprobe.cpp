#include <cmath>

#include "doctest.h"
#include "ecstat/polyprobe.hpp"

using namespace ecstat;

static IntPolynomial P(const std::string& s) { return parse_polynomial(s); }

// literal evaluation-based root count, the oracle for the scan
static i64 naive_root_count(const IntPolynomial& f, i64 ell, int r) {
    i64 m = ipow(ell, r);
    i64 cnt = 0;
    std::vector<i64> x(f.d, 0);
    for (;;) {
        if (f.eval_mod(x, m) == 0) ++cnt;
        int pos = 0;
        while (pos < f.d && ++x[pos] >= m) x[pos++] = 0;
        if (pos == f.d) break;
    }
    return cnt;
}

TEST_CASE("polynomial parsing round-trips") {
    auto f = P("d=2; 3*x1^2*x2 - 4*x2 + 1");
    CHECK(f.d == 2);
    CHECK(f.degree() == 3);
    CHECK(f.height() == 4);
    CHECK(f.content() == 1);
    CHECK(f.terms.at({2, 1}) == 3);
    CHECK(f.terms.at({0, 1}) == -4);
    CHECK(f.terms.at({0, 0}) == 1);
    auto g = parse_polynomial(polynomial_to_string(f));
    CHECK(g.terms == f.terms);
    CHECK_THROWS_AS(P("3*x1"), domain_error);
    CHECK_THROWS_AS(P("d=1; 3*x2"), domain_error);
}

TEST_CASE("root_count: fixed values") {
    CHECK(root_count(P("d=1; x1"), 5, 1) == 1);
    CHECK(root_count(P("d=1; x1"), 7, 3) == 1);
    CHECK(root_count(P("d=1; x1^2 - 1"), 2, 3) == 4);
    CHECK(root_count(P("d=1; x1^2 - 1"), 3, 1) == 2);
    CHECK_THROWS_AS(root_count(P("d=1; x1"), 2, 60), budget_error);
}

TEST_CASE("root_count equals naive enumeration on a corpus") {
    for (int d : {1, 2, 3}) {
        auto corpus = polynomial_corpus(d, 25, d == 1 ? 6 : 3, /*seed=*/42);
        for (const auto& f : corpus) {
            for (i64 ell : {2, 3, 5}) {
                for (int r = 1; r <= (d == 1 ? 3 : (d == 2 ? 2 : 1)); ++r) {
                    if (d == 2 && r == 2 && ell == 5) continue;  // keep the oracle quick
                    CHECK(root_count(f, ell, r) == naive_root_count(f, ell, r));
                }
            }
        }
    }
}

TEST_CASE("character_sum: fixed values") {
    CHECK(character_sum(P("d=1; x1"), 5) == 0);
    CHECK(character_sum(P("d=1; x1^2"), 5) == 4);
    CHECK(character_sum(P("d=1; x1^2 + 1"), 3) == -1);
}

TEST_CASE("character_sum equals naive sum on a corpus") {
    auto corpus1 = polynomial_corpus(1, 30, 6, 7);
    auto corpus2 = polynomial_corpus(2, 10, 3, 7);
    for (i64 ell : {3, 5, 7, 11}) {
        for (const auto& f : corpus1) {
            i64 s = 0;
            for (i64 x = 0; x < ell; ++x)
                s += kronecker_symbol(f.eval_mod({x}, ell), (u64)ell);
            CHECK(character_sum(f, ell) == s);
        }
        for (const auto& f : corpus2) {
            i64 s = 0;
            for (i64 x = 0; x < ell; ++x)
                for (i64 y = 0; y < ell; ++y)
                    s += kronecker_symbol(f.eval_mod({x, y}, ell), (u64)ell);
            CHECK(character_sum(f, ell) == s);
        }
    }
}

TEST_CASE("square_form_test: fixed values") {
    auto w1 = square_form_test(P("d=1; x1^2"), 5);
    REQUIRE(w1.has_value());
    CHECK(w1->c == 1);
    CHECK(w1->g.terms == P("d=1; x1").terms);

    auto w2 = square_form_test(P("d=1; 2*x1^2 + 4*x1 + 2"), 5);
    REQUIRE(w2.has_value());
    CHECK(w2->c == 2);
    CHECK(w2->g.terms == P("d=1; x1 + 1").terms);

    CHECK(!square_form_test(P("d=1; x1^2 + 1"), 3).has_value());
}

TEST_CASE("square_form_test: soundness and completeness vs exhaustive search") {
    for (i64 ell : {3, 5, 7, 13}) {
        auto corpus = polynomial_corpus(1, 40, 4, 11);
        std::vector<IntPolynomial> extra = {P("d=1; x1^2 + 2*x1 + 1"), P("d=1; 4*x1^2"),
                                            P("d=1; 9"), P("d=1; x1^4 + 2*x1^2 + 1")};
        for (auto& f : extra) corpus.push_back(f);
        for (const auto& f : corpus) {
            if (f.is_zero_mod(ell)) continue;
            auto w = square_form_test(f, ell);
            bool exhaustive = false;
            int m = detail::poly_mod(f, ell).degree();
            if (m % 2 == 0) {
                int M = m / 2;
                std::vector<i64> co(M + 1, 0);
                for (;;) {
                    IntPolynomial g = IntPolynomial::zero(1);
                    for (int j = 0; j <= M; ++j)
                        if (co[j]) g.add_term({j}, co[j]);
                    if (!g.terms.empty()) {
                        auto g2 = detail::poly_mul_mod(g, g, ell);
                        for (i64 c = 1; c < ell && !exhaustive; ++c) {
                            IntPolynomial cg2 = IntPolynomial::zero(1);
                            for (auto& [e, v] : g2.terms) cg2.add_term(e, v * c % ell);
                            if (detail::poly_mod(cg2, ell).terms ==
                                detail::poly_mod(f, ell).terms)
                                exhaustive = true;
                        }
                    }
                    int pos = 0;
                    while (pos <= M && ++co[pos] >= ell) co[pos++] = 0;
                    if (pos > M) break;
                }
            }
            CHECK(w.has_value() == exhaustive);
            if (w.has_value()) {
                auto sq = detail::poly_mul_mod(w->g, w->g, ell);
                IntPolynomial cg2 = IntPolynomial::zero(1);
                for (auto& [e, v] : sq.terms) cg2.add_term(e, v * w->c % ell);
                CHECK(detail::poly_mod(cg2, ell).terms == detail::poly_mod(f, ell).terms);
                CHECK(mod_floor(w->c, ell) != 0);
            }
        }
    }
}

TEST_CASE("Weil bound on the corpus (d = 1 specialization)") {
    auto corpus = polynomial_corpus(1, 500, 6, 0);
    for (u64 ellu : primes_up_to(199)) {
        if (ellu == 2) continue;
        i64 ell = (i64)ellu;
        for (const auto& f : corpus) {
            if (f.is_zero_mod(ell)) continue;
            if (square_form_test(f, ell).has_value()) continue;
            i64 S = character_sum(f, ell);
            i64 m = f.degree();
            CHECK(S * S <= (m - 1) * (m - 1) * ell);  // |S| <= (m-1) sqrt(ell), exactly
        }
    }
}

TEST_CASE("rho bound (a): rho_f(ell) <= d m ell^{d-1}") {
    for (int d : {1, 2, 3}) {
        auto corpus = polynomial_corpus(d, d == 1 ? 60 : 25, d == 1 ? 6 : 3, 1);
        for (u64 ellu : primes_up_to(31)) {
            i64 ell = (i64)ellu;
            for (const auto& f : corpus) {
                if (f.is_zero_mod(ell)) continue;
                i64 rho = root_count(f, ell, 1);
                CHECK(rho <= (i64)d * f.degree() * ipow(ell, d - 1));
            }
        }
    }
}

TEST_CASE("rho bound (b): valuation-weighted bound at prime powers") {
    for (int d : {1, 2}) {
        auto corpus = polynomial_corpus(d, d == 1 ? 40 : 15, d == 1 ? 6 : 3, 2);
        for (i64 ell : {2, 3, 5, 7, 11, 13}) {
            for (int r = 1; r <= 6; ++r) {
                if (d * r * std::log2((double)ell) > 20) break;  // test-budget cap
                for (const auto& f : corpus) {
                    i64 rho = root_count(f, ell, r);
                    i64 m = f.degree();
                    i64 cont = f.content();
                    int v = std::min(r, mod_floor(cont, ell) == 0 ? p_adic_valuation(cont, ell)
                                                                  : 0);
                    double bound = std::pow((double)m, d) * std::pow(r + 1.0, d - 1) *
                                   std::pow((double)ell, (double)v / m + r * (d - 1.0 / m));
                    CHECK((double)rho <= bound * (1 + 1e-12));
                }
            }
        }
    }
}

#include <cmath>
#include <functional>
#include <numbers>

#include "doctest.h"
#include "ecstat/constants.hpp"
#include "support/parks.hpp"

using namespace ecstat;

// Brute-force local factor at level r via constrained matrix counts.
static Rat brute_factor_r(const ConstantKind& kind, i64 ell, int r) {
    using Tag = ConstantKind::Tag;
    i64 q = ipow(ell, r);
    auto count = [&](std::function<bool(i64, i64)> pred) {
        MatrixConstraint c;
        c.invertible_only = true;
        c.custom_predicate = pred;
        return count_constrained(c, PrimePower(ell, r)).count;
    };
    switch (kind.tag) {
        case Tag::LT: {
            i64 t = mod_floor(kind.t, q);
            Int n = count([&](i64 tr, i64) { return tr == t; });
            return Rat(Int(q) * n, gl2_order(ell, r));
        }
        case Tag::TWIN: {
            Int n = count([&](i64 tr, i64 u) { return mod_floor(u + 1 - tr, ell) != 0; });
            return Rat(Int(ell) * n, Int(ell - 1) * gl2_order(ell, r));
        }
        case Tag::GM: {
            i64 p = mod_floor(kind.p, q);
            Int num = count([&](i64 tr, i64 u) { return u == p && mod_floor(u + 1 - tr, ell) != 0; });
            Int den = count([&](i64, i64 u) { return u == p; });
            return Rat(Int(ell) * num, Int(ell - 1) * den);
        }
        case Tag::MEN: {
            i64 N = mod_floor(kind.N, q);
            Int n = count([&](i64 tr, i64 u) { return tr == mod_floor(u + 1 - N, q); });
            return Rat(Int(q) * n, gl2_order(ell, r));
        }
        default: throw domain_error("brute_factor_r: unsupported kind");
    }
}

TEST_CASE("LT local factor: fixed value and r-independence") {
    CHECK(local_factor(lt_kind(0), 2) == Rat(4, 3));
    for (i64 t : {0, 1, 2, 3}) {
        for (i64 ell : {2, 3, 5}) {
            Rat f = local_factor(lt_kind(t), ell);
            CHECK(f == brute_factor_r(lt_kind(t), ell, 1));
            if (ipow(ell, 8) <= (i64)matcount_budget().brute_ops)
                CHECK(f == brute_factor_r(lt_kind(t), ell, 2));
        }
    }
}

TEST_CASE("TWIN local factor: fixed value and brute force") {
    CHECK(local_factor(twin_kind(), 2) == Rat(2, 3));
    for (i64 ell : {2, 3, 5, 7})
        CHECK(local_factor(twin_kind(), ell) == brute_factor_r(twin_kind(), ell, 1));
}

TEST_CASE("GM local factor against brute force") {
    for (i64 p : {5, 7, 11}) {
        for (i64 ell : {2, 3, 5, 7}) {
            if (ell == p) continue;
            CHECK(local_factor(gm_kind(p), ell) == brute_factor_r(gm_kind(p), ell, 1));
        }
    }
}

TEST_CASE("CYCLIC local factor and closed form") {
    CHECK(local_factor(cyclic_kind(7), 2) == Rat(5, 6));
    CHECK(local_factor(cyclic_kind(7), 5) == 1);  // 5 does not divide 6
    Rat c7 = constant(cyclic_kind(7), 2).exact_prefix;
    CHECK(c7 == Rat(115, 144));
    CHECK(cyclic_constant_closed_form(7) == Rat(115, 144));
}

TEST_CASE("cyclicity two-route identity for the first 50 primes") {
    int count = 0;
    for (u64 p = 2; count < 50; ++p) {
        if (!is_prime_u64(p)) continue;
        ++count;
        Rat product_route = 1;
        for (auto [ell, e] : factorize(p - 1).factors)
            product_route *= cyclic_factor_via_counts((i64)p, (i64)ell);
        CHECK(product_route == cyclic_constant_closed_form((i64)p));
    }
}

TEST_CASE("MEN local factors: branch engine equals direct certification") {
    for (i64 N : {2, 3, 4, 5, 6, 8, 9, 10, 12, 16, 20, 25, 36, 100, 101}) {
        for (i64 ell : {3, 5, 7, 11, 13}) {
            Rat engine = local_factor(men_kind(N), ell);
            Rat direct = detail::phi_limit_cert(N, ell) / detail::gl2_norm(ell);
            CHECK(engine == direct);
        }
        for (i64 ell : {3, 5}) {
            if (mod_floor(N, ell) == 0 || mod_floor(N - 4, ell) == 0) continue;
            Rat f = local_factor(men_kind(N), ell);
            CHECK(f == brute_factor_r(men_kind(N), ell, 1));
        }
    }
}

TEST_CASE("MEG local factors agree with leveled brute counts") {
    auto check_direct = [&](i64 m, i64 k, i64 ell) {
        ConstantKind kind = meg_kind(m, k);
        Rat f = local_factor(kind, ell);
        int a = mod_floor(m, ell) == 0 ? p_adic_valuation(m, ell) : 0;
        for (int r = std::max(1, 2 * a + 1); r <= std::max(1, 2 * a + 1) + 1; ++r) {
            if (ipow(ell, 4 * (r - a)) > (i64)matcount_budget().brute_ops) break;
            i64 q = ipow(ell, r);
            Int total = 0;
            for (i64 u = 1; u < q; ++u) {
                if (u % ell == 0) continue;
                i64 t = mod_floor(u + 1 - kind.N, q);
                i64 n = ipow(ell, a);
                total += count_fixed_trace_det(t, u, n, PrimePower(ell, r),
                                               CountMethod::bruteforce)
                             .count;
                total -= count_fixed_trace_det(t, u, n * ell, PrimePower(ell, r),
                                               CountMethod::bruteforce)
                             .count;
            }
            Rat direct = Rat(Int(q) * total, gl2_order(ell, r));
            CHECK(f == direct);
        }
    };
    check_direct(2, 2, 2);   // ell | m
    check_direct(2, 3, 2);
    check_direct(1, 4, 2);   // ell^2 | N only
    check_direct(3, 3, 3);
    check_direct(1, 9, 3);
    check_direct(2, 2, 3);   // generic odd prime over a 2-power shape
    check_direct(6, 2, 3);
}

TEST_CASE("generic factor decay: |f_ell - 1| <= 8 ell^{-3/2} off the bad set") {
    std::vector<ConstantKind> kinds = {lt_kind(0), lt_kind(1),  lt_kind(5), twin_kind(),
                                       gm_kind(7), gm_kind(13), men_kind(10), men_kind(100),
                                       meg_kind(2, 3), cyclic_kind(11)};
    for (const auto& kind : kinds) {
        auto B = bad_primes(kind);
        for (u64 ell : primes_up_to(1000)) {
            if (B.count((i64)ell)) continue;
            if (kind.tag == ConstantKind::Tag::GM && (i64)ell == kind.p) continue;
            double dev = std::abs(rat_to_double(local_factor(kind, (i64)ell)) - 1.0);
            CHECK(dev <= 8.0 * std::pow((double)ell, -1.5));
        }
    }
}

// chain-count oracle: enumerate GL_2 class pairs (det, det+1-tr) directly
static Rat aliquot_level_oracle(i64 ell, int d, int r) {
    i64 q = ipow(ell, r);
    // htable[u][v] = #{sigma in GL_2 : det = u, det + 1 - tr = v}
    std::vector<std::vector<Int>> htable(q, std::vector<Int>(q, 0));
    for (i64 u = 1; u < q; ++u) {
        if (u % ell == 0) continue;
        for (i64 t = 0; t < q; ++t) {
            i64 v = mod_floor(u + 1 - t, q);
            htable[u][v] +=
                count_fixed_trace_det(t, u, 1, PrimePower(ell, r), CountMethod::bruteforce).count;
        }
    }
    Int chain = 0;
    std::vector<i64> idx(d, 0);
    for (;;) {
        bool units = true;
        for (int i = 0; i < d; ++i)
            if (idx[i] % ell == 0) units = false;
        if (units) {
            Int prod = 1;
            for (int i = 0; i < d; ++i) prod *= htable[idx[i]][idx[(i + 1) % d]];
            chain += prod;
        }
        int pos = 0;
        while (pos < d && ++idx[pos] >= q) idx[pos++] = 0;
        if (pos == d) break;
    }
    Int gl2d = 1;
    for (int i = 0; i < d; ++i) gl2d *= gl2_order(ell, r);
    return Rat(int_pow(Int(q), d) * chain, gl2d);
}

TEST_CASE("aliquot levels equal the direct GL_2 chain counts") {
    CHECK(aliquot_level(2, 2, 1) == aliquot_level_oracle(2, 2, 1));
    CHECK(aliquot_level(2, 2, 2) == aliquot_level_oracle(2, 2, 2));
    CHECK(aliquot_level(3, 2, 1) == aliquot_level_oracle(3, 2, 1));
    CHECK(aliquot_level(2, 3, 1) == aliquot_level_oracle(2, 3, 1));
    CHECK(aliquot_level(2, 3, 2) == aliquot_level_oracle(2, 3, 2));
    CHECK(aliquot_level(3, 3, 1) == aliquot_level_oracle(3, 3, 1));
    CHECK(aliquot_level(5, 2, 1) == aliquot_level_oracle(5, 2, 1));
}

TEST_CASE("aliquot levels: exact values and edge conventions") {
    auto seq0 = aliquot_local_sequence(2, 2, 0);
    CHECK(seq0.levels.empty());  // T_0 = 1 convention
    CHECK(seq0.limit == 1.0);
    for (i64 ell : {3, 5, 7, 11, 13})
        CHECK(aliquot_level_closed_d2(ell) == aliquot_level(ell, 2, 1));
    CHECK_THROWS_AS(aliquot_level(2, 2, 40), budget_error);
}

TEST_CASE("aliquot limits: Parks closed form at ell = 2, 3") {
    auto s2 = aliquot_local_sequence(2, 2, aliquot_max_level(2, 2));
    CHECK(std::abs(s2.limit - 4.0 / 9.0) < 1e-3);
    auto s3 = aliquot_local_sequence(3, 2, aliquot_max_level(3, 2));
    CHECK(std::abs(s3.limit - 765.0 / 1024.0) < 1e-3);
    for (i64 ell : {2, 3, 5, 7, 11}) {
        auto s = aliquot_local_sequence(ell, 2, aliquot_max_level(ell, 2));
        CHECK(std::abs(s.limit - rat_to_double(parks_aliquot_limit(ell))) < 2e-3);
    }
}

TEST_CASE("aliquot Cauchy behavior: |T_{r+1} - T_r| non-increasing past r = 2") {
    for (i64 ell : {2, 3}) {
        auto s = aliquot_local_sequence(ell, 2, aliquot_max_level(ell, 2));
        double prev = -1;
        for (size_t i = 2; i < s.levels.size(); ++i) {
            double diff = std::abs(rat_to_double(s.levels[i] - s.levels[i - 1]));
            if (prev >= 0) CHECK(diff <= prev + 1e-15);
            prev = diff;
        }
    }
}

TEST_CASE("simplex integrals: fixed values") {
    CHECK(simplex_integral(2, 0).value == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(simplex_integral(2, 1).value == doctest::Approx(std::numbers::pi).epsilon(1e-8));
    CHECK(simplex_integral(2, 2).value == doctest::Approx(8.0 / 3.0).epsilon(1e-8));
    CHECK(aliquot_archimedean_factor(2) ==
          doctest::Approx(16.0 / (3.0 * std::numbers::pi * std::numbers::pi)).epsilon(1e-8));
    // d = 3: the region {|x|,|y|,|x+y| <= 1} has area 3, so I_{3,0} = 4 * 3
    CHECK(simplex_integral(3, 0).value == doctest::Approx(12.0).epsilon(1e-6));
}

TEST_CASE("simplex integral symmetry in the weighted coordinates") {
    for (int d : {2, 3}) {
        for (int m = 1; m < d; ++m) {
            std::vector<bool> first(d, false), last(d, false);
            for (int i = 0; i < m; ++i) first[i] = true;
            for (int i = 0; i < m; ++i) last[d - 1 - i] = true;
            double a = simplex_integral_weights(d, first).value;
            double b = simplex_integral_weights(d, last).value;
            CHECK(a == doctest::Approx(b).epsilon(1e-6));
        }
    }
    auto a = simplex_integral_weights(4, {true, false, false, false});
    auto b = simplex_integral_weights(4, {false, false, false, true});
    CHECK(std::abs(a.value - b.value) <= 4 * (a.std_error + b.std_error) + 1e-9);
}

TEST_CASE("truncated products: structure and partials") {
    auto lt = constant(lt_kind(0), 1);
    CHECK(lt.value == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));
    auto tw = constant(twin_kind(), 2);
    CHECK(tw.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(tw.exact_prefix == Rat(2, 3));

    auto lt4 = constant(lt_kind(0), 10000);
    CHECK(lt4.partials.size() >= 3);  // checkpoints at 100, 1000, 10000
    CHECK(lt4.partials.back().second == doctest::Approx(lt4.value));
    CHECK(lt4.tail_estimate > 0);
    CHECK(lt4.tail_estimate < 0.05);
    double first = lt4.partials.front().second;
    double mid = lt4.partials[1].second;
    CHECK(std::abs(mid - lt4.value) <= std::abs(first - lt4.value) + 1e-6);
}

TEST_CASE("aliquot truncated product uses the archimedean prefactor") {
    auto c = constant(aliquot_kind(2), 100);
    double arch = aliquot_archimedean_factor(2);
    CHECK(c.value < arch);
    CHECK(c.value > 0.2 * arch);
}

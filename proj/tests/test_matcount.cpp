#include "doctest.h"
#include "ecstat/matcount.hpp"

using namespace ecstat;

TEST_CASE("gl2_order fixed values") {
    CHECK(gl2_order(2, 1) == 6);
    CHECK(gl2_order(3, 1) == 48);
    CHECK(gl2_order(2, 2) == 96);
    CHECK(gl2_order(5, 1) == 480);
    CHECK(gl2_order(2, 3) == 1536);
    CHECK_THROWS_AS(gl2_order(2, 0), domain_error);
}

TEST_CASE("count_fixed_trace_det: fixed values") {
    auto r1 = count_fixed_trace_det(0, 1, 1, PrimePower(2, 1), CountMethod::bruteforce);
    CHECK(r1.count == 4);
    auto r2 = count_fixed_trace_det(0, 1, 1, PrimePower(3, 1));
    CHECK(r2.count == 6);
    CHECK(count_fixed_trace_det(0, 1, 1, PrimePower(3, 1), CountMethod::bruteforce).count == 6);
    auto r3 = count_fixed_trace_det(1, 1, 1, PrimePower(2, 2));
    CHECK(r3.count == 8);
    CHECK(count_fixed_trace_det(1, 1, 1, PrimePower(2, 2), CountMethod::bruteforce).count == 8);
}

TEST_CASE("oracle agreement: closed equals brute force at every (t, u)") {
    for (auto [ell, r] : std::vector<std::pair<i64, int>>{
             {2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}, {2, 4}, {5, 2}, {3, 3}, {7, 2}}) {
        i64 q = ipow(ell, r);
        for (i64 t = 0; t < q; ++t)
            for (i64 u = 0; u < q; ++u) {
                auto closed = count_fixed_trace_det(t, u, 1, PrimePower(ell, r));
                auto brute = count_fixed_trace_det(t, u, 1, PrimePower(ell, r),
                                                   CountMethod::bruteforce);
                CHECK(closed.count == brute.count);
            }
    }
}

TEST_CASE("total mass: sum over traces at unit determinant") {
    for (auto [ell, r] : std::vector<std::pair<i64, int>>{
             {2, 1}, {3, 1}, {2, 2}, {5, 1}, {2, 3}, {3, 2}, {2, 4}, {5, 2}, {3, 3}}) {
        i64 q = ipow(ell, r);
        Int expected = gl2_order(ell, r) / Int(euler_phi((u64)q));
        for (i64 u = 1; u < std::min<i64>(q, 8); ++u) {
            if (u % ell == 0) continue;
            Int sum = 0;
            for (i64 t = 0; t < q; ++t)
                sum += count_fixed_trace_det(t, u, 1, PrimePower(ell, r)).count;
            CHECK(sum == expected);
        }
    }
}

TEST_CASE("grand total over all (t, u) is ell^{4r}") {
    for (auto [ell, r] : std::vector<std::pair<i64, int>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}, {3, 2}}) {
        i64 q = ipow(ell, r);
        Int sum = 0;
        for (i64 t = 0; t < q; ++t)
            for (i64 u = 0; u < q; ++u)
                sum += count_fixed_trace_det(t, u, 1, PrimePower(ell, r)).count;
        CHECK(sum == int_pow(Int(ell), 4 * r));
    }
}

TEST_CASE("counts with torsion congruence agree with brute force") {
    // n > 1: sigma = I mod ell^{nu_ell(n)}; compatible triples only in closed
    // mode (stabilized regime), every triple in brute mode.
    for (i64 ell : {2, 3}) {
        for (int r = 1; r <= 3; ++r) {
            i64 q = ipow(ell, r);
            for (i64 n : {ell, ell * ell}) {
                for (i64 t = 0; t < q; ++t)
                    for (i64 u = 0; u < q; ++u) {
                        auto brute =
                            count_fixed_trace_det(t, u, n, PrimePower(ell, r), CountMethod::bruteforce);
                        i64 D = t * t - 4 * u;
                        int nu = (D == 0) ? 99 : p_adic_valuation(D, ell);
                        if (r > nu) {
                            auto closed = count_fixed_trace_det(t, u, n, PrimePower(ell, r));
                            CHECK(closed.count == brute.count);
                        } else if (n > 1) {
                            CHECK_THROWS_AS(count_fixed_trace_det(t, u, n, PrimePower(ell, r)),
                                            unstabilized_error);
                        }
                    }
            }
        }
    }
}

TEST_CASE("exact closed counts for n > 1 below 2a") {
    // the internal closed_count is exact in every regime; spot-check r < 2a
    for (i64 ell : {2, 3}) {
        for (i64 t = 0; t < ell * ell; ++t)
            for (i64 u = 0; u < ell * ell; ++u) {
                i64 q = ell * ell;
                Int direct = 0;
                // r = 2, a = 2 (n = ell^2): sigma = I mod ell^2 means sigma = I
                if (mod_floor(t - 2, q) == 0 && mod_floor(u - 1, q) == 0) direct = 1;
                CHECK(detail::closed_count(t, u, 2, ell, 2) == direct);
            }
    }
}

TEST_CASE("part (d): two-sided bound |count * ell^nu / ell^{2r} - 1| <= 8/ell") {
    for (i64 ell : {2, 3, 5}) {
        for (int r = 1; r <= (ell == 2 ? 5 : (ell == 3 ? 3 : 2)); ++r) {
            i64 q = ipow(ell, r);
            for (int a = 0; a <= std::min(r, 2); ++a) {
                i64 n = ipow(ell, a);
                for (i64 t = 0; t < q; ++t)
                    for (i64 u = 0; u < q; ++u) {
                        // standing compatibility assumptions of the theorem
                        if (mod_floor(u - 1, n) != 0) continue;
                        if (mod_floor(u + 1 - t, n * n) != 0) continue;
                        auto c = count_fixed_trace_det(t, u, n, PrimePower(ell, r),
                                                       CountMethod::bruteforce);
                        Rat ratio = Rat(c.count * int_pow(Int(ell), a), int_pow(Int(ell), 2 * r));
                        Rat dev = ratio - 1;
                        if (dev < 0) dev = -dev;
                        CHECK(dev <= Rat(8, ell));
                    }
            }
        }
    }
}

TEST_CASE("count_constrained: fixed values at small levels") {
    MatrixConstraint c1;
    c1.det = 1;
    c1.not_congruent_to_identity_mod = 1;
    c1.invertible_only = true;
    CHECK(count_constrained(c1, PrimePower(2, 1)).count == 5);

    MatrixConstraint c2;
    c2.invertible_only = true;
    c2.custom_predicate = [](i64 t, i64 u) { return mod_floor(u + 1 - t, 2) != 0; };
    CHECK(count_constrained(c2, PrimePower(2, 1)).count == 2);

    MatrixConstraint c3;
    c3.congruent_to_identity_mod = 1;
    c3.invertible_only = true;
    CHECK(count_constrained(c3, PrimePower(2, 2)).count == 16);
}

TEST_CASE("count_constrained: closed assembly equals brute force") {
    auto saved = matcount_budget();
    for (i64 ell : {2, 3, 5}) {
        for (int r = 1; r <= (ell == 5 ? 1 : 2); ++r) {
            std::vector<MatrixConstraint> cases;
            MatrixConstraint a;
            a.invertible_only = true;
            cases.push_back(a);
            MatrixConstraint b;
            b.det = 1;
            b.not_congruent_to_identity_mod = 1;
            b.invertible_only = true;
            cases.push_back(b);
            MatrixConstraint c;
            c.trace = 1;
            c.exclude_zero_mod_ell = true;
            cases.push_back(c);
            MatrixConstraint d;
            d.custom_predicate = [&](i64 t, i64 u) { return mod_floor(u + 1 - t, ell) != 0; };
            d.invertible_only = true;
            cases.push_back(d);
            MatrixConstraint e;
            e.congruent_to_identity_mod = 1;
            e.not_congruent_to_identity_mod = r;
            cases.push_back(e);
            for (auto& cons : cases) {
                auto brute = count_constrained(cons, PrimePower(ell, r));
                REQUIRE(brute.method == CountMethod::bruteforce);
                matcount_budget().brute_ops = 0;  // force the assembly path
                auto closed = count_constrained(cons, PrimePower(ell, r));
                matcount_budget() = saved;
                REQUIRE(closed.method == CountMethod::closed_formula);
                CHECK(closed.count == brute.count);
            }
        }
    }
}

TEST_CASE("count_crt") {
    MatrixConstraint sl;
    sl.det = 1;
    sl.invertible_only = true;
    std::vector<std::pair<PrimePower, MatrixConstraint>> parts = {{PrimePower(2, 1), sl},
                                                                  {PrimePower(3, 1), sl}};
    CHECK(count_crt(parts, 6) == 144);  // |SL2(F_2)| * |SL2(F_3)| = 6 * 24
    CHECK(count_crt({}, 1) == 1);
    CHECK(count_crt({{PrimePower(5, 1), sl}}, 5) == count_constrained(sl, PrimePower(5, 1)).count);
    CHECK_THROWS_AS(count_crt(parts, 12), domain_error);
}

TEST_CASE("budget errors surface as budget_error") {
    CHECK_THROWS_AS(count_fixed_trace_det(0, 1, 1, PrimePower(2, 7), CountMethod::bruteforce),
                    budget_error);
}

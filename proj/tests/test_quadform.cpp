#include "doctest.h"
#include "ecstat/quadform.hpp"

using namespace ecstat;

TEST_CASE("sqrt_count: fixed values") {
    CHECK(sqrt_count(-2, 1) == 0);  // D = 2, 3 mod 4 vanishes
    CHECK(sqrt_count(-4, 1) == 1);
    CHECK(sqrt_count(-4, 3) == 0);  // consistent with 1 + (-4|3) = 0
    CHECK(sqrt_count(-3, 1) == 1);
    CHECK(sqrt_count(-3, 2) == 0);
}

TEST_CASE("sqrt_count: multiplicativity in coprime arguments") {
    for (i64 D = -200; D <= 0; ++D) {
        int m4 = (int)mod_floor(D, 4);
        if (m4 != 0 && m4 != 1) continue;
        for (i64 m = 1; m <= 25; ++m)
            for (i64 n = 1; n <= 20; ++n) {
                if (std::gcd(m, n) != 1 || m * n > 500) continue;
                CHECK(sqrt_count(D, m * n) == sqrt_count(D, m) * sqrt_count(D, n));
            }
    }
}

TEST_CASE("sqrt_count: stabilization past nu_ell(D) + 1") {
    for (i64 ell : {2, 3, 5, 7, 11, 13}) {
        for (i64 D = -400; D < 0; ++D) {
            int m4 = (int)mod_floor(D, 4);
            if (m4 != 0 && m4 != 1) continue;
            int nu = p_adic_valuation(D, ell);
            i64 stable = -1;
            for (int j = nu + 1; j <= 8; ++j) {
                if (ipow(ell, j) > 2000000) break;
                i64 v = sqrt_count(D, ipow(ell, j));
                if (stable < 0) stable = v;
                CHECK(v == stable);
            }
        }
    }
}

TEST_CASE("sqrt_count: prime-power formula agrees with enumeration") {
    // exercises the valuation-based path against the literal x-scan
    for (i64 D : {-3, -4, -7, -8, -12, -16, -20, -32, -48, -63, -100, -128, -192, -243, -256}) {
        for (i64 ell : {2, 3, 5}) {
            for (int j = 1; j <= 12; ++j) {
                i64 m = ipow(ell, j);
                if (m > 300000) break;
                CHECK(detail::sqrt_count_prime_power(D, ell, j) == brute_sqrt_count(D, m));
            }
        }
    }
}

TEST_CASE("reduced primitive forms: small discriminants") {
    auto f3 = reduced_primitive_forms(Discriminant(-3));
    REQUIRE(f3.size() == 1);
    CHECK(f3[0] == QuadraticForm{1, 1, 1});

    auto f4 = reduced_primitive_forms(Discriminant(-4));
    REQUIRE(f4.size() == 1);
    CHECK(f4[0] == QuadraticForm{1, 0, 1});

    auto f23 = reduced_primitive_forms(Discriminant(-23));
    REQUIRE(f23.size() == 3);
    bool has116 = false, has213 = false, has2m13 = false;
    for (auto& f : f23) {
        CHECK(f.discriminant() == -23);
        if (f == QuadraticForm{1, 1, 6}) has116 = true;
        if (f == QuadraticForm{2, 1, 3}) has213 = true;
        if (f == QuadraticForm{2, -1, 3}) has2m13 = true;
    }
    CHECK(has116);
    CHECK(has213);
    CHECK(has2m13);
}

TEST_CASE("class numbers against a known table") {
    // h(-D) for fundamental discriminants (OEIS A014602 neighborhood)
    struct Row { i64 D; i64 h; };
    for (auto [D, h] : {Row{-3, 1}, Row{-4, 1}, Row{-7, 1}, Row{-8, 1}, Row{-11, 1},
                        Row{-15, 2}, Row{-20, 2}, Row{-23, 3}, Row{-31, 3}, Row{-47, 5},
                        Row{-71, 7}, Row{-163, 1}, Row{-231, 12}, Row{-427, 2},
                        Row{-5460, 16}}) {
        CHECK(class_number(Discriminant(D)).h == h);
    }
    // non-fundamental: h(-16) counts only primitive classes
    CHECK(class_number(Discriminant(-16)).h == 1);
    CHECK(class_number(Discriminant(-12)).h == 1);
    CHECK(class_number(Discriminant(-27)).h == 1);
}

TEST_CASE("kronecker class number: fixed values") {
    CHECK(kronecker_class_number(-3) == Rat(1, 6));
    CHECK(kronecker_class_number(-4) == Rat(1, 4));
    CHECK(kronecker_class_number(-16) == Rat(3, 4));
    CHECK(kronecker_class_number(-19) == Rat(1, 2));
    CHECK(kronecker_class_number(-20) == 1);
    CHECK_THROWS_AS(kronecker_class_number(4), domain_error);
    CHECK_THROWS_AS(kronecker_class_number(-5), domain_error);
}

TEST_CASE("kronecker class number equals h/w for fundamental discriminants") {
    for (i64 D : {-3, -4, -7, -8, -11, -15, -19, -20, -23, -24, -31, -35, -39, -40, -43, -47}) {
        auto cn = class_number(Discriminant(D));
        CHECK(kronecker_class_number(D) == Rat(cn.h, cn.w));
    }
}

TEST_CASE("Deuring mass formula: sum of H(t^2-4p) over the Hasse interval is p") {
    for (u64 p : primes_up_to(199)) {
        if (p < 5) continue;
        Rat sum = 0;
        i64 tmax = isqrt(4 * (i64)p - 1);
        for (i64 t = -tmax; t <= tmax; ++t) sum += kronecker_class_number(t * t - 4 * (i64)p);
        CHECK(sum == Rat((i64)p));
    }
}

TEST_CASE("cnf partial product approaches H(D)") {
    // empty product leaves the archimedean factor
    CHECK(cnf_partial_product(Discriminant(-4), 1) ==
          doctest::Approx(0.3183098861).epsilon(1e-9));
    CHECK(cnf_partial_product(Discriminant(-4), 100000) == doctest::Approx(0.25).epsilon(0.08));
    CHECK(cnf_partial_product(Discriminant(-3), 100000) ==
          doctest::Approx(1.0 / 6.0).epsilon(0.12));
    // conditional convergence: the trajectory should tighten with z
    std::vector<std::pair<i64, double>> traj;
    double v = cnf_partial_product(Discriminant(-4), 100000, &traj);
    double err_mid = 0, err_end = std::abs(v - 0.25);
    for (auto& [z, val] : traj)
        if (z <= 1000) err_mid = std::abs(val - 0.25);
    CHECK(err_end < err_mid + 0.02);
    CHECK(err_end < 0.02);
}

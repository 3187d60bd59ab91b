#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "test_support.hpp"

using namespace heraldlab;
using testsup::big_rat;

TEST_CASE("hermite values at pinned points") {
    CHECK(hermite_eval(0, cplx(0.7, 0.0)) == cplx(1.0, 0.0));
    CHECK(hermite_eval(1, cplx(0.7, 0.0)) == cplx(1.4, 0.0));
    // H_2(1) = 4 - 2 = 2
    CHECK(hermite_eval(2, cplx(1.0, 0.0)).real() == Catch::Approx(2.0).margin(1e-14));
    // H_2(x) = 4x^2 - 2, H_3(x) = 8x^3 - 12x
    CHECK(hermite_eval(2, cplx(0.5, 0.0)).real() == Catch::Approx(-1.0).margin(1e-14));
    CHECK(hermite_eval(3, cplx(2.0, 0.0)).real() == Catch::Approx(40.0).margin(1e-12));
    // complex argument: H_1(i) = 2i
    const cplx h1i = hermite_eval(1, cplx(0.0, 1.0));
    CHECK(h1i.real() == Catch::Approx(0.0).margin(1e-15));
    CHECK(h1i.imag() == Catch::Approx(2.0).margin(1e-15));
    // H_2(i) = 4 i^2 - 2 = -6
    CHECK(hermite_eval(2, cplx(0.0, 1.0)).real() == Catch::Approx(-6.0).margin(1e-14));
}

TEST_CASE("hermite recurrence matches coefficient expansion at low order") {
    for (int n = 0; n <= 12; ++n) {
        const PolySeries s = hermite_series(n);
        REQUIRE(s.degree == n);
        REQUIRE(s.coefficients.size() == static_cast<size_t>(n) + 1);
        for (double x : {-1.7, -0.3, 0.0, 0.4, 1.1, 2.6}) {
            const double ref = s.eval(x);
            const double got = hermite_eval(n, cplx(x, 0.0)).real();
            CHECK(got == Catch::Approx(ref).margin(1e-9 * (1.0 + std::abs(ref))));
        }
    }
}

TEST_CASE("hermite series pinned coefficients") {
    // H_3 = 8x^3 - 12x
    const PolySeries h3 = hermite_series(3);
    REQUIRE(h3.coefficients.size() == 4);
    CHECK(h3.coefficients[0] == 0.0);
    CHECK(h3.coefficients[1] == -12.0);
    CHECK(h3.coefficients[2] == 0.0);
    CHECK(h3.coefficients[3] == 8.0);
}

TEST_CASE("hermite derivative identity H_n' = 2 n H_{n-1}") {
    auto rng = testsup::fixed_rng(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 20;
        const cplx u(dist(rng), dist(rng));
        const double h = 1e-5;
        const cplx der = (hermite_eval(n, u + h) - hermite_eval(n, u - h)) / (2.0 * h);
        const cplx ref = 2.0 * static_cast<double>(n) * hermite_eval(n - 1, u);
        CHECK(std::abs(der - ref) <= 1e-5 * (1.0 + std::abs(ref)));
    }
}

TEST_CASE("laguerre values at pinned points") {
    // L_1(x) = 1 - x, L_2(x) = 1 - 2x + x^2/2
    CHECK(laguerre_eval(1, 2.0) == Catch::Approx(-1.0).margin(1e-15));
    CHECK(laguerre_eval(2, 1.0) == Catch::Approx(-0.5).margin(1e-15));
    CHECK(laguerre_eval(0, 5.0) == 1.0);
    // L_1^{(1)}(x) = 2 - x
    CHECK(assoc_laguerre_eval(1, 1, 0.5) == Catch::Approx(1.5).margin(1e-15));
    // L_2^{(2)}(x) = x^2/2 - 4x + 6
    CHECK(assoc_laguerre_eval(2, 2, 2.0) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("laguerre recurrence matches coefficient expansion") {
    for (int n = 0; n <= 10; ++n) {
        const PolySeries s = laguerre_series(n);
        for (double x : {0.0, 0.3, 1.0, 2.5, 6.0}) {
            CHECK(laguerre_eval(n, x) ==
                  Catch::Approx(s.eval(x)).margin(1e-10 * (1.0 + std::abs(s.eval(x)))));
        }
    }
}

TEST_CASE("log_factorial against exact big integers") {
    for (int n : {0, 1, 2, 5, 12, 25, 50, 120, 170}) {
        const double exact = std::log(testsup::big_factorial(n).convert_to<double>());
        CHECK(log_factorial(n) == Catch::Approx(exact).epsilon(1e-13));
    }
    CHECK(log_factorial(0) == 0.0);
    CHECK(log_factorial(1) == 0.0);
    CHECK_THROWS_AS(log_factorial(-1), ValidationError);
}

TEST_CASE("terminating_2f1 against exact rational summation") {
    for (int n = 0; n <= 12; ++n) {
        for (int num = 0; num <= 8; ++num) {
            const big_rat t(num, 8);
            const double exact = testsup::to_double(testsup::herald_f1_exact(n, t));
            const double got = terminating_2f1(0.5 * (1.0 - n), -0.5 * n, 1.0,
                                               static_cast<double>(num) / 8.0);
            CHECK(got == Catch::Approx(exact).epsilon(1e-12));
        }
    }
}

TEST_CASE("terminating_2f1 pinned herald-family values") {
    // n = 2: 2F1(-1/2, -1, 1, t) = 1 + t/2
    CHECK(terminating_2f1(-0.5, -1.0, 1.0, 0.25) == Catch::Approx(1.125).margin(1e-15));
    // n = 3: 2F1(-1, -3/2, 1, t) = 1 + 3t/2
    CHECK(terminating_2f1(-1.0, -1.5, 1.0, 0.5) == Catch::Approx(1.75).margin(1e-15));
    // degenerate upper parameter 0 gives exactly 1
    CHECK(terminating_2f1(0.0, -3.5, 1.0, 0.9) == 1.0);
}

TEST_CASE("terminating_2f1 rejects non-terminating and singular parameters") {
    CHECK_THROWS_AS(terminating_2f1(0.5, 1.5, 2.0, 0.3), InfeasibleError);
    CHECK_THROWS_AS(terminating_2f1(-1.5, 2.5, 1.0, 0.3), InfeasibleError);
    CHECK_THROWS_AS(terminating_2f1(-2.0, 0.5, 0.0, 0.3), InfeasibleError);
    CHECK_THROWS_AS(terminating_2f1(-2.0, 0.5, -3.0, 0.3), InfeasibleError);
    CHECK_THROWS_AS(terminating_2f1(-2000.0, 0.5, 1.0, 0.3), SizeError);
}

TEST_CASE("order guards") {
    CHECK_THROWS_AS(hermite_eval(-1, cplx(0.0, 0.0)), ValidationError);
    CHECK_THROWS_AS(hermite_eval(kMaxOrder + 1, cplx(0.0, 0.0)), SizeError);
    CHECK_NOTHROW(hermite_eval(kMaxOrder, cplx(0.1, 0.0)));
    CHECK_THROWS_AS(assoc_laguerre_eval(3, -1, 1.0), ValidationError);
    CHECK_THROWS_AS(laguerre_series(-2), ValidationError);
    CHECK_THROWS_AS(hermite_series(kMaxOrder + 5), SizeError);
}

TEST_CASE("PolySeries evaluates in ascending-coefficient convention") {
    const PolySeries p{2, {1.0, -3.0, 2.0}};  // 1 - 3u + 2u^2
    CHECK(p.eval(0.0) == 1.0);
    CHECK(p.eval(1.0) == 0.0);
    CHECK(p.eval(2.0) == Catch::Approx(3.0).margin(1e-15));
}

TEST_CASE("laguerre parity relation against associated order") {
    // d/dx L_n(x) = -L_{n-1}^{(1)}(x)
    for (int n = 1; n <= 8; ++n) {
        for (double x : {0.2, 0.9, 1.7}) {
            const double h = 1e-6;
            const double der = (laguerre_eval(n, x + h) - laguerre_eval(n, x - h)) / (2.0 * h);
            CHECK(der == Catch::Approx(-assoc_laguerre_eval(n - 1, 1, x)).margin(1e-7));
        }
    }
}

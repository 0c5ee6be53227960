#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "uhlsim/polynomials.hpp"

using namespace uhlsim;

TEST_CASE("sign degree formula") {
    // minimum odd integer >= ceil((8e/beta) ln(2/delta))
    CHECK(sign_degree_bound(0.5, 0.01) == 231);
    auto check_formula = [](double beta, double delta) {
        double raw = std::ceil(8.0 * M_E / beta * std::log(2.0 / delta));
        std::int64_t u = static_cast<std::int64_t>(raw);
        if (u % 2 == 0) ++u;
        CHECK(sign_degree_bound(beta, delta) == u);
    };
    check_formula(0.3, 0.1);
    check_formula(0.1, 0.05);
    check_formula(0.25, 2.5e-3);
}

TEST_CASE("sign polynomial certification") {
    for (auto [beta, delta] : {std::pair{0.3, 0.1}, std::pair{0.1, 0.05}, std::pair{0.5, 0.01}}) {
        SignPolynomial p = synthesize_sign_polynomial(beta, delta);
        CHECK(p.degree == sign_degree_bound(beta, delta));
        CHECK(p.grid_max_abs <= 1.0 + 1e-9);
        CHECK(p.grid_sign_error <= delta);
        CHECK(std::abs(p(0.0)) < 1e-12);  // odd parity
        CHECK(std::abs(p(beta) - 1.0) <= delta);
        CHECK(std::abs(p(-beta) + 1.0) <= delta);
    }
}

TEST_CASE("sign polynomial rejects bad parameters") {
    CHECK_THROWS(synthesize_sign_polynomial(0.0, 0.1));
    CHECK_THROWS(synthesize_sign_polynomial(0.5, 0.7));
}

TEST_CASE("sqrt polynomial, kernel-safe route") {
    SqrtPolynomial p = synthesize_sqrt_polynomial(0.3, 0.01, true);
    CHECK(p.grid_error <= 0.01);
    CHECK(p.grid_max_abs <= 1.0 + 1e-9);
    CHECK(std::abs(p(0.0)) <= 0.01);
    for (double x : {0.3, 0.5, 0.9, 1.0}) CHECK(std::abs(p(x) - std::sqrt(x) / 2.0) <= 0.01);
}

TEST_CASE("sqrt polynomial, support-only route at tight accuracy") {
    SqrtPolynomial p = synthesize_sqrt_polynomial(0.2, 1e-6, false);
    CHECK(p.grid_error <= 1e-6);
    CHECK(p.grid_max_abs <= 1.0 + 1e-9);
    for (double x : {0.2, 0.35, 0.8, 1.0}) CHECK(std::abs(p(x) - std::sqrt(x) / 2.0) <= 1e-6);
    // support-only degree should follow the 1/m rate, far below 1/delta^2
    CHECK(p.degree < 2000);
}

TEST_CASE("chebyshev projection reproduces smooth functions") {
    auto f = [](double x) { return std::exp(-3.0 * x * x) * std::cos(2.0 * x); };
    ChebyshevSeries s = ChebyshevSeries::project(f, 60);
    for (double x = -1.0; x <= 1.0; x += 0.01) CHECK(std::abs(s(x) - f(x)) < 1e-10);
}

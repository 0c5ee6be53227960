#pragma once

#include <cstdint>
#include <string>

#include "uhlsim/chebyshev.hpp"

namespace uhlsim {

/// Minimum odd integer u >= ceil((8e/beta) * ln(2/delta)).
std::int64_t sign_degree_bound(double beta, double delta);

/// Certified odd polynomial approximation of sgn(x):
/// |P(x)| <= 1 on [-1,1], |P(x) - sgn(x)| <= delta for |x| in [beta, 1].
struct SignPolynomial {
    ChebyshevSeries series;  // odd coefficients only, standard basis on [-1,1]
    std::int64_t degree = 0;
    double beta = 0.0;
    double delta = 0.0;
    double grid_max_abs = 0.0;     // max |P| over [-1,1]
    double grid_sign_error = 0.0;  // max |P - sgn| over |x| in [beta,1]
    bool escalated = false;        // degree raised beyond the formula bound

    double operator()(double x) const { return series(x); }
};

/// Grid size used to certify polynomial sup-norm claims.
inline constexpr int kCertificationGridPoints = 10001;

SignPolynomial synthesize_sign_polynomial(double beta, double delta);

/// Certified even polynomial approximation of sqrt(x)/2, represented as a
/// Chebyshev series in t = affine(x^2) over x^2 in [y_lo, 1]:
/// |R(x)| <= 1 on [-1,1], |R(x) - sqrt(x)/2| <= delta for x in [m_min, 1].
/// When `kernel_safe` the certificate also covers x = 0 (|R(0)| <= delta), so
/// R(M) ~ sqrt(M)/2 holds for singular PSD matrices.
struct SqrtPolynomial {
    ChebyshevSeries inner;  // series in t
    double y_lo = 0.0;      // inner domain [y_lo, 1] for y = x^2
    std::int64_t degree = 0;  // degree in x (= 2 * inner degree)
    double m_min = 0.0;
    double delta = 0.0;
    bool kernel_safe = false;
    double grid_max_abs = 0.0;
    double grid_error = 0.0;       // max |R - sqrt(x)/2| over the certified region
    double degree_constant = 0.0;  // degree / (min{1/m_min, 1/delta^2} ln(1/delta))

    double operator()(double x) const {
        double y = x * x;
        double t = (2.0 * y - (1.0 + y_lo)) / (1.0 - y_lo);
        return inner(t);
    }
};

SqrtPolynomial synthesize_sqrt_polynomial(double m_min, double delta, bool kernel_safe);

std::string certificate_json(const SignPolynomial& p);
std::string certificate_json(const SqrtPolynomial& p);

}  // namespace uhlsim

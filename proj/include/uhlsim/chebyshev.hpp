#pragma once

#include <functional>
#include <vector>

namespace uhlsim {

/// Chebyshev series on [-1, 1]: f(x) = sum_k c_k T_k(x).
class ChebyshevSeries {
public:
    ChebyshevSeries() = default;
    explicit ChebyshevSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

    /// Projection of f onto Chebyshev polynomials up to `degree`, computed from
    /// samples at the n+1 Chebyshev-Lobatto points (n >= degree).
    static ChebyshevSeries project(const std::function<double(double)>& f, int degree,
                                   int oversample = 2);

    double operator()(double x) const;  // Clenshaw
    int degree() const { return coeffs_.empty() ? -1 : static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    /// Keep only coefficients of the given parity (0 = even, 1 = odd).
    ChebyshevSeries parity_filtered(int parity) const;

    /// Drop trailing coefficients below `tol` in absolute value.
    ChebyshevSeries truncated(double tol) const;

    ChebyshevSeries scaled(double factor) const;

private:
    std::vector<double> coeffs_;
};

}  // namespace uhlsim

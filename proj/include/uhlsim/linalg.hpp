#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "uhlsim/layout.hpp"

namespace uhlsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Relative cutoff under which singular values count as zero (SVD noise
/// floor at double precision for the d <= 256 matrices we handle).
inline constexpr double kSingularValueFloor = 1e-9;

struct Svd {
    Matrix u;        // left singular vectors, columns
    RealVector s;    // singular values, descending
    Matrix v;        // right singular vectors, columns (A = u * s.asDiagonal() * v.adjoint())
    Index rank(double rel_tol = kSingularValueFloor) const {
        if (s.size() == 0) return 0;
        const double floor = s(0) * rel_tol;
        Index r = 0;
        for (Index i = 0; i < s.size(); ++i)
            if (s(i) > floor) ++r;
        return r;
    }
};

/// SVD with a reproducible phase convention: ties broken by descending value,
/// each left vector's first nonzero component made real positive.
Svd svd(const Matrix& m);

Matrix tensor(const Matrix& a, const Matrix& b);
Vector tensor(const Vector& a, const Vector& b);

/// sgn applied to the singular values: sum_j sgn(s_j) |eta_j><xi_j|.
Matrix sign_sv(const Matrix& m);

/// P applied to the singular values; parity = +1 even, -1 odd.
/// Odd P -> sum P(s_j)|eta_j><xi_j|; even P -> sum P(s_j)|xi_j><xi_j|.
Matrix poly_sv(const std::function<double(double)>& p, int parity, const Matrix& m,
               double sv_tol = 1e-9);

Matrix partial_trace(const Matrix& m, const DimLayout& layout,
                     const std::vector<std::string>& traced);

/// Swap operator between two equal-dimension factors of the layout.
Matrix swap_operator(const DimLayout& layout, const std::string& a, const std::string& b);

/// Permutation matrix reordering the layout's factors into the given label order.
Matrix permute_factors(const DimLayout& layout, const std::vector<std::string>& order);

/// Operator acting on a subset of factors, extended by identity on the rest.
/// `op` must act on the tensor product of the named factors in the given order.
Matrix embed(const Matrix& op, const DimLayout& layout, const std::vector<std::string>& acting);

/// Unitary dilation of a contraction (||A|| <= 1, clamped): 2n x 2n unitary
/// [[A, sqrt(I-AA+)], [sqrt(I-A+A), -A+]] after zero-padding A to n = max(rows, cols).
Matrix dilate_contraction(const Matrix& a, double clamp_tol = 1e-9);

/// e^{iH} for Hermitian H via eigendecomposition.
Matrix exp_i_hermitian(const Matrix& h, double t = 1.0);

/// Hermitian p-th power on the support (eigenvalues below tol*max treated as zero).
Matrix hermitian_power(const Matrix& h, double p, double rel_tol = kSingularValueFloor);

inline Matrix sqrt_psd(const Matrix& h) { return hermitian_power(h, 0.5); }

double operator_norm(const Matrix& m);
double trace_norm(const Matrix& m);

/// Unitary whose first column is v (norm 1); remaining columns completed by QR.
Matrix unitary_from_first_column(const Vector& v);

/// Unitary completion of an isometry (d x k, V^+V = I) to a d x d unitary
/// whose first k columns equal V.
Matrix complete_isometry(const Matrix& v);

Vector basis_state(Index dim, Index k);

inline Vector zero_state(Index dim) { return basis_state(dim, 0); }

bool approx_equal(const Matrix& a, const Matrix& b, double tol);

}  // namespace uhlsim

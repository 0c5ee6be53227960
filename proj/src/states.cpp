#include "uhlsim/states.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace uhlsim {

PureState::PureState(Vector amps, DimLayout lay, double norm_tol)
    : amplitudes(std::move(amps)), layout(std::move(lay)) {
    if (amplitudes.size() != layout.dim())
        throw std::invalid_argument("PureState: amplitudes do not match layout");
    if (std::abs(amplitudes.norm() - 1.0) > norm_tol)
        throw std::invalid_argument("PureState: not normalized");
}

Matrix PureState::reduced(const std::vector<std::string>& traced) const {
    return partial_trace(density(), layout, traced);
}

DensityMatrix::DensityMatrix(Matrix m, DimLayout lay, double tol)
    : matrix(std::move(m)), layout(std::move(lay)) {
    if (matrix.rows() != layout.dim() || matrix.cols() != layout.dim())
        throw std::invalid_argument("DensityMatrix: matrix does not match layout");
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(matrix.trace().real() - 1.0) > tol || std::abs(matrix.trace().imag()) > tol)
        throw std::invalid_argument("DensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es((matrix + matrix.adjoint()) / 2.0);
    if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("DensityMatrix: not positive semidefinite");
}

Schmidt schmidt_decomposition(const Vector& amplitudes, Index dim_left, Index dim_right) {
    if (amplitudes.size() != dim_left * dim_right)
        throw std::invalid_argument("schmidt_decomposition: dimensions do not match");
    Matrix reshaped(dim_left, dim_right);
    for (Index i = 0; i < dim_left; ++i)
        for (Index j = 0; j < dim_right; ++j) reshaped(i, j) = amplitudes(i * dim_right + j);
    Svd d = svd(reshaped);
    // right vectors conjugated so that |psi> = sum_k s_k |u_k>|v_k>
    return Schmidt{d.s, d.u, d.v.conjugate()};
}

PureState canonical_purification_exact(const DensityMatrix& omega, const std::string& copy_label) {
    const Index d = omega.dim();
    Matrix root = sqrt_psd(omega.matrix);
    Vector amps(d * d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) amps(i * d + j) = root(i, j);  // (sqrt(w) x I)|Gamma>
    amps.normalize();
    const std::string base =
        omega.layout.size() == 1 ? omega.layout.factor(0).label : std::string("A");
    DimLayout full =
        DimLayout::single(base, d).tensor(DimLayout::single(copy_label, d));
    return PureState(std::move(amps), full);
}

Vector maximally_entangled(Index d) {
    Vector v = Vector::Zero(d * d);
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    for (Index i = 0; i < d; ++i) v(i * d + i) = a;
    return v;
}

Matrix entangler_unitary(Index d) { return unitary_from_first_column(maximally_entangled(d)); }

Matrix cross_partial_trace_first(const Vector& ket_side, const Vector& bra_side, Index d_first,
                                 Index d_rest) {
    if (ket_side.size() != d_first * d_rest || bra_side.size() != d_first * d_rest)
        throw std::invalid_argument("cross_partial_trace_first: dimensions do not match");
    Matrix m = Matrix::Zero(d_rest, d_rest);
    for (Index a = 0; a < d_first; ++a)
        for (Index i = 0; i < d_rest; ++i)
            for (Index j = 0; j < d_rest; ++j)
                m(i, j) += ket_side(a * d_rest + i) * std::conj(bra_side(a * d_rest + j));
    return m;
}

}  // namespace uhlsim

#pragma once

#include "uhlsim/layout.hpp"
#include "uhlsim/linalg.hpp"

namespace uhlsim {

struct PureState {
    Vector amplitudes;
    DimLayout layout;

    PureState() = default;
    PureState(Vector amps, DimLayout lay, double norm_tol = 1e-10);

    Index dim() const { return amplitudes.size(); }
    Matrix density() const { return amplitudes * amplitudes.adjoint(); }
    Matrix reduced(const std::vector<std::string>& traced) const;
};

struct DensityMatrix {
    Matrix matrix;
    DimLayout layout;

    DensityMatrix() = default;
    DensityMatrix(Matrix m, DimLayout lay, double tol = 1e-8);

    Index dim() const { return matrix.rows(); }
    Matrix reduced(const std::vector<std::string>& traced) const {
        return partial_trace(matrix, layout, traced);
    }
};

/// Schmidt decomposition of a bipartite pure state across (first block, rest).
struct Schmidt {
    RealVector coefficients;  // descending, squared values sum to 1
    Matrix left;              // columns: vectors on the first block
    Matrix right;             // columns: vectors on the second block
};

Schmidt schmidt_decomposition(const Vector& amplitudes, Index dim_left, Index dim_right);

/// Canonical purified state (sqrt(omega) x I)|Gamma>, normalized. Layout
/// [A, B] with B a copy of omega's space; marginals are omega and omega^T.
PureState canonical_purification_exact(const DensityMatrix& omega,
                                       const std::string& copy_label = "B");

/// Maximally entangled state |Phi> between two d-dimensional factors.
Vector maximally_entangled(Index d);

/// Unitary preparing |Phi> from |0> on a d*d space.
Matrix entangler_unitary(Index d);

/// tr_first[|b><a|] for vectors a, b on (d_first x d_rest): the d_rest x d_rest
/// matrix sum_i <i|_first applied both sides.
Matrix cross_partial_trace_first(const Vector& bra_side, const Vector& ket_side, Index d_first,
                                 Index d_rest);

}  // namespace uhlsim

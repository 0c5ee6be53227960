#pragma once

#include <map>
#include <string>

#include "uhlsim/ledger.hpp"
#include "uhlsim/linalg.hpp"
#include "uhlsim/oracle.hpp"
#include "uhlsim/polynomials.hpp"

namespace uhlsim {

/// (alpha, a, eps)-block-encoding: the target sits in the top-left
/// block_rows x block_cols corner of `unitary` (ancilla factors are the
/// leading tensor factors on each side, projected onto |0>).
struct BlockEncoding {
    Matrix unitary;
    Index block_rows = 0;
    Index block_cols = 0;
    double alpha = 1.0;
    int ancilla_qubits = 0;  // ledger metadata: the cited construction's count
    double eps = 0.0;
    Matrix target;  // recorded ideal block (certificate re-verified on build)

    // ledger cost of one forward / inverse use, by counter name
    std::map<std::string, std::int64_t> forward_cost;
    std::map<std::string, std::int64_t> inverse_cost;

    Matrix block() const { return unitary.topLeftCorner(block_rows, block_cols); }
    /// ||target - alpha * block||_inf, the certificate defect.
    double certificate_defect() const;
};

/// Certified construction: records target, re-verifies eps by subtraction.
BlockEncoding make_block_encoding(Matrix unitary, Index block_rows, Index block_cols, double alpha,
                                  int ancilla_qubits, Matrix target, double eps_budget);

/// W = U_rho^+ (I_Ahat x F^{B Bhat}) U_sigma, a (1, log(dA dB), 0)-block-encoding
/// of tr_A'[|sigma><rho|] on B. Factor order: [Ahat, Bhat, B] with the flag
/// register (Ahat Bhat) leading. Charges one query to U_sigma and one to
/// U_rho^+ per materialization.
BlockEncoding build_purified_difference_encoding(const StatePrepOracle& u_rho,
                                                 const StatePrepOracle& u_sigma,
                                                 ResourceLedger& ledger);

/// Singular value transformation of the encoded block: poly_sv followed by the
/// minimal one-flag dilation. Requires alpha = 1. Charges (deg+1)/2 uses of U
/// and (deg-1)/2 of U^+ for odd parity (deg/2 each for even), propagated
/// through the encoding's per-use cost recipe.
BlockEncoding qsvt_apply(const BlockEncoding& be, const SignPolynomial& p, ResourceLedger& ledger);
BlockEncoding qsvt_apply(const BlockEncoding& be, const SqrtPolynomial& p, ResourceLedger& ledger);

/// Product lemma: (a1 a2, n1+n2, a1 e2 + a2 e1)-encoding of A1 A2.
BlockEncoding product_encodings(const BlockEncoding& be1, const BlockEncoding& be2);

}  // namespace uhlsim

#pragma once

#include <optional>

#include "uhlsim/block_encoding.hpp"
#include "uhlsim/dme.hpp"
#include "uhlsim/metrics.hpp"
#include "uhlsim/oracle.hpp"

namespace uhlsim {

enum class AccuracyMode { diamond, fidelity };

inline const char* to_string(AccuracyMode m) {
    return m == AccuracyMode::diamond ? "diamond" : "fidelity";
}

struct BranchParams {
    double delta1 = 0.0;  // sign-certification accuracy of the branch
    double beta = 0.0;    // sign-polynomial threshold
    std::int64_t u = 0;   // sign degree / oracle uses
};

/// V^B = sgn_sv(tr_A[|sigma><rho|]); the fidelity-optimal partial isometry on
/// the purifying system.
Matrix exact_uhlmann_isometry(const PureState& rho, const PureState& sigma);

// ---------------------------------------------------------------------------
// Algorithm 1: purified query access
// ---------------------------------------------------------------------------
struct UhlmannQueryResult {
    Matrix w_tilde;   // unitary on [D, B], D = dilation flag x Ahat x Bhat
    Matrix u_ideal;   // exact dilation of the partial isometry, same column layout
    Index d_flag = 0; // dim of D
    Index d_b = 0;
    SignPolynomial poly;
    BranchParams branch;
    SpectrumStats stats;
    Matrix m_block;   // tr_A'[|sigma><rho|]
};

UhlmannQueryResult uhlmann_purified_query(const StatePrepOracle& u_rho,
                                          const StatePrepOracle& u_sigma, double delta,
                                          AccuracyMode mode, ResourceLedger& ledger,
                                          std::optional<BranchParams> forced_branch = {});

/// Channel rho^B -> W~ (|0><0|^D x rho) W~^+ on [D, B] (spectators untouched).
QuantumChannel query_result_channel(const UhlmannQueryResult& res);
QuantumChannel query_ideal_channel(const UhlmannQueryResult& res);

// ---------------------------------------------------------------------------
// Algorithm 2: purified sample access
// ---------------------------------------------------------------------------
struct UhlmannSampleResult {
    // J acts on [H2, C, AhatBhat, B] (H = H2 x C is the paper's two-qubit flag).
    QuantumChannel j_channel;
    Matrix u_tilde;     // ideal dilated unitary on the same space
    Matrix u_ideal;     // exact dilation of |rho><sigma| x V^B
    Index d_ab = 0;     // dim of AhatBhat
    Index d_b = 0;
    SignPolynomial poly;
    BranchParams branch;
    SpectrumStats stats;
    std::int64_t m_dmesub = 0;     // DMESUB copies per channel use
    double delta2 = 0.0;           // per-use DMESUB budget
    DensityMatrix aux_sigma;       // the sigma copy consumed by P_{|0>|sigma>}
};

UhlmannSampleResult uhlmann_purified_sample(const DensityMatrix& rho_pure,
                                            const DensityMatrix& sigma_pure, double delta,
                                            AccuracyMode mode, ResourceLedger& ledger,
                                            std::optional<SpectrumStats> forced_stats = {});

UhlmannSampleResult uhlmann_purified_sample(const PureState& rho, const PureState& sigma,
                                            double delta, AccuracyMode mode,
                                            ResourceLedger& ledger);

/// T^B(rho_AB) = tr_{H AhatBhat} J(rho_AB x |0><0|^H x sigma_aux); the input's
/// A factor rides along as a spectator.
Matrix apply_sample_transformation(const UhlmannSampleResult& res, const Matrix& rho_ab,
                                   Index d_a);

// ---------------------------------------------------------------------------
// Block-encoding of sqrt(omega)/(2 sqrt 2) from samples (emulated import)
// ---------------------------------------------------------------------------
struct SqrtStateEncoding {
    BlockEncoding encoding;  // flag dim 4, block = R(omega/2) ~ sqrt(omega)/(2 sqrt 2)
    SqrtPolynomial poly;
    std::int64_t l = 0;  // sqrt polynomial degree (uses of the omega/2 encoding)
    double y = 0.0;       // samples of omega per omega/2-encoding use
    double h = 0.0;       // y * l, samples of omega per use of this encoding
    double delta = 0.0;       // diamond budget of the emulated channel
    double realized_error = 0.0;  // measured ||block - sqrt(omega)/(2sqrt2)||
};

SqrtStateEncoding block_enc_sqrt_state(const Matrix& omega, double delta, ResourceLedger& ledger,
                                       const std::string& sample_counter);

// ---------------------------------------------------------------------------
// Algorithm 4: canonical purification from mixed samples
// ---------------------------------------------------------------------------
struct CanonicalPurificationResult {
    DensityMatrix state;  // omega_c approximation on [A, B]
    SignPolynomial amplification_poly;
    SqrtStateEncoding sqrt_encoding;
    std::int64_t u = 0;  // amplification degree
    double q = 0.0;       // total omega samples (h * u)
    double achieved_distance = -1.0;  // filled by callers in test mode
};

CanonicalPurificationResult canonical_purification_alg(const DensityMatrix& omega, double delta,
                                                       ResourceLedger& ledger,
                                                       const std::string& sample_counter);

// ---------------------------------------------------------------------------
// Algorithm 3: Uhlmann transformation from mixed samples
// ---------------------------------------------------------------------------
struct UhlmannMixedResult {
    UhlmannSampleResult inner;  // the purified-sample stage on the approximate purifications
    CanonicalPurificationResult rho_c;
    CanonicalPurificationResult sigma_c;
    BranchParams branch;
    SpectrumStats stats;
    double delta1 = 0.0;  // canonical purification budget delta/(2(4u+1))
    double zeta = 0.0;    // u * m * q sample count
};

UhlmannMixedResult uhlmann_mixed_sample(const DensityMatrix& rho, const DensityMatrix& sigma,
                                        double delta, AccuracyMode mode, ResourceLedger& ledger);

// ---------------------------------------------------------------------------
// Algorithm 5: variant Uhlmann transformation (acts on A)
// ---------------------------------------------------------------------------
struct VariantUhlmannResult {
    Matrix u_tilde;   // dilated unitary on [flag, A]
    Matrix u_ideal;   // exact dilation of V^A = sgn_sv(sqrt(sigma) sqrt(rho))
    Index d_a = 0;
    SignPolynomial poly;
    BranchParams branch;
    SpectrumStats stats;
    SqrtStateEncoding rho_encoding;
    SqrtStateEncoding sigma_encoding;
    double zeta = 0.0;  // u * (h_rho + h_sigma)
};

VariantUhlmannResult variant_uhlmann_mixed(const DensityMatrix& rho, const DensityMatrix& sigma,
                                           double delta, AccuracyMode mode,
                                           ResourceLedger& ledger);

/// T^A applied to a state on [A, B]: dilredilate the variant unitary on the A
/// factor with a fresh |0> flag and trace it.
Matrix apply_variant_transformation(const VariantUhlmannResult& res, const Matrix& rho_ab,
                                    Index d_b);

}  // namespace uhlsim

#pragma once

#include "uhlsim/qpe.hpp"
#include "uhlsim/uhlmann.hpp"

namespace uhlsim {

/// Outcome of an exactly simulated estimation run: the success probability is
/// an exact functional of the QPE outcome distribution, never sampled.
struct EstimateRecord {
    double estimate = 0.0;            // most probable estimate
    double success_probability = 0.0; // exact mass of |est(y) - target| <= delta
    double target = 0.0;
    double delta = 0.0;
    PhaseEstimationPlan plan;
};

enum class AmplitudeMode { query, sample };

/// Square root amplitude estimation: QPE on Q = W e^{i pi |0><0|} W^+ U
/// e^{i pi |0><0|} U^+ with input W|0> (query mode), or on reflections built by
/// literal density matrix exponentiation from copies of the two states
/// (sample mode). `target` is the exact overlap used to score success.
EstimateRecord sqrt_amplitude_estimate_query(const Matrix& w, const Matrix& u, double delta,
                                             double target, ResourceLedger& ledger);

/// sample mode: omega may be mixed within eps_prime of the pure reference in
/// trace distance; requires delta > 120 pi eps_prime.
EstimateRecord sqrt_amplitude_estimate_sample(const Matrix& omega, const Matrix& psi,
                                              double delta, double eps_prime, double target,
                                              ResourceLedger& ledger);

enum class FidelityModel { purified_query, purified_sample, mixed_sample };

struct FidelityEstimateResult {
    EstimateRecord record;
    double exact_sqrt_fidelity = 0.0;
};

/// Square root fidelity estimation in the three access models, composing the
/// matching Uhlmann transformation (fidelity mode) with amplitude estimation.
FidelityEstimateResult fidelity_estimate_purified_query(const StatePrepOracle& u_rho,
                                                        const StatePrepOracle& u_sigma,
                                                        double delta, ResourceLedger& ledger);
FidelityEstimateResult fidelity_estimate_purified_sample(const PureState& rho,
                                                         const PureState& sigma, double delta,
                                                         ResourceLedger& ledger);
FidelityEstimateResult fidelity_estimate_mixed_sample(const DensityMatrix& rho,
                                                      const DensityMatrix& sigma, double delta,
                                                      ResourceLedger& ledger);

// ---------------------------------------------------------------------------
// Stinespring dilation via the Uhlmann transformation
// ---------------------------------------------------------------------------
struct StinespringResult {
    QuantumChannel g;        // on S = A x G; approximates the Stinespring unitary on |0>_G
    QuantumChannel g_inv;    // approximates the inverse on the |0>_G output slice
    Matrix v_reference;      // the canonical-purification Stinespring isometry A -> B R' B'
    Index d_a = 0, d_b = 0, d_g = 0, d_e = 0;
    double nu = 0.0;         // ledger: channel uses per the composed formulas
};

StinespringResult stinespring_via_uhlmann(const QuantumChannel& f, double delta,
                                          ResourceLedger& ledger);

// ---------------------------------------------------------------------------
// Petz recovery
// ---------------------------------------------------------------------------
enum class PetzMethod { direct, uhlmann };

struct PetzResult {
    QuantumChannel recovery;          // direct method: exact CP map
    std::function<Matrix(const Matrix&)> recovery_map;  // uhlmann method (linear map)
    PetzMethod method = PetzMethod::direct;
    double v_amplification = 0.0;     // oblivious amplitude amplification rounds (ledger)
};

PetzResult petz_recovery(const QuantumChannel& f, const DensityMatrix& sigma, PetzMethod method,
                         double epsilon, ResourceLedger& ledger);

// ---------------------------------------------------------------------------
// Decoupling demonstrations
// ---------------------------------------------------------------------------
struct TransmissionReport {
    double epsilon = 0.0;        // measured decoupling defect
    double fidelity = 0.0;       // achieved decoder fidelity
    double delta = 0.0;
    double bound = 0.0;          // 1 - epsilon - delta
    bool passed = false;
    std::int64_t uses = 0;       // Stinespring-unitary or channel uses (ledger)
};

/// Entanglement transmission, Model 1 (Stinespring-unitary access): builds the
/// Uhlmann decoder via the purified-query algorithm in fidelity mode.
TransmissionReport transmission_demo_model1(const QuantumChannel& n, const Matrix& encoder,
                                            Index d_a, Index d_g, double delta,
                                            ResourceLedger& ledger);

/// Entanglement transmission, Model 2 (channel access): canonical purifications
/// with the corrective encoder insertion on the simulated environment copy.
TransmissionReport transmission_demo_model2(const QuantumChannel& n, const Matrix& encoder,
                                            Index d_a, Index d_g, double delta,
                                            ResourceLedger& ledger);

struct MergingReport {
    double epsilon = 0.0;
    double fidelity = 0.0;
    double delta = 0.0;
    double bound = 0.0;
    bool passed = false;
    double m_min = 0.0;
    Index r_max = 0;
    double zeta = 0.0;  // sample formula
};

/// One-shot state merging with per-outcome Uhlmann isometries sharing one
/// threshold from the worst-case (m_min, r_max) parameterization.
MergingReport merging_demo(const PureState& omega_rab, Index d_a, Index d_b, Index d_s,
                           const Matrix& alice_unitary, double delta, ResourceLedger& ledger);

/// A small fixed list of Clifford-style encoders standing in for the 2-design
/// average; index selects one.
Matrix clifford_encoder(Index dim, int index);

}  // namespace uhlsim

#pragma once

#include <cstdint>

#include "uhlsim/channels.hpp"
#include "uhlsim/ledger.hpp"
#include "uhlsim/states.hpp"
#include "uhlsim/superop.hpp"

namespace uhlsim {

enum class Direction { forward, inverse };

struct DmePlan {
    double t = 0.0;
    double delta = 0.0;
    std::int64_t m = 0;
    double step = 0.0;  // t / m
    Direction direction = Direction::forward;
};

/// m = ceil(4 t^2 / delta); requires t >= delta / 4.
DmePlan make_dme_plan(double t, double delta, Direction direction = Direction::forward);

/// The m-step iterated partial-swap channel built from fresh copies of a
/// state Upsilon = |0><0| x xi0 + |1><1| x xi1 on (control x body):
/// each step adjoins a copy, applies |0><0| x e^{i dt F} + |1><1| x e^{-i dt F}
/// with F the body swap, and traces the copy. Closed form:
///   E = c^2 id + i c s ad_D + s^2 S tr[.],  D = xi0 - xi1, S = xi0 + xi1,
/// which is entrywise in D's eigenbasis plus a rank-one term, so E^m costs
/// O(d^3) for any m. The plain (uncontrolled-copy) channel is the xi1 = 0 case.
class PartialSwapMixer {
public:
    /// generator_diff = xi0 - xi1 (Hermitian), generator_sum = xi0 + xi1
    /// (trace one). For plain density matrix exponentiation both equal rho.
    PartialSwapMixer(const Matrix& generator_diff, const Matrix& generator_sum, double step,
                     std::int64_t m, Direction direction);

    Matrix apply(const Matrix& x) const { return emap_.apply(x); }
    const DiagPlusRankOne& superop() const { return emap_; }

    /// One-sided factors of the controlled variant: a control-qubit block
    /// Y01 picks up right-multiplication by `right_factor` per m steps
    /// (and Y10 its adjoint on the left).
    const Matrix& right_factor() const { return right_factor_; }

    const Matrix& basis() const { return emap_.basis; }
    const RealVector& generator_eigenvalues() const { return gen_eigs_; }
    std::int64_t steps() const { return m_; }

private:
    DiagPlusRankOne emap_;
    Matrix right_factor_;
    RealVector gen_eigs_;
    std::int64_t m_ = 0;
};

struct UpsilonState {
    DensityMatrix state;       // on [C2, C3, A1B1, B2]
    Matrix xi;                 // the C3-blocked state on [C3, A1B1, B2]
    Matrix k_generator;        // K = xi - Z xi Z, Hermitian with zero diagonal blocks
    Index body_dim = 0;        // dim of C3 x A1B1 x B2
    Index d_a = 0, d_b = 0;
    std::int64_t rho_samples = 1, sigma_samples = 1;  // per-copy cost
};

/// Literally simulates the Upsilon preparation circuit: Hadamards on C1 and
/// C3, CNOT C1->C2, controlled swap of (A1B1)<->(A2B2) on C3 = |0>, CZ on
/// (C2, C3), then tracing C1 and A2. Verified against the closed block form.
UpsilonState prepare_upsilon(const DensityMatrix& rho_pure, const DensityMatrix& sigma_pure,
                             Index d_a, Index d_b);

inline UpsilonState prepare_upsilon(const PureState& rho, const PureState& sigma) {
    Index d_a = rho.layout.factor(0).dim;
    Index d_b = rho.layout.factor(1).dim;
    return prepare_upsilon(DensityMatrix(rho.density(), rho.layout),
                           DensityMatrix(sigma.density(), sigma.layout), d_a, d_b);
}

/// Density matrix exponentiation: channel approximating e^{i t rho}(.)e^{-i t rho}
/// within diamond error delta using m = ceil(4 t^2 / delta) copies of rho.
struct DmeChannel {
    QuantumChannel channel;
    PartialSwapMixer mixer;
    DmePlan plan;
};
DmeChannel dme_exponentiate(const Matrix& rho, const DmePlan& plan, ResourceLedger& ledger,
                            const std::string& sample_counter = "rho.samples");

/// DMESUB: channel approximating e^{+-i t (xi0 - xi1)} from copies of a
/// C2-block-diagonal Upsilon; m = ceil(4 t^2 / delta) samples are charged.
struct DmesubChannel {
    QuantumChannel channel;
    PartialSwapMixer mixer;
    DmePlan plan;
    Matrix k_generator;  // 2 * (xi0 - xi1)... the exponent at t: t * (xi0 - xi1)
};
DmesubChannel dmesub(const UpsilonState& upsilon, double delta, double t, Direction direction,
                     ResourceLedger& ledger);

/// Block structure of the limiting unitary e^{iK} for K = |1><0| x L + h.c.:
/// [[cos_sv(L), i sin_sv(L^+)], [i sin_sv(L), cos_sv(L^+)]].
Matrix exp_ik_block_form(const Matrix& l);

}  // namespace uhlsim

#pragma once

#include <functional>
#include <vector>

#include "uhlsim/dme.hpp"
#include "uhlsim/linalg.hpp"

namespace uhlsim {

/// Register sizing for phase estimation: l = ceil(log2((1/delta)(2 + 1/(2 eta)))),
/// g = 2^l - 1 total applications of the target unitary.
struct PhaseEstimationPlan {
    int register_bits = 0;
    double eta = 0.0;
    std::int64_t g = 0;
    double delta = 0.0;
};

PhaseEstimationPlan make_qpe_plan(double delta, double eta = 1.0 / 6.0);

/// Exact textbook-QPE outcome distribution for a unitary target: the input is
/// decomposed on Q's eigenbasis and each eigenphase contributes the exact
/// Fejer-type kernel mass. p[y] for y = 0..2^l-1, estimating phase 2 pi y / 2^l.
std::vector<double> qpe_unitary_distribution(const Matrix& q, const Vector& input, int bits);

/// One controlled application of a (possibly non-unitary) target process on
/// [control(2) x system]: the per-outcome branch states evolve through it.
using CtrlStep = std::function<Matrix(const Matrix&)>;

/// Exact outcome distribution of semiclassical phase estimation with the
/// controlled target given as a channel step. Equals the textbook distribution
/// and never samples: measurement branches carry exact subnormalized states.
std::vector<double> qpe_channel_distribution(const Matrix& system_state, int bits,
                                             const CtrlStep& ctrl_step);

/// Controlled reflection (e^{i pi omega} in the limit) built by literal
/// density-matrix-exponentiation iteration from copies of omega.
struct CtrlReflection {
    CtrlReflection(const Matrix& omega, std::int64_t copies);
    /// acts on [ctrl(2) x system(d)] density matrices
    Matrix apply(const Matrix& y) const;
    std::int64_t copies() const { return m_; }

private:
    PartialSwapMixer mixer_;
    Matrix right_;  // off-diagonal control-block factor
    std::int64_t m_ = 0;
    Index d_ = 0;
};

}  // namespace uhlsim

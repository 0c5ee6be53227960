#pragma once

#include <optional>

#include "uhlsim/channels.hpp"
#include "uhlsim/states.hpp"

namespace uhlsim {

/// F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1^2 and its square root.
struct FidelityResult {
    double fidelity = 0.0;
    double sqrt_fidelity = 0.0;
};
FidelityResult fidelity_pair(const Matrix& rho, const Matrix& sigma);

inline double fidelity_to_pure(const Matrix& rho, const Vector& phi) {
    return std::abs((phi.adjoint() * rho * phi)(0, 0));
}

double trace_distance(const Matrix& rho, const Matrix& sigma);  // (1/2)||rho - sigma||_1

/// Spectrum statistics of sqrt(sigma) sqrt(rho).
struct SpectrumStats {
    std::optional<double> s_min;  // smallest nonzero singular value (absent if rank 0)
    Index r = 0;                  // rank of sqrt(sigma) sqrt(rho)
    double rho_min = 0.0;         // smallest nonzero eigenvalue of rho
    double sigma_min = 0.0;
    double kappa_rho = 0.0;  // 1 / rho_min
    double kappa_sigma = 0.0;
    Index r_rho = 0;
    Index r_sigma = 0;
    double sqrt_fidelity = 0.0;
};
SpectrumStats spectrum_stats(const Matrix& rho, const Matrix& sigma);

/// Diamond distance (1/2)||T1 - T2||_diamond.
/// `lower_bound` always holds (maximally entangled input plus a polished
/// random-input sweep). `exact` is the converged SDP value, reported when the
/// Choi dimension is at most `exact_dim_cap` and the primal-dual gap closed
/// below `tol`; `upper_bound` is a certified dual bound valid at any size.
struct DiamondResult {
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    std::optional<double> exact;
    int iterations = 0;
    double gap = 0.0;
};

struct DiamondOptions {
    double tol = 1e-6;
    int max_iterations = 50000;
    Index exact_dim_cap = 64;  // Choi dimension cap for reporting `exact`
    double early_exit_upper = -1.0;  // stop once upper_bound <= this (if >= 0)
    int sweep_points = 0;            // extra random pure-input sweep size
    std::uint64_t sweep_seed = 1;
};

DiamondResult diamond_distance(const QuantumChannel& t1, const QuantumChannel& t2,
                               DiamondOptions opts = {});

/// Same solver on a precomputed Choi difference J (on in x out, with
/// block structure choi(i*dout..,(j*dout..) = T(|i><j|)).
DiamondResult diamond_from_choi(const Matrix& choi_diff, Index d_in, Index d_out,
                                DiamondOptions opts = {});

/// Brute-force lower bound: max over random pure inputs psi on R x A (d_R = d_A)
/// of the output trace distance, with local polishing.
double diamond_lower_bound_sweep(const QuantumChannel& t1, const QuantumChannel& t2, int points,
                                 std::uint64_t seed, int polish_iterations = 200);

}  // namespace uhlsim

#include "uhlsim/qpe.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace uhlsim {

PhaseEstimationPlan make_qpe_plan(double delta, double eta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("qpe plan: delta in (0,1)");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("qpe plan: eta in (0,1)");
    PhaseEstimationPlan plan;
    plan.delta = delta;
    plan.eta = eta;
    plan.register_bits =
        static_cast<int>(std::ceil(std::log2((1.0 / delta) * (2.0 + 1.0 / (2.0 * eta)))));
    plan.g = (std::int64_t{1} << plan.register_bits) - 1;
    return plan;
}

std::vector<double> qpe_unitary_distribution(const Matrix& q, const Vector& input, int bits) {
    const Index n = static_cast<Index>(1) << bits;
    Eigen::ComplexEigenSolver<Matrix> es(q);
    Vector amps = es.eigenvectors().adjoint() * input;  // eigenvector basis is unitary (Q normal)
    std::vector<double> p(n, 0.0);
    for (Index j = 0; j < amps.size(); ++j) {
        double w = std::norm(amps(j));
        if (w < 1e-18) continue;
        double theta = std::arg(es.eigenvalues()(j));
        for (Index y = 0; y < n; ++y) {
            double d = theta - 2.0 * M_PI * static_cast<double>(y) / static_cast<double>(n);
            double half = 0.5 * d;
            double s = std::sin(half);
            double kernel;
            if (std::abs(s) < 1e-12) {
                kernel = 1.0;
            } else {
                double num = std::sin(static_cast<double>(n) * half);
                kernel = (num * num) / (static_cast<double>(n) * static_cast<double>(n) * s * s);
            }
            p[y] += w * kernel;
        }
    }
    return p;
}

std::vector<double> qpe_channel_distribution(const Matrix& system_state, int bits,
                                             const CtrlStep& ctrl_step) {
    // Semiclassical phase estimation: the qubit controlling Q^{2^k} is measured
    // after a phase correction conditioned on already-measured lower bits. The
    // branch tree carries exact subnormalized states; k runs from bits-1 down
    // to 0 and bit s of the outcome comes from stage s (s = 0 first).
    const Index d = system_state.rows();
    struct Branch {
        Matrix state;     // subnormalized system state
        std::int64_t y;   // measured bits so far (bit s of outcome, s < stage)
    };
    std::vector<Branch> branches{{system_state, 0}};
    Matrix h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);

    for (int stage = 0; stage < bits; ++stage) {
        const int power_exp = bits - 1 - stage;  // control Q^{2^{bits-1-stage}}
        const std::int64_t reps = std::int64_t{1} << power_exp;
        std::vector<Branch> next;
        next.reserve(branches.size() * 2);
        for (const Branch& br : branches) {
            if (br.state.trace().real() < 1e-16) {
                // still emit both zero-probability outcomes for completeness
                next.push_back({br.state / 2.0, br.y});
                next.push_back({br.state / 2.0, br.y | (std::int64_t{1} << stage)});
                continue;
            }
            // control in |+>, joint on [ctrl, system]
            Matrix joint = Matrix::Zero(2 * d, 2 * d);
            for (Index a = 0; a < 2; ++a)
                for (Index b = 0; b < 2; ++b)
                    joint.block(a * d, b * d, d, d) = 0.5 * br.state;
            for (std::int64_t r = 0; r < reps; ++r) joint = ctrl_step(joint);
            // phase correction e^{-2 pi i y / 2^{stage+1}} on |1> from measured bits
            double phi = -2.0 * M_PI * static_cast<double>(br.y) /
                         static_cast<double>(std::int64_t{1} << (stage + 1));
            Complex ph = std::exp(Complex(0.0, phi));
            joint.block(d, 0, d, d) *= ph;
            joint.block(0, d, d, d) *= std::conj(ph);
            // Hadamard on the control, then measure it
            Matrix rotated = Matrix::Zero(2 * d, 2 * d);
            for (Index a = 0; a < 2; ++a)
                for (Index b = 0; b < 2; ++b) {
                    Matrix acc = Matrix::Zero(d, d);
                    for (Index a2 = 0; a2 < 2; ++a2)
                        for (Index b2 = 0; b2 < 2; ++b2)
                            acc += h(a, a2) * std::conj(h(b, b2)) *
                                   joint.block(a2 * d, b2 * d, d, d);
                    rotated.block(a * d, b * d, d, d) = acc;
                }
            next.push_back({rotated.block(0, 0, d, d), br.y});
            next.push_back({rotated.block(d, d, d, d), br.y | (std::int64_t{1} << stage)});
        }
        branches = std::move(next);
    }
    std::vector<double> p(static_cast<std::size_t>(1) << bits, 0.0);
    for (const Branch& br : branches) p[static_cast<std::size_t>(br.y)] += br.state.trace().real();
    return p;
}

CtrlReflection::CtrlReflection(const Matrix& omega, std::int64_t copies)
    : mixer_(omega, omega, M_PI / static_cast<double>(copies), copies, Direction::forward),
      m_(copies),
      d_(omega.rows()) {
    right_ = mixer_.right_factor();
}

Matrix CtrlReflection::apply(const Matrix& y) const {
    if (y.rows() != 2 * d_)
        throw std::invalid_argument("CtrlReflection: expects a [ctrl x system] state");
    Matrix out(2 * d_, 2 * d_);
    out.block(0, 0, d_, d_) = y.block(0, 0, d_, d_);
    out.block(d_, d_, d_, d_) = mixer_.apply(y.block(d_, d_, d_, d_));
    // per-step blocks: Y01 -> Y01 (cI - i s omega), Y10 its adjoint on the left
    out.block(0, d_, d_, d_) = y.block(0, d_, d_, d_) * right_;
    out.block(d_, 0, d_, d_) = right_.adjoint() * y.block(d_, 0, d_, d_);
    return out;
}

}  // namespace uhlsim

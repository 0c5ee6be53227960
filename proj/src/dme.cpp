#include "uhlsim/dme.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace uhlsim {

DmePlan make_dme_plan(double t, double delta, Direction direction) {
    if (!(delta > 0.0)) throw std::invalid_argument("dme plan: delta must be positive");
    if (t < delta / 4.0) throw std::invalid_argument("dme plan: requires t >= delta/4");
    DmePlan plan;
    plan.t = t;
    plan.delta = delta;
    plan.m = static_cast<std::int64_t>(std::ceil(4.0 * t * t / delta));
    plan.step = t / static_cast<double>(plan.m);
    plan.direction = direction;
    return plan;
}

PartialSwapMixer::PartialSwapMixer(const Matrix& generator_diff, const Matrix& generator_sum,
                                   double step, std::int64_t m, Direction direction)
    : m_(m) {
    const double sgn = direction == Direction::forward ? 1.0 : -1.0;
    const double c = std::cos(step), s = sgn * std::sin(step);
    Eigen::SelfAdjointEigenSolver<Matrix> es((generator_diff + generator_diff.adjoint()) / 2.0);
    gen_eigs_ = es.eigenvalues();
    const Matrix& q = es.eigenvectors();
    const Index d = q.rows();

    // Single step in D's eigenbasis:
    //   E(X)_{ab} = nu_{ab) X_{ab} + s^2 S_{ab} tr X,  nu_{ab} = c^2 + i c s (d_a - d_b).
    // m steps: mu = nu^m, rank-one term = s^2 * (sum_k nu^k) .* S.
    Matrix nu(d, d), num(d, d), geo(d, d);
    for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b) {
            Complex v = Complex(c * c, 0.0) + Complex(0.0, c * s * (gen_eigs_(a) - gen_eigs_(b)));
            nu(a, b) = v;
            Complex vm = std::pow(v, static_cast<double>(m));
            num(a, b) = vm;
            geo(a, b) = std::abs(v - 1.0) < 1e-15 ? Complex(static_cast<double>(m), 0.0)
                                                  : (1.0 - vm) / (1.0 - v);
        }
    Matrix s_tilde = q.adjoint() * generator_sum * q;
    DiagPlusRankOne emap;
    emap.basis = q;
    emap.mu = num;
    emap.r = (s * s) * geo.cwiseProduct(s_tilde);
    emap_ = std::move(emap);

    // Controlled variant, off-diagonal control block: per step Y01 -> Y01 (cI - i s D).
    Vector diag(d);
    for (Index a = 0; a < d; ++a)
        diag(a) = std::pow(Complex(c, -s * gen_eigs_(a)), static_cast<double>(m));
    right_factor_ = q * diag.asDiagonal() * q.adjoint();
}

UpsilonState prepare_upsilon(const DensityMatrix& rho_pure, const DensityMatrix& sigma_pure,
                             Index d_a, Index d_b) {
    const Index dd = d_a * d_b;
    if (rho_pure.dim() != dd || sigma_pure.dim() != dd)
        throw std::invalid_argument("prepare_upsilon: state layout mismatch");

    // Registers [C1, C2, C3, A1, B1, A2, B2].
    DimLayout lay = DimLayout::single("C1", 2)
                        .tensor(DimLayout::single("C2", 2))
                        .tensor(DimLayout::single("C3", 2))
                        .tensor(DimLayout::single("A1", d_a))
                        .tensor(DimLayout::single("B1", d_b))
                        .tensor(DimLayout::single("A2", d_a))
                        .tensor(DimLayout::single("B2", d_b));

    Matrix h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    Matrix cnot(4, 4);
    cnot << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
    Matrix cz = Matrix::Identity(4, 4);
    cz(3, 3) = -1.0;

    // open-controlled swap of (A1 B1) <-> (A2 B2) on C3
    DimLayout pair_lay = DimLayout::single("C3", 2)
                             .tensor(DimLayout::single("P1", dd))
                             .tensor(DimLayout::single("P2", dd));
    Matrix swap_pair = swap_operator(pair_lay.without({"C3"}), "P1", "P2");
    Matrix cswap_open = Matrix::Zero(2 * dd * dd, 2 * dd * dd);
    cswap_open.topLeftCorner(dd * dd, dd * dd) = swap_pair;
    cswap_open.bottomRightCorner(dd * dd, dd * dd) = Matrix::Identity(dd * dd, dd * dd);

    Matrix zero2 = Matrix::Zero(2, 2);
    zero2(0, 0) = 1.0;
    Matrix state = tensor(tensor(tensor(zero2, zero2), zero2),
                          tensor(rho_pure.matrix, sigma_pure.matrix));

    auto conj_apply = [&](const Matrix& gate, const std::vector<std::string>& regs) {
        Matrix g = embed(gate, lay, regs);
        state = g * state * g.adjoint();
    };
    conj_apply(h, {"C1"});
    conj_apply(cnot, {"C1", "C2"});
    conj_apply(h, {"C3"});
    // treat (A1,B1) and (A2,B2) as fused pairs for the controlled swap
    {
        DimLayout fused = DimLayout::single("C1", 2)
                              .tensor(DimLayout::single("C2", 2))
                              .tensor(DimLayout::single("C3", 2))
                              .tensor(DimLayout::single("P1", dd))
                              .tensor(DimLayout::single("P2", dd));
        Matrix g = embed(cswap_open, fused, {"C3", "P1", "P2"});
        state = g * state * g.adjoint();
    }
    conj_apply(cz, {"C2", "C3"});

    Matrix upsilon = partial_trace(state, lay, {"C1", "A2"});
    DimLayout up_lay = DimLayout::single("C2", 2)
                           .tensor(DimLayout::single("C3", 2))
                           .tensor(DimLayout::single("AB1", dd))
                           .tensor(DimLayout::single("B2", d_b));

    UpsilonState out;
    out.state = DensityMatrix(upsilon, up_lay, 1e-7);
    out.body_dim = 2 * dd * d_b;
    out.d_a = d_a;
    out.d_b = d_b;
    // xi = <0|_{C2} Upsilon |0>_{C2} * 2  (the C2 = 0 block)
    out.xi = 2.0 * upsilon.topLeftCorner(out.body_dim, out.body_dim);
    Matrix z_body = Matrix::Identity(out.body_dim, out.body_dim);
    for (Index i = out.body_dim / 2; i < out.body_dim; ++i) z_body(i, i) = -1.0;
    out.k_generator = out.xi - z_body * out.xi * z_body;
    return out;
}

DmeChannel dme_exponentiate(const Matrix& rho, const DmePlan& plan, ResourceLedger& ledger,
                            const std::string& sample_counter) {
    PartialSwapMixer mixer(rho, rho, plan.step, plan.m,
                           plan.direction);
    ledger.charge(sample_counter, plan.m);
    ledger.record_bound(sample_counter, static_cast<double>(plan.m),
                        "m = ceil(4 t^2 / delta)");
    DimLayout lay = DimLayout::single("A", rho.rows());
    QuantumChannel chan = QuantumChannel::from_applier(
        [mixer](const Matrix& x) { return mixer.apply(x); }, lay, lay);
    return DmeChannel{std::move(chan), std::move(mixer), plan};
}

DmesubChannel dmesub(const UpsilonState& upsilon, double delta, double t, Direction direction,
                     ResourceLedger& ledger) {
    const Index body = upsilon.body_dim;
    const Matrix& up = upsilon.state.matrix;
    // block-form precondition: the C2 off-diagonal blocks must vanish
    double offdiag = up.topRightCorner(body, body).cwiseAbs().maxCoeff();
    if (offdiag > 1e-9)
        throw std::invalid_argument("dmesub: state is not C2-block-diagonal");
    Matrix xi0 = up.topLeftCorner(body, body);
    Matrix xi1 = up.bottomRightCorner(body, body);
    if (std::abs((xi0.trace() + xi1.trace()).real() - 1.0) > 1e-9)
        throw std::invalid_argument("dmesub: subnormalized blocks must sum to trace one");

    DmePlan plan = make_dme_plan(t, delta, direction);
    Matrix diff = xi0 - xi1;
    Matrix sum = xi0 + xi1;
    PartialSwapMixer mixer(diff, sum, plan.step, plan.m, direction);
    ledger.charge("upsilon.samples", plan.m);
    ledger.charge("rho.samples", plan.m * upsilon.rho_samples);
    ledger.charge("sigma.samples", plan.m * upsilon.sigma_samples);

    DimLayout lay = DimLayout::single("body", body);
    QuantumChannel chan = QuantumChannel::from_applier(
        [mixer](const Matrix& x) { return mixer.apply(x); }, lay, lay);
    DmesubChannel out{std::move(chan), std::move(mixer), plan, t * diff};
    return out;
}

Matrix exp_ik_block_form(const Matrix& l) {
    Svd d = svd(l);
    const Index n = l.rows();
    Matrix cos_l = Matrix::Identity(n, n);   // cos_sv(L) = sum cos(s) |xi><xi| + kernel
    Matrix cos_ld = Matrix::Identity(n, n);  // cos_sv(L^+)
    Matrix sin_l = Matrix::Zero(n, n);
    Matrix sin_ld = Matrix::Zero(n, n);
    for (Index j = 0; j < d.s.size(); ++j) {
        double s = d.s(j);
        cos_l += (std::cos(s) - 1.0) * (d.v.col(j) * d.v.col(j).adjoint());
        cos_ld += (std::cos(s) - 1.0) * (d.u.col(j) * d.u.col(j).adjoint());
        sin_l += std::sin(s) * (d.u.col(j) * d.v.col(j).adjoint());
        sin_ld += std::sin(s) * (d.v.col(j) * d.u.col(j).adjoint());
    }
    Matrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = cos_l;
    out.topRightCorner(n, n) = Complex(0, 1) * sin_ld;
    out.bottomLeftCorner(n, n) = Complex(0, 1) * sin_l;
    out.bottomRightCorner(n, n) = cos_ld;
    return out;
}

}  // namespace uhlsim

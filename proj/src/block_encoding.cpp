#include "uhlsim/block_encoding.hpp"

#include <cmath>
#include <stdexcept>

namespace uhlsim {

double BlockEncoding::certificate_defect() const {
    return operator_norm(target - alpha * block());
}

BlockEncoding make_block_encoding(Matrix unitary, Index block_rows, Index block_cols, double alpha,
                                  int ancilla_qubits, Matrix target, double eps_budget) {
    BlockEncoding be;
    be.unitary = std::move(unitary);
    be.block_rows = block_rows;
    be.block_cols = block_cols;
    be.alpha = alpha;
    be.ancilla_qubits = ancilla_qubits;
    be.target = std::move(target);
    be.eps = eps_budget;
    Matrix defect = be.unitary.adjoint() * be.unitary -
                    Matrix::Identity(be.unitary.rows(), be.unitary.cols());
    if (defect.cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("block encoding: not unitary");
    if (be.certificate_defect() > eps_budget + 1e-9)
        throw std::invalid_argument("block encoding: certificate re-verification failed");
    return be;
}

BlockEncoding build_purified_difference_encoding(const StatePrepOracle& u_rho,
                                                 const StatePrepOracle& u_sigma,
                                                 ResourceLedger& ledger) {
    if (!u_rho.layout().same_dims(u_sigma.layout()))
        throw std::invalid_argument("purified difference encoding: oracle layout mismatch");
    if (u_rho.layout().size() != 2)
        throw std::invalid_argument("purified difference encoding: oracles must live on A x B");
    const Index d_a = u_rho.layout().factor(0).dim;
    const Index d_b = u_rho.layout().factor(1).dim;

    // Registers ordered [Ahat, Bhat, B]; the flag register Ahat Bhat leads.
    DimLayout lay = DimLayout::single("Ahat", d_a)
                        .tensor(DimLayout::single("Bhat", d_b))
                        .tensor(DimLayout::single("B", d_b));
    Matrix swap_bb = swap_operator(lay, "Bhat", "B");
    Matrix u_sig_e = embed(u_sigma.unitary(), lay, {"Ahat", "Bhat"});
    Matrix u_rho_e = embed(u_rho.unitary(), lay, {"Ahat", "Bhat"});
    Matrix w = u_rho_e.adjoint() * swap_bb * u_sig_e;

    ledger.charge(u_sigma.forward_counter(), 1);
    ledger.charge(u_rho.inverse_counter(), 1);

    Matrix m = cross_partial_trace_first(u_sigma.unitary().col(0), u_rho.unitary().col(0), d_a, d_b);
    BlockEncoding be = make_block_encoding(std::move(w), d_b, d_b, 1.0,
                                           static_cast<int>(std::ceil(std::log2(d_a * d_b))),
                                           std::move(m), 1e-9);
    be.eps = 0.0;  // exact by construction; the 1e-9 budget covers roundoff only
    be.forward_cost = {{u_sigma.forward_counter(), 1}, {u_rho.inverse_counter(), 1}};
    be.inverse_cost = {{u_sigma.inverse_counter(), 1}, {u_rho.forward_counter(), 1}};
    return be;
}

namespace {

BlockEncoding qsvt_apply_impl(const BlockEncoding& be, const std::function<double(double)>& poly,
                              int parity, std::int64_t degree, double poly_region_error,
                              ResourceLedger& ledger) {
    if (std::abs(be.alpha - 1.0) > 1e-12)
        throw std::invalid_argument("qsvt_apply: rescale the encoding to alpha = 1 first");
    Matrix block = be.block();
    Matrix transformed = poly_sv(poly, parity, block, 1e-6);
    Matrix dilated = dilate_contraction(transformed);

    std::int64_t fwd, inv;
    if (parity == -1) {
        fwd = (degree + 1) / 2;
        inv = (degree - 1) / 2;
    } else {
        fwd = degree / 2;
        inv = degree / 2;
    }
    for (const auto& [name, per_use] : be.forward_cost) ledger.charge(name, fwd * per_use);
    for (const auto& [name, per_use] : be.inverse_cost) ledger.charge(name, inv * per_use);

    // Certificate: the new target is P^(SV) of the recorded ideal target; the
    // deviation from the realized block obeys the QSVT robustness lemma.
    Matrix ideal = poly_sv(poly, parity, be.target, 1e-6);
    double mid = operator_norm((block + be.target) / 2.0);
    double eps_new = poly_region_error;
    if (be.eps > 0.0) {
        double denom = 1.0 - mid * mid;
        eps_new += (denom > 0.0 ? std::sqrt(2.0 / denom) : 2.0) * degree * be.eps;
    }
    BlockEncoding out = make_block_encoding(std::move(dilated), transformed.rows(),
                                            transformed.cols(), 1.0, be.ancilla_qubits + 1,
                                            std::move(ideal), eps_new + 1e-9);
    out.forward_cost.clear();
    out.inverse_cost.clear();
    auto add = [](std::map<std::string, std::int64_t>& dst,
                  const std::map<std::string, std::int64_t>& src, std::int64_t mult) {
        for (const auto& [name, val] : src) dst[name] += mult * val;
    };
    add(out.forward_cost, be.forward_cost, fwd);
    add(out.forward_cost, be.inverse_cost, inv);
    add(out.inverse_cost, be.forward_cost, inv);
    add(out.inverse_cost, be.inverse_cost, fwd);
    return out;
}

}  // namespace

BlockEncoding qsvt_apply(const BlockEncoding& be, const SignPolynomial& p,
                         ResourceLedger& ledger) {
    return qsvt_apply_impl(
        be, [&p](double x) { return p(x); }, -1, p.degree, p.grid_sign_error, ledger);
}

BlockEncoding qsvt_apply(const BlockEncoding& be, const SqrtPolynomial& p,
                         ResourceLedger& ledger) {
    return qsvt_apply_impl(
        be, [&p](double x) { return p(x); }, 1, p.degree, p.grid_error, ledger);
}

BlockEncoding product_encodings(const BlockEncoding& be1, const BlockEncoding& be2) {
    // Square-flag encodings of matrices on a shared system factor.
    if (be1.block_rows != be1.block_cols || be2.block_rows != be2.block_cols)
        throw std::invalid_argument("product_encodings: requires square encoded blocks");
    if (be1.block_rows != be2.block_rows)
        throw std::invalid_argument("product_encodings: dimension mismatch");
    const Index n = be1.block_rows;
    const Index f1 = be1.unitary.rows() / n;
    const Index f2 = be2.unitary.rows() / n;
    DimLayout lay = DimLayout::single("F1", f1)
                        .tensor(DimLayout::single("F2", f2))
                        .tensor(DimLayout::single("S", n));
    Matrix u1e = embed(be1.unitary, lay, {"F1", "S"});
    Matrix u2e = embed(be2.unitary, lay, {"F2", "S"});
    Matrix u = u1e * u2e;
    double alpha = be1.alpha * be2.alpha;
    double eps = be1.alpha * be2.eps + be2.alpha * be1.eps;
    Matrix target = be1.target * be2.target;
    BlockEncoding out = make_block_encoding(std::move(u), n, n, alpha,
                                            be1.ancilla_qubits + be2.ancilla_qubits,
                                            std::move(target), eps + 1e-9);
    out.eps = eps;
    for (const auto& [name, v] : be1.forward_cost) out.forward_cost[name] += v;
    for (const auto& [name, v] : be2.forward_cost) out.forward_cost[name] += v;
    for (const auto& [name, v] : be1.inverse_cost) out.inverse_cost[name] += v;
    for (const auto& [name, v] : be2.inverse_cost) out.inverse_cost[name] += v;
    return out;
}

}  // namespace uhlsim

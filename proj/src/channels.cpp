#include "uhlsim/channels.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace uhlsim {

double kraus_defect(const std::vector<Matrix>& kraus) {
    if (kraus.empty()) return 1.0;
    Matrix acc = Matrix::Zero(kraus[0].cols(), kraus[0].cols());
    for (const auto& k : kraus) acc += k.adjoint() * k;
    return (acc - Matrix::Identity(acc.rows(), acc.cols())).cwiseAbs().maxCoeff();
}

QuantumChannel QuantumChannel::from_kraus(std::vector<Matrix> kraus, DimLayout in, DimLayout out,
                                          double tol) {
    if (kraus.empty()) throw std::invalid_argument("channel: empty Kraus list");
    for (const auto& k : kraus)
        if (k.rows() != out.dim() || k.cols() != in.dim())
            throw std::invalid_argument("channel: Kraus shape mismatch");
    if (kraus_defect(kraus) > tol)
        throw std::invalid_argument("channel: Kraus completeness violated");
    QuantumChannel c;
    c.in_ = std::move(in);
    c.out_ = std::move(out);
    c.kraus_ = std::move(kraus);
    return c;
}

QuantumChannel QuantumChannel::from_stinespring(Matrix v, DimLayout in, DimLayout out,
                                                Index env_dim, std::string env_label, double tol) {
    if (v.rows() != out.dim() * env_dim || v.cols() != in.dim())
        throw std::invalid_argument("channel: Stinespring shape mismatch");
    Matrix defect = v.adjoint() * v - Matrix::Identity(v.cols(), v.cols());
    if (defect.cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("channel: Stinespring map is not an isometry");
    QuantumChannel c;
    c.in_ = std::move(in);
    c.out_ = std::move(out);
    c.stinespring_ = std::move(v);
    c.env_dim_ = env_dim;
    c.env_label_ = std::move(env_label);
    return c;
}

QuantumChannel QuantumChannel::from_applier(Applier f, DimLayout in, DimLayout out) {
    QuantumChannel c;
    c.in_ = std::move(in);
    c.out_ = std::move(out);
    c.applier_ = std::move(f);
    return c;
}

QuantumChannel QuantumChannel::from_unitary(const Matrix& u, DimLayout lay) {
    return from_kraus({u}, lay, lay, 1e-8);
}

QuantumChannel QuantumChannel::identity(const DimLayout& lay) {
    return from_unitary(Matrix::Identity(lay.dim(), lay.dim()), lay);
}

QuantumChannel QuantumChannel::depolarizing(double p, Index d) {
    // rho -> (1-p) rho + p I/d, written with d^2 Kraus operators from the
    // Weyl/Pauli twirl.
    std::vector<Matrix> kraus;
    kraus.push_back(std::sqrt(1.0 - p + p / (d * d)) * Matrix::Identity(d, d));
    Matrix x = Matrix::Zero(d, d), z = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
        x((i + 1) % d, i) = 1.0;
        z(i, i) = std::exp(Complex(0.0, 2.0 * M_PI * i / d));
    }
    Matrix xa = Matrix::Identity(d, d);
    for (Index a = 0; a < d; ++a) {
        Matrix zb = Matrix::Identity(d, d);
        for (Index b = 0; b < d; ++b) {
            if (!(a == 0 && b == 0))
                kraus.push_back(std::sqrt(p) / static_cast<double>(d) * (xa * zb));
            zb = z * zb;
        }
        xa = x * xa;
    }
    DimLayout lay = DimLayout::single("A", d);
    return from_kraus(std::move(kraus), lay, lay);
}

QuantumChannel QuantumChannel::dephasing(double p) {
    Matrix z(2, 2);
    z << 1, 0, 0, -1;
    std::vector<Matrix> kraus{std::sqrt(1.0 - p) * Matrix::Identity(2, 2), std::sqrt(p) * z};
    DimLayout lay = DimLayout::single("A", 2);
    return from_kraus(std::move(kraus), lay, lay);
}

QuantumChannel QuantumChannel::amplitude_damping(double gamma) {
    Matrix k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    k1 << 0, std::sqrt(gamma), 0, 0;
    DimLayout lay = DimLayout::single("A", 2);
    return from_kraus({k0, k1}, lay, lay);
}

QuantumChannel QuantumChannel::erasure(double p, Index d) {
    // Input d-dim, output (d+1)-dim with |d> the erasure flag.
    std::vector<Matrix> kraus;
    Matrix keep = Matrix::Zero(d + 1, d);
    keep.topLeftCorner(d, d) = std::sqrt(1.0 - p) * Matrix::Identity(d, d);
    kraus.push_back(keep);
    for (Index i = 0; i < d; ++i) {
        Matrix e = Matrix::Zero(d + 1, d);
        e(d, i) = std::sqrt(p);
        kraus.push_back(e);
    }
    return from_kraus(std::move(kraus), DimLayout::single("A", d),
                      DimLayout::single("B", d + 1));
}

QuantumChannel QuantumChannel::partial_trace_channel(const DimLayout& lay,
                                                     const std::vector<std::string>& traced) {
    DimLayout out = lay.without(traced);
    return from_applier([lay, traced](const Matrix& rho) { return partial_trace(rho, lay, traced); },
                        lay, out);
}

Matrix QuantumChannel::apply(const Matrix& rho) const {
    if (rho.rows() != in_.dim() || rho.cols() != in_.dim())
        throw std::invalid_argument("channel apply: input dimension mismatch");
    if (kraus_) {
        Matrix out = Matrix::Zero(out_.dim(), out_.dim());
        for (const auto& k : *kraus_) out += k * rho * k.adjoint();
        return out;
    }
    if (stinespring_) {
        Matrix big = (*stinespring_) * rho * stinespring_->adjoint();
        DimLayout big_lay = DimLayout::single("out", out_.dim()).tensor(
            DimLayout::single(env_label_, env_dim_));
        return partial_trace(big, big_lay, {env_label_});
    }
    if (applier_) return applier_(rho);
    throw std::runtime_error("channel apply: empty channel");
}

Matrix QuantumChannel::superoperator() const {
    const Index di = in_.dim(), dout = out_.dim();
    Matrix s(dout * dout, di * di);
    Matrix e = Matrix::Zero(di, di);
    for (Index j = 0; j < di; ++j)
        for (Index i = 0; i < di; ++i) {
            e(i, j) = 1.0;
            Matrix t = apply(e);
            e(i, j) = 0.0;
            // column-major vectorization: column index = j*di + i
            Index col = j * di + i;
            for (Index c = 0; c < dout; ++c)
                for (Index r = 0; r < dout; ++r) s(c * dout + r, col) = t(r, c);
        }
    return s;
}

Matrix QuantumChannel::choi() const {
    const Index di = in_.dim(), dout = out_.dim();
    Matrix c = Matrix::Zero(di * dout, di * dout);
    Matrix e = Matrix::Zero(di, di);
    for (Index i = 0; i < di; ++i)
        for (Index j = 0; j < di; ++j) {
            e(i, j) = 1.0;
            Matrix t = apply(e);
            e(i, j) = 0.0;
            c.block(i * dout, j * dout, dout, dout) = t;
        }
    return c;
}

const Matrix& QuantumChannel::stinespring_isometry() const {
    if (!stinespring_) throw std::runtime_error("channel: no Stinespring form stored");
    return *stinespring_;
}

QuantumChannel QuantumChannel::with_stinespring(std::string env_label) const {
    if (stinespring_) {
        QuantumChannel c = *this;
        c.env_label_ = std::move(env_label);
        return c;
    }
    std::vector<Matrix> ks = kraus();
    const Index di = in_.dim(), dout = out_.dim();
    const Index env = static_cast<Index>(ks.size());
    // V = sum_i K_i x |i>_env stacked so the env index is the fast (trailing) one.
    Matrix v = Matrix::Zero(dout * env, di);
    for (Index i = 0; i < env; ++i)
        for (Index r = 0; r < dout; ++r)
            for (Index c = 0; c < di; ++c) v(r * env + i, c) = ks[i](r, c);
    return from_stinespring(std::move(v), in_, out_, env, std::move(env_label));
}

std::vector<Matrix> QuantumChannel::kraus() const {
    if (kraus_) return *kraus_;
    if (stinespring_) {
        std::vector<Matrix> ks;
        const Index dout = out_.dim(), di = in_.dim();
        for (Index i = 0; i < env_dim_; ++i) {
            Matrix k(dout, di);
            for (Index r = 0; r < dout; ++r)
                for (Index c = 0; c < di; ++c) k(r, c) = (*stinespring_)(r * env_dim_ + i, c);
            ks.push_back(std::move(k));
        }
        return ks;
    }
    // Kraus from the Choi eigendecomposition (minimal rank).
    Matrix c = choi();
    Eigen::SelfAdjointEigenSolver<Matrix> es((c + c.adjoint()) / 2.0);
    std::vector<Matrix> ks;
    const Index di = in_.dim(), dout = out_.dim();
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    for (Index k = 0; k < es.eigenvalues().size(); ++k) {
        double lam = es.eigenvalues()(k);
        if (lam < top * 1e-12) continue;
        Matrix op(dout, di);
        for (Index i = 0; i < di; ++i)
            for (Index r = 0; r < dout; ++r) op(r, i) = std::sqrt(lam) * es.eigenvectors()(i * dout + r, k);
        ks.push_back(std::move(op));
    }
    return ks;
}

QuantumChannel QuantumChannel::complementary(const std::string& env_label) const {
    if (!stinespring_)
        throw std::invalid_argument(
            "complementary: channel has no chosen Stinespring dilation (convert first)");
    const Matrix& v = *stinespring_;
    DimLayout big_lay =
        DimLayout::single("out", out_.dim()).tensor(DimLayout::single(env_label_, env_dim_));
    DimLayout env_out = DimLayout::single(env_label, env_dim_);
    Matrix vc = v;
    DimLayout in = in_;
    Index dout = out_.dim();
    return from_applier(
        [vc, big_lay, dout](const Matrix& rho) {
            Matrix big = vc * rho * vc.adjoint();
            return partial_trace(big, big_lay, {"out"});
        },
        in_, env_out);
}

Matrix QuantumChannel::apply_adjoint(const Matrix& x) const {
    std::vector<Matrix> ks = kraus();
    Matrix out = Matrix::Zero(in_.dim(), in_.dim());
    for (const auto& k : ks) out += k.adjoint() * x * k;
    return out;
}

QuantumChannel QuantumChannel::compose_after(const QuantumChannel& first) const {
    if (first.out_dim() != in_dim())
        throw std::invalid_argument("channel compose: dimension mismatch");
    QuantumChannel self = *this, pre = first;
    return from_applier([self, pre](const Matrix& rho) { return self.apply(pre.apply(rho)); },
                        first.in_, out_);
}

QuantumChannel QuantumChannel::tensor_with(const QuantumChannel& other) const {
    QuantumChannel a = *this, b = other;
    DimLayout in = in_.tensor(other.in_);
    DimLayout out = out_.tensor(other.out_);
    const Index dia = in_dim(), dib = other.in_dim();
    return from_applier(
        [a, b, dia, dib](const Matrix& rho) {
            // apply a on the first factor, b on the second
            const Index doa = a.out_dim(), dob = b.out_dim();
            // step 1: apply b on second factor
            Matrix mid = Matrix::Zero(dia * dob, dia * dob);
            for (Index i = 0; i < dia; ++i)
                for (Index j = 0; j < dia; ++j) {
                    Matrix blk = rho.block(i * dib, j * dib, dib, dib);
                    mid.block(i * dob, j * dob, dob, dob) = b.apply(blk);
                }
            // step 2: apply a on first factor
            Matrix out = Matrix::Zero(doa * dob, doa * dob);
            for (Index r = 0; r < dob; ++r)
                for (Index c = 0; c < dob; ++c) {
                    Matrix blk(dia, dia);
                    for (Index i = 0; i < dia; ++i)
                        for (Index j = 0; j < dia; ++j) blk(i, j) = mid(i * dob + r, j * dob + c);
                    Matrix t = a.apply(blk);
                    for (Index i = 0; i < doa; ++i)
                        for (Index j = 0; j < doa; ++j) out(i * dob + r, j * dob + c) = t(i, j);
                }
            return out;
        },
        in, out);
}

}  // namespace uhlsim

#include "uhlsim/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uhlsim {

Svd svd(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Svd out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    // Phase convention: first nonzero component of each left vector real positive.
    for (Index j = 0; j < out.u.cols(); ++j) {
        Index lead = -1;
        for (Index i = 0; i < out.u.rows(); ++i) {
            if (std::abs(out.u(i, j)) > 1e-12) {
                lead = i;
                break;
            }
        }
        if (lead < 0) continue;
        Complex z = out.u(lead, j);
        Complex phase = z / std::abs(z);
        // dividing both columns by the same unit phase keeps u s v^+ invariant
        out.u.col(j) /= phase;
        out.v.col(j) /= phase;
    }
    return out;
}

Matrix tensor(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Vector tensor(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Matrix sign_sv(const Matrix& m) {
    if (m.size() == 0) return m;
    Svd d = svd(m);
    if (d.s.size() == 0 || d.s(0) <= 0.0) return Matrix::Zero(m.rows(), m.cols());
    const double floor = d.s(0) * kSingularValueFloor;
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (Index j = 0; j < d.s.size(); ++j)
        if (d.s(j) > floor) out += d.u.col(j) * d.v.col(j).adjoint();
    return out;
}

Matrix poly_sv(const std::function<double(double)>& p, int parity, const Matrix& m,
               double sv_tol) {
    if (parity != 1 && parity != -1)
        throw std::invalid_argument("poly_sv: polynomial must have definite parity");
    Svd d = svd(m);
    if (d.s.size() > 0 && d.s(0) > 1.0 + sv_tol)
        throw std::invalid_argument("poly_sv: singular values must lie in [0, 1]");
    if (parity == -1) {
        // Odd: sum P(s_j) |eta_j><xi_j| over the thin SVD; P(0) = 0 so the
        // truncated directions contribute nothing.
        Matrix out = Matrix::Zero(m.rows(), m.cols());
        for (Index j = 0; j < d.s.size(); ++j)
            out += p(std::min(d.s(j), 1.0)) * (d.u.col(j) * d.v.col(j).adjoint());
        return out;
    }
    // Even: sum P(s_j) |xi_j><xi_j| over the full right singular basis.
    // The thin SVD of an r x c matrix gives min(r, c) right vectors; directions
    // in the kernel carry singular value 0 and weight P(0).
    Matrix out = Matrix::Zero(m.cols(), m.cols());
    const double p0 = p(0.0);
    out += p0 * Matrix::Identity(m.cols(), m.cols());
    for (Index j = 0; j < d.s.size(); ++j)
        out += (p(std::min(d.s(j), 1.0)) - p0) * (d.v.col(j) * d.v.col(j).adjoint());
    return out;
}

namespace {

struct TraceSplit {
    std::vector<Index> keep_dims;
    std::vector<Index> trace_dims;
    std::vector<int> is_traced;  // per factor
};

TraceSplit split(const DimLayout& layout, const std::vector<std::string>& traced) {
    TraceSplit s;
    s.is_traced.assign(layout.size(), 0);
    for (const auto& label : traced) {
        s.is_traced[layout.position(label)] = 1;  // throws on unknown label
    }
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (s.is_traced[i])
            s.trace_dims.push_back(layout.factor(i).dim);
        else
            s.keep_dims.push_back(layout.factor(i).dim);
    }
    return s;
}

}  // namespace

Matrix partial_trace(const Matrix& m, const DimLayout& layout,
                     const std::vector<std::string>& traced) {
    const Index d = layout.dim();
    if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument("partial_trace: matrix does not match layout dimension");
    TraceSplit s = split(layout, traced);
    Index dk = 1, dt = 1;
    for (Index x : s.keep_dims) dk *= x;
    for (Index x : s.trace_dims) dt *= x;

    const std::size_t n = layout.size();
    std::vector<Index> dims(n), stride(n);
    for (std::size_t i = 0; i < n; ++i) dims[i] = layout.factor(i).dim;
    // strides of full index
    Index acc = 1;
    for (std::size_t i = n; i-- > 0;) {
        stride[i] = acc;
        acc *= dims[i];
    }
    // map (keep index, trace index) -> full index
    std::vector<Index> keep_stride, trace_stride, keep_dim, trace_dim;
    for (std::size_t i = 0; i < n; ++i) {
        if (s.is_traced[i]) {
            trace_stride.push_back(stride[i]);
            trace_dim.push_back(dims[i]);
        } else {
            keep_stride.push_back(stride[i]);
            keep_dim.push_back(dims[i]);
        }
    }
    auto compose = [](Index flat, const std::vector<Index>& fdims,
                      const std::vector<Index>& fstride) {
        Index full = 0;
        for (std::size_t i = fdims.size(); i-- > 0;) {
            full += (flat % fdims[i]) * fstride[i];
            flat /= fdims[i];
        }
        return full;
    };

    Matrix out = Matrix::Zero(dk, dt == 0 ? dk : dk);
    std::vector<Index> keep_map(dk), trace_map(dt);
    for (Index k = 0; k < dk; ++k) keep_map[k] = compose(k, keep_dim, keep_stride);
    for (Index t = 0; t < dt; ++t) trace_map[t] = compose(t, trace_dim, trace_stride);
    for (Index r = 0; r < dk; ++r)
        for (Index c = 0; c < dk; ++c) {
            Complex sum = 0.0;
            for (Index t = 0; t < dt; ++t) sum += m(keep_map[r] + trace_map[t], keep_map[c] + trace_map[t]);
            out(r, c) = sum;
        }
    return out;
}

Matrix swap_operator(const DimLayout& layout, const std::string& a, const std::string& b) {
    const std::size_t pa = layout.position(a), pb = layout.position(b);
    if (layout.factor(pa).dim != layout.factor(pb).dim)
        throw std::invalid_argument("swap_operator: factor dimensions differ");
    const Index d = layout.dim();
    const std::size_t n = layout.size();
    std::vector<Index> dims(n), stride(n);
    for (std::size_t i = 0; i < n; ++i) dims[i] = layout.factor(i).dim;
    Index acc = 1;
    for (std::size_t i = n; i-- > 0;) {
        stride[i] = acc;
        acc *= dims[i];
    }
    Matrix f = Matrix::Zero(d, d);
    for (Index x = 0; x < d; ++x) {
        // decompose, swap digits at pa/pb
        Index rest = x, ia = 0, ib = 0;
        std::vector<Index> digit(n);
        for (std::size_t i = n; i-- > 0;) {
            digit[i] = rest % dims[i];
            rest /= dims[i];
        }
        ia = digit[pa];
        ib = digit[pb];
        Index y = x + (ib - ia) * stride[pa] + (ia - ib) * stride[pb];
        f(y, x) = 1.0;
    }
    return f;
}

Matrix permute_factors(const DimLayout& layout, const std::vector<std::string>& order) {
    if (order.size() != layout.size())
        throw std::invalid_argument("permute_factors: order must list every factor");
    const std::size_t n = layout.size();
    std::vector<std::size_t> src(n);
    for (std::size_t i = 0; i < n; ++i) src[i] = layout.position(order[i]);
    std::vector<Index> dims(n), stride(n);
    for (std::size_t i = 0; i < n; ++i) dims[i] = layout.factor(i).dim;
    Index acc = 1;
    for (std::size_t i = n; i-- > 0;) {
        stride[i] = acc;
        acc *= dims[i];
    }
    const Index d = layout.dim();
    Matrix p = Matrix::Zero(d, d);
    for (Index x = 0; x < d; ++x) {
        Index rest = x;
        std::vector<Index> digit(n);
        for (std::size_t i = n; i-- > 0;) {
            digit[i] = rest % dims[i];
            rest /= dims[i];
        }
        // new index: digits in permuted order, mixed radix of permuted dims
        Index y = 0;
        for (std::size_t i = 0; i < n; ++i) y = y * dims[src[i]] + digit[src[i]];
        p(y, x) = 1.0;
    }
    return p;
}

Matrix embed(const Matrix& op, const DimLayout& layout, const std::vector<std::string>& acting) {
    Index da = 1;
    for (const auto& l : acting) da *= layout.dim_of(l);
    if (op.rows() != da || op.cols() != da)
        throw std::invalid_argument("embed: operator does not match the named factors");
    // permutation bringing the acting factors to the front, in the given order
    std::vector<std::string> order = acting;
    for (const auto& f : layout.factors()) {
        bool used = false;
        for (const auto& l : acting)
            if (f.label == l) used = true;
        if (!used) order.push_back(f.label);
    }
    Matrix p = permute_factors(layout, order);
    const Index drest = layout.dim() / da;
    Matrix big = tensor(op, Matrix::Identity(drest, drest));
    return p.adjoint() * big * p;
}

Matrix dilate_contraction(const Matrix& a, double clamp_tol) {
    const Index n = std::max(a.rows(), a.cols());
    Matrix ap = Matrix::Zero(n, n);
    ap.topLeftCorner(a.rows(), a.cols()) = a;
    Svd d = svd(ap);
    for (Index j = 0; j < d.s.size(); ++j) {
        if (d.s(j) > 1.0 + clamp_tol)
            throw std::invalid_argument("dilate_contraction: operator norm exceeds 1");
        d.s(j) = std::min(d.s(j), 1.0);
    }
    RealVector c = (RealVector::Ones(d.s.size()) - d.s.cwiseProduct(d.s)).cwiseMax(0.0).cwiseSqrt();
    Matrix acl = d.u * d.s.asDiagonal() * d.v.adjoint();
    Matrix s_left = d.u * c.asDiagonal() * d.u.adjoint();   // sqrt(I - A A^+)
    Matrix s_right = d.v * c.asDiagonal() * d.v.adjoint();  // sqrt(I - A^+ A)
    Matrix u(2 * n, 2 * n);
    u.topLeftCorner(n, n) = acl;
    u.topRightCorner(n, n) = s_left;
    u.bottomLeftCorner(n, n) = s_right;
    u.bottomRightCorner(n, n) = -acl.adjoint();
    return u;
}

Matrix exp_i_hermitian(const Matrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
    Vector phases(es.eigenvalues().size());
    for (Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(Complex(0.0, t * es.eigenvalues()(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix hermitian_power(const Matrix& h, double p, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
    const RealVector& ev = es.eigenvalues();
    const double top = ev.size() ? std::abs(ev(ev.size() - 1)) : 0.0;
    RealVector f = RealVector::Zero(ev.size());
    for (Index i = 0; i < ev.size(); ++i) {
        double lam = ev(i);
        if (lam > top * rel_tol && lam > 0.0) f(i) = std::pow(lam, p);
    }
    return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> solver(m);
    return solver.singularValues().size() ? solver.singularValues()(0) : 0.0;
}

double trace_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> solver(m);
    return solver.singularValues().sum();
}

Matrix unitary_from_first_column(const Vector& v) {
    const Index d = v.size();
    Matrix m = Matrix::Identity(d, d);
    m.col(0) = v;
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ();
    // Fix the phase of the first column to equal v exactly.
    Complex overlap = q.col(0).adjoint() * v;
    if (std::abs(overlap) < 0.5) throw std::runtime_error("unitary_from_first_column: QR failed");
    q.col(0) = v;
    // re-orthonormalize the rest against v
    for (Index j = 1; j < d; ++j) {
        for (Index k = 0; k < j; ++k) q.col(j) -= (q.col(k).adjoint() * q.col(j))(0, 0) * q.col(k);
        q.col(j).normalize();
    }
    return q;
}

Matrix complete_isometry(const Matrix& v) {
    const Index d = v.rows(), k = v.cols();
    if (k > d) throw std::invalid_argument("complete_isometry: more columns than rows");
    Matrix u(d, d);
    u.leftCols(k) = v;
    // Gram-Schmidt the remaining standard basis vectors against the isometry.
    Index filled = k;
    for (Index cand = 0; cand < d && filled < d; ++cand) {
        Vector w = Vector::Zero(d);
        w(cand) = 1.0;
        for (Index j = 0; j < filled; ++j) w -= (u.col(j).adjoint() * w)(0, 0) * u.col(j);
        double nrm = w.norm();
        if (nrm > 1e-7) {
            u.col(filled++) = w / nrm;
        }
    }
    if (filled != d) throw std::runtime_error("complete_isometry: completion failed");
    return u;
}

Vector basis_state(Index dim, Index k) {
    Vector v = Vector::Zero(dim);
    v(k) = 1.0;
    return v;
}

bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace uhlsim

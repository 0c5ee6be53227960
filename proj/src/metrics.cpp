#include "uhlsim/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "uhlsim/rng.hpp"

namespace uhlsim {

FidelityResult fidelity_pair(const Matrix& rho, const Matrix& sigma) {
    Matrix prod = sqrt_psd(rho) * sqrt_psd(sigma);
    double sq = trace_norm(prod);
    return FidelityResult{sq * sq, sq};
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
    return 0.5 * trace_norm(rho - sigma);
}

SpectrumStats spectrum_stats(const Matrix& rho, const Matrix& sigma) {
    SpectrumStats st;
    Eigen::SelfAdjointEigenSolver<Matrix> er((rho + rho.adjoint()) / 2.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es((sigma + sigma.adjoint()) / 2.0);
    auto min_nonzero = [](const RealVector& ev, Index& rank) {
        double top = ev.cwiseAbs().maxCoeff();
        double mn = 0.0;
        rank = 0;
        for (Index i = 0; i < ev.size(); ++i) {
            if (ev(i) > top * kSingularValueFloor) {
                ++rank;
                if (mn == 0.0 || ev(i) < mn) mn = ev(i);
            }
        }
        return mn;
    };
    st.rho_min = min_nonzero(er.eigenvalues(), st.r_rho);
    st.sigma_min = min_nonzero(es.eigenvalues(), st.r_sigma);
    st.kappa_rho = st.rho_min > 0 ? 1.0 / st.rho_min : 0.0;
    st.kappa_sigma = st.sigma_min > 0 ? 1.0 / st.sigma_min : 0.0;
    Matrix m = sqrt_psd(sigma) * sqrt_psd(rho);
    Svd d = svd(m);
    st.r = d.rank();
    if (st.r > 0) st.s_min = d.s(st.r - 1);
    st.sqrt_fidelity = d.s.sum();
    return st;
}

namespace {

// Primal value f(rho) = tr_+[(sqrt(rho) x I) J (sqrt(rho) x I)] together with
// the dual certificate Z(rho) = (sqrt(rho) x I)^{-1} X_+ (sqrt(rho) x I)^{-1},
// whose partial trace upper-bounds the diamond distance from any rho > 0.
struct Evaluation {
    double primal = 0.0;
    double upper = 0.0;
    Matrix supergradient;  // tr_B Z(rho), d_A x d_A
};

Evaluation evaluate(const Matrix& j, const Matrix& rho, Index d_a, Index d_b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0);
    RealVector lam = es.eigenvalues().cwiseMax(1e-14);
    RealVector rt = lam.cwiseSqrt();
    Matrix q = es.eigenvectors();
    Matrix sq = q * rt.asDiagonal() * q.adjoint();
    Matrix sqinv = q * rt.cwiseInverse().asDiagonal() * q.adjoint();
    Matrix s = tensor(sq, Matrix::Identity(d_b, d_b));
    Matrix sinv = tensor(sqinv, Matrix::Identity(d_b, d_b));
    Matrix x = s * j * s;
    Eigen::SelfAdjointEigenSolver<Matrix> ex((x + x.adjoint()) / 2.0);
    Evaluation out;
    Matrix xplus = Matrix::Zero(x.rows(), x.cols());
    for (Index k = 0; k < ex.eigenvalues().size(); ++k) {
        double l = ex.eigenvalues()(k);
        if (l > 0) {
            out.primal += l;
            xplus += l * (ex.eigenvectors().col(k) * ex.eigenvectors().col(k).adjoint());
        }
    }
    Matrix z = sinv * xplus * sinv;
    DimLayout lay = DimLayout::single("A", d_a).tensor(DimLayout::single("B", d_b));
    out.supergradient = partial_trace(z, lay, {"B"});
    Eigen::SelfAdjointEigenSolver<Matrix> eg(
        (out.supergradient + out.supergradient.adjoint()) / 2.0);
    out.upper = eg.eigenvalues().maxCoeff();
    return out;
}

double primal_only(const Matrix& j, const Matrix& rho, Index d_b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0);
    RealVector rt = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix sq = es.eigenvectors() * rt.asDiagonal() * es.eigenvectors().adjoint();
    Matrix s = tensor(sq, Matrix::Identity(d_b, d_b));
    Matrix x = s * j * s;
    Eigen::SelfAdjointEigenSolver<Matrix> ex((x + x.adjoint()) / 2.0);
    double v = 0.0;
    for (Index k = 0; k < ex.eigenvalues().size(); ++k) v += std::max(0.0, ex.eigenvalues()(k));
    return v;
}

}  // namespace

namespace {

// Frank-Wolfe ascent of the concave primal with golden-section line search.
// Returns the best state found; `evals` counts primal evaluations.
Matrix maximize_primal(const Matrix& j, Index d_a, Index d_b, Matrix rho, int iterations,
                       double stall_tol, int& evals) {
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double f_cur = primal_only(j, rho, d_b);
    ++evals;
    for (int it = 0; it < iterations; ++it) {
        Evaluation ev = evaluate(j, rho, d_a, d_b);
        ++evals;
        if (ev.primal > f_cur) f_cur = ev.primal;
        if (ev.upper - ev.primal <= stall_tol) break;
        Eigen::SelfAdjointEigenSolver<Matrix> eg(
            (ev.supergradient + ev.supergradient.adjoint()) / 2.0);
        Vector v = eg.eigenvectors().col(eg.eigenvalues().size() - 1);
        Matrix vertex = v * v.adjoint();
        auto along = [&](double g) {
            return primal_only(j, (1.0 - g) * rho + g * vertex, d_b);
        };
        double lo = 0.0, hi = 1.0;
        double m1 = hi - golden * (hi - lo), m2 = lo + golden * (hi - lo);
        double f1 = along(m1), f2 = along(m2);
        evals += 2;
        for (int ls = 0; ls < 40 && hi - lo > 1e-12; ++ls) {
            if (f1 < f2) {
                lo = m1;
                m1 = m2;
                f1 = f2;
                m2 = lo + golden * (hi - lo);
                f2 = along(m2);
            } else {
                hi = m2;
                m2 = m1;
                f2 = f1;
                m1 = hi - golden * (hi - lo);
                f1 = along(m1);
            }
            ++evals;
        }
        double g = 0.5 * (lo + hi);
        double f_new = along(g);
        ++evals;
        if (f_new <= f_cur + 1e-15) break;  // stalled
        rho = (1.0 - g) * rho + g * vertex;
        rho = (rho + rho.adjoint()) / 2.0;
        rho /= rho.trace().real();
        f_cur = f_new;
    }
    return rho;
}

}  // namespace

DiamondResult diamond_from_choi(const Matrix& choi_diff, Index d_in, Index d_out,
                                DiamondOptions opts) {
    DiamondResult res;
    const Index d_a = d_in, d_b = d_out;
    const double eps_dual = 1e-12;
    auto dual_eval = [&](const Matrix& rho) {
        Matrix reg = (1.0 - eps_dual) * rho +
                     eps_dual * Matrix::Identity(d_a, d_a) / static_cast<double>(d_a);
        return evaluate(choi_diff, reg, d_a, d_b);
    };

    Matrix rho = Matrix::Identity(d_a, d_a) / static_cast<double>(d_a);
    Evaluation ev = dual_eval(rho);
    res.lower_bound = ev.primal;
    // half the diamond norm of a channel difference never exceeds one
    res.upper_bound = std::min(ev.upper, 1.0);
    int evals = 1;
    Matrix best_rho = rho;

    auto update = [&](const Matrix& cand) {
        Evaluation e = dual_eval(cand);
        ++evals;
        if (e.primal > res.lower_bound) {
            res.lower_bound = e.primal;
            best_rho = cand;
        }
        res.upper_bound = std::min(res.upper_bound, e.upper);
    };

    int rounds = 0;
    double last_gap = std::numeric_limits<double>::infinity();
    while (evals < opts.max_iterations) {
        res.gap = res.upper_bound - res.lower_bound;
        if (res.gap <= opts.tol) break;
        if (opts.early_exit_upper >= 0.0 && res.upper_bound <= opts.early_exit_upper) break;
        if (rounds > 30) break;

        // fresh support infusion around the best iterate when progress stalls
        double mix = (rounds > 0 && res.gap > 0.5 * last_gap) ? 0.05 : 0.0;
        rho = (1.0 - mix - 1e-9) * best_rho +
              (mix + 1e-9) * Matrix::Identity(d_a, d_a) / static_cast<double>(d_a);
        rho = maximize_primal(choi_diff, d_a, d_b, rho, 200, opts.tol / 4.0, evals);
        update(rho);

        // Face refinement: compress onto the top-k eigenspace of rho for each
        // k < d_a. On the face containing the optimum in its interior,
        // Frank-Wolfe converges fast, and the lifted state then yields a tight
        // dual certificate.
        Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0);
        for (Index k = 1; k < d_a && k <= 8; ++k) {
            Matrix vk(d_a, k);
            for (Index c = 0; c < k; ++c) vk.col(c) = es.eigenvectors().col(d_a - 1 - c);
            Matrix vk_lift = tensor(vk, Matrix::Identity(d_b, d_b));
            Matrix j_small = vk_lift.adjoint() * choi_diff * vk_lift;
            Matrix rho_small = vk.adjoint() * rho * vk;
            rho_small = (rho_small + rho_small.adjoint()) / 2.0;
            double tr = rho_small.trace().real();
            if (tr < 1e-12) continue;
            rho_small /= tr;
            rho_small =
                maximize_primal(j_small, k, d_b, rho_small, 300, opts.tol / 10.0, evals);
            update(vk * rho_small * vk.adjoint());
            if (res.upper_bound - res.lower_bound <= opts.tol) break;
        }
        ++rounds;
        double gap_now = res.upper_bound - res.lower_bound;
        if (gap_now > 0.99 * last_gap && rounds > 5) break;  // stalled
        last_gap = gap_now;
    }
    res.iterations = evals;
    res.gap = res.upper_bound - res.lower_bound;
    if (d_in * d_out <= opts.exact_dim_cap && res.gap <= opts.tol)
        res.exact = 0.5 * (res.upper_bound + res.lower_bound);
    return res;
}

namespace {

Matrix choi_difference(const QuantumChannel& t1, const QuantumChannel& t2) {
    return t1.choi() - t2.choi();
}

}  // namespace

DiamondResult diamond_distance(const QuantumChannel& t1, const QuantumChannel& t2,
                               DiamondOptions opts) {
    if (t1.in_dim() != t2.in_dim() || t1.out_dim() != t2.out_dim())
        throw std::invalid_argument("diamond_distance: layout mismatch");
    Matrix j = choi_difference(t1, t2);
    DiamondResult res = diamond_from_choi(j, t1.in_dim(), t1.out_dim(), opts);
    if (opts.sweep_points > 0) {
        double sweep = diamond_lower_bound_sweep(t1, t2, opts.sweep_points, opts.sweep_seed);
        res.lower_bound = std::max(res.lower_bound, sweep);
    }
    return res;
}

double diamond_lower_bound_sweep(const QuantumChannel& t1, const QuantumChannel& t2, int points,
                                 std::uint64_t seed, int polish_iterations) {
    const Index d_a = t1.in_dim(), d_b = t1.out_dim();
    std::vector<Matrix> ks1 = t1.kraus(), ks2 = t2.kraus();
    auto lift = [d_a](const std::vector<Matrix>& ks) {
        std::vector<Matrix> out;
        for (const auto& k : ks) out.push_back(tensor(Matrix::Identity(d_a, d_a), k));
        return out;
    };
    std::vector<Matrix> l1 = lift(ks1), l2 = lift(ks2);
    auto output_diff = [&](const Vector& psi) {
        Matrix acc = Matrix::Zero(d_a * d_b, d_a * d_b);
        for (const auto& k : l1) {
            Vector w = k * psi;
            acc += w * w.adjoint();
        }
        for (const auto& k : l2) {
            Vector w = k * psi;
            acc -= w * w.adjoint();
        }
        return acc;
    };
    auto value = [&](const Vector& psi) { return 0.5 * trace_norm(output_diff(psi)); };

    Rng rng(seed);
    Vector best_psi = maximally_entangled(d_a);
    double best = value(best_psi);
    for (int i = 0; i < points; ++i) {
        Vector psi = rng.random_state_vector(d_a * d_a);
        double v = value(psi);
        if (v > best) {
            best = v;
            best_psi = psi;
        }
    }
    // seesaw polish: alternate the optimal discriminator and the top input
    Vector psi = best_psi;
    for (int it = 0; it < polish_iterations; ++it) {
        Matrix diff = output_diff(psi);
        Eigen::SelfAdjointEigenSolver<Matrix> ed((diff + diff.adjoint()) / 2.0);
        Matrix m = Matrix::Zero(diff.rows(), diff.cols());
        for (Index k = 0; k < ed.eigenvalues().size(); ++k)
            if (ed.eigenvalues()(k) > 0)
                m += ed.eigenvectors().col(k) * ed.eigenvectors().col(k).adjoint();
        // maximize tr[M (id x Phi)(psi psi^+)] over pure psi
        Matrix h = Matrix::Zero(d_a * d_a, d_a * d_a);
        for (const auto& k : l1) h += k.adjoint() * m * k;
        for (const auto& k : l2) h -= k.adjoint() * m * k;
        Eigen::SelfAdjointEigenSolver<Matrix> eh((h + h.adjoint()) / 2.0);
        Vector cand = eh.eigenvectors().col(eh.eigenvalues().size() - 1);
        double v = value(cand);
        if (v > best + 1e-14) {
            best = v;
            psi = cand;
        } else {
            break;
        }
    }
    return best;
}

}  // namespace uhlsim

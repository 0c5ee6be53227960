#pragma once

#include "uhlsim/linalg.hpp"

namespace uhlsim {

/// Trace-preserving linear map stored as "entrywise multiplier plus rank-one"
/// in a fixed orthonormal basis Q:
///   T(X) = Q [ mu .* (Q^+ X Q) + R * tr(X) ] Q^+.
/// Iterated partial-swap channels, their one-sided halves, and conjugations by
/// unitaries diagonal in Q all take this form, and the form is closed under
/// composition, so m-step mixers apply in O(d^3) independently of m.
struct DiagPlusRankOne {
    Matrix basis;  // Q, unitary
    Matrix mu;     // entrywise multipliers in the Q basis
    Matrix r;      // rank-one term in the Q basis (may be zero)

    static DiagPlusRankOne identity_map(const Matrix& q) {
        return DiagPlusRankOne{q, Matrix::Ones(q.rows(), q.rows()),
                               Matrix::Zero(q.rows(), q.rows())};
    }

    Matrix apply(const Matrix& x) const {
        Matrix xt = basis.adjoint() * x * basis;
        Matrix yt = mu.cwiseProduct(xt) + r * x.trace();
        return basis * yt * basis.adjoint();
    }

    /// this o first; valid when `first` is trace preserving and shares the basis.
    DiagPlusRankOne compose_after(const DiagPlusRankOne& first) const {
        return DiagPlusRankOne{basis, mu.cwiseProduct(first.mu),
                               mu.cwiseProduct(first.r) + r};
    }

    DiagPlusRankOne power(std::int64_t n) const {
        DiagPlusRankOne acc = identity_map(basis);
        DiagPlusRankOne base = *this;
        while (n > 0) {
            if (n & 1) acc = base.compose_after(acc);
            base = base.compose_after(base);
            n >>= 1;
        }
        return acc;
    }
};

}  // namespace uhlsim

#pragma once

#include <cstdint>
#include <random>

#include "uhlsim/linalg.hpp"

namespace uhlsim {

/// Deterministic RNG: mt19937_64 plus hand-rolled uniform/gaussian so results
/// are bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Sub-generator for trial `index`, independent of evaluation order.
    Rng derive(std::uint64_t index) const {
        std::uint64_t x = seed_mix_ ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return Rng(x);
    }

    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    Complex complex_gaussian() { return Complex(gaussian(), gaussian()); }

    std::uint64_t integer(std::uint64_t bound) { return engine_() % bound; }

    Vector random_state_vector(Index dim) {
        Vector v(dim);
        for (Index i = 0; i < dim; ++i) v(i) = complex_gaussian();
        v.normalize();
        return v;
    }

    /// Haar-ish random unitary from QR of a Gaussian matrix.
    Matrix random_unitary(Index dim) {
        Matrix g(dim, dim);
        for (Index i = 0; i < dim; ++i)
            for (Index j = 0; j < dim; ++j) g(i, j) = complex_gaussian();
        Eigen::HouseholderQR<Matrix> qr(g);
        Matrix q = qr.householderQ();
        Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Index j = 0; j < dim; ++j) {
            Complex d = r(j, j);
            q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0));
        }
        return q;
    }

    /// Mixed state by tracing half of a larger Gaussian pure state.
    Matrix random_density(Index dim, Index ancilla_dim = 0);

    /// Full-rank density matrix with minimum eigenvalue at least `floor`.
    Matrix random_full_rank_density(Index dim, double floor);

private:
    explicit Rng(std::uint64_t seed, int) : engine_(seed) {}
    std::mt19937_64 engine_;
    std::uint64_t seed_mix_ = engine_();
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace uhlsim

#include "uhlsim/rng.hpp"

namespace uhlsim {

Matrix Rng::random_density(Index dim, Index ancilla_dim) {
    if (ancilla_dim <= 0) ancilla_dim = dim;
    Vector joint = random_state_vector(dim * ancilla_dim);
    Matrix rho = Matrix::Zero(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) {
            Complex acc = 0.0;
            for (Index a = 0; a < ancilla_dim; ++a)
                acc += joint(i * ancilla_dim + a) * std::conj(joint(j * ancilla_dim + a));
            rho(i, j) = acc;
        }
    return rho;
}

Matrix Rng::random_full_rank_density(Index dim, double floor) {
    Matrix rho = random_density(dim);
    Matrix mixed = (1.0 - dim * floor) * rho + floor * Matrix::Identity(dim, dim);
    return (mixed + mixed.adjoint()) / 2.0;
}

}  // namespace uhlsim

#include "uhlsim/oracle.hpp"

#include <stdexcept>

namespace uhlsim {

StatePrepOracle::StatePrepOracle(Matrix unitary, DimLayout layout, std::string name,
                                 double unitarity_tol)
    : u_(std::move(unitary)), layout_(std::move(layout)), name_(std::move(name)) {
    if (u_.rows() != u_.cols() || u_.rows() != layout_.dim())
        throw std::invalid_argument("StatePrepOracle: unitary does not match layout");
    Matrix defect = u_.adjoint() * u_ - Matrix::Identity(u_.rows(), u_.cols());
    if (defect.cwiseAbs().maxCoeff() > unitarity_tol)
        throw std::invalid_argument("StatePrepOracle: not unitary");
}

StatePrepOracle StatePrepOracle::preparing(const PureState& psi, std::string name) {
    return StatePrepOracle(unitary_from_first_column(psi.amplitudes), psi.layout, std::move(name));
}

}  // namespace uhlsim

#pragma once

#include <memory>
#include <string>

#include "uhlsim/ledger.hpp"
#include "uhlsim/linalg.hpp"
#include "uhlsim/states.hpp"

namespace uhlsim {

/// State-preparation unitary with forward/inverse access and query accounting.
/// U|0> is the prepared purified state.
class StatePrepOracle {
public:
    StatePrepOracle() = default;
    StatePrepOracle(Matrix unitary, DimLayout layout, std::string name,
                    double unitarity_tol = 1e-10);

    /// Oracle whose unitary's first column is the given pure state.
    static StatePrepOracle preparing(const PureState& psi, std::string name);

    const Matrix& unitary() const { return u_; }
    Matrix inverse() const { return u_.adjoint(); }
    const DimLayout& layout() const { return layout_; }
    Index dim() const { return u_.rows(); }
    const std::string& name() const { return name_; }

    PureState prepared_state() const { return PureState(u_.col(0), layout_); }

    std::string forward_counter() const { return name_ + ".queries"; }
    std::string inverse_counter() const { return name_ + ".inverse_queries"; }

private:
    Matrix u_;
    DimLayout layout_;
    std::string name_;
};

}  // namespace uhlsim

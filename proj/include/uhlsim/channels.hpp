#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uhlsim/layout.hpp"
#include "uhlsim/linalg.hpp"

namespace uhlsim {

/// Completely positive trace-preserving map. Stored as a Kraus list, a
/// Stinespring isometry, or a lazy applier (for composed channels whose
/// superoperator would be wasteful to materialize).
class QuantumChannel {
public:
    using Applier = std::function<Matrix(const Matrix&)>;

    QuantumChannel() = default;

    static QuantumChannel from_kraus(std::vector<Matrix> kraus, DimLayout in, DimLayout out,
                                     double tol = 1e-9);
    /// v: (d_out * d_env) x d_in isometry; channel rho -> tr_env[v rho v^+].
    /// The environment factor is the trailing tensor factor of the output side.
    static QuantumChannel from_stinespring(Matrix v, DimLayout in, DimLayout out, Index env_dim,
                                           std::string env_label = "E", double tol = 1e-10);
    static QuantumChannel from_applier(Applier f, DimLayout in, DimLayout out);
    static QuantumChannel from_unitary(const Matrix& u, DimLayout lay);

    // -- named constructions -------------------------------------------------
    static QuantumChannel identity(const DimLayout& lay);
    static QuantumChannel depolarizing(double p, Index d = 2);
    static QuantumChannel dephasing(double p);
    static QuantumChannel amplitude_damping(double gamma);
    /// Erasure to an orthogonal flag: d-dim input, (d+1)-dim output.
    static QuantumChannel erasure(double p, Index d = 2);
    static QuantumChannel partial_trace_channel(const DimLayout& lay,
                                                const std::vector<std::string>& traced);

    Matrix apply(const Matrix& rho) const;
    Matrix superoperator() const;  // (d_out^2 x d_in^2), column-major vectorization
    /// Choi matrix sum_{ij} |i><j| x T(|i><j|) on (in x out).
    Matrix choi() const;

    bool has_stinespring() const { return stinespring_.has_value(); }
    const Matrix& stinespring_isometry() const;
    Index env_dim() const { return env_dim_; }

    /// Convert Kraus -> Stinespring by stacking along an environment; the
    /// chosen dilation is recorded by the env label.
    QuantumChannel with_stinespring(std::string env_label = "E") const;
    std::vector<Matrix> kraus() const;  // via Choi eigendecomposition if needed

    /// rho -> tr_out[V rho V^+] for a Stinespring-form channel.
    QuantumChannel complementary(const std::string& env_label = "E") const;

    /// Adjoint map (not a channel in general): T^+ with sum K^+ (.) K.
    Matrix apply_adjoint(const Matrix& x) const;

    QuantumChannel compose_after(const QuantumChannel& first) const;  // this o first
    QuantumChannel tensor_with(const QuantumChannel& other) const;

    const DimLayout& input_layout() const { return in_; }
    const DimLayout& output_layout() const { return out_; }
    Index in_dim() const { return in_.dim(); }
    Index out_dim() const { return out_.dim(); }

private:
    DimLayout in_, out_;
    std::optional<std::vector<Matrix>> kraus_;
    std::optional<Matrix> stinespring_;
    Index env_dim_ = 1;
    std::string env_label_ = "E";
    Applier applier_;
};

/// Kraus completeness / isometry defect, for validity checks.
double kraus_defect(const std::vector<Matrix>& kraus);

}  // namespace uhlsim

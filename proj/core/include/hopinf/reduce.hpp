#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hopinf/basis.hpp"
#include "hopinf/models.hpp"
#include "hopinf/timestep.hpp"
#include "hopinf/types.hpp"

namespace hopinf {

enum class RomMethod {
  Galerkin,           // intrusive projection of the full vector field
  Hamiltonian,        // intrusive H-ROM, L-hat = U^T L U
  GenericOpInf,       // unconstrained inference
  CanonicalOpInf,     // symmetric A-hat with known J-hat
  NoncanonicalOpInf,  // skew L-hat with known gradient
  LegacySeparable     // block-diagonal A-hat on a cotangent basis
};

std::string to_string(RomMethod m);
RomMethod rom_method_from_string(const std::string& s);

enum class CanonicalVariant { Exact, ApproxIdentity };

struct InferenceInputs {
  Matrix states;   // X-hat
  Matrix derivs;   // X-hat_t
  Matrix grads;    // nonlinear gradient (canonical) or full gradient (noncanonical)
  Matrix poisson;  // J-hat for canonical inference
  double eta = 0.0;
};

Matrix intrusive_galerkin(const Matrix& D, const Matrix& U);
Matrix intrusive_hamiltonian(const Matrix& L, const Matrix& U);

Matrix opinf_generic(const Matrix& Xhat, const Matrix& Xhat_t, double eta);
Matrix opinf_canonical(const InferenceInputs& in, CanonicalVariant variant);
Matrix opinf_noncanonical(const InferenceInputs& in);
// Needs a cotangent-lift basis: the first half of the reduced state is q-hat.
Matrix opinf_legacy_separable(const InferenceInputs& in, const PodBasis& basis);

// Leading n' x n' block.
Matrix truncate(const Matrix& D, Index n);
// Block of D matching basis.take(n) when D lives on the given (larger) basis; for
// block and cotangent bases this keeps the leading modes of each half.
Matrix truncate(const Matrix& D, const PodBasis& basis, Index n);

// Linear ROM x-hat' = op x-hat + offset.
struct ReducedLinearModel {
  RomMethod method = RomMethod::Galerkin;
  Matrix op;
  Vector offset;
  Matrix poisson;  // L-hat or J-hat, empty when not applicable
  Matrix energy;   // A-hat, empty when not applicable
  Vector energy_linear;  // U^T A x0 for centered H-ROMs
  PodBasis basis;
  bool centered = false;  // reconstruction adds the basis shift

  Index size() const { return op.rows(); }
  Vector initial_state(const Vector& x0) const;
  Vector reconstruct(const Vector& xhat) const;
  Matrix reconstruct_columns(const Matrix& Xhat) const;
  Trajectory integrate(const Vector& x0, double dt, Index steps) const;
  // 0.5 x-hat^T A-hat x-hat + x-hat . U^T A x0 when A-hat is known.
  double reduced_energy(const Vector& xhat) const;
};

// inferred: L-hat for NoncanonicalOpInf, A-hat for CanonicalOpInf and
// LegacySeparable, D-hat for GenericOpInf. Ignored for intrusive methods.
ReducedLinearModel assemble_linear_rom(const HamiltonianModel& model, const PodBasis& basis,
                                       RomMethod method, const Matrix& inferred = Matrix());

ReducedLinearModel truncate(const ReducedLinearModel& rom, Index n);

// Dense order-three array, T(a,b,c) stored at (a*n + b)*n + c.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Index n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

  Index size() const { return n_; }
  double& operator()(Index a, Index b, Index c) { return data_[idx(a, b, c)]; }
  double operator()(Index a, Index b, Index c) const { return data_[idx(a, b, c)]; }

  // T(u, w)_a = sum_bc T(a,b,c) u_b w_c
  Vector contract(const Vector& u, const Vector& w) const;
  // T(u)_ab = sum_c T(a,b,c) u_c
  Matrix contract(const Vector& u) const;
  void symmetrize_lower();
  bool is_zero() const;
  double max_abs() const;
  Tensor3 leading(Index n) const;

 private:
  std::size_t idx(Index a, Index b, Index c) const {
    return static_cast<std::size_t>((a * n_ + b) * n_ + c);
  }
  Index n_ = 0;
  std::vector<double> data_;
};

enum class StepRule { AvfCubic, MidpointQuadratic };

// x-hat' = L-hat (c + C x-hat + T(x-hat, x-hat)).
struct ReducedCubicModel {
  RomMethod method = RomMethod::Hamiltonian;
  Matrix poisson;
  Vector offset;
  Matrix linear;
  Tensor3 tensor;
  StepRule rule = StepRule::AvfCubic;
  PodBasis basis;
  // Reduced Hamiltonian up to a constant; empty for projections without one.
  std::function<double(const Vector&)> energy_fn;

  Index size() const { return linear.rows(); }
  Vector gradient(const Vector& y) const;
  Vector rhs(const Vector& y) const;
  double reduced_energy(const Vector& y) const;

  ResidualFn residual(double dt) const;
  DenseJacobianFn jacobian(double dt) const;

  Vector initial_state(const Vector& x0) const { return basis.project(x0); }
  Matrix reconstruct_columns(const Matrix& Y) const { return basis.lift_columns(Y); }
  Trajectory integrate(const Vector& x0, double dt, Index steps,
                       const NewtonSettings& s) const;
};

// Models whose gradient is scale*((a/2)x.^2 + K x) with constant L (KdV, BBM).
// Lhat is required for the inferred methods and ignored otherwise.
ReducedCubicModel assemble_quadratic_gradient_rom(const HamiltonianModel& model,
                                                  const PodBasis& basis, RomMethod method,
                                                  const Matrix& Lhat = Matrix());
ReducedCubicModel assemble_kdv_rom(const HamiltonianModel& model, const PodBasis& basis,
                                   RomMethod method, const Matrix& Lhat = Matrix());
ReducedCubicModel assemble_kdv_v2_rom(const HamiltonianModel& model, const PodBasis& basis,
                                      RomMethod method);
ReducedCubicModel assemble_bbm_rom(const HamiltonianModel& model, const PodBasis& basis,
                                   const Matrix& Lhat);

ReducedCubicModel truncate(const ReducedCubicModel& rom, Index n);

// Residual and Jacobian of the full-order implicit step for the nonlinear models.
struct FomStepper {
  ResidualFn residual;
  SparseJacobianFn jacobian;
};
FomStepper fom_stepper(const HamiltonianModel& model, double dt);

bool is_skew(const Matrix& L, double rel_tol = 1e-12);
bool is_symmetric(const Matrix& A, double rel_tol = 1e-12);

}  // namespace hopinf

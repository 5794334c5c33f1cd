#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hopinf/types.hpp"

namespace hopinf {

struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  Matrix states;  // one column per time

  Index steps() const { return states.cols() > 0 ? states.cols() - 1 : 0; }
  Vector times() const;
  double time(Index k) const { return t0 + dt * static_cast<double>(k); }
  std::vector<std::string> header() const;  // metadata lines for HOPM1 output
};

Trajectory trajectory_from_header(const Matrix& states,
                                  const std::vector<std::string>& comments);

struct NewtonSettings {
  double tol = 1e-10;  // residual infinity norm
  int max_iters = 25;
  void validate() const;
};

// Per-step residual R(x_k, v) and its Jacobian in v.
using ResidualFn = std::function<Vector(const Vector& xk, const Vector& v)>;
using DenseJacobianFn = std::function<Matrix(const Vector& xk, const Vector& v)>;
using SparseJacobianFn = std::function<SparseMatrix(const Vector& xk, const Vector& v)>;

// Increments (I - dt/2 D) dx = dt (offset + D x_k).
Trajectory implicit_midpoint_linear(const Matrix& D, const Vector& offset,
                                    const Vector& x0, double dt, Index steps);
Trajectory implicit_midpoint_linear(const SparseMatrix& D, const Vector& offset,
                                    const Vector& x0, double dt, Index steps,
                                    Index stride = 1);

Trajectory avf_newton(const ResidualFn& residual, const DenseJacobianFn& jacobian,
                      const Vector& x0, double dt, Index steps, const NewtonSettings& s,
                      Index stride = 1);
Trajectory avf_newton(const ResidualFn& residual, const SparseJacobianFn& jacobian,
                      const Vector& x0, double dt, Index steps, const NewtonSettings& s,
                      Index stride = 1);

// Classical RK4; keeps every stride-th state.
Trajectory rk4(const std::function<Vector(const Vector&)>& f, const Vector& x0, double dt,
               Index steps, Index stride = 1);

// Second order central differences inside, one-sided second order at the ends.
Matrix time_derivatives(const Matrix& states, double dt);
Matrix time_derivatives(const Trajectory& traj);

// Throws DivergenceError when x has NaN/Inf or norm above kDivergenceNorm.
void check_state(const Vector& x, Index step);

}  // namespace hopinf

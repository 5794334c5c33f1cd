#include "hopinf/timestep.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "hopinf/hopm.hpp"

namespace hopinf {

Vector Trajectory::times() const {
  Vector t(states.cols());
  for (Index k = 0; k < t.size(); ++k) t(k) = time(k);
  return t;
}

std::vector<std::string> Trajectory::header() const {
  return {meta_line("t0", t0), meta_line("dt", dt),
          meta_line("steps", std::to_string(steps()))};
}

Trajectory trajectory_from_header(const Matrix& states,
                                  const std::vector<std::string>& comments) {
  HopmFile f{states, comments};
  auto meta = f.metadata();
  Trajectory t;
  t.states = states;
  try {
    t.t0 = meta.count("t0") ? std::stod(meta["t0"]) : 0.0;
    t.dt = meta.count("dt") ? std::stod(meta["dt"]) : 0.0;
  } catch (const std::exception&) {
    throw IoError("trajectory header has malformed t0/dt");
  }
  if (!(t.dt > 0.0)) throw IoError("trajectory header lacks a positive dt");
  return t;
}

void NewtonSettings::validate() const {
  if (!(tol > 0.0)) throw ValidationError("newton: tol must be positive");
  if (max_iters < 1) throw ValidationError("newton: max_iters must be at least 1");
}

void check_state(const Vector& x, Index step) {
  if (!x.allFinite()) {
    throw DivergenceError("state became non-finite at step " + std::to_string(step),
                          static_cast<long>(step));
  }
  const double nrm = x.norm();
  if (nrm > kDivergenceNorm) {
    std::ostringstream os;
    os << "state norm " << nrm << " exceeded the divergence cap at step " << step;
    throw DivergenceError(os.str(), static_cast<long>(step));
  }
}

namespace {

Index stored_columns(Index steps, Index stride) {
  if (stride < 1) throw ValidationError("stride must be at least 1");
  if (steps % stride != 0) throw ValidationError("steps must be a multiple of stride");
  return steps / stride + 1;
}

void check_dt(double dt, Index steps) {
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  if (steps < 0) throw ValidationError("step count must be nonnegative");
}

}  // namespace

Trajectory implicit_midpoint_linear(const Matrix& D, const Vector& offset,
                                    const Vector& x0, double dt, Index steps) {
  check_dt(dt, steps);
  const Index n = x0.size();
  require_dims(D.rows() == n && D.cols() == n, "implicit midpoint: D does not match x0");
  const Vector c = offset.size() == 0 ? Vector::Zero(n) : offset;
  require_dims(c.size() == n, "implicit midpoint: offset does not match x0");
  Matrix step = Matrix::Identity(n, n) - 0.5 * dt * D;
  Eigen::PartialPivLU<Matrix> lu(step);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) {
    std::ostringstream os;
    os << "implicit midpoint: step matrix is singular (rcond " << rc << ")";
    throw NumericalError(os.str(), 0);
  }
  Trajectory t;
  t.dt = dt;
  t.states.resize(n, steps + 1);
  t.states.col(0) = x0;
  Vector x = x0;
  for (Index k = 0; k < steps; ++k) {
    x += lu.solve(dt * (c + D * x));
    check_state(x, k + 1);
    t.states.col(k + 1) = x;
  }
  return t;
}

Trajectory implicit_midpoint_linear(const SparseMatrix& D, const Vector& offset,
                                    const Vector& x0, double dt, Index steps,
                                    Index stride) {
  check_dt(dt, steps);
  const Index n = x0.size();
  require_dims(D.rows() == n && D.cols() == n, "implicit midpoint: D does not match x0");
  const Vector c = offset.size() == 0 ? Vector::Zero(n) : offset;
  require_dims(c.size() == n, "implicit midpoint: offset does not match x0");
  SparseMatrix I(n, n);
  I.setIdentity();
  SparseMatrix step = I - 0.5 * dt * D;
  step.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(step);
  if (lu.info() != Eigen::Success)
    throw NumericalError("implicit midpoint: sparse step matrix is singular", 0);
  Trajectory t;
  t.dt = dt * static_cast<double>(stride);
  t.states.resize(n, stored_columns(steps, stride));
  t.states.col(0) = x0;
  Vector x = x0;
  for (Index k = 0; k < steps; ++k) {
    x += lu.solve(dt * (c + D * x));
    check_state(x, k + 1);
    if ((k + 1) % stride == 0) t.states.col((k + 1) / stride) = x;
  }
  return t;
}

namespace {

template <class Solve>
Trajectory newton_march(const ResidualFn& residual, Solve&& solve, const Vector& x0,
                        double dt, Index steps, const NewtonSettings& s, Index stride) {
  check_dt(dt, steps);
  s.validate();
  Trajectory t;
  t.dt = dt * static_cast<double>(stride);
  t.states.resize(x0.size(), stored_columns(steps, stride));
  t.states.col(0) = x0;
  Vector xk = x0;
  for (Index k = 0; k < steps; ++k) {
    Vector v = xk;
    Vector r = residual(xk, v);
    double rn = r.lpNorm<Eigen::Infinity>();
    int it = 0;
    while (!(rn <= s.tol)) {
      if (it == s.max_iters || !std::isfinite(rn)) {
        std::ostringstream os;
        os << "Newton did not converge at step " << k + 1 << " after " << it
           << " iterations (residual " << rn << ")";
        if (!std::isfinite(rn)) throw DivergenceError(os.str(), static_cast<long>(k + 1), rn);
        throw NumericalError(os.str(), static_cast<long>(k + 1), rn);
      }
      v -= solve(xk, v, r, k + 1);
      r = residual(xk, v);
      rn = r.lpNorm<Eigen::Infinity>();
      ++it;
    }
    xk = v;
    check_state(xk, k + 1);
    if ((k + 1) % stride == 0) t.states.col((k + 1) / stride) = xk;
  }
  return t;
}

}  // namespace

Trajectory avf_newton(const ResidualFn& residual, const DenseJacobianFn& jacobian,
                      const Vector& x0, double dt, Index steps, const NewtonSettings& s,
                      Index stride) {
  auto solve = [&](const Vector& xk, const Vector& v, const Vector& r, Index k) -> Vector {
    Eigen::PartialPivLU<Matrix> lu(jacobian(xk, v));
    Vector d = lu.solve(r);
    if (!d.allFinite())
      throw NumericalError("singular Newton Jacobian at step " + std::to_string(k),
                           static_cast<long>(k));
    return d;
  };
  return newton_march(residual, solve, x0, dt, steps, s, stride);
}

Trajectory avf_newton(const ResidualFn& residual, const SparseJacobianFn& jacobian,
                      const Vector& x0, double dt, Index steps, const NewtonSettings& s,
                      Index stride) {
  Eigen::SparseLU<SparseMatrix> lu;
  bool analyzed = false;
  auto solve = [&](const Vector& xk, const Vector& v, const Vector& r, Index k) -> Vector {
    SparseMatrix J = jacobian(xk, v);
    J.makeCompressed();
    // the sparsity pattern is fixed along a run, so analyze once
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      throw NumericalError("singular Newton Jacobian at step " + std::to_string(k),
                           static_cast<long>(k));
    return lu.solve(r);
  };
  return newton_march(residual, solve, x0, dt, steps, s, stride);
}

Trajectory rk4(const std::function<Vector(const Vector&)>& f, const Vector& x0, double dt,
               Index steps, Index stride) {
  check_dt(dt, steps);
  Trajectory t;
  t.dt = dt * static_cast<double>(stride);
  t.states.resize(x0.size(), stored_columns(steps, stride));
  t.states.col(0) = x0;
  Vector x = x0;
  for (Index k = 0; k < steps; ++k) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * dt * k1);
    const Vector k3 = f(x + 0.5 * dt * k2);
    const Vector k4 = f(x + dt * k3);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_state(x, k + 1);
    if ((k + 1) % stride == 0) t.states.col((k + 1) / stride) = x;
  }
  return t;
}

Matrix time_derivatives(const Matrix& X, double dt) {
  const Index m = X.cols();
  if (m < 3) throw ValidationError("time_derivatives: need at least 3 snapshots");
  if (!(dt > 0.0)) throw ValidationError("time_derivatives: dt must be positive");
  Matrix out(X.rows(), m);
  const double h = 1.0 / (2.0 * dt);
  out.col(0) = h * (-3.0 * X.col(0) + 4.0 * X.col(1) - X.col(2));
  for (Index k = 1; k + 1 < m; ++k) out.col(k) = h * (X.col(k + 1) - X.col(k - 1));
  out.col(m - 1) = h * (3.0 * X.col(m - 1) - 4.0 * X.col(m - 2) + X.col(m - 3));
  return out;
}

Matrix time_derivatives(const Trajectory& traj) { return time_derivatives(traj.states, traj.dt); }

}  // namespace hopinf

#include <cmath>
#include <sstream>

#include "hopinf/matkit.hpp"
#include "hopinf/reduce.hpp"

namespace hopinf {

Vector Tensor3::contract(const Vector& u, const Vector& w) const {
  require_dims(u.size() == n_ && w.size() == n_, "tensor contraction: size mismatch");
  Vector out(n_);
  for (Index a = 0; a < n_; ++a) {
    // slice a is stored row-major in (b,c); as a column-major map it is its transpose
    Eigen::Map<const Matrix> Ta(data_.data() + idx(a, 0, 0), n_, n_);
    out(a) = w.dot(Ta * u);
  }
  return out;
}

Matrix Tensor3::contract(const Vector& u) const {
  require_dims(u.size() == n_, "tensor contraction: size mismatch");
  Matrix out(n_, n_);
  for (Index a = 0; a < n_; ++a) {
    Eigen::Map<const Matrix> Ta(data_.data() + idx(a, 0, 0), n_, n_);  // Ta(c,b)
    out.row(a) = (Ta.transpose() * u).transpose();
  }
  return out;
}

void Tensor3::symmetrize_lower() {
  for (Index a = 0; a < n_; ++a)
    for (Index b = 0; b < n_; ++b)
      for (Index c = b + 1; c < n_; ++c) {
        const double v = 0.5 * ((*this)(a, b, c) + (*this)(a, c, b));
        (*this)(a, b, c) = v;
        (*this)(a, c, b) = v;
      }
}

bool Tensor3::is_zero() const {
  for (double v : data_)
    if (v != 0.0) return false;
  return true;
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Tensor3 Tensor3::leading(Index n) const {
  if (n < 0 || n > n_) throw ValidationError("tensor: leading block out of range");
  Tensor3 out(n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c) out(a, b, c) = (*this)(a, b, c);
  return out;
}

Vector ReducedCubicModel::gradient(const Vector& y) const {
  return offset + linear * y + tensor.contract(y, y);
}

Vector ReducedCubicModel::rhs(const Vector& y) const { return poisson * gradient(y); }

double ReducedCubicModel::reduced_energy(const Vector& y) const {
  if (!energy_fn)
    throw ValidationError("reduced energy is not defined for method " + to_string(method));
  return energy_fn(y);
}

ResidualFn ReducedCubicModel::residual(double dt) const {
  const Matrix L = poisson, C = linear;
  const Vector c = offset;
  const Tensor3 T = tensor;
  if (rule == StepRule::AvfCubic) {
    return [=](const Vector& xk, const Vector& v) -> Vector {
      const Vector avg = c + 0.5 * (C * (xk + v)) +
                         (T.contract(xk, xk) + T.contract(xk, v) + T.contract(v, v)) / 3.0;
      return v - xk - dt * (L * avg);
    };
  }
  return [=](const Vector& xk, const Vector& v) -> Vector {
    const Vector m = 0.5 * (xk + v);
    return v - xk - dt * (L * (c + C * m + T.contract(m, m)));
  };
}

DenseJacobianFn ReducedCubicModel::jacobian(double dt) const {
  const Matrix L = poisson, C = linear;
  const Tensor3 T = tensor;
  const Index n = linear.rows();
  if (rule == StepRule::AvfCubic) {
    return [=](const Vector& xk, const Vector& v) -> Matrix {
      const Matrix inner = 0.5 * C + (T.contract(xk) + 2.0 * T.contract(v)) / 3.0;
      return Matrix::Identity(n, n) - dt * (L * inner);
    };
  }
  return [=](const Vector& xk, const Vector& v) -> Matrix {
    const Vector m = 0.5 * (xk + v);
    return Matrix::Identity(n, n) - dt * (L * (0.5 * C + T.contract(m)));
  };
}

Trajectory ReducedCubicModel::integrate(const Vector& x0, double dt, Index steps,
                                        const NewtonSettings& s) const {
  return avf_newton(residual(dt), jacobian(dt), initial_state(x0), dt, steps, s);
}

namespace {

// T(a,b,c) = scale * sum_j W(a,j) U(j,b) U(j,c)
Tensor3 weighted_cubic(const Matrix& W, const Matrix& U, double scale) {
  const Index n = U.cols();
  Tensor3 T(n);
  if (scale == 0.0) return T;
  Vector w(U.rows());
  for (Index b = 0; b < n; ++b)
    for (Index c = b; c < n; ++c) {
      w = U.col(b).cwiseProduct(U.col(c));
      const Vector t = scale * (W * w);
      for (Index a = 0; a < n; ++a) {
        T(a, b, c) = t(a);
        T(a, c, b) = t(a);
      }
    }
  return T;
}

Matrix dense_poisson(const HamiltonianModel& m) { return m.poisson_matrix(); }

}  // namespace

ReducedCubicModel assemble_quadratic_gradient_rom(const HamiltonianModel& model,
                                                  const PodBasis& basis, RomMethod method,
                                                  const Matrix& Lhat) {
  if (!model.quadratic || model.structure != StructureKind::ConstantPoisson)
    throw ValidationError("cubic ROM: model '" + model.name +
                          "' lacks a constant Poisson matrix with quadratic gradient");
  require_dims(basis.full_dim() == model.dim, "cubic ROM: basis does not match model");
  const auto& q = *model.quadratic;
  const Matrix& U = basis.U;
  const Index n = U.cols();
  const Vector x0 = basis.reference();

  ReducedCubicModel rom;
  rom.method = method;
  rom.basis = basis;
  rom.rule = StepRule::AvfCubic;

  Matrix W;  // left factor: U^T, or U^T L for Galerkin
  switch (method) {
    case RomMethod::Galerkin:
      W = (model.poisson_dense.size() > 0) ? Matrix(U.transpose() * model.poisson_dense)
                                           : Matrix((model.poisson.transpose() * U).transpose());
      rom.poisson = Matrix::Identity(n, n);
      break;
    case RomMethod::Hamiltonian:
      W = U.transpose();
      rom.poisson = symmetry_part(U.transpose() * dense_poisson(model) * U, SymmetryKind::Skew);
      break;
    case RomMethod::NoncanonicalOpInf:
    case RomMethod::GenericOpInf:
      if (Lhat.rows() != n || Lhat.cols() != n)
        throw DimensionError("cubic ROM: inferred L-hat must be n x n");
      W = U.transpose();
      rom.poisson = Lhat;
      break;
    default:
      throw ValidationError("cubic ROM: method " + to_string(method) +
                            " does not apply to noncanonical models");
  }

  const Vector g0 = q.eval(x0);
  rom.offset = W * g0;
  const Matrix inner = q.scale * (q.a * (x0.asDiagonal() * U) + q.K * U);
  rom.linear = W * inner;
  rom.tensor = weighted_cubic(W, U, 0.5 * q.scale * q.a);
  if (method != RomMethod::Galerkin) {
    rom.linear = symmetry_part(rom.linear, SymmetryKind::Symmetric);
    const Vector c = rom.offset;
    const Matrix C = rom.linear;
    const Tensor3 T = rom.tensor;
    rom.energy_fn = [c, C, T](const Vector& y) {
      return c.dot(y) + 0.5 * y.dot(C * y) + T.contract(y, y).dot(y) / 3.0;
    };
  }
  return rom;
}

ReducedCubicModel assemble_kdv_rom(const HamiltonianModel& model, const PodBasis& basis,
                                   RomMethod method, const Matrix& Lhat) {
  if (model.kind != ModelKind::KdvV1)
    throw ValidationError("assemble_kdv_rom: expected the first KdV formulation");
  return assemble_quadratic_gradient_rom(model, basis, method, Lhat);
}

ReducedCubicModel assemble_bbm_rom(const HamiltonianModel& model, const PodBasis& basis,
                                   const Matrix& Lhat) {
  if (model.kind != ModelKind::Bbm) throw ValidationError("assemble_bbm_rom: expected BBM");
  if (!is_skew(Lhat, 1e-10)) throw ValidationError("assemble_bbm_rom: L-hat is not skew");
  return assemble_quadratic_gradient_rom(model, basis, RomMethod::NoncanonicalOpInf, Lhat);
}

ReducedCubicModel assemble_kdv_v2_rom(const HamiltonianModel& model, const PodBasis& basis,
                                      RomMethod method) {
  if (model.kind != ModelKind::KdvV2 || !model.kdv || !model.stencils)
    throw ValidationError("assemble_kdv_v2_rom: expected the second KdV formulation");
  require_dims(basis.full_dim() == model.dim, "cubic ROM: basis does not match model");
  const auto& p = *model.kdv;
  const auto& st = *model.stencils;
  const Matrix& U = basis.U;
  const Index n = U.cols();
  const Vector x0 = basis.reference();
  const double a3 = p.alpha / 3.0;
  const SparseMatrix lin = p.rho * st.d1 + p.nu * st.d3;

  // symmetric bilinear part of the vector field
  auto bil = [&](const Vector& u, const Vector& w) -> Vector {
    return a3 * (0.5 * (u.cwiseProduct(st.d1 * w) + w.cwiseProduct(st.d1 * u)) +
                 st.d1 * u.cwiseProduct(w));
  };
  // N(u) w = a3 (u .* D1 w + D1 (u .* w)), the state-linear part of L
  auto napply = [&](const Vector& u, const Vector& w) -> Vector {
    return a3 * (u.cwiseProduct(st.d1 * w) + st.d1 * u.cwiseProduct(w));
  };

  ReducedCubicModel rom;
  rom.method = method;
  rom.basis = basis;
  rom.rule = StepRule::MidpointQuadratic;
  rom.poisson = Matrix::Identity(n, n);
  rom.tensor = Tensor3(n);

  if (method == RomMethod::Galerkin) {
    rom.offset = U.transpose() * (bil(x0, x0) + lin * x0);
    Matrix cols(U.rows(), n);
    for (Index j = 0; j < n; ++j) cols.col(j) = 2.0 * bil(x0, U.col(j)) + lin * U.col(j);
    rom.linear = U.transpose() * cols;
    for (Index b = 0; b < n; ++b)
      for (Index c = b; c < n; ++c) {
        const Vector t = U.transpose() * bil(U.col(b), U.col(c));
        for (Index a = 0; a < n; ++a) {
          rom.tensor(a, b, c) = t(a);
          rom.tensor(a, c, b) = t(a);
        }
      }
    return rom;
  }
  if (method != RomMethod::Hamiltonian)
    throw ValidationError("assemble_kdv_v2_rom: only galerkin and hamiltonian apply");

  // U^T L(x0 + U y) U (U^T x0 + y), up to the 1/ds that cancels against grad H = ds x
  const Vector z0 = U.transpose() * x0;
  Matrix base(U.rows(), n);
  for (Index j = 0; j < n; ++j) base.col(j) = napply(x0, U.col(j)) + lin * U.col(j);
  const Matrix L0 = symmetry_part(U.transpose() * base, SymmetryKind::Skew);
  rom.offset = L0 * z0;
  rom.linear = L0;
  Matrix tmp(U.rows(), n);
  for (Index c = 0; c < n; ++c) {
    for (Index b = 0; b < n; ++b) tmp.col(b) = napply(U.col(c), U.col(b));
    const Matrix Mc = symmetry_part(U.transpose() * tmp, SymmetryKind::Skew);
    rom.linear.col(c) += Mc * z0;
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b) rom.tensor(a, b, c) = Mc(a, b);
  }
  rom.tensor.symmetrize_lower();
  const double ds = model.ds;
  rom.energy_fn = [z0, ds](const Vector& y) { return 0.5 * (z0 + y).squaredNorm() * ds; };
  return rom;
}

FomStepper fom_stepper(const HamiltonianModel& model, double dt) {
  FomStepper fs;
  const Index n = model.dim;
  SparseMatrix I(n, n);
  I.setIdentity();
  if (model.kind == ModelKind::KdvV2) {
    const auto p = *model.kdv;
    const auto st = *model.stencils;
    const double a3 = p.alpha / 3.0;
    const SparseMatrix lin = p.rho * st.d1 + p.nu * st.d3;
    auto rhs = model.rhs_fn;
    fs.residual = [rhs, dt](const Vector& xk, const Vector& v) -> Vector {
      return v - xk - dt * rhs(0.5 * (xk + v));
    };
    fs.jacobian = [=](const Vector& xk, const Vector& v) -> SparseMatrix {
      const Vector m = 0.5 * (xk + v);
      const Vector d1m = st.d1 * m;
      SparseMatrix dq = a3 * (SparseMatrix(d1m.asDiagonal() * I) + m.asDiagonal() * st.d1 +
                              2.0 * (st.d1 * m.asDiagonal()));
      dq += lin;
      return I - (0.5 * dt) * dq;
    };
    return fs;
  }
  if (model.quadratic && model.structure == StructureKind::ConstantPoisson &&
      model.poisson.nonZeros() > 0) {
    const auto q = *model.quadratic;
    const SparseMatrix L = model.poisson;
    fs.residual = [q, L, dt](const Vector& xk, const Vector& v) -> Vector {
      return v - xk - dt * (L * q.segment_average(xk, v));
    };
    fs.jacobian = [q, L, dt, I](const Vector& xk, const Vector& v) -> SparseMatrix {
      const Vector d = (q.scale * q.a / 6.0) * (xk + 2.0 * v);
      SparseMatrix inner = SparseMatrix(d.asDiagonal() * I) + (0.5 * q.scale) * q.K;
      return I - dt * (L * inner);
    };
    return fs;
  }
  throw ValidationError("no implicit full-order stepper for model '" + model.name + "'");
}

}  // namespace hopinf

#include "hopinf/models.hpp"

#include <cmath>
#include <sstream>

#include "hopinf/hopm.hpp"

namespace hopinf {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix circulant(Index n, const std::vector<std::pair<Index, double>>& taps) {
  Triplets t;
  t.reserve(static_cast<std::size_t>(n) * taps.size());
  for (Index i = 0; i < n; ++i)
    for (auto [off, w] : taps) t.emplace_back(i, ((i + off) % n + n) % n, w);
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix identity(Index n) {
  SparseMatrix I(n, n);
  I.setIdentity();
  return I;
}

SparseMatrix block_diag(const SparseMatrix& a, const SparseMatrix& b) {
  Triplets t;
  for (Index k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      t.emplace_back(it.row(), it.col(), it.value());
  for (Index k = 0; k < b.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(b, k); it; ++it)
      t.emplace_back(a.rows() + it.row(), a.cols() + it.col(), it.value());
  SparseMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

double sech2(double z) {
  const double c = std::cosh(z);
  return 1.0 / (c * c);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

// Quadratic Hamiltonian 0.5 x^T A x (+ offset) with canonical structure.
void make_canonical_quadratic(HamiltonianModel& m, SparseMatrix A, double offset) {
  const Index n2 = A.rows();
  m.dim = n2;
  m.structure = StructureKind::Canonical;
  m.poisson = canonical_j(n2 / 2);
  auto Ap = std::make_shared<SparseMatrix>(std::move(A));
  auto D = std::make_shared<SparseMatrix>(m.poisson * (*Ap));
  m.linear_part = *Ap;
  m.hamiltonian = [Ap, offset](const Vector& x) { return offset + 0.5 * x.dot(*Ap * x); };
  m.grad = [Ap](const Vector& x) -> Vector { return *Ap * x; };
  m.rhs_fn = [D](const Vector& x) -> Vector { return *D * x; };
  m.conserved = {{"H", m.hamiltonian}};
}

}  // namespace

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Wave: return "wave";
    case ModelKind::Nonseparable: return "nonseparable";
    case ModelKind::KdvV1: return "kdv";
    case ModelKind::KdvV2: return "kdv2";
    case ModelKind::Bbm: return "bbm";
    case ModelKind::External: return "external";
  }
  return "unknown";
}

CirculantStencils circulant_stencils(Index n, double ds) {
  require(n >= 5, "stencils need at least 5 grid points");
  CirculantStencils s;
  s.ds = ds;
  const double h1 = 1.0 / (2.0 * ds);
  const double h2 = 1.0 / (ds * ds);
  const double h3 = 1.0 / (2.0 * ds * ds * ds);
  s.d1 = circulant(n, {{-1, -h1}, {1, h1}});
  s.d2 = circulant(n, {{-1, h2}, {0, -2.0 * h2}, {1, h2}});
  s.d3 = circulant(n, {{-2, -h3}, {-1, 2.0 * h3}, {1, -2.0 * h3}, {2, h3}});
  return s;
}

Vector QuadraticGradient::eval(const Vector& x) const {
  return scale * (0.5 * a * x.cwiseProduct(x) + K * x);
}

Vector QuadraticGradient::segment_average(const Vector& u, const Vector& v) const {
  const Vector quad = (u.cwiseProduct(u) + u.cwiseProduct(v) + v.cwiseProduct(v)) / 6.0;
  return scale * (a * quad + 0.5 * (K * (u + v)));
}

void WaveParams::validate() const {
  require(c > 0.0, "wave: c must be positive");
  require(length > 0.0, "wave: length must be positive");
  require(cells >= 8, "wave: need at least 8 cells");
}

void NonsepParams::validate() const {
  require(points >= 8, "nonseparable: need at least 8 points");
  require(length > 0.0, "nonseparable: length must be positive");
}

void KdvParams::validate() const {
  require(half_length > 0.0, "kdv: length must be positive");
  require(points >= 8, "kdv: need at least 8 points");
}

void BbmParams::validate() const {
  require(length > 0.0, "bbm: length must be positive");
  require(points >= 8, "bbm: need at least 8 points");
  require(gamma > 0.0, "bbm: gamma must be positive");
}

Matrix HamiltonianModel::poisson_matrix(const Vector& x) const {
  if (structure == StructureKind::StatePoisson) return poisson_at(x);
  return poisson_matrix();
}

Matrix HamiltonianModel::poisson_matrix() const {
  if (structure == StructureKind::StatePoisson)
    throw ValidationError(name + ": Poisson matrix depends on the state");
  if (poisson_dense.size() > 0) return poisson_dense;
  return Matrix(poisson);
}

Vector HamiltonianModel::nonlinear_part(const Vector& x) const {
  if (!nonlinear_grad) return Vector::Zero(x.size());
  return nonlinear_grad(x);
}

Matrix HamiltonianModel::grad_columns(const Matrix& X) const {
  Matrix out(X.rows(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) out.col(j) = grad(X.col(j));
  return out;
}

Matrix HamiltonianModel::nonlinear_columns(const Matrix& X) const {
  if (!nonlinear_grad) return Matrix::Zero(X.rows(), X.cols());
  Matrix out(X.rows(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) out.col(j) = nonlinear_grad(X.col(j));
  return out;
}

Matrix HamiltonianModel::rhs_columns(const Matrix& X) const {
  Matrix out(X.rows(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) out.col(j) = rhs_fn(X.col(j));
  return out;
}

SparseMatrix canonical_j(Index m) {
  Triplets t;
  for (Index i = 0; i < m; ++i) {
    t.emplace_back(i, m + i, 1.0);
    t.emplace_back(m + i, i, -1.0);
  }
  SparseMatrix J(2 * m, 2 * m);
  J.setFromTriplets(t.begin(), t.end());
  return J;
}

Matrix canonical_j_dense(Index m) { return Matrix(canonical_j(m)); }

double wave_spline(double y) {
  if (y < 0.0) y = -y;
  if (y <= 1.0) return 1.0 - 1.5 * y * y + 0.75 * y * y * y;
  if (y <= 2.0) {
    const double r = 2.0 - y;
    return 0.25 * r * r * r;
  }
  return 0.0;
}

ModelInstance build_wave(const WaveParams& p) {
  p.validate();
  const Index M = p.cells;
  const double ds = p.length / static_cast<double>(M);
  ModelInstance inst;
  auto& m = inst.model;
  m.kind = ModelKind::Wave;
  m.name = "wave";
  m.ds = ds;
  m.stencils = circulant_stencils(M, ds);
  SparseMatrix Aq = -(p.c * p.c) * m.stencils->d2;
  make_canonical_quadratic(m, block_diag(Aq, identity(M)), 0.0);

  inst.grid.resize(M);
  inst.x0 = Vector::Zero(2 * M);
  for (Index i = 0; i < M; ++i) {
    const double s = static_cast<double>(i) * ds;
    inst.grid(i) = s;
    inst.x0(i) = wave_spline(p.alpha * std::abs(s - 0.5 * p.length));
  }
  return inst;
}

ModelInstance build_nonseparable(const NonsepParams& p) {
  p.validate();
  const Index M = p.points;
  ModelInstance inst;
  auto& m = inst.model;
  m.kind = ModelKind::Nonseparable;
  m.name = "nonseparable";
  m.ds = p.length / static_cast<double>(M - 1);
  Triplets t;
  for (Index i = 0; i < M; ++i) {
    t.emplace_back(i, M + i, 1.0);
    t.emplace_back(M + i, i, 1.0);
  }
  SparseMatrix A(2 * M, 2 * M);
  A.setFromTriplets(t.begin(), t.end());
  make_canonical_quadratic(m, std::move(A), 1.0);

  inst.grid.resize(M);
  inst.x0.resize(2 * M);
  for (Index i = 0; i < M; ++i) {
    const double s = static_cast<double>(i) * m.ds;
    inst.grid(i) = s;
    inst.x0(i) = std::exp(-p.alpha * (s + 1.0)) * std::sin(p.alpha * s);
    inst.x0(M + i) = s;
  }
  return inst;
}

Vector nonseparable_exact(const Vector& x0, double t) {
  const Index M = x0.size() / 2;
  Vector x(x0.size());
  x.head(M) = std::exp(t) * x0.head(M);
  x.tail(M) = std::exp(-t) * x0.tail(M);
  return x;
}

namespace {

Vector kdv_grid(const KdvParams& p, double& ds) {
  ds = 2.0 * p.half_length / static_cast<double>(p.points);
  Vector s(p.points);
  for (Index j = 0; j < p.points; ++j) s(j) = -p.half_length + static_cast<double>(j) * ds;
  return s;
}

void add_kdv_invariants(HamiltonianModel& m, double ds) {
  m.conserved.push_back({"mass", [ds](const Vector& x) { return x.sum() * ds; }});
  m.conserved.push_back(
      {"momentum", [ds](const Vector& x) { return x.squaredNorm() * ds; }});
}

}  // namespace

ModelInstance build_kdv_v1(const KdvParams& p) {
  p.validate();
  ModelInstance inst;
  auto& m = inst.model;
  double ds = 0.0;
  inst.grid = kdv_grid(p, ds);
  m.kind = ModelKind::KdvV1;
  m.name = "kdv";
  m.dim = p.points;
  m.ds = ds;
  m.structure = StructureKind::ConstantPoisson;
  m.kdv = p;
  m.stencils = circulant_stencils(p.points, ds);
  const auto& st = *m.stencils;
  m.poisson = st.d1 / ds;

  QuadraticGradient q;
  q.scale = ds;
  q.a = p.alpha;
  q.K = p.rho * identity(p.points) + p.nu * st.d2;
  m.quadratic = q;
  m.linear_part = ds * q.K;
  const double a = p.alpha;
  m.nonlinear_grad = [ds, a](const Vector& x) -> Vector {
    return (0.5 * a * ds) * x.cwiseProduct(x);
  };
  m.grad = [q](const Vector& x) { return q.eval(x); };
  auto L = std::make_shared<SparseMatrix>(m.poisson);
  m.rhs_fn = [q, L](const Vector& x) -> Vector { return *L * q.eval(x); };
  const double rho = p.rho, nu = p.nu;
  const Index n = p.points;
  m.hamiltonian = [=](const Vector& x) {
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double xj = x(j);
      const double dx = (x((j + 1) % n) - xj) / ds;
      acc += a / 3.0 * xj * xj * xj + rho * xj * xj - nu * dx * dx;
    }
    return 0.5 * acc * ds;
  };
  m.conserved = {{"H", m.hamiltonian}};
  add_kdv_invariants(m, ds);

  inst.x0.resize(p.points);
  for (Index j = 0; j < p.points; ++j) inst.x0(j) = sech2(inst.grid(j) / std::sqrt(2.0));
  return inst;
}

ModelInstance build_kdv_v2(const KdvParams& p) {
  p.validate();
  ModelInstance inst;
  auto& m = inst.model;
  double ds = 0.0;
  inst.grid = kdv_grid(p, ds);
  m.kind = ModelKind::KdvV2;
  m.name = "kdv2";
  m.dim = p.points;
  m.ds = ds;
  m.structure = StructureKind::StatePoisson;
  m.kdv = p;
  m.stencils = circulant_stencils(p.points, ds);
  auto st = std::make_shared<CirculantStencils>(*m.stencils);
  const double a3 = p.alpha / 3.0, rho = p.rho, nu = p.nu;

  m.poisson_at = [st, a3, rho, nu, ds](const Vector& x) -> Matrix {
    const Matrix d1(st->d1);
    Matrix L = a3 * (x.asDiagonal() * d1 + d1 * x.asDiagonal());
    L += rho * d1 + nu * Matrix(st->d3);
    return L / ds;
  };
  m.linear_part = ds * identity(p.points);
  m.grad = [ds](const Vector& x) -> Vector { return ds * x; };
  m.hamiltonian = [ds](const Vector& x) { return 0.5 * x.squaredNorm() * ds; };
  m.rhs_fn = [st, a3, rho, nu](const Vector& x) -> Vector {
    const Vector d1x = st->d1 * x;
    return a3 * (x.cwiseProduct(d1x) + st->d1 * x.cwiseProduct(x)) + rho * d1x +
           nu * (st->d3 * x);
  };
  m.conserved = {{"H", m.hamiltonian}};
  m.conserved.push_back({"mass", [ds](const Vector& x) { return x.sum() * ds; }});

  inst.x0.resize(p.points);
  for (Index j = 0; j < p.points; ++j) inst.x0(j) = sech2(inst.grid(j) / std::sqrt(2.0));
  return inst;
}

ModelInstance build_bbm(const BbmParams& p) {
  p.validate();
  ModelInstance inst;
  auto& m = inst.model;
  const Index n = p.points;
  const double ds = p.length / static_cast<double>(n);
  m.kind = ModelKind::Bbm;
  m.name = "bbm";
  m.dim = n;
  m.ds = ds;
  m.structure = StructureKind::ConstantPoisson;
  m.bbm = p;
  m.stencils = circulant_stencils(n, ds);
  m.spectral = std::make_shared<SpectralOperator>(bbm_multiplier(n, p.length, p.gamma),
                                                  p.fast_transform);
  m.poisson_dense = m.spectral->dense() / ds;

  QuadraticGradient q;
  q.scale = ds;
  q.a = p.beta;
  q.K = p.alpha * identity(n);
  m.quadratic = q;
  m.linear_part = ds * q.K;
  const double alpha = p.alpha, beta = p.beta;
  m.nonlinear_grad = [ds, beta](const Vector& x) -> Vector {
    return (0.5 * beta * ds) * x.cwiseProduct(x);
  };
  m.grad = [q](const Vector& x) { return q.eval(x); };
  auto spectral_op = m.spectral;
  m.rhs_fn = [spectral_op, alpha, beta](const Vector& x) -> Vector {
    return spectral_op->apply(alpha * x + 0.5 * beta * x.cwiseProduct(x));
  };
  m.hamiltonian = [ds, alpha, beta](const Vector& x) {
    const Vector x2 = x.cwiseProduct(x);
    return 0.5 * (alpha * x2.sum() + beta / 3.0 * x2.dot(x)) * ds;
  };
  auto st = std::make_shared<CirculantStencils>(*m.stencils);
  const double gamma = p.gamma;
  m.conserved = {{"H", m.hamiltonian}};
  m.conserved.push_back({"momentum", [st, ds, gamma](const Vector& x) {
                           return (x - gamma * (st->d2 * x)).sum() * ds;
                         }});
  m.conserved.push_back({"KE", [st, ds, gamma](const Vector& x) {
                           const Vector d1x = st->d1 * x;
                           return 0.5 * (x.squaredNorm() + gamma * d1x.squaredNorm()) * ds;
                         }});

  inst.grid.resize(n);
  inst.x0.resize(n);
  const double k1 = std::sqrt(1.0 / (5.0 * p.gamma));
  const double k2 = std::sqrt(1.0 / (6.0 * p.gamma));
  for (Index j = 0; j < n; ++j) {
    const double s = static_cast<double>(j) * ds;
    inst.grid(j) = s;
    inst.x0(j) = 7.0 * sech2(k1 * (s - 0.25)) + 3.0 * sech2(k2 * (s - 0.35));
  }
  return inst;
}

HamiltonianModel build_external(const Matrix& mass, const Matrix& stiffness) {
  const Index n = mass.rows();
  if (mass.cols() != n || stiffness.rows() != n || stiffness.cols() != n) {
    std::ostringstream os;
    os << "external: mass is " << mass.rows() << "x" << mass.cols() << ", stiffness is "
       << stiffness.rows() << "x" << stiffness.cols();
    throw DimensionError(os.str());
  }
  const double mn = mass.norm(), kn = stiffness.norm();
  if ((mass - mass.transpose()).norm() > 1e-12 * std::max(mn, 1.0))
    throw ValidationError("external: mass matrix is not symmetric");
  if ((stiffness - stiffness.transpose()).norm() > 1e-12 * std::max(kn, 1.0))
    throw ValidationError("external: stiffness matrix is not symmetric");
  Eigen::LLT<Matrix> llt(mass);
  if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 0.0)
    throw ValidationError("external: mass matrix is not positive definite");
  Matrix minv = llt.solve(Matrix::Identity(n, n));
  minv = 0.5 * (minv + minv.transpose());

  HamiltonianModel m;
  m.kind = ModelKind::External;
  m.name = "external";
  SparseMatrix K = stiffness.sparseView();
  SparseMatrix Mi = minv.sparseView();
  make_canonical_quadratic(m, block_diag(K, Mi), 0.0);
  return m;
}

ExternalData load_external(const std::filesystem::path& mass_path,
                           const std::filesystem::path& stiffness_path,
                           const std::filesystem::path& q_snapshots,
                           const std::filesystem::path& p_or_v_snapshots,
                           bool momentum_form) {
  const Matrix M(read_matrix_market(mass_path));
  const Matrix K(read_matrix_market(stiffness_path));
  ExternalData out;
  out.model = build_external(M, K);
  const Matrix Q = read_hopm_matrix(q_snapshots);
  Matrix P = read_hopm_matrix(p_or_v_snapshots);
  if (Q.rows() != M.rows() || P.rows() != M.rows() || Q.cols() != P.cols()) {
    std::ostringstream os;
    os << "external: snapshot shapes " << Q.rows() << "x" << Q.cols() << " and "
       << P.rows() << "x" << P.cols() << " do not match " << M.rows() << " DOFs";
    throw DimensionError(os.str());
  }
  if (!momentum_form) P = M * P;
  out.snapshots.resize(2 * M.rows(), Q.cols());
  out.snapshots << Q, P;
  return out;
}

}  // namespace hopinf

#include "hopinf/basis.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "hopinf/hopm.hpp"
#include "hopinf/matkit.hpp"

namespace hopinf {

std::string to_string(BasisKind k) {
  switch (k) {
    case BasisKind::Ordinary: return "ordinary";
    case BasisKind::BlockQP: return "block_qp";
    case BasisKind::CotangentLift: return "cotangent_lift";
  }
  return "unknown";
}

BasisKind basis_kind_from_string(const std::string& s) {
  if (s == "ordinary") return BasisKind::Ordinary;
  if (s == "block_qp") return BasisKind::BlockQP;
  if (s == "cotangent_lift") return BasisKind::CotangentLift;
  throw ValidationError("unknown basis kind '" + s + "'");
}

Vector PodBasis::reference() const {
  return shift ? *shift : Vector::Zero(U.rows());
}

Vector PodBasis::project(const Vector& x) const {
  return shift ? Vector(U.transpose() * (x - *shift)) : Vector(U.transpose() * x);
}

Matrix PodBasis::project_columns(const Matrix& X) const {
  if (!shift) return U.transpose() * X;
  return U.transpose() * (X.colwise() - *shift);
}

Vector PodBasis::lift(const Vector& xhat) const {
  return shift ? Vector(*shift + U * xhat) : Vector(U * xhat);
}

Matrix PodBasis::lift_columns(const Matrix& Xhat) const {
  Matrix X = U * Xhat;
  if (shift) X.colwise() += *shift;
  return X;
}

std::vector<std::string> PodBasis::header() const {
  return {meta_line("kind", to_string(kind)),
          meta_line("center", centered() ? "true" : "false"),
          meta_line("modes", std::to_string(size()))};
}

void normalize_signs(Matrix& U) {
  for (Index j = 0; j < U.cols(); ++j) {
    Index imax = 0;
    U.col(j).cwiseAbs().maxCoeff(&imax);
    if (U(imax, j) < 0.0) U.col(j) *= -1.0;
  }
}

namespace {

void left_vectors(const Matrix& Y, Matrix& left, Vector& sigma) {
  if (Y.cols() == 0 || Y.rows() == 0) throw ValidationError("pod: empty snapshot matrix");
  // for tall data the Gram route would square the condition number; use the SVD
  auto s = svd(Y);
  left = std::move(s.U);
  sigma = std::move(s.sigma);
  normalize_signs(left);
}

void require_rank(const Vector& sigma, Index n, Index rows, Index cols, const char* what) {
  if (n < 1) throw ValidationError(std::string(what) + ": need at least one mode");
  if (n > sigma.size()) {
    std::ostringstream os;
    os << what << ": " << n << " modes requested but at most " << sigma.size()
       << " are available";
    throw ValidationError(os.str());
  }
  const double tol = std::numeric_limits<double>::epsilon() *
                     static_cast<double>(std::max(rows, cols)) *
                     (sigma.size() > 0 ? sigma(0) : 0.0);
  if (!(sigma(n - 1) > tol)) {
    std::ostringstream os;
    os << what << ": snapshot data has numerical rank below " << n
       << "; request fewer modes";
    throw ValidationError(os.str());
  }
}

}  // namespace

PodSpectrum pod_spectrum_centered(const Matrix& Y, BasisKind kind,
                                  std::optional<Vector> shift) {
  PodSpectrum sp;
  sp.kind = kind;
  sp.shift = std::move(shift);
  sp.full_dim = Y.rows();
  if (sp.shift && sp.shift->size() != Y.rows())
    throw DimensionError("pod: shift length does not match snapshot rows");
  if (kind == BasisKind::Ordinary) {
    left_vectors(Y, sp.left, sp.sigma);
    return sp;
  }
  if (Y.rows() % 2 != 0)
    throw ValidationError("pod: block and cotangent bases need an even state dimension");
  const Index M = Y.rows() / 2;
  if (kind == BasisKind::BlockQP) {
    left_vectors(Y.topRows(M), sp.left, sp.sigma);
    left_vectors(Y.bottomRows(M), sp.left_p, sp.sigma_p);
  } else {
    Matrix cat(M, 2 * Y.cols());
    cat << Y.topRows(M), Y.bottomRows(M);
    left_vectors(cat, sp.left, sp.sigma);
  }
  return sp;
}

PodSpectrum pod_spectrum(const Matrix& X, BasisKind kind, bool center) {
  if (X.cols() == 0) throw ValidationError("pod: empty snapshot matrix");
  if (!center) return pod_spectrum_centered(X, kind, std::nullopt);
  Vector x0 = X.col(0);
  return pod_spectrum_centered(X.colwise() - x0, kind, x0);
}

Index PodSpectrum::max_modes() const {
  if (kind == BasisKind::Ordinary) return sigma.size();
  if (kind == BasisKind::BlockQP) return 2 * std::min(sigma.size(), sigma_p.size());
  return 2 * sigma.size();
}

PodBasis PodSpectrum::take(Index n) const {
  PodBasis b;
  b.kind = kind;
  b.shift = shift;
  if (kind == BasisKind::Ordinary) {
    require_rank(sigma, n, left.rows(), left.cols(), "pod_ordinary");
    b.U = left.leftCols(n);
    b.sigma = sigma.head(n);
    return b;
  }
  if (n % 2 != 0) throw ValidationError("pod: block bases need an even mode count");
  const Index m = n / 2;
  const Index M = full_dim / 2;
  b.U = Matrix::Zero(full_dim, n);
  if (kind == BasisKind::BlockQP) {
    require_rank(sigma, m, left.rows(), left.cols(), "pod_block_qp (q block)");
    require_rank(sigma_p, m, left_p.rows(), left_p.cols(), "pod_block_qp (p block)");
    b.U.topLeftCorner(M, m) = left.leftCols(m);
    b.U.bottomRightCorner(M, m) = left_p.leftCols(m);
    b.sigma.resize(n);
    b.sigma << sigma.head(m), sigma_p.head(m);
  } else {
    require_rank(sigma, m, left.rows(), left.cols(), "pod_cotangent_lift");
    b.U.topLeftCorner(M, m) = left.leftCols(m);
    b.U.bottomRightCorner(M, m) = left.leftCols(m);
    b.sigma = sigma.head(m);
  }
  return b;
}

double PodSpectrum::energy(Index n) const {
  if (kind == BasisKind::Ordinary) return snapshot_energy(sigma, n);
  if (n % 2 != 0) throw ValidationError("pod: block bases need an even mode count");
  if (kind == BasisKind::BlockQP)
    return std::min(snapshot_energy(sigma, n / 2), snapshot_energy(sigma_p, n / 2));
  return snapshot_energy(sigma, n / 2);
}

PodBasis pod_ordinary(const Matrix& X, Index n, bool center) {
  return pod_spectrum(X, BasisKind::Ordinary, center).take(n);
}

PodBasis pod_block_qp(const Matrix& X, Index m, bool center) {
  return pod_spectrum(X, BasisKind::BlockQP, center).take(2 * m);
}

PodBasis pod_cotangent_lift(const Matrix& X, Index m, bool center) {
  return pod_spectrum(X, BasisKind::CotangentLift, center).take(2 * m);
}

double snapshot_energy(const Vector& sigma, Index n) {
  if (n < 1 || n > sigma.size())
    throw ValidationError("snapshot_energy: mode count out of range");
  const double total = sigma.sum();
  if (!(total > 0.0)) return 0.0;
  return sigma.head(n).sum() / total;
}

double projection_error(const Matrix& X, const PodBasis& basis) {
  require_dims(X.rows() == basis.full_dim(), "projection_error: dimension mismatch");
  Matrix Y = basis.shift ? Matrix(X.colwise() - *basis.shift) : X;
  const double ny = Y.norm();
  if (!(ny > 0.0)) return 0.0;
  const Matrix R = Y - basis.U * (basis.U.transpose() * Y);
  return R.norm() / ny;
}

}  // namespace hopinf

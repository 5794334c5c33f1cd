#include "hopinf/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace hopinf {

Matrix kron(const Matrix& A, const Matrix& B) {
  const Index p = B.rows(), q = B.cols();
  Matrix out(A.rows() * p, A.cols() * q);
  for (Index j = 0; j < A.cols(); ++j)
    for (Index i = 0; i < A.rows(); ++i)
      out.block(i * p, j * q, p, q) = A(i, j) * B;
  return out;
}

Vector vec(const Matrix& A) {
  return Eigen::Map<const Vector>(A.data(), A.size());
}

Matrix unvec(const Vector& v, Index m, Index n) {
  if (m < 0 || n < 0 || v.size() != m * n) {
    std::ostringstream os;
    os << "unvec: vector of length " << v.size() << " cannot be reshaped to " << m
       << "x" << n;
    throw DimensionError(os.str());
  }
  return Eigen::Map<const Matrix>(v.data(), m, n);
}

Matrix commutation_matrix(Index m, Index n) {
  return Matrix(commutation_matrix_sparse(m, n));
}

SparseMatrix commutation_matrix_sparse(Index m, Index n) {
  require_dims(m >= 1 && n >= 1, "commutation_matrix: sizes must be positive");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m * n));
  // X(i,j) sits at j*m+i in vec(X) and at i*n+j in vec(X^T).
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) trip.emplace_back(i * n + j, j * m + i, 1.0);
  SparseMatrix K(m * n, m * n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

SvdResult svd(const Matrix& A) {
  require_dims(A.rows() > 0 && A.cols() > 0, "svd: empty matrix");
  if (!A.allFinite()) throw NumericalError("svd: input contains NaN or Inf");
  Eigen::BDCSVD<Matrix> dec(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    std::ostringstream os;
    os << "svd: decomposition of " << A.rows() << "x" << A.cols()
       << " matrix did not converge (|A|_F = " << A.norm() << ")";
    throw NumericalError(os.str());
  }
  return SvdResult{dec.matrixU(), dec.singularValues(), dec.matrixV().transpose()};
}

Matrix oplus_bar(const Matrix& A, const Matrix& B) {
  require_dims(A.rows() == A.cols() && B.rows() == B.cols() && A.rows() == B.rows(),
               "oplus_bar: operands must be square and of equal size");
  return kron(A, B) + kron(B, A);
}

namespace {

// Cholesky with a pivot-ratio test; returns false when the matrix is numerically
// singular.
bool factor_spd(const Matrix& M, Eigen::LLT<Matrix>& llt) {
  llt.compute(M);
  if (llt.info() != Eigen::Success) return false;
  const Vector d = llt.matrixLLT().diagonal();
  const double lo = d.minCoeff(), hi = d.maxCoeff();
  if (!(hi > 0.0)) return false;
  return (lo * lo) / (hi * hi) >= 1e-14;
}

[[noreturn]] void throw_rank(const char* who, const Matrix& M) {
  const double scale = M.rows() > 0 ? M.trace() / static_cast<double>(M.rows()) : 1.0;
  const double eta = 1e-10 * (scale > 0.0 ? scale : 1.0);
  std::ostringstream os;
  os << who << ": normal system of size " << M.rows()
     << " is singular; training data is rank deficient. Retry with eta > 0, e.g. eta = "
     << eta;
  throw RankDeficiencyError(os.str(), eta);
}

struct FreeEntry {
  Index i, j;  // i <= j
};

// Orthonormal coordinates of the symmetry class: off-diagonal pairs carry
// (e_ij +- e_ji)/sqrt2, diagonal entries (symmetric class only) carry e_ii.
std::vector<FreeEntry> free_entries(Index n, bool sym) {
  std::vector<FreeEntry> free;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i)
      if (i < j || sym) free.push_back({i, j});
  return free;
}

Matrix from_free(const Vector& y, const std::vector<FreeEntry>& free, Index n, double sgn) {
  const double r2 = 1.0 / std::sqrt(2.0);
  Matrix D = Matrix::Zero(n, n);
  for (Index a = 0; a < static_cast<Index>(free.size()); ++a) {
    const auto [i, j] = free[static_cast<std::size_t>(a)];
    if (i == j) {
      D(i, i) = y(a);
    } else {
      D(i, j) = r2 * y(a);
      D(j, i) = sgn * D(i, j);
    }
  }
  return D;
}

// Flop budget below which constrained_lstsq factors the design matrix itself.
constexpr double kQrBudget = 5e8;

}  // namespace

Matrix lstsq_opinf(const Matrix& Xt, const Matrix& X, double eta) {
  require_dims(Xt.cols() == X.cols(), "lstsq_opinf: snapshot counts differ");
  if (eta < 0.0) throw ValidationError("lstsq_opinf: eta must be nonnegative");
  Matrix gram = X * X.transpose();
  gram.diagonal().array() += eta;
  Eigen::LLT<Matrix> llt;
  if (!factor_spd(gram, llt)) throw_rank("lstsq_opinf", gram);
  // D gram = Xt X^T  <=>  gram D^T = X Xt^T
  return llt.solve(X * Xt.transpose()).transpose();
}

Matrix solve_oplus_normal(const Matrix& G, const Matrix& S, const Matrix& R,
                          SymmetryKind kind, double eta) {
  const Index n = G.rows();
  require_dims(G.cols() == n && S.rows() == n && S.cols() == n && R.rows() == n &&
                   R.cols() == n,
               "solve_oplus_normal: operand sizes differ");
  if (eta < 0.0) throw ValidationError("constrained solve: eta must be nonnegative");
  const bool sym = kind == SymmetryKind::Symmetric;
  const double sgn = sym ? 1.0 : -1.0;
  const double r2 = 1.0 / std::sqrt(2.0);

  const std::vector<FreeEntry> free = free_entries(n, sym);
  const Index p = static_cast<Index>(free.size());
  if (p == 0) return Matrix::Zero(n, n);

  // Entry of G (x) S + S (x) G between vec positions (i,j) and (k,l).
  auto M = [&](Index i, Index j, Index k, Index l) {
    return G(j, l) * S(i, k) + S(j, l) * G(i, k);
  };

  Matrix P(p, p);
  Vector rhs(p);
  for (Index a = 0; a < p; ++a) {
    const auto [i, j] = free[a];
    if (i == j)
      rhs(a) = R(i, i);
    else
      rhs(a) = r2 * (R(i, j) + sgn * R(j, i));
    for (Index b = a; b < p; ++b) {
      const auto [k, l] = free[b];
      double v;
      if (i == j && k == l)
        v = M(i, i, k, k);
      else if (i == j)
        v = r2 * (M(i, i, k, l) + sgn * M(i, i, l, k));
      else if (k == l)
        v = r2 * (M(i, j, k, k) + sgn * M(j, i, k, k));
      else
        v = 0.5 * (M(i, j, k, l) + sgn * M(i, j, l, k) + sgn * M(j, i, k, l) +
                   M(j, i, l, k));
      P(a, b) = v;
      P(b, a) = v;
    }
  }
  P.diagonal().array() += 2.0 * eta;

  Eigen::LLT<Matrix> llt;
  if (!factor_spd(P, llt)) throw_rank("constrained_lstsq", P);
  return from_free(llt.solve(rhs), free, n, sgn);
}

Matrix constrained_lstsq(const Matrix& A, const Matrix& B, const Matrix& C,
                         SymmetryKind kind, double eta) {
  const Index n = A.rows();
  require_dims(A.cols() == n, "constrained_lstsq: A must be square");
  require_dims(B.rows() == n && C.rows() == n && B.cols() == C.cols(),
               "constrained_lstsq: B and C must be N x n_s with N = rows(A)");
  if (eta < 0.0) throw ValidationError("constrained solve: eta must be nonnegative");
  const bool sym = kind == SymmetryKind::Symmetric;
  const double sgn = sym ? 1.0 : -1.0;
  const std::vector<FreeEntry> free = free_entries(n, sym);
  const Index p = static_cast<Index>(free.size());
  if (p == 0) return Matrix::Zero(n, n);
  const Index rows = n * B.cols() + (eta > 0.0 ? p : 0);
  if (static_cast<double>(rows) * static_cast<double>(p * p) <= kQrBudget) {
    // Small problem: factor [A E_a B ; sqrt(eta) I] directly instead of squaring it.
    const double r2 = 1.0 / std::sqrt(2.0);
    const Index m = n * B.cols();
    Matrix Phi = Matrix::Zero(rows, p);
    for (Index a = 0; a < p; ++a) {
      const auto [i, j] = free[static_cast<std::size_t>(a)];
      Matrix block = A.col(i) * B.row(j);
      if (i == j)
        Phi.col(a).head(m) = block.reshaped();
      else
        Phi.col(a).head(m) = (r2 * (block + sgn * A.col(j) * B.row(i))).reshaped();
    }
    if (eta > 0.0) Phi.bottomRows(p).diagonal().setConstant(std::sqrt(eta));
    Vector rhs = Vector::Zero(rows);
    rhs.head(m) = C.reshaped();
    Eigen::ColPivHouseholderQR<Matrix> qr(Phi);
    const Vector rd = qr.matrixR().diagonal().cwiseAbs();
    const double hi = rd.size() ? rd.maxCoeff() : 0.0;
    // QR does not square the conditioning, so it tolerates cond(Phi) up to 1e10.
    if (!(hi > 0.0) || rd.minCoeff() < 1e-10 * hi) {
      const Matrix gram = 2.0 * Phi.transpose() * Phi;
      throw_rank("constrained_lstsq", gram);
    }
    return from_free(qr.solve(rhs), free, n, sgn);
  }
  const Matrix AtCBt = A.transpose() * C * B.transpose();
  const Matrix R = kind == SymmetryKind::Symmetric ? Matrix(AtCBt + AtCBt.transpose())
                                                   : Matrix(AtCBt - AtCBt.transpose());
  return solve_oplus_normal(A.transpose() * A, B * B.transpose(), R, kind, eta);
}

Matrix symmetry_part(const Matrix& D, SymmetryKind kind) {
  require_dims(D.rows() == D.cols(), "symmetry_part: matrix must be square");
  Matrix out(D.rows(), D.cols());
  const double sgn = kind == SymmetryKind::Symmetric ? 1.0 : -1.0;
  for (Index j = 0; j < D.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      out(i, j) = 0.5 * (D(i, j) + sgn * D(j, i));
      out(j, i) = sgn * out(i, j);
    }
    out(j, j) = kind == SymmetryKind::Symmetric ? D(j, j) : 0.0;
  }
  return out;
}

double rel_diff(const Matrix& A, const Matrix& B) {
  const double nb = B.norm();
  const double d = (A - B).norm();
  return nb > 0.0 ? d / nb : d;
}

}  // namespace hopinf

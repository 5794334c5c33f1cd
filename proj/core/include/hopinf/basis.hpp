#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hopinf/types.hpp"

namespace hopinf {

enum class BasisKind { Ordinary, BlockQP, CotangentLift };

std::string to_string(BasisKind k);
BasisKind basis_kind_from_string(const std::string& s);

struct PodBasis {
  Matrix U;  // N x n, orthonormal columns
  BasisKind kind = BasisKind::Ordinary;
  std::optional<Vector> shift;  // mean-centering reference x0
  Vector sigma;                 // retained singular values

  Index size() const { return U.cols(); }
  Index full_dim() const { return U.rows(); }
  bool centered() const { return shift.has_value(); }
  Vector reference() const;  // shift or zero
  Vector project(const Vector& x) const;
  Matrix project_columns(const Matrix& X) const;
  Vector lift(const Vector& xhat) const;
  Matrix lift_columns(const Matrix& Xhat) const;
  std::vector<std::string> header() const;
};

// Singular data of the snapshot set, computed once and truncated on demand.
// For the block kind, left/sigma hold the q block and left_p/sigma_p the p block.
struct PodSpectrum {
  BasisKind kind = BasisKind::Ordinary;
  std::optional<Vector> shift;
  Matrix left;
  Vector sigma;
  Matrix left_p;
  Vector sigma_p;
  Index full_dim = 0;

  Index max_modes() const;  // largest admissible n
  PodBasis take(Index n) const;
  double energy(Index n) const;
};

// Y = X - x0 * 1^T when centering, with x0 the first column of X.
PodSpectrum pod_spectrum(const Matrix& X, BasisKind kind, bool center);
// Same with precentered data and an explicit shift (parametric training sets).
PodSpectrum pod_spectrum_centered(const Matrix& Y, BasisKind kind,
                                  std::optional<Vector> shift);

PodBasis pod_ordinary(const Matrix& X, Index n, bool center);
PodBasis pod_block_qp(const Matrix& X, Index m, bool center);
PodBasis pod_cotangent_lift(const Matrix& X, Index m, bool center);

// sum_{i<n} sigma_i / sum_i sigma_i.
double snapshot_energy(const Vector& sigma, Index n);

// ||Y - U U^T Y||_F / ||Y||_F with Y centered by the basis shift.
double projection_error(const Matrix& X, const PodBasis& basis);

// Flip each column so its largest-magnitude entry is positive.
void normalize_signs(Matrix& U);

}  // namespace hopinf

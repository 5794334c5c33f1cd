#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hopinf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Singular normal system. suggested_eta is a ridge value that would make it solvable.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& what, double suggested_eta)
      : Error(what), suggested_eta_(suggested_eta) {}
  double suggested_eta() const { return suggested_eta_; }

 private:
  double suggested_eta_;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, long step = -1, double residual = 0.0)
      : Error(what), step_(step), residual_(residual) {}
  long step() const { return step_; }
  double residual() const { return residual_; }

 private:
  long step_;
  double residual_;
};

// State left the admissible range (NaN or norm above the blow-up cap).
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// States whose norm exceeds this are treated as blown up.
inline constexpr double kDivergenceNorm = 1e12;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace hopinf

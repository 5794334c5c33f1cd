#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hopinf/fourier.hpp"
#include "hopinf/types.hpp"

namespace hopinf {

enum class ModelKind { Wave, Nonseparable, KdvV1, KdvV2, Bbm, External };
enum class StructureKind { Canonical, ConstantPoisson, StatePoisson };

std::string to_string(ModelKind k);

// Periodic central differences: d1 ~ 1/(2 ds), d2 ~ 1/ds^2, d3 ~ 1/(2 ds^3).
struct CirculantStencils {
  SparseMatrix d1, d2, d3;
  double ds = 1.0;
};
CirculantStencils circulant_stencils(Index n, double ds);

// Gradient of the form scale * ((a/2) x.^2 + K x), K symmetric.
struct QuadraticGradient {
  double scale = 1.0;
  double a = 0.0;
  SparseMatrix K;

  Vector eval(const Vector& x) const;
  // Exact average of eval over the segment [u, v].
  Vector segment_average(const Vector& u, const Vector& v) const;
};

struct WaveParams {
  double c = 0.1;
  double length = 1.0;
  Index cells = 500;
  double alpha = 5.0;
  void validate() const;
};

struct NonsepParams {
  double alpha = 5.0;
  Index points = 500;
  double length = 1.0;
  void validate() const;
};

struct KdvParams {
  double alpha = -6.0;
  double rho = 0.0;
  double nu = -1.0;
  double half_length = 20.0;  // domain [-l, l]
  Index points = 500;
  void validate() const;
};

struct BbmParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1e-4;
  double length = 1.0;
  Index points = 1024;
  bool fast_transform = true;
  void validate() const;
};

struct ConservedQuantity {
  std::string name;
  std::function<double(const Vector&)> eval;
};

struct HamiltonianModel {
  ModelKind kind = ModelKind::External;
  std::string name;
  Index dim = 0;
  StructureKind structure = StructureKind::Canonical;
  double ds = 1.0;

  SparseMatrix poisson;     // J or constant L (empty for BBM and KdV v2)
  Matrix poisson_dense;     // BBM only
  std::function<Matrix(const Vector&)> poisson_at;  // KdV v2

  std::function<double(const Vector&)> hamiltonian;
  std::function<Vector(const Vector&)> grad;
  std::function<Vector(const Vector&)> rhs_fn;

  std::optional<SparseMatrix> linear_part;              // A in grad = A x + f(x)
  std::function<Vector(const Vector&)> nonlinear_grad;  // f, empty means zero
  std::optional<QuadraticGradient> quadratic;
  std::optional<CirculantStencils> stencils;
  std::optional<KdvParams> kdv;
  std::optional<BbmParams> bbm;
  std::shared_ptr<SpectralOperator> spectral;

  std::vector<ConservedQuantity> conserved;

  Vector rhs(const Vector& x) const { return rhs_fn(x); }
  Matrix poisson_matrix(const Vector& x) const;
  Matrix poisson_matrix() const;  // constant structures only
  bool is_linear() const {
    return linear_part.has_value() && !nonlinear_grad && structure != StructureKind::StatePoisson;
  }
  Vector nonlinear_part(const Vector& x) const;
  Matrix grad_columns(const Matrix& X) const;
  Matrix nonlinear_columns(const Matrix& X) const;
  Matrix rhs_columns(const Matrix& X) const;
};

// Canonical J of size 2m.
SparseMatrix canonical_j(Index m);
Matrix canonical_j_dense(Index m);

// Cubic spline initial profile of the wave example.
double wave_spline(double y);

struct ModelInstance {
  HamiltonianModel model;
  Vector x0;
  Vector grid;
};

ModelInstance build_wave(const WaveParams& p);
ModelInstance build_nonseparable(const NonsepParams& p);
ModelInstance build_kdv_v1(const KdvParams& p);
ModelInstance build_kdv_v2(const KdvParams& p);
ModelInstance build_bbm(const BbmParams& p);

// Exact flow of the nonseparable example: q = e^t q0, p = e^-t p0.
Vector nonseparable_exact(const Vector& x0, double t);

// Canonical model from mass/stiffness matrices.
HamiltonianModel build_external(const Matrix& mass, const Matrix& stiffness);

struct ExternalData {
  HamiltonianModel model;
  Matrix snapshots;  // stacked (q, p)
};

ExternalData load_external(const std::filesystem::path& mass_path,
                           const std::filesystem::path& stiffness_path,
                           const std::filesystem::path& q_snapshots,
                           const std::filesystem::path& p_or_v_snapshots,
                           bool momentum_form);

}  // namespace hopinf

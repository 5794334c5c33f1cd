#include "hopinf/reduce.hpp"

#include <sstream>

#include "hopinf/matkit.hpp"

namespace hopinf {

std::string to_string(RomMethod m) {
  switch (m) {
    case RomMethod::Galerkin: return "galerkin";
    case RomMethod::Hamiltonian: return "hamiltonian";
    case RomMethod::GenericOpInf: return "opinf";
    case RomMethod::CanonicalOpInf: return "ch_opinf";
    case RomMethod::NoncanonicalOpInf: return "nch_opinf";
    case RomMethod::LegacySeparable: return "legacy_opinf";
  }
  return "unknown";
}

RomMethod rom_method_from_string(const std::string& s) {
  for (auto m : {RomMethod::Galerkin, RomMethod::Hamiltonian, RomMethod::GenericOpInf,
                 RomMethod::CanonicalOpInf, RomMethod::NoncanonicalOpInf,
                 RomMethod::LegacySeparable})
    if (to_string(m) == s) return m;
  throw ValidationError("unknown ROM method '" + s +
                        "' (expected galerkin, hamiltonian, opinf, ch_opinf, nch_opinf or "
                        "legacy_opinf)");
}

bool is_skew(const Matrix& L, double rel_tol) {
  return L.rows() == L.cols() &&
         (L + L.transpose()).norm() <= rel_tol * std::max(L.norm(), 1e-300);
}

bool is_symmetric(const Matrix& A, double rel_tol) {
  return A.rows() == A.cols() &&
         (A - A.transpose()).norm() <= rel_tol * std::max(A.norm(), 1e-300);
}

Matrix intrusive_galerkin(const Matrix& D, const Matrix& U) {
  require_dims(D.rows() == U.rows() && D.cols() == U.rows(),
               "intrusive_galerkin: operator does not match the basis");
  return U.transpose() * D * U;
}

Matrix intrusive_hamiltonian(const Matrix& L, const Matrix& U) {
  require_dims(L.rows() == U.rows() && L.cols() == U.rows(),
               "intrusive_hamiltonian: operator does not match the basis");
  if (!is_skew(L, 1e-10)) throw ValidationError("intrusive_hamiltonian: L is not skew");
  return symmetry_part(U.transpose() * L * U, SymmetryKind::Skew);
}

Matrix opinf_generic(const Matrix& Xhat, const Matrix& Xhat_t, double eta) {
  require_dims(Xhat.rows() == Xhat_t.rows() && Xhat.cols() == Xhat_t.cols(),
               "opinf_generic: state and derivative data differ in shape");
  return lstsq_opinf(Xhat_t, Xhat, eta);
}

namespace {

Matrix grads_or_zero(const InferenceInputs& in) {
  if (in.grads.size() == 0) return Matrix::Zero(in.states.rows(), in.states.cols());
  require_dims(in.grads.rows() == in.states.rows() && in.grads.cols() == in.states.cols(),
               "inference: gradient data has the wrong shape");
  return in.grads;
}

void check_common(const InferenceInputs& in) {
  require_dims(in.states.rows() == in.derivs.rows() && in.states.cols() == in.derivs.cols(),
               "inference: state and derivative data differ in shape");
  if (in.eta < 0.0) throw ValidationError("inference: eta must be nonnegative");
}

}  // namespace

Matrix opinf_canonical(const InferenceInputs& in, CanonicalVariant variant) {
  check_common(in);
  const Index n = in.states.rows();
  require_dims(in.poisson.rows() == n && in.poisson.cols() == n,
               "opinf_canonical: J-hat must be n x n");
  const Matrix F = grads_or_zero(in);
  const Matrix& J = in.poisson;
  if (variant == CanonicalVariant::Exact)
    return constrained_lstsq(J, in.states, in.derivs - J * F, SymmetryKind::Symmetric,
                             in.eta);
  const Matrix& X = in.states;
  const Matrix G = J.transpose() * in.derivs * X.transpose();
  const Matrix H = F * X.transpose();
  const Matrix R = G + G.transpose() - H - H.transpose();
  return solve_oplus_normal(Matrix::Identity(n, n), X * X.transpose(), R,
                            SymmetryKind::Symmetric, in.eta);
}

Matrix opinf_noncanonical(const InferenceInputs& in) {
  require_dims(in.grads.rows() == in.derivs.rows() && in.grads.cols() == in.derivs.cols(),
               "opinf_noncanonical: gradient data has the wrong shape");
  if (in.eta < 0.0) throw ValidationError("inference: eta must be nonnegative");
  const Index n = in.derivs.rows();
  return constrained_lstsq(Matrix::Identity(n, n), in.grads, in.derivs, SymmetryKind::Skew,
                           in.eta);
}

Matrix opinf_legacy_separable(const InferenceInputs& in, const PodBasis& basis) {
  if (basis.kind != BasisKind::CotangentLift)
    throw ValidationError("legacy separable inference requires a cotangent-lift basis");
  check_common(in);
  const Index n = in.states.rows();
  require_dims(n == basis.size() && n % 2 == 0, "legacy separable: basis size mismatch");
  const Index m = n / 2;
  const Matrix F = grads_or_zero(in);
  const Matrix I = Matrix::Identity(m, m);
  // q' = A_pp p + f_p and p' = -(A_qq q + f_q)
  const Matrix App = constrained_lstsq(I, in.states.bottomRows(m),
                                       in.derivs.topRows(m) - F.bottomRows(m),
                                       SymmetryKind::Symmetric, in.eta);
  const Matrix Aqq = constrained_lstsq(I, in.states.topRows(m),
                                       -in.derivs.bottomRows(m) - F.topRows(m),
                                       SymmetryKind::Symmetric, in.eta);
  Matrix A = Matrix::Zero(n, n);
  A.topLeftCorner(m, m) = Aqq;
  A.bottomRightCorner(m, m) = App;
  return A;
}

Matrix truncate(const Matrix& D, Index n) {
  if (n < 1 || n > D.rows() || n > D.cols())
    throw ValidationError("truncate: target size out of range");
  return D.topLeftCorner(n, n);
}

Vector ReducedLinearModel::initial_state(const Vector& x0) const {
  require_dims(x0.size() == basis.full_dim(), "ROM initial state has the wrong size");
  if (centered && basis.shift) return basis.U.transpose() * (x0 - *basis.shift);
  return basis.U.transpose() * x0;
}

Vector ReducedLinearModel::reconstruct(const Vector& xhat) const {
  Vector x = basis.U * xhat;
  if (centered && basis.shift) x += *basis.shift;
  return x;
}

Matrix ReducedLinearModel::reconstruct_columns(const Matrix& Xhat) const {
  Matrix X = basis.U * Xhat;
  if (centered && basis.shift) X.colwise() += *basis.shift;
  return X;
}

Trajectory ReducedLinearModel::integrate(const Vector& x0, double dt, Index steps) const {
  return implicit_midpoint_linear(op, offset, initial_state(x0), dt, steps);
}

double ReducedLinearModel::reduced_energy(const Vector& xhat) const {
  if (energy.size() == 0)
    throw ValidationError("reduced energy is not defined for method " + to_string(method));
  double e = 0.5 * xhat.dot(energy * xhat);
  if (energy_linear.size() == xhat.size()) e += energy_linear.dot(xhat);
  return e;
}

ReducedLinearModel assemble_linear_rom(const HamiltonianModel& model, const PodBasis& basis,
                                       RomMethod method, const Matrix& inferred) {
  if (!model.is_linear())
    throw ValidationError("assemble_linear_rom: model '" + model.name + "' is not linear");
  require_dims(basis.full_dim() == model.dim, "assemble_linear_rom: basis does not match model");
  const Matrix& U = basis.U;
  const Index n = U.cols();
  const SparseMatrix& A = *model.linear_part;
  const SparseMatrix& L = model.poisson;
  const Matrix AU = A * U;
  const Vector x0 = basis.reference();

  auto need = [&](const char* what) {
    if (inferred.rows() != n || inferred.cols() != n) {
      std::ostringstream os;
      os << to_string(method) << ": expected an inferred " << what << " of size " << n;
      throw DimensionError(os.str());
    }
  };

  ReducedLinearModel rom;
  rom.method = method;
  rom.basis = basis;
  rom.offset = Vector::Zero(n);
  switch (method) {
    case RomMethod::Galerkin: {
      rom.centered = basis.centered();
      rom.op = U.transpose() * (L * AU);
      if (rom.centered) rom.offset = U.transpose() * (L * (A * x0));
      break;
    }
    case RomMethod::Hamiltonian:
    case RomMethod::NoncanonicalOpInf: {
      rom.centered = basis.centered();
      if (method == RomMethod::Hamiltonian) {
        rom.poisson = symmetry_part(U.transpose() * (L * U), SymmetryKind::Skew);
      } else {
        need("L-hat");
        if (!is_skew(inferred, 1e-10)) throw ValidationError("nch_opinf: L-hat is not skew");
        rom.poisson = inferred;
      }
      rom.energy = symmetry_part(U.transpose() * AU, SymmetryKind::Symmetric);
      rom.op = rom.poisson * rom.energy;
      if (rom.centered) {
        rom.energy_linear = U.transpose() * (A * x0);
        rom.offset = rom.poisson * rom.energy_linear;
      }
      break;
    }
    case RomMethod::CanonicalOpInf:
    case RomMethod::LegacySeparable: {
      need("A-hat");
      if (!is_symmetric(inferred, 1e-10))
        throw ValidationError(to_string(method) + ": A-hat is not symmetric");
      rom.centered = false;
      rom.poisson = symmetry_part(U.transpose() * (L * U), SymmetryKind::Skew);
      rom.energy = inferred;
      rom.op = rom.poisson * rom.energy;
      break;
    }
    case RomMethod::GenericOpInf: {
      need("D-hat");
      rom.centered = false;
      rom.op = inferred;
      break;
    }
  }
  return rom;
}

namespace {

// Indices kept when shrinking a basis of the given kind to n columns.
std::vector<Index> kept_indices(const PodBasis& b, Index n) {
  const Index full = b.size();
  if (n < 1 || n > full) throw ValidationError("truncate: target size out of range");
  std::vector<Index> idx;
  if (b.kind == BasisKind::Ordinary) {
    for (Index i = 0; i < n; ++i) idx.push_back(i);
    return idx;
  }
  if (n % 2 != 0) throw ValidationError("truncate: block bases need an even size");
  const Index m = full / 2, k = n / 2;
  for (Index i = 0; i < k; ++i) idx.push_back(i);
  for (Index i = 0; i < k; ++i) idx.push_back(m + i);
  return idx;
}

Matrix pick(const Matrix& M, const std::vector<Index>& idx) {
  if (M.size() == 0) return M;
  const Index k = static_cast<Index>(idx.size());
  Matrix out(k, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < k; ++i) out(i, j) = M(idx[i], idx[j]);
  return out;
}

Vector pick(const Vector& v, const std::vector<Index>& idx) {
  if (v.size() == 0) return v;
  Vector out(static_cast<Index>(idx.size()));
  for (Index i = 0; i < out.size(); ++i) out(i) = v(idx[i]);
  return out;
}

PodBasis pick(const PodBasis& b, const std::vector<Index>& idx) {
  PodBasis out = b;
  out.U.resize(b.U.rows(), static_cast<Index>(idx.size()));
  for (Index j = 0; j < out.U.cols(); ++j) out.U.col(j) = b.U.col(idx[j]);
  if (b.kind == BasisKind::CotangentLift)
    out.sigma = b.sigma.head(std::min<Index>(b.sigma.size(), out.U.cols() / 2));
  else if (b.sigma.size() == b.size())
    out.sigma = pick(b.sigma, idx);
  return out;
}

}  // namespace

Matrix truncate(const Matrix& D, const PodBasis& basis, Index n) {
  require_dims(D.rows() == basis.size() && D.cols() == basis.size(),
               "truncate: operator does not match the basis");
  return pick(D, kept_indices(basis, n));
}

ReducedLinearModel truncate(const ReducedLinearModel& rom, Index n) {
  const auto idx = kept_indices(rom.basis, n);
  ReducedLinearModel out = rom;
  out.op = pick(rom.op, idx);
  out.offset = pick(rom.offset, idx);
  out.poisson = pick(rom.poisson, idx);
  out.energy = pick(rom.energy, idx);
  out.energy_linear = pick(rom.energy_linear, idx);
  out.basis = pick(rom.basis, idx);
  // a block of L A is not the product of the blocks
  if (out.poisson.size() > 0 && out.energy.size() > 0) {
    out.op = out.poisson * out.energy;
    out.offset = out.energy_linear.size() == n ? Vector(out.poisson * out.energy_linear)
                                               : Vector(Vector::Zero(n));
  }
  return out;
}

ReducedCubicModel truncate(const ReducedCubicModel& rom, Index n) {
  const auto idx = kept_indices(rom.basis, n);
  ReducedCubicModel out = rom;
  out.poisson = pick(rom.poisson, idx);
  out.offset = pick(rom.offset, idx);
  out.linear = pick(rom.linear, idx);
  out.tensor = Tensor3(n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c) out.tensor(a, b, c) = rom.tensor(idx[a], idx[b], idx[c]);
  out.basis = pick(rom.basis, idx);
  out.energy_fn = nullptr;
  if (rom.energy_fn && rom.rule == StepRule::AvfCubic) {
    // the truncated operators define their own potential
    const Vector c = out.offset;
    const Matrix C = out.linear;
    const Tensor3 T = out.tensor;
    out.energy_fn = [c, C, T](const Vector& y) {
      return c.dot(y) + 0.5 * y.dot(C * y) + T.contract(y, y).dot(y) / 3.0;
    };
  }
  return out;
}

}  // namespace hopinf

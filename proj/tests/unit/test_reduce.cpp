#include <gtest/gtest.h>

#include <random>

#include "hopinf/basis.hpp"
#include "hopinf/matkit.hpp"
#include "hopinf/models.hpp"
#include "hopinf/reduce.hpp"
#include "support/oracles.hpp"

using namespace hopinf;

namespace {

struct WaveData {
  ModelInstance inst;
  Matrix X, Xdot, grads;
};

// Small wave runs from random states, so the data spans the whole phase space.
WaveData wave_data(Index cells = 16, Index runs = 32, Index steps = 10) {
  WaveParams p;
  p.cells = cells;
  WaveData d{build_wave(p), {}, {}, {}};
  const auto& m = d.inst.model;
  const Matrix D(m.poisson * *m.linear_part);
  std::mt19937_64 rng(77);
  d.X.resize(2 * cells, runs * (steps + 1));
  for (Index r = 0; r < runs; ++r) {
    const Vector x0 = r == 0 ? d.inst.x0 : oracle::random_vector(rng, 2 * cells);
    d.X.middleCols(r * (steps + 1), steps + 1) =
        implicit_midpoint_linear(D, Vector(), x0, 0.01, steps).states;
  }
  d.Xdot = m.rhs_columns(d.X);
  d.grads = m.grad_columns(d.X);
  return d;
}

Matrix random_orthonormal(std::mt19937_64& rng, Index N, Index n) {
  return Eigen::HouseholderQR<Matrix>(oracle::random_matrix(rng, N, n))
      .householderQ() * Matrix::Identity(N, n);
}

}  // namespace

TEST(Intrusive, FormulasAndSkewness) {
  std::mt19937_64 rng(1);
  Matrix L = oracle::random_matrix(rng, 6, 6);
  L -= L.transpose().eval();
  const Matrix U = random_orthonormal(rng, 6, 3);
  EXPECT_LT((intrusive_galerkin(L, U) - U.transpose() * L * U).norm(), 1e-14);
  const Matrix Lh = intrusive_hamiltonian(L, U);
  EXPECT_EQ((Lh + Lh.transpose()).norm(), 0.0);
  EXPECT_THROW(intrusive_hamiltonian(Matrix::Identity(6, 6), U), ValidationError);
}

TEST(Inference, NoncanonicalRecoversProjectedOperatorOnFullBasis) {
  const auto d = wave_data();
  InferenceInputs in;
  in.derivs = d.Xdot;
  in.grads = d.grads;
  const Matrix Lhat = opinf_noncanonical(in);
  const Matrix J = canonical_j_dense(16);
  EXPECT_LT(rel_diff(Lhat, J), 1e-8);
  EXPECT_TRUE(is_skew(Lhat));
}

TEST(Inference, CanonicalVariantsRecoverEnergyMatrix) {
  const auto d = wave_data();
  const Matrix A(*d.inst.model.linear_part);
  InferenceInputs in;
  in.states = d.X;
  in.derivs = d.Xdot;
  in.poisson = canonical_j_dense(16);
  EXPECT_LT(rel_diff(opinf_canonical(in, CanonicalVariant::Exact), A), 1e-8);
  // J^T J = I, so the approximate normal equations are exact here too
  EXPECT_LT(rel_diff(opinf_canonical(in, CanonicalVariant::ApproxIdentity), A), 1e-8);
}

TEST(Inference, GenericRecoversDynamics) {
  const auto d = wave_data();
  const auto& m = d.inst.model;
  const Matrix D(m.poisson * *m.linear_part);
  EXPECT_LT(rel_diff(opinf_generic(d.X, d.Xdot, 0.0), D), 1e-8);
}

TEST(Inference, LegacyIsBlockDiagonalAndNeedsCotangentBasis) {
  const auto d = wave_data();
  const PodBasis b = pod_cotangent_lift(d.X, 16, false);
  InferenceInputs in;
  in.states = b.project_columns(d.X);
  in.derivs = b.project_columns(d.Xdot);
  const Matrix A = opinf_legacy_separable(in, b);
  EXPECT_EQ(A.topRightCorner(16, 16).norm(), 0.0);
  const Matrix Aint = b.U.transpose() * Matrix(*d.inst.model.linear_part) * b.U;
  EXPECT_LT(rel_diff(A, Aint), 1e-8);
  EXPECT_THROW(opinf_legacy_separable(in, pod_ordinary(d.X, 32, false)), ValidationError);
}

TEST(Inference, ShapeErrors) {
  InferenceInputs in;
  in.states = Matrix::Zero(3, 5);
  in.derivs = Matrix::Zero(3, 4);
  in.poisson = Matrix::Zero(3, 3);
  EXPECT_THROW(opinf_canonical(in, CanonicalVariant::Exact), DimensionError);
  in.derivs = Matrix::Zero(3, 5);
  in.eta = -1;
  EXPECT_THROW(opinf_canonical(in, CanonicalVariant::Exact), ValidationError);
}

TEST(LinearRom, TruncationMatchesDirectAssembly) {
  const auto d = wave_data();
  for (BasisKind kind : {BasisKind::Ordinary, BasisKind::BlockQP, BasisKind::CotangentLift}) {
    const PodSpectrum sp = pod_spectrum(d.X, kind, true);
    for (RomMethod method : {RomMethod::Galerkin, RomMethod::Hamiltonian}) {
      const auto big = assemble_linear_rom(d.inst.model, sp.take(12), method);
      const auto small = assemble_linear_rom(d.inst.model, sp.take(6), method);
      const auto cut = truncate(big, 6);
      EXPECT_LT((cut.op - small.op).norm(), 1e-12) << to_string(kind);
      EXPECT_LT((cut.offset - small.offset).norm(), 1e-12) << to_string(kind);
      EXPECT_EQ((cut.basis.U - small.basis.U).norm(), 0.0) << to_string(kind);
    }
  }
}

TEST(LinearRom, HamiltonianRomConservesReducedEnergy) {
  const auto d = wave_data();
  const PodBasis b = pod_ordinary(d.X, 8, true);
  const auto rom = assemble_linear_rom(d.inst.model, b, RomMethod::Hamiltonian);
  const Trajectory t = rom.integrate(d.inst.x0, 0.01, 500);
  const double e0 = rom.reduced_energy(t.states.col(0));
  for (Index k = 0; k < t.states.cols(); k += 50)
    EXPECT_NEAR(rom.reduced_energy(t.states.col(k)), e0, 1e-13);
  EXPECT_LT((rom.reconstruct(t.states.col(0)) - d.inst.x0).norm(), 1e-14);
}

TEST(LinearRom, RejectsBadInferredOperators) {
  const auto d = wave_data();
  const PodBasis b = pod_ordinary(d.X, 4, false);
  EXPECT_THROW(assemble_linear_rom(d.inst.model, b, RomMethod::NoncanonicalOpInf,
                                   Matrix::Identity(4, 4)),
               ValidationError);
  EXPECT_THROW(assemble_linear_rom(d.inst.model, b, RomMethod::CanonicalOpInf,
                                   Matrix::Identity(3, 3)),
               DimensionError);
  KdvParams k;
  k.points = 16;
  const auto kdv = build_kdv_v1(k);
  EXPECT_THROW(assemble_linear_rom(kdv.model, pod_ordinary(Matrix::Identity(16, 4), 2, false),
                                   RomMethod::Galerkin),
               ValidationError);
}

TEST(Methods, NamesRoundTrip) {
  for (RomMethod m : {RomMethod::Galerkin, RomMethod::Hamiltonian, RomMethod::GenericOpInf,
                      RomMethod::CanonicalOpInf, RomMethod::NoncanonicalOpInf,
                      RomMethod::LegacySeparable})
    EXPECT_EQ(rom_method_from_string(to_string(m)), m);
  EXPECT_THROW(rom_method_from_string("bogus"), Error);
}

#include <gtest/gtest.h>

#include <random>

#include "hopinf/basis.hpp"
#include "hopinf/models.hpp"
#include "hopinf/reduce.hpp"
#include "support/oracles.hpp"

using namespace hopinf;

namespace {

Tensor3 random_tensor(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> d;
  Tensor3 T(n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c) T(a, b, c) = d(rng);
  return T;
}

ModelInstance small_kdv() {
  KdvParams p;
  p.points = 48;
  return build_kdv_v1(p);
}

// Basis from a short full-order run.
PodBasis kdv_basis(const ModelInstance& inst, Index n, bool center) {
  const FomStepper st = fom_stepper(inst.model, 0.01);
  const Trajectory t = avf_newton(st.residual, st.jacobian, inst.x0, 0.01, 60, NewtonSettings{});
  return pod_ordinary(t.states, n, center);
}

}  // namespace

TEST(Tensor3, ContractionsMatchLoops) {
  std::mt19937_64 rng(1);
  const Tensor3 T = random_tensor(rng, 4);
  const Vector u = oracle::random_vector(rng, 4), w = oracle::random_vector(rng, 4);
  Vector want = Vector::Zero(4);
  Matrix wantM = Matrix::Zero(4, 4);
  for (Index a = 0; a < 4; ++a)
    for (Index b = 0; b < 4; ++b)
      for (Index c = 0; c < 4; ++c) {
        want(a) += T(a, b, c) * u(b) * w(c);
        wantM(a, b) += T(a, b, c) * u(c);
      }
  EXPECT_LT((T.contract(u, w) - want).norm(), 1e-13);
  EXPECT_LT((T.contract(u) - wantM).norm(), 1e-13);
  const Tensor3 L = T.leading(2);
  EXPECT_EQ(L(1, 0, 1), T(1, 0, 1));
  EXPECT_FALSE(T.is_zero());
  EXPECT_TRUE(Tensor3(3).is_zero());
}

TEST(CubicRom, FullBasisReproducesFomRhs) {
  const auto inst = small_kdv();
  const PodBasis b = pod_ordinary(Matrix::Identity(48, 48), 48, false);
  const auto rom = assemble_quadratic_gradient_rom(inst.model, b, RomMethod::Galerkin);
  std::mt19937_64 rng(2);
  const Vector x = inst.x0 + 0.1 * oracle::random_vector(rng, 48);
  const Vector want = inst.model.rhs(x);
  EXPECT_LT((b.lift(rom.rhs(b.project(x))) - want).norm(), 1e-10 * want.norm());
}

TEST(CubicRom, ResidualJacobianMatchesFiniteDifferences) {
  const auto inst = small_kdv();
  const PodBasis b = kdv_basis(inst, 6, true);
  for (RomMethod m : {RomMethod::Galerkin, RomMethod::Hamiltonian}) {
    const auto rom = assemble_quadratic_gradient_rom(inst.model, b, m);
    std::mt19937_64 rng(3);
    const Vector y = oracle::random_vector(rng, 6);
    const Vector v = oracle::random_vector(rng, 6);
    const auto R = rom.residual(0.05);
    const Matrix fd = oracle::fd_jacobian([&](const Vector& z) { return R(y, z); }, v, 1e-6);
    EXPECT_LT((rom.jacobian(0.05)(y, v) - fd).norm(), 1e-6 * std::max(1.0, fd.norm()))
        << to_string(m);
  }
}

TEST(CubicRom, HamiltonianRomConservesReducedEnergy) {
  const auto inst = small_kdv();
  const PodBasis b = kdv_basis(inst, 8, true);
  const auto rom = assemble_quadratic_gradient_rom(inst.model, b, RomMethod::Hamiltonian);
  NewtonSettings s;
  s.tol = 1e-13;
  const Trajectory t = rom.integrate(inst.x0, 0.01, 200, s);
  const double e0 = rom.reduced_energy(t.states.col(0));
  for (Index k = 0; k < t.states.cols(); k += 20)
    EXPECT_NEAR(rom.reduced_energy(t.states.col(k)), e0, 1e-10 * (1 + std::abs(e0)));
  // reduced gradient is the gradient of the reduced energy
  const Vector y = t.states.col(100);
  const Vector fd = oracle::fd_gradient(rom.energy_fn, y, 1e-6);
  EXPECT_LT((rom.gradient(y) - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
}

TEST(CubicRom, TruncationMatchesDirectAssembly) {
  const auto inst = small_kdv();
  const PodBasis big = kdv_basis(inst, 10, true);
  const PodBasis small = kdv_basis(inst, 5, true);
  for (RomMethod m : {RomMethod::Galerkin, RomMethod::Hamiltonian}) {
    const auto cut = truncate(assemble_quadratic_gradient_rom(inst.model, big, m), 5);
    const auto direct = assemble_quadratic_gradient_rom(inst.model, small, m);
    const Vector y = Vector::LinSpaced(5, -0.3, 0.4);
    EXPECT_LT((cut.rhs(y) - direct.rhs(y)).norm(), 1e-10 * std::max(1.0, direct.rhs(y).norm()))
        << to_string(m);
  }
}

TEST(CubicRom, InferredOperatorMustMatchBasis) {
  const auto inst = small_kdv();
  const PodBasis b = kdv_basis(inst, 4, false);
  EXPECT_THROW(assemble_quadratic_gradient_rom(inst.model, b, RomMethod::NoncanonicalOpInf,
                                               Matrix::Zero(3, 3)),
               DimensionError);
  EXPECT_THROW(assemble_quadratic_gradient_rom(inst.model, b, RomMethod::CanonicalOpInf),
               ValidationError);
}

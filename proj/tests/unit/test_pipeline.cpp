#include <gtest/gtest.h>

#include <filesystem>

#include "hopinf/bench.hpp"
#include "hopinf/hopm.hpp"
#include "hopinf/pipeline.hpp"

using namespace hopinf;
namespace fs = std::filesystem;

namespace {

// Two coupled springs written as external data files.
ExperimentConfig external_config(const fs::path& dir, bool momentum_form) {
  fs::create_directories(dir);
  Matrix M(2, 2), K(2, 2);
  M << 2, 0, 0, 1;
  K << 3, -1, -1, 2;
  write_matrix_market(dir / "mass.mtx", M.sparseView(), true);
  write_matrix_market(dir / "stiffness.mtx", K.sparseView(), true);
  const HamiltonianModel m = build_external(M, K);
  const Matrix D(m.poisson * *m.linear_part);
  Vector x0(4);
  x0 << 1.0, 0.0, 0.0, 0.5;
  const Trajectory t = implicit_midpoint_linear(D, Vector(), x0, 0.01, 400);
  const Matrix Q = t.states.topRows(2);
  const Matrix P = t.states.bottomRows(2);
  write_hopm(dir / "q.hopm", Q);
  write_hopm(dir / "p.hopm", momentum_form ? P : Matrix(M.inverse() * P));
  const std::string text =
      "model.name = external\n"
      "model.mass = " + (dir / "mass.mtx").string() + "\n" +
      "model.stiffness = " + (dir / "stiffness.mtx").string() + "\n" +
      "model.q_snapshots = " + (dir / "q.hopm").string() + "\n" +
      "model.p_snapshots = " + (dir / "p.hopm").string() + "\n" +
      "model.momentum_form = " + (momentum_form ? "true" : "false") + "\n" +
      "time.dt = 0.01\ntime.t_train = 2\ntime.t_test = 4\n"
      "time.derivatives = exact\n"
      "basis.modes = 4\n"
      "inference.methods = nch_opinf, ch_opinf, hamiltonian\n"
      "inference.variant = exact\n";
  return ExperimentConfig::from_map(ConfigMap::parse(text));
}

}  // namespace

TEST(Pipeline, ExternalModelRoundTrip) {
  for (bool momentum : {true, false}) {
    const auto cfg = external_config(fs::temp_directory_path() / "hopinf_test_external", momentum);
    const FomRun run = simulate(cfg);
    EXPECT_EQ(run.reference.states.cols(), 401);
    EXPECT_EQ(run.train.X.cols(), 201);
    const SweepResult res = mode_sweep(cfg, run, 1);
    ASSERT_EQ(res.cells.size(), 3u);
    for (const auto& c : res.cells) {
      EXPECT_EQ(c.status, RunStatus::Ok) << c.message;
      EXPECT_LT(c.rel_l2, 1e-8) << to_string(c.method);
      EXPECT_LT(c.max_abs_drift("H"), 1e-12) << to_string(c.method);
    }
  }
}

TEST(Pipeline, TrainingDataShapes) {
  ExperimentConfig cfg = ExperimentConfig::from_map(ConfigMap::parse(
      "model.name = kdv\nmodel.points = 32\ntime.dt = 0.01\ntime.t_train = 0.1\n"
      "time.t_test = 0.2\n"));
  const FomRun run = simulate(cfg);
  EXPECT_EQ(run.reference.states.cols(), 21);
  EXPECT_EQ(run.train.X.cols(), 11);
  EXPECT_EQ(run.train.grads.rows(), 32);
  EXPECT_EQ((run.train.centered.col(0)).norm(), 0.0);
  TrainingData twice = run.train;
  twice.append(run.train);
  EXPECT_EQ(twice.X.cols(), 22);
}

TEST(Pipeline, ParameterOverride) {
  ExperimentConfig cfg = ExperimentConfig::from_map(
      ConfigMap::parse("model.name = nonseparable\nmodel.points = 8\n"));
  const auto a = build_model(cfg, 5.0);
  const auto b = build_model(cfg, 9.0);
  EXPECT_GT((a.x0 - b.x0).norm(), 0.0);
  EXPECT_EQ((a.x0.tail(8) - b.x0.tail(8)).norm(), 0.0);
}

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hopinf/pipeline.hpp"

namespace hopinf {

enum class RunStatus { Ok, Diverged, Failed };

std::string to_string(RunStatus s);

using DriftSeries = std::map<std::string, std::vector<double>>;

struct ErrorReport {
  std::string model;
  RomMethod method = RomMethod::Hamiltonian;
  BasisKind basis_kind = BasisKind::Ordinary;
  bool centered = false;
  Index n = 0;
  double rel_l2 = 0.0;
  DriftSeries drift;  // signed H(x_k) - H(x_0) per named quantity
  RunStatus status = RunStatus::Ok;
  std::string message;
  double wallclock = 0.0;

  bool flagged() const { return status != RunStatus::Ok; }
  // max_k |drift_k| of the named quantity; NaN when the model does not track it.
  double max_abs_drift(const std::string& name) const;
};

struct SweepResult {
  std::vector<ErrorReport> cells;  // method order of the config, then ascending n

  bool any_flagged() const;
  const ErrorReport* find(RomMethod method, Index n) const;
};

// Frobenius ||X - Xt|| / ||X||; +inf when Xt holds NaN or Inf.
double rel_l2(const Matrix& X, const Matrix& Xt);

DriftSeries conserved_series(const HamiltonianModel& model, const Matrix& states);

// One reduced run against a reference trajectory on the same snapshot grid.
// Divergence and numerical failures are captured in the report, never thrown.
ErrorReport evaluate_rom(const HamiltonianModel& model, const ReducedModel& rom,
                         const Trajectory& reference, double rom_dt,
                         const NewtonSettings& newton);

const std::string& csv_header();
std::string csv_row(const ErrorReport& r, bool with_wallclock);
void write_csv(const std::filesystem::path& path, const SweepResult& result,
               bool with_wallclock);
// Drift series of every cell as HOPM1 files, one per cell.
void write_drift_series(const std::filesystem::path& dir, const SweepResult& result);

// Every (method, n) cell of the config; cells run on `workers` threads.
SweepResult mode_sweep(const ExperimentConfig& cfg, int workers = 1);
SweepResult mode_sweep(const ExperimentConfig& cfg, const FomRun& run, int workers = 1);

// Snapshot data of every param.train trajectory, concatenated in list order.
TrainingData parametric_training_data(const ExperimentConfig& cfg, int workers = 1);

// Train on param.train trajectories, report the mean test error over param.test.
SweepResult parametric_sweep(const ExperimentConfig& cfg, int workers = 1,
                             bool allow_overlap = false);

struct ConvergenceOptions {
  double eta = 0.0;
  DerivativeSource derivatives = DerivativeSource::FiniteDifference;
  CanonicalVariant variant = CanonicalVariant::ApproxIdentity;
  bool canonical = true;     // also infer A-hat on a cotangent-lift basis
  bool noncanonical = true;  // infer L-hat on an ordinary basis
};

struct ConvergenceRow {
  double dt = 0.0;
  Index n = 0;
  double poisson_error = 0.0;  // ||L-hat - U^T J U|| / ||U^T J U||
  double energy_error = 0.0;   // ||A-hat - U^T A U|| / ||U^T A U||
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // dt outer, n inner
  // For every n, errors strictly decrease as dt shrinks.
  bool poisson_monotone = true;
  bool energy_monotone = true;
};

ConvergenceTable operator_convergence_study(const HamiltonianModel& model,
                                            const std::vector<Vector>& initial_states,
                                            double t_end, const std::vector<double>& dts,
                                            const std::vector<Index>& modes,
                                            const ConvergenceOptions& options);

// Unit impulses "q5", "p14": position or momentum index within its block.
std::vector<Vector> impulse_states(Index dim, const std::vector<std::string>& specs);

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceTable& table);

}  // namespace hopinf

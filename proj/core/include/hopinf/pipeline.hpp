#pragma once

#include <optional>
#include <vector>

#include "hopinf/basis.hpp"
#include "hopinf/config.hpp"
#include "hopinf/models.hpp"
#include "hopinf/reduce.hpp"
#include "hopinf/timestep.hpp"

namespace hopinf {

// Model from the config; param overrides the parameter named by param.name.
ModelInstance build_model(const ExperimentConfig& cfg, std::optional<double> param = {});

// Full-order integration with the scheme that fits the model: implicit midpoint
// for linear systems, AVF/midpoint Newton for KdV, RK4 for BBM.
Trajectory run_fom(const HamiltonianModel& model, const Vector& x0, double dt, Index steps,
                   Index stride, const NewtonSettings& newton);

// Snapshot data consumed by the inference routines, in full coordinates.
struct TrainingData {
  Matrix X;          // states
  Matrix Xdot;       // time derivatives
  Matrix grads;      // grad H(X)
  Matrix nonlinear;  // f(X) for canonical models, zero otherwise
  Matrix centered;   // X minus the initial state of its own trajectory

  void append(const TrainingData& other);
};

TrainingData training_data(const HamiltonianModel& model, const Matrix& states, double dt,
                           DerivativeSource source);

struct FomRun {
  ModelInstance instance;
  Trajectory reference;  // [0, t_test] at the snapshot spacing
  TrainingData train;    // first train_columns() snapshots
};

FomRun simulate(const ExperimentConfig& cfg, std::optional<double> param = {});

// Operator learned by the given method; empty for intrusive methods.
Matrix infer_operator(const HamiltonianModel& model, const PodBasis& basis,
                      const TrainingData& data, RomMethod method, CanonicalVariant variant,
                      double eta);

// Linear or cubic reduced model behind one interface.
class ReducedModel {
 public:
  static ReducedModel build(const HamiltonianModel& model, const PodBasis& basis,
                            RomMethod method, const Matrix& inferred);

  bool is_cubic() const { return cubic_.has_value(); }
  const ReducedLinearModel& linear() const { return *linear_; }
  const ReducedCubicModel& cubic() const { return *cubic_; }
  const PodBasis& basis() const;
  Index size() const;

  Vector initial_state(const Vector& x0) const;
  Trajectory integrate(const Vector& x0, double dt, Index steps,
                       const NewtonSettings& newton) const;
  Vector reconstruct(const Vector& xhat) const;
  Matrix reconstruct_columns(const Matrix& Xhat) const;
  bool has_reduced_energy() const;
  double reduced_energy(const Vector& xhat) const;

 private:
  std::optional<ReducedLinearModel> linear_;
  std::optional<ReducedCubicModel> cubic_;
};

}  // namespace hopinf

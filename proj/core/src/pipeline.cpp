#include "hopinf/pipeline.hpp"

#include <sstream>

#include "hopinf/hopm.hpp"
#include "hopinf/matkit.hpp"

namespace hopinf {

ModelInstance build_model(const ExperimentConfig& cfg, std::optional<double> param) {
  auto pick = [&](double base) {
    if (!param) return base;
    if (cfg.param_name != "alpha")
      throw ConfigError("param.name: only 'alpha' can be varied, got '" + cfg.param_name + "'");
    return *param;
  };
  if (cfg.model == "wave") {
    WaveParams p = cfg.wave;
    p.alpha = pick(p.alpha);
    return build_wave(p);
  }
  if (cfg.model == "nonseparable") {
    NonsepParams p = cfg.nonsep;
    p.alpha = pick(p.alpha);
    return build_nonseparable(p);
  }
  if (cfg.model == "kdv" || cfg.model == "kdv2") {
    KdvParams p = cfg.kdv;
    p.alpha = pick(p.alpha);
    return cfg.model == "kdv" ? build_kdv_v1(p) : build_kdv_v2(p);
  }
  if (cfg.model == "bbm") {
    BbmParams p = cfg.bbm;
    p.alpha = pick(p.alpha);
    return build_bbm(p);
  }
  if (cfg.model == "external") {
    if (param) throw ConfigError("external models have no parameter to vary");
    auto ext = load_external(cfg.external.mass, cfg.external.stiffness,
                             cfg.external.q_snapshots, cfg.external.p_snapshots,
                             cfg.external.momentum_form);
    ModelInstance inst;
    inst.model = std::move(ext.model);
    inst.x0 = ext.snapshots.col(0);
    return inst;
  }
  throw ConfigError("unknown model '" + cfg.model + "'");
}

Trajectory run_fom(const HamiltonianModel& model, const Vector& x0, double dt, Index steps,
                   Index stride, const NewtonSettings& newton) {
  require_dims(x0.size() == model.dim, "run_fom: initial state has the wrong size");
  if (model.is_linear()) {
    const SparseMatrix D = model.poisson * (*model.linear_part);
    return implicit_midpoint_linear(D, Vector(), x0, dt, steps, stride);
  }
  if (model.kind == ModelKind::Bbm) return rk4(model.rhs_fn, x0, dt, steps, stride);
  const FomStepper fs = fom_stepper(model, dt);
  return avf_newton(fs.residual, fs.jacobian, x0, dt, steps, newton, stride);
}

void TrainingData::append(const TrainingData& o) {
  auto cat = [](Matrix& a, const Matrix& b) {
    if (a.size() == 0) {
      a = b;
      return;
    }
    require_dims(a.rows() == b.rows(), "training data: row counts differ");
    Matrix c(a.rows(), a.cols() + b.cols());
    c << a, b;
    a = std::move(c);
  };
  cat(X, o.X);
  cat(Xdot, o.Xdot);
  cat(grads, o.grads);
  cat(nonlinear, o.nonlinear);
  cat(centered, o.centered);
}

TrainingData training_data(const HamiltonianModel& model, const Matrix& states, double dt,
                           DerivativeSource source) {
  TrainingData d;
  d.X = states;
  d.Xdot = source == DerivativeSource::Exact ? model.rhs_columns(states)
                                             : time_derivatives(states, dt);
  d.grads = model.grad_columns(states);
  d.nonlinear = model.nonlinear_columns(states);
  d.centered = states.colwise() - Vector(states.col(0));
  return d;
}

FomRun simulate(const ExperimentConfig& cfg, std::optional<double> param) {
  FomRun run;
  const Index ntrain = cfg.train_columns();
  const Index ntest = cfg.test_columns();
  if (cfg.model == "external") {
    auto ext = load_external(cfg.external.mass, cfg.external.stiffness,
                             cfg.external.q_snapshots, cfg.external.p_snapshots,
                             cfg.external.momentum_form);
    if (ext.snapshots.cols() < ntest) {
      std::ostringstream os;
      os << "external snapshots hold " << ext.snapshots.cols() << " columns but the test window needs "
         << ntest;
      throw ConfigError(os.str());
    }
    run.instance.model = std::move(ext.model);
    run.instance.x0 = ext.snapshots.col(0);
    run.reference.dt = cfg.snapshot_dt();
    run.reference.states = ext.snapshots.leftCols(ntest);
  } else {
    run.instance = build_model(cfg, param);
    run.reference = run_fom(run.instance.model, run.instance.x0, cfg.dt,
                            (ntest - 1) * cfg.stride, cfg.stride, cfg.newton);
  }
  run.train = training_data(run.instance.model, run.reference.states.leftCols(ntrain),
                            cfg.snapshot_dt(), cfg.derivatives);
  return run;
}

Matrix infer_operator(const HamiltonianModel& model, const PodBasis& basis,
                      const TrainingData& data, RomMethod method, CanonicalVariant variant,
                      double eta) {
  require_dims(basis.full_dim() == data.X.rows(), "inference: basis does not match data");
  const Matrix& U = basis.U;
  switch (method) {
    case RomMethod::Galerkin:
    case RomMethod::Hamiltonian:
      return Matrix();
    case RomMethod::GenericOpInf:
      if (model.is_linear())
        return opinf_generic(U.transpose() * data.X, U.transpose() * data.Xdot, eta);
      return lstsq_opinf(U.transpose() * data.Xdot, U.transpose() * data.grads, eta);
    case RomMethod::CanonicalOpInf: {
      if (model.structure != StructureKind::Canonical)
        throw ValidationError("ch_opinf needs a canonical model");
      InferenceInputs in;
      in.states = U.transpose() * data.X;
      in.derivs = U.transpose() * data.Xdot;
      in.grads = U.transpose() * data.nonlinear;
      in.poisson = U.transpose() * (model.poisson * U);
      in.eta = eta;
      return opinf_canonical(in, variant);
    }
    case RomMethod::NoncanonicalOpInf: {
      InferenceInputs in;
      in.derivs = U.transpose() * data.Xdot;
      in.grads = U.transpose() * data.grads;
      in.eta = eta;
      return opinf_noncanonical(in);
    }
    case RomMethod::LegacySeparable: {
      if (model.structure != StructureKind::Canonical)
        throw ValidationError("legacy_opinf needs a canonical model");
      InferenceInputs in;
      in.states = U.transpose() * data.X;
      in.derivs = U.transpose() * data.Xdot;
      in.grads = U.transpose() * data.nonlinear;
      in.eta = eta;
      return opinf_legacy_separable(in, basis);
    }
  }
  return Matrix();
}

ReducedModel ReducedModel::build(const HamiltonianModel& model, const PodBasis& basis,
                                 RomMethod method, const Matrix& inferred) {
  ReducedModel r;
  if (model.is_linear()) {
    r.linear_ = assemble_linear_rom(model, basis, method, inferred);
  } else if (model.kind == ModelKind::KdvV2) {
    r.cubic_ = assemble_kdv_v2_rom(model, basis, method);
  } else if (model.kind == ModelKind::Bbm && method == RomMethod::NoncanonicalOpInf) {
    r.cubic_ = assemble_bbm_rom(model, basis, inferred);
  } else {
    r.cubic_ = assemble_quadratic_gradient_rom(model, basis, method, inferred);
  }
  return r;
}

const PodBasis& ReducedModel::basis() const {
  return cubic_ ? cubic_->basis : linear_->basis;
}

Index ReducedModel::size() const { return cubic_ ? cubic_->size() : linear_->size(); }

Vector ReducedModel::initial_state(const Vector& x0) const {
  return cubic_ ? cubic_->initial_state(x0) : linear_->initial_state(x0);
}

Trajectory ReducedModel::integrate(const Vector& x0, double dt, Index steps,
                                   const NewtonSettings& newton) const {
  return cubic_ ? cubic_->integrate(x0, dt, steps, newton) : linear_->integrate(x0, dt, steps);
}

Vector ReducedModel::reconstruct(const Vector& xhat) const {
  return cubic_ ? Vector(cubic_->basis.lift(xhat)) : linear_->reconstruct(xhat);
}

Matrix ReducedModel::reconstruct_columns(const Matrix& Xhat) const {
  return cubic_ ? cubic_->reconstruct_columns(Xhat) : linear_->reconstruct_columns(Xhat);
}

bool ReducedModel::has_reduced_energy() const {
  return cubic_ ? static_cast<bool>(cubic_->energy_fn) : linear_->energy.size() > 0;
}

double ReducedModel::reduced_energy(const Vector& xhat) const {
  return cubic_ ? cubic_->reduced_energy(xhat) : linear_->reduced_energy(xhat);
}

}  // namespace hopinf

#include "hopinf/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "hopinf/hopm.hpp"

namespace hopinf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs jobs 0..count-1 on a small pool; each job owns its output slot.
void run_jobs(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  const std::size_t k =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (k <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < k; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ErrorReport failed_report(const std::string& what, RunStatus status) {
  ErrorReport r;
  r.rel_l2 = kInf;
  r.status = status;
  r.message = what;
  return r;
}

// Build and run one reduced model; every failure lands in the report.
ErrorReport run_cell(const HamiltonianModel& model, const PodBasis& basis, RomMethod method,
                     const Matrix& inferred, const Trajectory& reference, double rom_dt,
                     const NewtonSettings& newton) {
  ErrorReport r;
  try {
    const ReducedModel rom = ReducedModel::build(model, basis, method, inferred);
    r = evaluate_rom(model, rom, reference, rom_dt, newton);
  } catch (const DivergenceError& e) {
    r = failed_report(e.what(), RunStatus::Diverged);
  } catch (const std::exception& e) {
    r = failed_report(e.what(), RunStatus::Failed);
  }
  r.method = method;
  r.basis_kind = basis.kind;
  r.centered = basis.centered();
  r.n = basis.size();
  r.model = model.name;
  return r;
}

void check_modes(const ExperimentConfig& cfg, const PodSpectrum& spectrum) {
  for (Index n : cfg.modes)
    if (n > spectrum.max_modes()) {
      std::ostringstream os;
      os << "basis.modes: n = " << n << " exceeds the " << spectrum.max_modes()
         << " modes the training data supports";
      throw ConfigError(os.str());
    }
}

}  // namespace

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::Failed: return "failed";
  }
  return "?";
}

double ErrorReport::max_abs_drift(const std::string& name) const {
  auto it = drift.find(name);
  if (it == drift.end()) return kNaN;
  double m = 0.0;
  for (double v : it->second) {
    if (!std::isfinite(v)) return kInf;
    m = std::max(m, std::abs(v));
  }
  return m;
}

bool SweepResult::any_flagged() const {
  for (const auto& c : cells)
    if (c.flagged()) return true;
  return false;
}

const ErrorReport* SweepResult::find(RomMethod method, Index n) const {
  for (const auto& c : cells)
    if (c.method == method && c.n == n) return &c;
  return nullptr;
}

double rel_l2(const Matrix& X, const Matrix& Xt) {
  require_dims(X.rows() == Xt.rows() && X.cols() == Xt.cols(), "rel_l2: shape mismatch");
  if (!Xt.allFinite()) return kInf;
  const double den = X.norm();
  const double num = (X - Xt).norm();
  if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
  return num / den;
}

DriftSeries conserved_series(const HamiltonianModel& model, const Matrix& states) {
  DriftSeries out;
  for (const auto& q : model.conserved) {
    std::vector<double> s(static_cast<std::size_t>(states.cols()), 0.0);
    if (states.cols() > 0) {
      const double ref = q.eval(states.col(0));
      for (Index k = 0; k < states.cols(); ++k)
        s[static_cast<std::size_t>(k)] = q.eval(states.col(k)) - ref;
    }
    out[q.name] = std::move(s);
  }
  return out;
}

ErrorReport evaluate_rom(const HamiltonianModel& model, const ReducedModel& rom,
                         const Trajectory& reference, double rom_dt,
                         const NewtonSettings& newton) {
  ErrorReport r;
  r.model = model.name;
  r.basis_kind = rom.basis().kind;
  r.centered = rom.basis().centered();
  r.n = rom.size();
  const auto t0 = std::chrono::steady_clock::now();
  const double ratio = reference.dt / rom_dt;
  const Index sub = static_cast<Index>(std::llround(ratio));
  if (sub < 1 || std::abs(ratio - static_cast<double>(sub)) > 1e-9 * ratio)
    throw ConfigError("time.rom_dt must divide the snapshot spacing");
  try {
    const Vector x0 = reference.states.col(0);
    const Trajectory red = rom.integrate(x0, rom_dt, reference.steps() * sub, newton);
    Matrix Xhat(red.states.rows(), reference.states.cols());
    for (Index k = 0; k < Xhat.cols(); ++k) Xhat.col(k) = red.states.col(k * sub);
    const Matrix Xr = rom.reconstruct_columns(Xhat);
    r.rel_l2 = rel_l2(reference.states, Xr);
    r.drift = conserved_series(model, Xr);
    if (!std::isfinite(r.rel_l2)) {
      r.status = RunStatus::Diverged;
      r.message = "non-finite reduced state";
    }
  } catch (const DivergenceError& e) {
    r.rel_l2 = kInf;
    r.status = RunStatus::Diverged;
    r.message = e.what();
  } catch (const NumericalError& e) {
    r.rel_l2 = kInf;
    r.status = RunStatus::Failed;
    r.message = e.what();
  }
  r.wallclock = seconds_since(t0);
  return r;
}

const std::string& csv_header() {
  static const std::string h =
      "model,basis_kind,mean_centered,method,n,rel_l2,max_abs_dH,max_abs_dM,max_abs_dP,"
      "diverged,wallclock_s";
  return h;
}

std::string csv_row(const ErrorReport& r, bool with_wallclock) {
  std::ostringstream os;
  os << r.model << ',' << to_string(r.basis_kind) << ',' << (r.centered ? 1 : 0) << ','
     << to_string(r.method) << ',' << r.n << ',' << format_real(r.rel_l2) << ','
     << format_real(r.max_abs_drift("H")) << ',' << format_real(r.max_abs_drift("mass"))
     << ',' << format_real(r.max_abs_drift("momentum")) << ',' << (r.flagged() ? 1 : 0)
     << ',' << format_real(with_wallclock ? r.wallclock : 0.0);
  return os.str();
}

void write_csv(const std::filesystem::path& path, const SweepResult& result,
               bool with_wallclock) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << csv_header() << '\n';
  for (const auto& c : result.cells) f << csv_row(c, with_wallclock) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

void write_drift_series(const std::filesystem::path& dir, const SweepResult& result) {
  for (const auto& c : result.cells) {
    if (c.drift.empty()) continue;
    const std::size_t len = c.drift.begin()->second.size();
    Matrix m(static_cast<Index>(c.drift.size()), static_cast<Index>(len));
    std::vector<std::string> comments{meta_line("method", to_string(c.method)),
                                      meta_line("n", std::to_string(c.n))};
    Index row = 0;
    for (const auto& [name, s] : c.drift) {
      comments.push_back(meta_line("row" + std::to_string(row), name));
      for (std::size_t k = 0; k < len; ++k) m(row, static_cast<Index>(k)) = s[k];
      ++row;
    }
    write_hopm(dir / ("drift_" + to_string(c.method) + "_n" + std::to_string(c.n) + ".hopm"),
               m, comments);
  }
}

SweepResult mode_sweep(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  return mode_sweep(cfg, simulate(cfg), workers);
}

SweepResult mode_sweep(const ExperimentConfig& cfg, const FomRun& run, int workers) {
  const HamiltonianModel& model = run.instance.model;
  const PodSpectrum spectrum = pod_spectrum(run.train.X, cfg.basis_kind, cfg.center);
  check_modes(cfg, spectrum);
  const double rom_dt = cfg.rom_step();
  std::vector<Index> modes = cfg.modes;
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());

  SweepResult out;
  out.cells.resize(cfg.methods.size() * modes.size());
  auto slot = [&](std::size_t mi, std::size_t ni) -> ErrorReport& {
    return out.cells[mi * modes.size() + ni];
  };
  auto infer = [&](RomMethod m, const PodBasis& b) {
    return infer_operator(model, b, run.train, m, cfg.variant, cfg.eta);
  };

  if (cfg.one_shot) {
    run_jobs(cfg.methods.size(), workers, [&](std::size_t mi) {
      const RomMethod m = cfg.methods[mi];
      const PodBasis big = spectrum.take(modes.back());
      Matrix full;
      std::string failure;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        full = infer(m, big);
      } catch (const std::exception& e) {
        failure = e.what();
      }
      const double t_infer = seconds_since(t0);
      for (std::size_t ni = 0; ni < modes.size(); ++ni) {
        const PodBasis b = spectrum.take(modes[ni]);
        ErrorReport& r = slot(mi, ni);
        if (!failure.empty()) {
          r = failed_report(failure, RunStatus::Failed);
          r.method = m;
          r.basis_kind = b.kind;
          r.centered = b.centered();
          r.n = b.size();
          r.model = model.name;
          continue;
        }
        const Matrix op = full.size() ? truncate(full, big, modes[ni]) : Matrix();
        r = run_cell(model, b, m, op, run.reference, rom_dt, cfg.newton);
        r.wallclock += t_infer;
      }
    });
  } else {
    run_jobs(out.cells.size(), workers, [&](std::size_t job) {
      const std::size_t mi = job / modes.size();
      const std::size_t ni = job % modes.size();
      const RomMethod m = cfg.methods[mi];
      const PodBasis b = spectrum.take(modes[ni]);
      const auto t0 = std::chrono::steady_clock::now();
      ErrorReport& r = slot(mi, ni);
      try {
        const Matrix op = infer(m, b);
        r = run_cell(model, b, m, op, run.reference, rom_dt, cfg.newton);
      } catch (const std::exception& e) {
        r = failed_report(e.what(), RunStatus::Failed);
        r.method = m;
        r.basis_kind = b.kind;
        r.centered = b.centered();
        r.n = b.size();
        r.model = model.name;
      }
      r.wallclock = seconds_since(t0);
    });
  }
  return out;
}

TrainingData parametric_training_data(const ExperimentConfig& cfg, int workers) {
  const Index train_steps = (cfg.train_columns() - 1) * cfg.stride;
  std::vector<TrainingData> parts(cfg.param_train.size());
  std::vector<std::string> errors(cfg.param_train.size());
  run_jobs(parts.size(), workers, [&](std::size_t i) {
    try {
      const ModelInstance inst = build_model(cfg, cfg.param_train[i]);
      const Trajectory tr =
          run_fom(inst.model, inst.x0, cfg.dt, train_steps, cfg.stride, cfg.newton);
      parts[i] = training_data(inst.model, tr.states, cfg.snapshot_dt(), cfg.derivatives);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw NumericalError("parametric training run failed: " + e);
  TrainingData data;
  for (const auto& p : parts) data.append(p);
  return data;
}

SweepResult parametric_sweep(const ExperimentConfig& cfg, int workers, bool allow_overlap) {
  cfg.validate();
  if (cfg.param_train.empty() || cfg.param_test.empty())
    throw ConfigError("param.train and param.test must both be set");
  if (!allow_overlap) {
    const std::set<double> train(cfg.param_train.begin(), cfg.param_train.end());
    for (double v : cfg.param_test)
      if (train.count(v)) {
        std::ostringstream os;
        os << "param.test value " << v << " also appears in param.train";
        throw ConfigError(os.str());
      }
  }

  const Index test_steps = (cfg.test_columns() - 1) * cfg.stride;
  const TrainingData data = parametric_training_data(cfg, workers);

  const PodSpectrum spectrum = cfg.center
                               ? pod_spectrum_centered(data.centered, cfg.basis_kind,
                                                       Vector(data.X.col(0)))
                               : pod_spectrum(data.X, cfg.basis_kind, false);
  check_modes(cfg, spectrum);

  struct TestCase {
    ModelInstance inst;
    Trajectory reference;
  };
  std::vector<TestCase> tests(cfg.param_test.size());
  std::vector<std::string> errors(tests.size());
  run_jobs(tests.size(), workers, [&](std::size_t i) {
    try {
      tests[i].inst = build_model(cfg, cfg.param_test[i]);
      tests[i].reference = run_fom(tests[i].inst.model, tests[i].inst.x0, cfg.dt, test_steps,
                                   cfg.stride, cfg.newton);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw NumericalError("parametric test run failed: " + e);

  std::vector<Index> modes = cfg.modes;
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  // Operators are inferred with the training model; only the parameter-free
  // structure (J, A or L) enters, so any training instance serves.
  const ModelInstance train_inst = build_model(cfg, cfg.param_train.front());

  SweepResult out;
  out.cells.resize(cfg.methods.size() * modes.size());
  run_jobs(out.cells.size(), workers, [&](std::size_t job) {
    const RomMethod m = cfg.methods[job / modes.size()];
    const PodBasis trained = spectrum.take(modes[job % modes.size()]);
    const auto t0 = std::chrono::steady_clock::now();
    ErrorReport agg;
    agg.method = m;
    agg.basis_kind = trained.kind;
    agg.centered = trained.centered();
    agg.n = trained.size();
    agg.model = train_inst.model.name;
    Matrix op;
    try {
      op = infer_operator(train_inst.model, trained, data, m, cfg.variant, cfg.eta);
    } catch (const std::exception& e) {
      agg.rel_l2 = kInf;
      agg.status = RunStatus::Failed;
      agg.message = e.what();
      out.cells[job] = agg;
      return;
    }
    double total = 0.0;
    for (const auto& tc : tests) {
      PodBasis b = trained;
      if (cfg.center) b.shift = tc.inst.x0;
      const ErrorReport r =
          run_cell(tc.inst.model, b, m, op, tc.reference, cfg.rom_step(), cfg.newton);
      total += r.rel_l2;
      if (r.status > agg.status) {
        agg.status = r.status;
        agg.message = r.message;
      }
      for (const auto& [name, s] : r.drift)
        if (!agg.drift.count(name) || r.max_abs_drift(name) > agg.max_abs_drift(name))
          agg.drift[name] = s;
    }
    agg.rel_l2 = total / static_cast<double>(tests.size());
    agg.wallclock = seconds_since(t0);
    out.cells[job] = agg;
  });
  return out;
}

std::vector<Vector> impulse_states(Index dim, const std::vector<std::string>& specs) {
  require_dims(dim % 2 == 0, "impulse states need a canonical (q, p) state");
  const Index m = dim / 2;
  std::vector<Vector> out;
  for (const auto& s : specs) {
    if (s.size() < 2 || (s[0] != 'q' && s[0] != 'p'))
      throw ConfigError("impulse '" + s + "': expected q<index> or p<index>");
    Index i = 0;
    try {
      std::size_t used = 0;
      i = static_cast<Index>(std::stol(s.substr(1), &used));
      if (used != s.size() - 1) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError("impulse '" + s + "': bad index");
    }
    if (i < 0 || i >= m) throw ConfigError("impulse '" + s + "': index out of range");
    Vector x = Vector::Zero(dim);
    x(s[0] == 'q' ? i : m + i) = 1.0;
    out.push_back(std::move(x));
  }
  return out;
}

ConvergenceTable operator_convergence_study(const HamiltonianModel& model,
                                            const std::vector<Vector>& initial_states,
                                            double t_end, const std::vector<double>& dts,
                                            const std::vector<Index>& modes,
                                            const ConvergenceOptions& options) {
  if (!model.is_linear())
    throw ValidationError("operator convergence needs a linear model with known A");
  if (initial_states.empty()) throw ValidationError("operator convergence: no initial states");
  const Matrix A = Matrix(*model.linear_part);
  const Matrix J = model.poisson_matrix();
  NewtonSettings newton;

  ConvergenceTable table;
  for (double dt : dts) {
    const Index steps = step_count(t_end, dt, "converge.t_end");
    TrainingData data;
    for (const Vector& x0 : initial_states) {
      const Trajectory tr = run_fom(model, x0, dt, steps, 1, newton);
      data.append(training_data(model, tr.states, dt, options.derivatives));
    }
    const PodSpectrum ord = pod_spectrum(data.X, BasisKind::Ordinary, false);
    std::optional<PodSpectrum> cot;
    if (options.canonical && model.structure == StructureKind::Canonical)
      cot = pod_spectrum(data.X, BasisKind::CotangentLift, false);
    for (Index n : modes) {
      ConvergenceRow row;
      row.dt = dt;
      row.n = n;
      row.poisson_error = kNaN;
      row.energy_error = kNaN;
      if (options.noncanonical) {
        const PodBasis b = ord.take(n);
        const Matrix L = infer_operator(model, b, data, RomMethod::NoncanonicalOpInf,
                                        options.variant, options.eta);
        const Matrix ref = b.U.transpose() * J * b.U;
        row.poisson_error = (L - ref).norm() / ref.norm();
      }
      if (cot) {
        const PodBasis b = cot->take(n);
        const Matrix Ah = infer_operator(model, b, data, RomMethod::CanonicalOpInf,
                                         options.variant, options.eta);
        const Matrix ref = b.U.transpose() * A * b.U;
        row.energy_error = (Ah - ref).norm() / ref.norm();
      }
      table.rows.push_back(row);
    }
  }
  const bool canonical = options.canonical && model.structure == StructureKind::Canonical;
  // Monotone in dt for each n: rows are dt-major.
  const std::size_t nn = modes.size();
  for (std::size_t i = nn; i < table.rows.size(); ++i) {
    const auto& prev = table.rows[i - nn];
    const auto& cur = table.rows[i];
    if (options.noncanonical && !(cur.poisson_error < prev.poisson_error))
      table.poisson_monotone = false;
    if (canonical && !(cur.energy_error < prev.energy_error))
      table.energy_monotone = false;
  }
  return table;
}

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceTable& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << "dt,n,poisson_rel_err,energy_rel_err\n";
  for (const auto& r : table.rows)
    f << format_real(r.dt) << ',' << r.n << ',' << format_real(r.poisson_error) << ','
      << format_real(r.energy_error) << '\n';
}

}  // namespace hopinf

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "battery/battery.hpp"
#include "hopinf/bench.hpp"
#include "hopinf/hopm.hpp"
#include "hopinf/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hopinf;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kDiverged = 4 };

struct Cli {
  std::string config;
  std::string out;
  int workers = 1;
  std::uint64_t seed = 20240607;
  std::vector<std::string> only;
  bool corrupt_stencil = false;
};

ExperimentConfig load_config(const Cli& cli) {
  if (cli.config.empty()) throw ConfigError("--config is required for this command");
  ExperimentConfig cfg = ExperimentConfig::from_file(cli.config);
  if (!cli.out.empty()) cfg.out_dir = cli.out;
  if (cli.workers < 1) throw ConfigError("--workers must be at least 1");
  return cfg;
}

void write_echo(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::ofstream f(cfg.out_dir / "config.echo.cfg");
  f << cfg.echo();
  if (!f) throw IoError("cannot write " + (cfg.out_dir / "config.echo.cfg").string());
}

// Reference run from io.snapshots when given, otherwise from the full model.
FomRun load_run(const ExperimentConfig& cfg) {
  if (cfg.snapshots_path.empty()) return simulate(cfg);
  const HopmFile file = read_hopm(cfg.snapshots_path);
  FomRun run;
  run.instance = build_model(cfg);
  run.reference = trajectory_from_header(file.data, file.comments);
  if (run.reference.dt <= 0.0) run.reference.dt = cfg.snapshot_dt();
  if (run.reference.states.rows() != run.instance.model.dim)
    throw ConfigError("io.snapshots: state dimension does not match the model");
  if (run.reference.states.cols() < cfg.train_columns())
    throw ConfigError("io.snapshots: fewer columns than the training window needs");
  run.instance.x0 = run.reference.states.col(0);
  run.train = training_data(run.instance.model,
                            run.reference.states.leftCols(cfg.train_columns()),
                            run.reference.dt, cfg.derivatives);
  if (run.reference.states.cols() > cfg.test_columns())
    run.reference.states = run.reference.states.leftCols(cfg.test_columns()).eval();
  return run;
}

int cmd_simulate(const ExperimentConfig& cfg) {
  const FomRun run = simulate(cfg);
  const auto head = run.reference.header();
  std::vector<std::string> train_head = head;
  train_head.push_back(meta_line("model", run.instance.model.name));
  write_hopm(cfg.out_dir / "reference.hopm", run.reference.states, train_head);
  write_hopm(cfg.out_dir / "snapshots.hopm", run.train.X, train_head);
  write_hopm(cfg.out_dir / "derivatives.hopm", run.train.Xdot,
             {meta_line("source", cfg.derivatives == DerivativeSource::Exact ? "exact" : "fd")});
  write_hopm(cfg.out_dir / "gradients.hopm", run.train.grads, {meta_line("field", "grad_H")});
  if (run.instance.model.structure == StructureKind::Canonical)
    write_hopm(cfg.out_dir / "nonlinear_gradients.hopm", run.train.nonlinear,
               {meta_line("field", "grad_f")});
  std::cout << "simulate: " << run.reference.states.cols() << " snapshots of dimension "
            << run.reference.states.rows() << " written to " << cfg.out_dir.string() << '\n';
  return kOk;
}

int cmd_basis(const ExperimentConfig& cfg) {
  const FomRun run = load_run(cfg);
  const PodSpectrum spectrum = pod_spectrum(run.train.X, cfg.basis_kind, cfg.center);
  std::ofstream diag(cfg.out_dir / "basis_diagnostics.csv");
  diag << "basis_kind,mean_centered,n,energy,projection_error\n";
  for (Index n : cfg.modes) {
    if (n > spectrum.max_modes())
      throw ConfigError("basis.modes: n = " + std::to_string(n) + " exceeds the data rank " +
                        std::to_string(spectrum.max_modes()));
    const PodBasis b = spectrum.take(n);
    write_hopm(cfg.out_dir / ("basis_n" + std::to_string(n) + ".hopm"), b.U, b.header());
    diag << to_string(b.kind) << ',' << (b.centered() ? 1 : 0) << ',' << n << ','
         << format_real(spectrum.energy(n)) << ',' << format_real(projection_error(run.train.X, b))
         << '\n';
  }
  if (spectrum.shift) write_hopm(cfg.out_dir / "basis_shift.hopm", *spectrum.shift, {});
  std::cout << "basis: " << cfg.modes.size() << " bases written\n";
  return kOk;
}

int cmd_infer(const ExperimentConfig& cfg) {
  const FomRun run = load_run(cfg);
  const PodSpectrum spectrum = pod_spectrum(run.train.X, cfg.basis_kind, cfg.center);
  for (RomMethod m : cfg.methods)
    for (Index n : cfg.modes) {
      const PodBasis b = spectrum.take(n);
      const Matrix op = infer_operator(run.instance.model, b, run.train, m, cfg.variant, cfg.eta);
      if (op.size() == 0) continue;
      auto head = b.header();
      head.push_back(meta_line("method", to_string(m)));
      head.push_back(meta_line("eta", cfg.eta));
      write_hopm(cfg.out_dir / ("operator_" + to_string(m) + "_n" + std::to_string(n) + ".hopm"),
                 op, head);
    }
  std::cout << "infer: done\n";
  return kOk;
}

int cmd_rom(const ExperimentConfig& cfg) {
  const FomRun run = load_run(cfg);
  const PodSpectrum spectrum = pod_spectrum(run.train.X, cfg.basis_kind, cfg.center);
  const RomMethod m = cfg.methods.front();
  const Index n = cfg.modes.front();
  if (n > spectrum.max_modes()) throw ConfigError("basis.modes exceeds the data rank");
  const PodBasis b = spectrum.take(n);
  const Matrix op = infer_operator(run.instance.model, b, run.train, m, cfg.variant, cfg.eta);
  const ReducedModel rom = ReducedModel::build(run.instance.model, b, m, op);
  const ErrorReport rep =
      evaluate_rom(run.instance.model, rom, run.reference, cfg.rom_step(), cfg.newton);
  SweepResult res;
  res.cells.push_back(rep);
  write_csv(cfg.out_dir / "report.csv", res, cfg.record_wallclock);
  if (!rep.flagged()) {
    const Trajectory tr = rom.integrate(run.instance.x0, cfg.snapshot_dt(),
                                        run.reference.steps(), cfg.newton);
    Trajectory full = tr;
    full.states = rom.reconstruct_columns(tr.states);
    auto head = full.header();
    head.push_back(meta_line("method", to_string(m)));
    write_hopm(cfg.out_dir / "rom_trajectory.hopm", full.states, head);
  }
  std::cout << csv_header() << '\n' << csv_row(rep, cfg.record_wallclock) << '\n';
  if (rep.status == RunStatus::Diverged) {
    std::cerr << "rom: diverged: " << rep.message << '\n';
    return kDiverged;
  }
  if (rep.status == RunStatus::Failed) {
    std::cerr << "rom: numerical failure: " << rep.message << '\n';
    return kNumerical;
  }
  return kOk;
}

int report_sweep(const ExperimentConfig& cfg, const SweepResult& res, const std::string& file) {
  write_csv(cfg.out_dir / file, res, cfg.record_wallclock);
  if (cfg.write_trajectories) write_drift_series(cfg.out_dir / "drift", res);
  for (const auto& c : res.cells)
    if (c.flagged())
      std::cerr << to_string(c.method) << " n=" << c.n << ": " << to_string(c.status) << ": "
                << c.message << '\n';
  std::cout << file << ": " << res.cells.size() << " cells\n";
  return res.any_flagged() ? kDiverged : kOk;
}

int cmd_converge(const ExperimentConfig& cfg) {
  const ModelInstance inst = build_model(cfg);
  std::vector<Vector> ics;
  if (cfg.converge_impulses.empty())
    ics.push_back(inst.x0);
  else
    ics = impulse_states(inst.model.dim, cfg.converge_impulses);
  if (cfg.converge_dts.empty()) throw ConfigError("converge.dt must list at least one step");
  std::vector<Index> modes = cfg.converge_modes;
  if (modes.empty()) modes.push_back(inst.model.dim);
  ConvergenceOptions o;
  o.eta = cfg.eta;
  o.derivatives = cfg.derivatives;
  o.variant = cfg.variant;
  const ConvergenceTable tab =
      operator_convergence_study(inst.model, ics, cfg.converge_t_end, cfg.converge_dts, modes, o);
  write_convergence_csv(cfg.out_dir / "convergence.csv", tab);
  std::cout << "converge: poisson " << (tab.poisson_monotone ? "monotone" : "NOT monotone")
            << ", energy " << (tab.energy_monotone ? "monotone" : "NOT monotone") << '\n';
  return kOk;
}

int cmd_check(const Cli& cli) {
  battery::Options o;
  o.seed = cli.seed;
  o.only = cli.only;
  o.corrupt_stencil = cli.corrupt_stencil;
  bool ok = true;
  for (const auto& id : battery::criterion_ids()) {
    if (!o.only.empty() && std::find(o.only.begin(), o.only.end(), id) == o.only.end()) continue;
    const auto r = battery::run_criterion(id, o);
    std::cout << battery::format(r) << std::endl;
    ok = ok && r.pass;
  }
  return ok ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamiltonian operator inference toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Cli cli;
  app.add_option("--config", cli.config, "experiment config file");
  app.add_option("--out", cli.out, "output directory (overrides io.out)");
  app.add_option("--workers", cli.workers, "worker threads for sweeps");
  app.add_option("--seed", cli.seed, "seed for randomized self-tests");

  auto* sim = app.add_subcommand("simulate", "run the full model and write snapshots");
  auto* bas = app.add_subcommand("basis", "compute POD bases");
  auto* inf = app.add_subcommand("infer", "infer reduced operators");
  auto* rom = app.add_subcommand("rom", "run one reduced model and report errors");
  auto* swp = app.add_subcommand("sweep", "errors over methods and basis sizes");
  auto* psw = app.add_subcommand("param-sweep", "parametric train/test sweep");
  bool allow_overlap = false;
  psw->add_flag("--allow-overlap", allow_overlap, "permit shared train/test parameters");
  auto* cnv = app.add_subcommand("converge", "operator convergence study");
  auto* chk = app.add_subcommand("check", "run the built-in acceptance battery");
  chk->add_option("--only", cli.only, "criterion ids to run");
  chk->add_flag("--corrupt-stencil", cli.corrupt_stencil, "test hook: break the D1 stencil");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (chk->parsed()) return cmd_check(cli);
    const ExperimentConfig cfg = load_config(cli);
    write_echo(cfg);
    if (sim->parsed()) return cmd_simulate(cfg);
    if (bas->parsed()) return cmd_basis(cfg);
    if (inf->parsed()) return cmd_infer(cfg);
    if (rom->parsed()) return cmd_rom(cfg);
    if (swp->parsed()) return report_sweep(cfg, mode_sweep(cfg, load_run(cfg), cli.workers), "sweep.csv");
    if (psw->parsed())
      return report_sweep(cfg, parametric_sweep(cfg, cli.workers, allow_overlap),
                          "param_sweep.csv");
    if (cnv->parsed()) return cmd_converge(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hopinf/basis.hpp"
#include "hopinf/models.hpp"
#include "hopinf/reduce.hpp"
#include "hopinf/timestep.hpp"

namespace hopinf {

// Flat "section.key = value" text with '#' comments.
class ConfigMap {
 public:
  static ConfigMap parse(const std::string& text, const std::string& origin = "<string>");
  static ConfigMap from_file(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double get_real(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<double> get_real_list(const std::string& key) const;
  std::vector<long> get_int_list(const std::string& key) const;

  // Keys never read by any getter; used to reject typos.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> touched_;
};

enum class DerivativeSource { FiniteDifference, Exact };

struct ExperimentConfig {
  std::string model = "wave";
  WaveParams wave;
  NonsepParams nonsep;
  KdvParams kdv;
  BbmParams bbm;
  struct {
    std::string mass, stiffness, q_snapshots, p_snapshots;
    bool momentum_form = true;
    double dt = 0.0;
  } external;

  double dt = 0.02;   // integrator step of the full model
  Index stride = 1;   // integrator steps per stored snapshot
  double t_train = 10.0;
  double t_test = 10.0;
  std::optional<double> rom_dt;
  DerivativeSource derivatives = DerivativeSource::FiniteDifference;

  BasisKind basis_kind = BasisKind::Ordinary;
  bool center = false;
  std::vector<Index> modes{8};

  std::vector<RomMethod> methods{RomMethod::Hamiltonian};
  CanonicalVariant variant = CanonicalVariant::ApproxIdentity;
  double eta = 0.0;
  bool one_shot = false;

  NewtonSettings newton;

  std::string param_name = "alpha";
  std::vector<double> param_train, param_test;

  std::vector<double> converge_dts;
  std::vector<Index> converge_modes;
  double converge_t_end = 10.0;
  std::vector<std::string> converge_impulses;

  std::filesystem::path out_dir = "out";
  std::string snapshots_path;  // optional precomputed snapshot file
  bool record_wallclock = false;
  bool write_trajectories = false;

  double snapshot_dt() const { return dt * static_cast<double>(stride); }
  double rom_step() const { return rom_dt ? *rom_dt : snapshot_dt(); }
  Index train_columns() const;
  Index test_columns() const;

  void validate() const;
  // Canonical text form; parses back to an equal config.
  std::string echo() const;

  static ExperimentConfig from_map(const ConfigMap& map);
  // Relative data paths (external model files, io.snapshots) resolve against the
  // directory of the config file.
  static ExperimentConfig from_file(const std::filesystem::path& path);
};

// Number of steps of size h covering [0, t] exactly; throws when t is not a multiple.
Index step_count(double t, double h, const std::string& what);

}  // namespace hopinf

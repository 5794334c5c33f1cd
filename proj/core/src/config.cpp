#include "hopinf/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hopinf/hopm.hpp"

namespace hopinf {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += v[i];
  }
  return out;
}

template <class T>
std::string join_num(const std::vector<T>& v) {
  std::vector<std::string> s;
  for (const auto& x : v) {
    if constexpr (std::is_floating_point_v<T>)
      s.push_back(format_real(x));
    else
      s.push_back(std::to_string(x));
  }
  return join(s);
}

}  // namespace

ConfigMap ConfigMap::parse(const std::string& text, const std::string& origin) {
  ConfigMap m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key.find('.') == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key +
                        "' must have the form section.key");
    if (m.values_.count(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    m.values_[key] = value;
  }
  return m;
}

ConfigMap ConfigMap::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

bool ConfigMap::has(const std::string& key) const { return values_.count(key) > 0; }

void ConfigMap::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string ConfigMap::get(const std::string& key, const std::string& fallback) const {
  touched_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string ConfigMap::require(const std::string& key) const {
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

double ConfigMap::get_real(const std::string& key, double fallback) const {
  if (!has(key)) {
    touched_.insert(key);
    return fallback;
  }
  const std::string v = get(key, "");
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  }
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
  if (!has(key)) {
    touched_.insert(key);
    return fallback;
  }
  const std::string v = get(key, "");
  try {
    std::size_t pos = 0;
    long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) {
    touched_.insert(key);
    return fallback;
  }
  const std::string v = get(key, "");
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<std::string> ConfigMap::get_list(const std::string& key) const {
  std::vector<std::string> out;
  const std::string v = get(key, "");
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> ConfigMap::get_real_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : get_list(key)) {
    ConfigMap tmp;
    tmp.values_[key] = s;
    out.push_back(tmp.get_real(key, 0.0));
  }
  return out;
}

std::vector<long> ConfigMap::get_int_list(const std::string& key) const {
  std::vector<long> out;
  for (const auto& s : get_list(key)) {
    ConfigMap tmp;
    tmp.values_[key] = s;
    out.push_back(tmp.get_int(key, 0));
  }
  return out;
}

std::vector<std::string> ConfigMap::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!touched_.count(k)) out.push_back(k);
  return out;
}

Index step_count(double t, double h, const std::string& what) {
  if (!(h > 0.0)) throw ConfigError(what + ": step must be positive");
  const double r = t / h;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-9 * std::max(1.0, r) || k < 0)
    throw ConfigError(what + ": " + format_real(t) + " is not a multiple of " + format_real(h));
  return static_cast<Index>(k);
}

Index ExperimentConfig::train_columns() const {
  return step_count(t_train, snapshot_dt(), "time.t_train") + 1;
}

Index ExperimentConfig::test_columns() const {
  return step_count(t_test, snapshot_dt(), "time.t_test") + 1;
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& m) {
  ExperimentConfig c;
  c.model = m.get("model.name", c.model);
  auto& w = c.wave;
  auto& ns = c.nonsep;
  auto& k = c.kdv;
  auto& b = c.bbm;
  if (c.model == "wave") {
    w.c = m.get_real("model.c", w.c);
    w.length = m.get_real("model.length", w.length);
    w.cells = m.get_int("model.cells", w.cells);
    w.alpha = m.get_real("model.alpha", w.alpha);
  } else if (c.model == "nonseparable") {
    ns.alpha = m.get_real("model.alpha", ns.alpha);
    ns.points = m.get_int("model.points", ns.points);
    ns.length = m.get_real("model.length", ns.length);
  } else if (c.model == "kdv" || c.model == "kdv2") {
    k.alpha = m.get_real("model.alpha", k.alpha);
    k.rho = m.get_real("model.rho", k.rho);
    k.nu = m.get_real("model.nu", k.nu);
    k.half_length = m.get_real("model.half_length", k.half_length);
    k.points = m.get_int("model.points", k.points);
  } else if (c.model == "bbm") {
    b.alpha = m.get_real("model.alpha", b.alpha);
    b.beta = m.get_real("model.beta", b.beta);
    b.gamma = m.get_real("model.gamma", b.gamma);
    b.length = m.get_real("model.length", b.length);
    b.points = m.get_int("model.points", b.points);
    b.fast_transform = m.get_bool("model.fast_transform", b.fast_transform);
  } else if (c.model == "external") {
    c.external.mass = m.require("model.mass");
    c.external.stiffness = m.require("model.stiffness");
    c.external.q_snapshots = m.require("model.q_snapshots");
    c.external.p_snapshots = m.require("model.p_snapshots");
    c.external.momentum_form = m.get_bool("model.momentum_form", true);
  } else {
    throw ConfigError("model.name: unknown model '" + c.model +
                      "' (expected wave, nonseparable, kdv, kdv2, bbm or external)");
  }

  c.dt = m.get_real("time.dt", c.dt);
  c.stride = m.get_int("time.stride", c.stride);
  c.t_train = m.get_real("time.t_train", c.t_train);
  c.t_test = m.get_real("time.t_test", c.t_train);
  if (m.has("time.rom_dt")) c.rom_dt = m.get_real("time.rom_dt", 0.0);
  const std::string der = m.get("time.derivatives", "fd");
  if (der == "fd")
    c.derivatives = DerivativeSource::FiniteDifference;
  else if (der == "exact")
    c.derivatives = DerivativeSource::Exact;
  else
    throw ConfigError("time.derivatives: expected 'fd' or 'exact', got '" + der + "'");

  try {
    c.basis_kind = basis_kind_from_string(m.get("basis.kind", "ordinary"));
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("basis.kind: ") + e.what());
  }
  c.center = m.get_bool("basis.center", c.center);
  if (m.has("basis.modes")) {
    c.modes.clear();
    for (long v : m.get_int_list("basis.modes")) c.modes.push_back(v);
  }

  if (m.has("inference.methods")) {
    c.methods.clear();
    for (const auto& s : m.get_list("inference.methods")) {
      try {
        c.methods.push_back(rom_method_from_string(s));
      } catch (const ValidationError& e) {
        throw ConfigError(std::string("inference.methods: ") + e.what());
      }
    }
  }
  const std::string var = m.get("inference.variant", "approx");
  if (var == "approx")
    c.variant = CanonicalVariant::ApproxIdentity;
  else if (var == "exact")
    c.variant = CanonicalVariant::Exact;
  else
    throw ConfigError("inference.variant: expected 'exact' or 'approx', got '" + var + "'");
  c.eta = m.get_real("inference.eta", c.eta);
  c.one_shot = m.get_bool("inference.one_shot", c.one_shot);

  c.newton.tol = m.get_real("newton.tol", c.newton.tol);
  c.newton.max_iters = static_cast<int>(m.get_int("newton.max_iters", c.newton.max_iters));

  c.param_name = m.get("param.name", c.param_name);
  c.param_train = m.get_real_list("param.train");
  c.param_test = m.get_real_list("param.test");

  c.converge_dts = m.get_real_list("converge.dt");
  for (long v : m.get_int_list("converge.modes")) c.converge_modes.push_back(v);
  c.converge_t_end = m.get_real("converge.t_end", c.converge_t_end);
  c.converge_impulses = m.get_list("converge.impulses");

  c.out_dir = m.get("io.out", c.out_dir.string());
  c.snapshots_path = m.get("io.snapshots", "");
  c.record_wallclock = m.get_bool("io.wallclock", c.record_wallclock);
  c.write_trajectories = m.get_bool("io.write_trajectories", c.write_trajectories);
  if (c.model == "external") c.external.dt = c.dt;

  auto unused = m.unused_keys();
  if (!unused.empty()) throw ConfigError("unknown config key(s): " + join(unused));
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  ExperimentConfig c = from_map(ConfigMap::from_file(path));
  // data files named in a config are looked up next to it
  const std::filesystem::path base = path.parent_path();
  auto anchor = [&](std::string& f) {
    if (!f.empty() && std::filesystem::path(f).is_relative()) f = std::filesystem::absolute(base / f).lexically_normal().string();
  };
  anchor(c.external.mass);
  anchor(c.external.stiffness);
  anchor(c.external.q_snapshots);
  anchor(c.external.p_snapshots);
  anchor(c.snapshots_path);
  return c;
}

void ExperimentConfig::validate() const {
  try {
    if (model == "wave") wave.validate();
    if (model == "nonseparable") nonsep.validate();
    if (model == "kdv" || model == "kdv2") kdv.validate();
    if (model == "bbm") bbm.validate();
    newton.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  if (!(dt > 0.0)) throw ConfigError("time.dt must be positive");
  if (stride < 1) throw ConfigError("time.stride must be at least 1");
  if (!(t_train > 0.0)) throw ConfigError("time.t_train must be positive");
  if (t_test < t_train) throw ConfigError("time.t_test must be at least time.t_train");
  if (rom_dt && !(*rom_dt > 0.0)) throw ConfigError("time.rom_dt must be positive");
  if (train_columns() < 3) throw ConfigError("training window holds fewer than 3 snapshots");
  test_columns();
  if (rom_dt) step_count(t_test, *rom_dt, "time.t_test");
  if (modes.empty()) throw ConfigError("basis.modes must not be empty");
  for (Index n : modes)
    if (n < 1) throw ConfigError("basis.modes entries must be positive");
  if (methods.empty()) throw ConfigError("inference.methods must not be empty");
  if (eta < 0.0) throw ConfigError("inference.eta must be nonnegative");
  for (double d : converge_dts)
    if (!(d > 0.0)) throw ConfigError("converge.dt entries must be positive");
}

std::string ExperimentConfig::echo() const {
  std::ostringstream os;
  os << "model.name = " << model << "\n";
  if (model == "wave") {
    os << "model.c = " << format_real(wave.c) << "\n"
       << "model.length = " << format_real(wave.length) << "\n"
       << "model.cells = " << wave.cells << "\n"
       << "model.alpha = " << format_real(wave.alpha) << "\n";
  } else if (model == "nonseparable") {
    os << "model.alpha = " << format_real(nonsep.alpha) << "\n"
       << "model.points = " << nonsep.points << "\n"
       << "model.length = " << format_real(nonsep.length) << "\n";
  } else if (model == "kdv" || model == "kdv2") {
    os << "model.alpha = " << format_real(kdv.alpha) << "\n"
       << "model.rho = " << format_real(kdv.rho) << "\n"
       << "model.nu = " << format_real(kdv.nu) << "\n"
       << "model.half_length = " << format_real(kdv.half_length) << "\n"
       << "model.points = " << kdv.points << "\n";
  } else if (model == "bbm") {
    os << "model.alpha = " << format_real(bbm.alpha) << "\n"
       << "model.beta = " << format_real(bbm.beta) << "\n"
       << "model.gamma = " << format_real(bbm.gamma) << "\n"
       << "model.length = " << format_real(bbm.length) << "\n"
       << "model.points = " << bbm.points << "\n"
       << "model.fast_transform = " << (bbm.fast_transform ? "true" : "false") << "\n";
  } else if (model == "external") {
    os << "model.mass = " << external.mass << "\n"
       << "model.stiffness = " << external.stiffness << "\n"
       << "model.q_snapshots = " << external.q_snapshots << "\n"
       << "model.p_snapshots = " << external.p_snapshots << "\n"
       << "model.momentum_form = " << (external.momentum_form ? "true" : "false") << "\n";
  }
  os << "time.dt = " << format_real(dt) << "\n"
     << "time.stride = " << stride << "\n"
     << "time.t_train = " << format_real(t_train) << "\n"
     << "time.t_test = " << format_real(t_test) << "\n";
  if (rom_dt) os << "time.rom_dt = " << format_real(*rom_dt) << "\n";
  os << "time.derivatives = "
     << (derivatives == DerivativeSource::Exact ? "exact" : "fd") << "\n";
  os << "basis.kind = " << to_string(basis_kind) << "\n"
     << "basis.center = " << (center ? "true" : "false") << "\n"
     << "basis.modes = " << join_num(modes) << "\n";
  std::vector<std::string> ms;
  for (auto mth : methods) ms.push_back(to_string(mth));
  os << "inference.methods = " << join(ms) << "\n"
     << "inference.variant = " << (variant == CanonicalVariant::Exact ? "exact" : "approx")
     << "\n"
     << "inference.eta = " << format_real(eta) << "\n"
     << "inference.one_shot = " << (one_shot ? "true" : "false") << "\n";
  os << "newton.tol = " << format_real(newton.tol) << "\n"
     << "newton.max_iters = " << newton.max_iters << "\n";
  os << "param.name = " << param_name << "\n";
  if (!param_train.empty()) os << "param.train = " << join_num(param_train) << "\n";
  if (!param_test.empty()) os << "param.test = " << join_num(param_test) << "\n";
  if (!converge_dts.empty()) os << "converge.dt = " << join_num(converge_dts) << "\n";
  if (!converge_modes.empty()) os << "converge.modes = " << join_num(converge_modes) << "\n";
  os << "converge.t_end = " << format_real(converge_t_end) << "\n";
  if (!converge_impulses.empty())
    os << "converge.impulses = " << join(converge_impulses) << "\n";
  os << "io.out = " << out_dir.string() << "\n";
  if (!snapshots_path.empty()) os << "io.snapshots = " << snapshots_path << "\n";
  os << "io.wallclock = " << (record_wallclock ? "true" : "false") << "\n"
     << "io.write_trajectories = " << (write_trajectories ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace hopinf

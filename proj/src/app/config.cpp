#include "skt/app/config.hpp"

#include <algorithm>
#include <fstream>
#include <locale>
#include <type_traits>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "skt/error.hpp"

namespace skt::app {

namespace pt = boost::property_tree;

DensityField RunConfig::initial_field() const {
  return field_from_initial(grid, u1_0, u2_0);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& value) {
  const auto pos = value.find_first_of(";#");
  return trim(pos == std::string::npos ? value : value.substr(0, pos));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& text) {
  throw Error(ErrorCode::InvalidConfig, "bad value '" + text + "' for " + key);
}

template <class T>
void parse_value(const std::string& text, const std::string& key, T& target) {
  T value{};
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
      value = true;
    } else if (text == "false" || text == "0" || text == "no" || text == "off") {
      value = false;
    } else {
      bad_value(key, text);
    }
  } else {
    if constexpr (std::is_unsigned_v<T>) {
      if (!text.empty() && text.front() == '-') bad_value(key, text);
    }
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    in >> value;
    if (in.fail() || !(in >> std::ws).eof()) bad_value(key, text);
  }
  target = value;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) const {
    const auto node = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!node) return std::nullopt;
    return strip_comment(*node);
  }

  template <class T>
  void read(const std::string& key, T& target) const {
    if (const auto text = raw(key)) parse_value(*text, key, target);
  }

 private:
  const pt::ptree& tree_;
};

const std::set<std::string>& allowed_keys() {
  static const std::set<std::string> keys{
      "scenario.name",    "model.d1",         "model.d2",          "model.d11",
      "model.d12",        "model.d21",        "model.d22",         "model.a1",
      "model.a2",         "model.a11",        "model.a12",         "model.a21",
      "model.a22",        "grid.xmin",        "grid.xmax",         "grid.n",
      "initial.u1",       "initial.u2",       "solver.npaths",     "solver.substeps",
      "solver.dt",        "solver.T",         "solver.mode",       "solver.picard_tol",
      "solver.picard_max", "solver.seed",     "solver.workers",    "fd.dt_fd",
      "verify.checks",    "verify.npaths",    "verify.nsteps",     "verify.seed",
      "verify.t",         "verify.duality_t", "verify.flow_paths", "verify.test_centers",
      "verify.test_width", "verify.compare_tolerance", "output.progress",
      "debug.flip_correction_sign"};
  return keys;
}

void reject_unknown_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw Error(ErrorCode::InvalidConfig, "key '" + section + "' must be inside a section");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!allowed_keys().count(full)) {
        throw Error(ErrorCode::InvalidConfig, "unknown config key '" + full + "'");
      }
    }
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config parse error: ") + e.what());
  }
  reject_unknown_keys(tree);
  const Reader r(tree);

  std::string scenario = "custom";
  r.read("scenario.name", scenario);
  const auto& names = registered_scenarios();
  if (std::find(names.begin(), names.end(), scenario) == names.end()) {
    throw Error(ErrorCode::InvalidConfig, "unknown scenario '" + scenario + "'");
  }
  RunConfig cfg = scenario_defaults(scenario);

  Parameters& p = cfg.params;
  r.read("model.d1", p.d1);
  r.read("model.d2", p.d2);
  r.read("model.d11", p.d11);
  r.read("model.d12", p.d12);
  r.read("model.d21", p.d21);
  r.read("model.d22", p.d22);
  r.read("model.a1", p.a1);
  r.read("model.a2", p.a2);
  r.read("model.a11", p.a11);
  r.read("model.a12", p.a12);
  r.read("model.a21", p.a21);
  r.read("model.a22", p.a22);

  r.read("grid.xmin", cfg.grid.xmin);
  r.read("grid.xmax", cfg.grid.xmax);
  r.read("grid.n", cfg.grid.n);

  if (const auto u1 = r.raw("initial.u1")) cfg.u1_0 = Profile::parse(*u1);
  if (const auto u2 = r.raw("initial.u2")) cfg.u2_0 = Profile::parse(*u2);

  SolverConfig& s = cfg.solver;
  r.read("solver.npaths", s.npaths);
  r.read("solver.substeps", s.substeps);
  r.read("solver.dt", s.dt);
  r.read("solver.T", s.T);
  r.read("solver.picard_tol", s.picard_tol);
  r.read("solver.picard_max", s.picard_max);
  r.read("solver.seed", s.master_seed);
  r.read("solver.workers", s.workers);
  if (const auto mode = r.raw("solver.mode")) {
    if (*mode == "layered") {
      cfg.mode = SolveMode::layered;
    } else if (*mode == "picard") {
      cfg.mode = SolveMode::picard;
    } else {
      throw Error(ErrorCode::InvalidConfig, "solver.mode must be layered or picard");
    }
  }

  r.read("fd.dt_fd", cfg.fd.dt_fd);

  VerifySettings& v = cfg.verify;
  if (const auto checks = r.raw("verify.checks")) {
    v.checks = split_list(*checks);
    if (v.checks.size() == 1 && v.checks.front() == "none") v.checks.clear();
  }
  r.read("verify.npaths", v.mc.npaths);
  r.read("verify.nsteps", v.mc.nsteps);
  r.read("verify.seed", v.mc.master_seed);
  r.read("verify.t", v.t);
  r.read("verify.duality_t", v.duality_t);
  r.read("verify.flow_paths", v.flow_paths);
  r.read("verify.test_width", v.test_width);
  r.read("verify.compare_tolerance", v.compare_tolerance);
  if (const auto centers = r.raw("verify.test_centers")) {
    v.test_centers.clear();
    for (const auto& item : split_list(*centers)) {
      double c = 0.0;
      parse_value(item, "verify.test_centers", c);
      v.test_centers.push_back(c);
    }
  }

  r.read("output.progress", cfg.progress);
  bool flip = false;
  r.read("debug.flip_correction_sign", flip);
  if (flip) {
    s.sign = DriftCorrection::minus;
    v.mc.sign = DriftCorrection::minus;
  }
  v.mc.workers = s.workers;

  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate(const RunConfig& cfg) {
  const auto& names = registered_scenarios();
  if (std::find(names.begin(), names.end(), cfg.scenario) == names.end()) {
    throw Error(ErrorCode::InvalidConfig, "unknown scenario '" + cfg.scenario + "'");
  }
  validate_params(cfg.params);
  validate_grid(cfg.grid);
  validate_solver_config(cfg.solver);
  if (!(cfg.fd.dt_fd > 0.0)) throw Error(ErrorCode::InvalidConfig, "fd.dt_fd must be > 0");
  for (const auto& name : cfg.verify.checks) {
    const auto& known = known_checks();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw Error(ErrorCode::InvalidConfig, "unknown check '" + name + "'");
    }
  }
  const VerifySettings& v = cfg.verify;
  if (v.mc.npaths == 0 || v.mc.nsteps <= 0 || !(v.t > 0.0) || !(v.duality_t > 0.0) ||
      v.flow_paths == 0 || !(v.test_width > 0.0) || !(v.compare_tolerance >= 0.0) ||
      v.test_centers.empty()) {
    throw Error(ErrorCode::InvalidConfig, "invalid [verify] settings");
  }
  // Initial data must be admissible on the grid.
  (void)cfg.initial_field();
}

}  // namespace skt::app

#include "skt/app/output.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>

#include "skt/error.hpp"

namespace skt::app {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

void write_trajectory_csv(std::ostream& out, const FieldTrajectory& traj) {
  out << "t,x,u1,u2,v1,v2\n";
  std::string line;
  for (const DensityField& f : traj.fields) {
    const std::string t = format_double(f.t);
    for (std::size_t i = 0; i < f.grid.n; ++i) {
      line.clear();
      line += t;
      for (double value : {f.grid.node(i), f.u1[i], f.u2[i], f.v1[i], f.v2[i]}) {
        line += ',';
        line += format_double(value);
      }
      line += '\n';
      out << line;
    }
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const FieldTrajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path.string() + "'");
  write_trajectory_csv(out, traj);
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  const Parameters& p = cfg.params;
  nlohmann::json j;
  j["scenario"] = cfg.scenario;
  j["model"] = {{"d1", p.d1},   {"d2", p.d2},   {"d11", p.d11}, {"d12", p.d12},
                {"d21", p.d21}, {"d22", p.d22}, {"a1", p.a1},   {"a2", p.a2},
                {"a11", p.a11}, {"a12", p.a12}, {"a21", p.a21}, {"a22", p.a22}};
  j["grid"] = {{"xmin", cfg.grid.xmin}, {"xmax", cfg.grid.xmax}, {"n", cfg.grid.n}};
  j["initial"] = {{"u1", cfg.u1_0.to_string()}, {"u2", cfg.u2_0.to_string()}};
  const SolverConfig& s = cfg.solver;
  j["solver"] = {{"npaths", s.npaths},
                 {"substeps", s.substeps},
                 {"dt", s.dt},
                 {"T", s.T},
                 {"mode", cfg.mode == SolveMode::picard ? "picard" : "layered"},
                 {"picard_tol", s.picard_tol},
                 {"picard_max", s.picard_max},
                 {"seed", s.master_seed},
                 {"workers", s.workers}};
  j["fd"] = {{"dt_fd", cfg.fd.dt_fd}};
  const VerifySettings& v = cfg.verify;
  j["verify"] = {{"checks", v.checks},
                 {"npaths", v.mc.npaths},
                 {"nsteps", v.mc.nsteps},
                 {"seed", v.mc.master_seed},
                 {"t", v.t},
                 {"duality_t", v.duality_t},
                 {"flow_paths", v.flow_paths},
                 {"test_centers", v.test_centers},
                 {"test_width", v.test_width},
                 {"compare_tolerance", v.compare_tolerance}};
  j["debug"] = {{"flip_correction_sign", s.sign == DriftCorrection::minus}};
  return j;
}

nlohmann::json layer_report_to_json(const LayerReport& r) {
  return {{"t", r.t},
          {"u_min", r.u_min},
          {"u_max", r.u_max},
          {"clips", r.clips},
          {"clamps", r.clamps},
          {"evaluations", r.evaluations},
          {"clamp_fraction", r.clamp_fraction()},
          {"max_u_stderr", r.max_u_stderr},
          {"gradient_mismatch", r.gradient_mismatch}};
}

nlohmann::json check_to_json(const CheckReport& r) {
  nlohmann::json details = nlohmann::json::object();
  for (const auto& [key, value] : r.details) details[key] = value;
  return {{"name", r.name},
          {"statistic", r.statistic},
          {"tolerance", r.tolerance},
          {"pass", r.pass},
          {"details", details}};
}

nlohmann::json checks_to_json(const std::vector<CheckReport>& reports) {
  nlohmann::json list = nlohmann::json::array();
  bool all = true;
  for (const auto& r : reports) {
    list.push_back(check_to_json(r));
    all = all && r.pass;
  }
  return {{"pass", all}, {"checks", list}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path.string() + "'");
  out << value.dump(2) << '\n';
}

}  // namespace skt::app

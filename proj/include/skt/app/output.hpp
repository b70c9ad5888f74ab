#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "skt/app/config.hpp"
#include "skt/mc_solver.hpp"
#include "skt/verify.hpp"

namespace skt::app {

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double value);

/// Header "t,x,u1,u2,v1,v2" then one row per snapshot and node.
void write_trajectory_csv(std::ostream& out, const FieldTrajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const FieldTrajectory& traj);

nlohmann::json config_to_json(const RunConfig& cfg);
nlohmann::json layer_report_to_json(const LayerReport& r);
nlohmann::json check_to_json(const CheckReport& r);
nlohmann::json checks_to_json(const std::vector<CheckReport>& reports);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace skt::app

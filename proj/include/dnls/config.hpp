#pragma once

#include <string>
#include <vector>

#include "dnls/field.hpp"
#include "dnls/verify.hpp"

namespace dnls {

/// Scenario configuration parsed from a flat sectioned key=value file.
struct ScenarioConfig {
  double grid_L = 40.0;
  int grid_N = 1024;

  ProfileSpec profile = ProfileSpec::make_gaussian(0.1);

  std::vector<double> taus = {2.0, 8.0};
  std::vector<int> branches;  // defaults to +1 per tau

  enum class Flow { none, dnls, akappa };
  Flow flow = Flow::none;
  double generator_tau = 2.0;
  double T = 0.1;
  double dt = 1e-3;
  int snapshot_stride = 10;

  std::vector<std::string> checks = {"identity", "a_consistency", "gradient", "bracket",
                                     "branch_parity"};

  std::vector<double> sweep_amplitudes = {0.02, 0.05, 0.1, 0.2};
  std::vector<double> sweep_taus = {1, 2, 4, 8, 16, 32, 64};
  double sweep_s = 0.25;

  ToleranceMap tolerances;  // defaults merged with overrides

  std::string out_dir = "out";
  std::vector<std::string> formats = {"csv", "json"};

  std::string canonical;  // canonicalized key=value lines, hashed for reports

  static ScenarioConfig load(const std::string& path);
  /// Parses config text; `origin` names the source in diagnostics.
  static ScenarioConfig parse(const std::string& text, const std::string& origin);

  /// Re-validates cross-field invariants; throws on violations.
  void validate() const;
};

}  // namespace dnls

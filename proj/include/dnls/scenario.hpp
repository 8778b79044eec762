#pragma once

#include <optional>
#include <string>

#include "dnls/config.hpp"

namespace dnls {

struct ScenarioOverrides {
  std::optional<double> tau;        // replaces the tau list (and the generator)
  std::optional<double> amplitude;  // replaces the profile amplitude
  std::optional<double> dt;
  std::optional<std::string> out;
  std::optional<std::string> flow;  // dnls | akappa | none
};

ScenarioConfig apply_overrides(ScenarioConfig cfg, const ScenarioOverrides& o);

/// Each returns a process exit status; run_verify is nonzero iff a check fails.
int run_greens(const ScenarioConfig& cfg, const std::string& method);
int run_invariants(const ScenarioConfig& cfg);
int run_evolve(const ScenarioConfig& cfg);
int run_verify(const ScenarioConfig& cfg);
int run_sweep(const ScenarioConfig& cfg);

}  // namespace dnls

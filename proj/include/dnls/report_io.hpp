#pragma once

#include <string>
#include <vector>

#include "dnls/flows.hpp"
#include "dnls/greens.hpp"
#include "dnls/invariants.hpp"
#include "dnls/verify.hpp"

namespace dnls {

/// Shortest text form of a double that round-trips exactly.
std::string fmt_double(double v);

/// FNV-1a 64-bit hash of the canonical config text, as hex.
std::string config_hash(const std::string& canonical);

/// x, Re gamma, Im gamma, Re g12, Im g12, Re g21, Im g21.
void write_triple_csv(const std::string& path, const DiagonalGreens& dg);

/// t, then per-probe Re A, Im A, then M, Re H, Im H, Re E, Im E, gauge_dev.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// tau, |rem1|, |rem2|, |rem3|, sup remainders of the pointwise expansions.
void write_asymptotics_csv(const std::string& path, const AsymptoticsTable& table);

/// estimate, amplitude, tau, lhs, rhs, ratio, valid.
void write_sweep_csv(const std::string& path, const SweepTable& table);

/// {config_hash, started_at, checks: [{name, residual, tolerance, pass}], pass}.
/// started_at honors SOURCE_DATE_EPOCH for reproducible runs.
void write_report_json(const std::string& path, const std::string& cfg_hash,
                       const VerificationReport& report);

std::string report_json_string(const std::string& cfg_hash, const VerificationReport& report);

}  // namespace dnls

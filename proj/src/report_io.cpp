#include "dnls/report_io.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace dnls {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

std::string now_iso8601() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"))
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string config_hash(const std::string& canonical) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_triple_csv(const std::string& path, const DiagonalGreens& dg) {
  auto out = open_out(path);
  out << "x,re_gamma,im_gamma,re_g12,im_g12,re_g21,im_g21\n";
  const ComplexField g12 = dg.g12();
  const ComplexField g21 = dg.g21();
  const auto& g = dg.gamma.grid();
  for (int i = 0; i < dg.gamma.size(); ++i) {
    out << fmt_double(g->x[i]) << ',' << fmt_double(dg.gamma[i].real()) << ','
        << fmt_double(dg.gamma[i].imag()) << ',' << fmt_double(g12[i].real()) << ','
        << fmt_double(g12[i].imag()) << ',' << fmt_double(g21[i].real()) << ','
        << fmt_double(g21[i].imag()) << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << "t";
  if (!traj.snaps.empty()) {
    for (const auto& [sp, a] : traj.snaps.front().conserved.a_values)
      out << ",re_A_tau" << fmt_double(sp.tau()) << ",im_A_tau" << fmt_double(sp.tau());
  }
  out << ",M,re_H,im_H,re_E,im_E,gauge_dev\n";
  for (const auto& s : traj.snaps) {
    out << fmt_double(s.t);
    for (const auto& [sp, a] : s.conserved.a_values)
      out << ',' << fmt_double(a.real()) << ',' << fmt_double(a.imag());
    out << ',' << fmt_double(s.conserved.mass.real()) << ','
        << fmt_double(s.conserved.hamiltonian.real()) << ','
        << fmt_double(s.conserved.hamiltonian.imag()) << ','
        << fmt_double(s.conserved.energy.real()) << ','
        << fmt_double(s.conserved.energy.imag()) << ',' << fmt_double(s.gauge_dev) << '\n';
  }
}

void write_asymptotics_csv(const std::string& path, const AsymptoticsTable& table) {
  auto out = open_out(path);
  out << "tau,rem1,rem2,rem3,rem_gamma,rem_kg12,rem_kg21,"
         "slope1,slope2,slope3,slope_gamma,slope_kg12,slope_kg21\n";
  for (const auto& r : table.rows) {
    out << fmt_double(r.tau) << ',' << fmt_double(r.rem1) << ',' << fmt_double(r.rem2) << ','
        << fmt_double(r.rem3) << ',' << fmt_double(r.rem_gamma) << ','
        << fmt_double(r.rem_kg12) << ',' << fmt_double(r.rem_kg21) << ','
        << fmt_double(table.slope1) << ',' << fmt_double(table.slope2) << ','
        << fmt_double(table.slope3) << ',' << fmt_double(table.slope_gamma) << ','
        << fmt_double(table.slope_kg12) << ',' << fmt_double(table.slope_kg21) << '\n';
  }
}

void write_sweep_csv(const std::string& path, const SweepTable& table) {
  auto out = open_out(path);
  out << "estimate,amplitude,tau,lhs,rhs,ratio,valid\n";
  for (const auto& r : table.rows) {
    out << r.estimate << ',' << fmt_double(r.amplitude) << ',' << fmt_double(r.tau) << ','
        << fmt_double(r.lhs) << ',' << fmt_double(r.rhs) << ',' << fmt_double(r.ratio) << ','
        << (r.valid ? 1 : 0) << '\n';
  }
}

std::string report_json_string(const std::string& cfg_hash, const VerificationReport& report) {
  nlohmann::json j;
  j["config_hash"] = cfg_hash;
  j["started_at"] = now_iso8601();
  j["checks"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    j["checks"].push_back({{"name", r.name},
                           {"residual", r.residual},
                           {"tolerance", r.tolerance},
                           {"pass", r.pass}});
  }
  j["pass"] = report.all_pass();
  return j.dump(2) + "\n";
}

void write_report_json(const std::string& path, const std::string& cfg_hash,
                       const VerificationReport& report) {
  auto out = open_out(path);
  out << report_json_string(cfg_hash, report);
}

}  // namespace dnls

#include "dnls/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dnls {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad numeric value '" + v + "' for " + where);
  }
}

int parse_int(const std::string& v, const std::string& where) {
  const double d = parse_double(v, where);
  if (d != std::floor(d))
    throw std::runtime_error("config: expected integer value for " + where + ", got '" + v + "'");
  return static_cast<int>(d);
}

std::vector<double> parse_doubles(const std::string& v, const std::string& where) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_double(item, where));
  return out;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> k = {
      "identity", "a_consistency", "gradient",          "bracket",
      "branch_parity", "gauge_im_gamma", "flow_conservation", "continuity"};
  return k;
}

}  // namespace

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

ScenarioConfig ScenarioConfig::parse(const std::string& text, const std::string& origin) {
  ScenarioConfig cfg;
  cfg.tolerances = default_tolerances();

  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> canon;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = origin + ":" + std::to_string(lineno);

    if (line.front() == '[') {
      if (line.back() != ']') throw std::runtime_error("config parse error at " + at +
                                                       ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config parse error at " + at + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string where = "[" + section + "] " + key + " (" + at + ")";
    canon.push_back(section + "." + key + "=" + val);

    if (section == "grid") {
      if (key == "L") cfg.grid_L = parse_double(val, where);
      else if (key == "N") cfg.grid_N = parse_int(val, where);
      else throw std::runtime_error("config: unknown key " + where);
    } else if (section == "profile") {
      if (key == "kind") {
        if (val == "gaussian") cfg.profile.kind = ProfileSpec::Kind::gaussian;
        else if (val == "sech") cfg.profile.kind = ProfileSpec::Kind::sech;
        else if (val == "zero") cfg.profile.kind = ProfileSpec::Kind::zero;
        else if (val == "file") cfg.profile.kind = ProfileSpec::Kind::file;
        else throw std::runtime_error("config: unknown profile kind '" + val + "' at " + at);
      } else if (key == "amplitude") cfg.profile.amplitude = parse_double(val, where);
      else if (key == "width") cfg.profile.width = parse_double(val, where);
      else if (key == "center") cfg.profile.center = parse_double(val, where);
      else if (key == "chirp") cfg.profile.chirp = parse_double(val, where);
      else if (key == "velocity") cfg.profile.velocity = parse_double(val, where);
      else if (key == "path") cfg.profile.path = val;
      else throw std::runtime_error("config: unknown key " + where);
    } else if (section == "spectral") {
      if (key == "taus") cfg.taus = parse_doubles(val, where);
      else if (key == "branches") {
        cfg.branches.clear();
        for (const auto& b : split_list(val)) cfg.branches.push_back(parse_int(b, where));
      } else throw std::runtime_error("config: unknown key " + where);
    } else if (section == "flow") {
      if (key == "kind") {
        if (val == "dnls") cfg.flow = Flow::dnls;
        else if (val == "akappa") cfg.flow = Flow::akappa;
        else if (val == "none") cfg.flow = Flow::none;
        else throw std::runtime_error("config: unknown flow kind '" + val + "' at " + at);
      } else if (key == "generator_tau") cfg.generator_tau = parse_double(val, where);
      else if (key == "T") cfg.T = parse_double(val, where);
      else if (key == "dt") cfg.dt = parse_double(val, where);
      else if (key == "snapshot_stride") cfg.snapshot_stride = parse_int(val, where);
      else throw std::runtime_error("config: unknown key " + where);
    } else if (section == "verify") {
      if (key == "checks") cfg.checks = split_list(val);
      else throw std::runtime_error("config: unknown key " + where);
    } else if (section == "sweep") {
      if (key == "amplitudes") cfg.sweep_amplitudes = parse_doubles(val, where);
      else if (key == "taus") cfg.sweep_taus = parse_doubles(val, where);
      else if (key == "s") cfg.sweep_s = parse_double(val, where);
      else throw std::runtime_error("config: unknown key " + where);
    } else if (section == "tolerances") {
      if (default_tolerances().find(key) == default_tolerances().end())
        throw std::runtime_error("config: unknown tolerance '" + key + "' at " + at);
      cfg.tolerances[key] = parse_double(val, where);
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = val;
      else if (key == "formats") cfg.formats = split_list(val);
      else throw std::runtime_error("config: unknown key " + where);
    } else {
      throw std::runtime_error("config: unknown section [" + section + "] at " + at);
    }
  }
  std::sort(canon.begin(), canon.end());
  std::string joined;
  for (const auto& c : canon) joined += c + "\n";
  cfg.canonical = joined;
  cfg.validate();
  return cfg;
}

void ScenarioConfig::validate() const {
  make_grid(grid_L, grid_N);  // throws on bad grid parameters
  auto check_tau = [](double tau) {
    if (std::abs(tau) < 1.0)
      throw std::runtime_error("config: spectral parameter below unit threshold: tau = " +
                               std::to_string(tau));
  };
  for (double t : taus) check_tau(t);
  for (double t : sweep_taus) check_tau(t);
  if (flow == Flow::akappa) check_tau(generator_tau);
  if (!branches.empty() && branches.size() != taus.size())
    throw std::runtime_error("config: branches list must match taus list");
  for (int b : branches)
    if (b != 1 && b != -1) throw std::runtime_error("config: branches must be +1 or -1");
  if (flow != Flow::none) {
    if (!(dt > 0.0)) throw std::runtime_error("config: dt must be positive");
    if (!(T > 0.0)) throw std::runtime_error("config: T must be positive");
    if (snapshot_stride < 1) throw std::runtime_error("config: snapshot_stride must be >= 1");
  }
  if (!(sweep_s > 0.0 && sweep_s < 0.5))
    throw std::runtime_error("config: sweep s must lie in (0, 1/2)");
  if (taus.size() < 2)
    throw std::runtime_error("config: need at least two spectral parameters");
  for (const auto& c : checks) {
    if (std::find(known_checks().begin(), known_checks().end(), c) == known_checks().end())
      throw std::runtime_error("config: unknown check '" + c + "'");
  }
  // every enabled check must have its tolerances present
  static const std::map<std::string, std::vector<std::string>> needs = {
      {"identity",
       {"quadratic_id", "rho_id", "g12_id", "g21_id", "symmetry_gamma", "symmetry_g",
        "two_param", "series_remainder", "dadtau"}},
      {"a_consistency", {"a_consistency"}},
      {"gradient", {"gradient"}},
      {"bracket", {"bracket"}},
      {"branch_parity", {"branch_parity"}},
      {"gauge_im_gamma", {"gauge_im_gamma"}},
      {"flow_conservation", {"mass_drift", "hamiltonian_drift", "a_drift", "gauge_drift"}},
      {"continuity", {"continuity"}},
  };
  for (const auto& c : checks) {
    for (const auto& t : needs.at(c)) {
      if (tolerances.find(t) == tolerances.end())
        throw std::runtime_error("config: tolerance map gap, check '" + c +
                                 "' needs tolerance '" + t + "'");
    }
  }
}

}  // namespace dnls

#include "mqfactor/runconfig.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace mqf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

i64 parse_i64(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const i64 v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("BadConfigValue", key + " expects an integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("BadConfigValue", key + " expects a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw PreconditionError("BadConfigValue", key + " expects true/false, got '" + value + "'");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("BadConfigFile", "cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw PreconditionError("BadConfigFile",
                              path + ":" + std::to_string(lineno) + ": expected key=value");
    entries.emplace_back(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return entries;
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "N") cfg.N = parse_i64(key, value);
  else if (key == "y") {
    cfg.y = parse_i64(key, value);
    cfg.y_set = true;
  } else if (key == "ni") cfg.ni = int(parse_i64(key, value));
  else if (key == "eps-i") cfg.eps_i = parse_double(key, value);
  else if (key == "m") {
    cfg.m = parse_i64(key, value);
    cfg.m_set = true;
  } else if (key == "m-max") {
    cfg.m_max = parse_i64(key, value);
    cfg.m_max_set = true;
  } else if (key == "omega-s") cfg.omega_s = parse_double(key, value);
  else if (key == "t1-samples") cfg.t1_samples = int(parse_i64(key, value));
  else if (key == "tol") cfg.tol = parse_double(key, value);
  else if (key == "seed") cfg.seed = std::uint64_t(parse_i64(key, value));
  else if (key == "y-order") {
    if (value != "ascending" && value != "random")
      throw PreconditionError("BadConfigValue", "y-order expects ascending|random");
    cfg.y_order = value;
  } else if (key == "max-y-attempts") cfg.max_y_attempts = int(parse_i64(key, value));
  else if (key == "per-order") cfg.per_order = parse_bool(key, value);
  else if (key == "out") cfg.out = value;
  else throw PreconditionError("BadConfigKey", "unknown config key '" + key + "'");
}

std::string scan_csv(const ScanResult& scan, bool per_order, int n) {
  std::ostringstream os;
  os << "m,I,Iy";
  if (per_order)
    for (int p = -n; p <= n; ++p) os << ",Iy_p" << p;
  os << "\n";
  for (const ScanPoint& pt : scan.points) {
    os << pt.m << "," << format_sig12(pt.I_direct) << "," << format_sig12(pt.Iy_direct);
    if (per_order)
      for (int p = -n; p <= n; ++p) os << "," << format_sig12(pt.orders.at(p));
    os << "\n";
  }
  return os.str();
}

std::string spectrum_csv(const CoherenceSpectrum& orders, const CoherenceSpectrum& peaks) {
  std::ostringstream os;
  os << "order,intensity,dft_peak\n";
  for (int p = -orders.n; p <= orders.n; ++p)
    os << p << "," << format_sig12(orders.at(p)) << "," << format_sig12(peaks.at(p)) << "\n";
  return os.str();
}

nlohmann::json orbit_report_json(const OrbitTable& table, const OrbitCensus* census,
                                 std::uint64_t seed) {
  nlohmann::json orbits = nlohmann::json::array();
  for (const Orbit& orbit : table.orbits)
    orbits.push_back({{"rep", orbit.rep}, {"period", orbit.period}, {"cycle", orbit.cycle}});
  nlohmann::json doc = {
      {"N", table.mod.N},       {"y", table.y},
      {"r", table.r},           {"t", table.t},
      {"d", table.d},           {"degenerate", table.degenerate},
      {"orbits", orbits},       {"seed", seed},
  };
  if (census != nullptr) {
    doc["pp_count"] = census->count;
    doc["pp_bound"] = census->bound;
    doc["pp_deficit"] = census->deficit;
    doc["pp_deficit_bound"] = census->deficit_bound;
    doc["pp_pass"] = census->pass;
  }
  if (table.mod.has_pq()) {
    doc["p"] = table.mod.p;
    doc["q"] = table.mod.q;
  }
  if (table.degenerate)
    doc["warning"] = "y = 1 mod N: the drive is the identity and every intensity vanishes";
  return doc;
}

nlohmann::json factor_json(const FactorResult& result, std::uint64_t seed) {
  nlohmann::json doc = {
      {"N", result.N},
      {"factors", result.ok ? nlohmann::json::array({result.f1, result.f2})
                            : nlohmann::json(nullptr)},
      {"y_trace", result.y_trace},
      {"r_prime", result.r_prime},
      {"f_chain", result.f_chain},
      {"gcd_outcomes", result.gcd_outcomes},
      {"status", result.status},
      {"seed", seed},
  };
  return doc;
}

nlohmann::json error_json(const std::string& kind, const std::string& message) {
  return {{"error", {{"kind", kind}, {"message", message}}}};
}

void write_output(const RunConfig& cfg, const std::string& payload) {
  if (cfg.out.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw PreconditionError("BadOutputPath", "cannot open output file " + cfg.out);
  out << payload;
}

}  // namespace mqf

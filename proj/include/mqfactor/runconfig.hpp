#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mqfactor/factordrive.hpp"

namespace mqf {

// Everything a command run needs, collected from flags and/or a config file.
// Fields mirror the flag names; *_set tracks explicit assignment where a
// computed default would otherwise apply.
struct RunConfig {
  i64 N = 0;
  i64 y = 0;
  bool y_set = false;
  int ni = 1;
  double eps_i = 1.0;
  i64 m = 0;
  bool m_set = false;
  i64 m_max = 0;  // scan upper bound / factor m budget
  bool m_max_set = false;
  double omega_s = 1.0;
  int t1_samples = 0;  // 0 selects the smallest admissible Fourier grid
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::string y_order = "ascending";  // "ascending" | "random"
  int max_y_attempts = 32;
  bool per_order = false;
  std::string out;  // empty writes to stdout
};

// Flat key=value lines, '#' comments and blank lines skipped, keys named
// exactly like the long flags without the leading dashes.
std::vector<std::pair<std::string, std::string>> parse_flat_config(const std::string& path);

// Assigns one config entry; throws BadConfigKey / BadConfigValue.
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

// CSV with header m,I,Iy and optionally one Iy_p{p} column per coherence
// order p in [-n, n]; 12 significant digits, '\n' line endings.
std::string scan_csv(const ScanResult& scan, bool per_order, int n);

// CSV with header order,intensity,dft_peak: bucket intensities next to the
// emulated-detection cross-check.
std::string spectrum_csv(const CoherenceSpectrum& orders, const CoherenceSpectrum& peaks);

// census may be null when N is not a semiprime; the pp_* fields are then
// omitted.
nlohmann::json orbit_report_json(const OrbitTable& table, const OrbitCensus* census,
                                 std::uint64_t seed);
nlohmann::json factor_json(const FactorResult& result, std::uint64_t seed);
nlohmann::json error_json(const std::string& kind, const std::string& message);

// Writes to cfg.out when set, stdout otherwise.
void write_output(const RunConfig& cfg, const std::string& payload);

}  // namespace mqf

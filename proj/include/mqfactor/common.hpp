#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace mqf {

using i64 = std::int64_t;

// Failure the caller could have avoided by validating inputs first.
// CLI maps these to exit code 2.
struct PreconditionError : std::runtime_error {
  std::string kind;
  PreconditionError(std::string k, const std::string& msg)
      : std::runtime_error(msg), kind(std::move(k)) {}
};

// Failure discovered while computing (budget spent, detection came up empty).
// CLI maps these to exit code 3.
struct ComputationError : std::runtime_error {
  std::string kind;
  ComputationError(std::string k, const std::string& msg)
      : std::runtime_error(msg), kind(std::move(k)) {}
};

// Canonical number formatting for emitted tables: 12 significant digits,
// '.' decimal point, no locale dependence.
inline std::string format_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// How a data-parallel kernel should run.  Serial twins of every parallel
// kernel are kept alongside so the two can be compared in tests.
enum class ExecMode { Serial, Parallel };

}  // namespace mqf

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "spf/stats.hpp"

namespace spf::cli {

// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitMalformedInput = 2;
inline constexpr int kExitInvalidParameters = 3;
inline constexpr int kExitSizeCap = 4;

enum class Statistic { kMean, kTrimmedMean, kMedian, kMin, kMax, kVariance };

std::string statistic_name(Statistic s);

struct RunConfig {
  Statistic statistic = Statistic::kMean;
  std::string input_path;

  std::optional<double> delta;       // uniform sensitivity budget
  std::string delta_file;            // per-id budgets, '*' row as default
  std::optional<double> mu_hat;      // mean anchor at the empty database
  std::optional<double> empty_value; // anchor for the other statistics
  double alpha = 0.0;                // trimmed-mean fraction per end

  std::string epsilon_file;  // enables Laplace noising when set
  std::uint64_t seed = 0;

  bool json = false;
  bool general = false;    // route through the general subset recursion
  std::size_t max_n = 24;  // cap for general mode
};

// Executes one preprocessing run: ingest CSV, compute raw and
// sensitivity-bounded values, optionally add personalized Laplace noise, and
// write a human-readable or JSON report to out. Diagnostics go to err.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace spf::cli

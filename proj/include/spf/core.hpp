#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spf/database.hpp"
#include "spf/memo.hpp"
#include "spf/oracle.hpp"

namespace spf::core {

// Window [lower, upper] induced at D by all strictly smaller neighbors:
//   upper = min_i { g(D - x_i) + Delta_i },  lower = max_i { g(D - x_i) - Delta_i }.
// lower <= upper for every reachable state; the constructor asserts it up to
// an accumulated-rounding tolerance and throws InvariantViolationError beyond.
class FeasibleInterval {
 public:
  FeasibleInterval(double lower, double upper);

  double lower() const { return lower_; }
  double upper() const { return upper_; }

  // Case order: upper <= f -> upper; lower >= f -> lower; otherwise f.
  // When f equals an endpoint the result is f itself (no ambiguity).
  double clamp(double f_value) const;

 private:
  double lower_;
  double upper_;
};

struct PreprocessOptions {
  // Hard cap on n for the 2^n general recursion; overridable.
  std::size_t max_n = 24;
};

struct PreprocessResult {
  double g_value = 0.0;
  MemoTable memo;
};

struct AuditViolation {
  Mask subset = 0;
  std::string individual_id;
  double excess = 0.0;
};

struct AuditReport {
  std::vector<AuditViolation> violations;
  bool clean() const { return violations.empty(); }
};

struct PermutationBound {
  double value = 0.0;
  // Permutation of database indices (into the canonical sorted order)
  // attaining the maximum; for sampled mode, the best permutation seen.
  std::vector<std::size_t> witness;
  // False when the value is a Monte-Carlo lower estimate, never the bound.
  bool exact = true;
};

struct ErrorBoundOptions {
  // Exact maximization over permutations is exponential; above this cap the
  // caller must explicitly request sampling.
  std::size_t exact_limit = 8;
};

// The feasible interval of a nonempty subset D given g on its one-smaller
// neighbors. Throws InternalConsistencyError on missing memo entries.
FeasibleInterval feasible_interval(const Database& d, const MemoTable& memo,
                                   const SensitivityBounds& bounds);

// Mask-keyed variant used by the recursion itself; deltas are indexed by the
// memo root's record positions.
FeasibleInterval feasible_interval(Mask subset, const MemoTable& memo,
                                   const std::vector<double>& deltas);

// Builds g on every subset of D by the subset-lattice recursion: g(empty) is
// the oracle's empty value, and g(D') clamps f(D') into feasible_interval(D').
// Cost O((T(n) + n) 2^n).
PreprocessResult preprocess(const FunctionOracle& f,
                            const SensitivityBounds& bounds, const Database& d,
                            const PreprocessOptions& options = {});

// Checks |g(D') - g(D' - x_i)| <= Delta_i + tol for every subset D' of d and
// every i in D'. Empty report means the memo is sensitivity-sound.
AuditReport sensitivity_audit(const MemoTable& memo,
                              const SensitivityBounds& bounds,
                              const Database& d, double tol = 1e-9);

// Worst-case accuracy bound: max over insertion orders sigma of
//   sum_i max{ |f(prefix + x_sigma(i)) - f(prefix)| - Delta_sigma(i), 0 }.
// Exact for n <= options.exact_limit (throws SizeLimitError above).
PermutationBound error_bound(const FunctionOracle& f,
                             const SensitivityBounds& bounds, const Database& d,
                             const ErrorBoundOptions& options = {});

// Monte-Carlo variant for larger n: samples insertion orders and returns a
// flagged lower estimate (exact = false).
PermutationBound error_bound_sampled(const FunctionOracle& f,
                                     const SensitivityBounds& bounds,
                                     const Database& d, std::size_t samples,
                                     std::uint64_t seed);

}  // namespace spf::core

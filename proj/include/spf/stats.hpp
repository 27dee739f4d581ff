#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spf/database.hpp"

namespace spf::stats {

enum class OrderedStat { kMean, kTrimmedMean, kMedian, kMinimum, kMaximum };

// Statistic selector for the O(n^2) fast path. empty_value anchors g at the
// empty database (the mean's mu-hat; analyst-chosen for the others).
// alpha (trimmed mean only) is the fraction dropped from each end, < 0.5.
struct OrderedStatSpec {
  OrderedStat kind = OrderedStat::kMean;
  double empty_value = 0.0;
  double alpha = 0.0;
};

// Canonical statistic evaluations: values are sorted ascending before
// summation, so results are independent of record order bit-for-bit.
double mean(const Database& d);
double variance(const Database& d);  // population variance, Var(empty) = 0

// Raw value of the selected ordered statistic; empty_value on an empty
// database. Trimmed mean falls back to the median when trimming exhausts
// the window.
double evaluate(const OrderedStatSpec& spec, const Database& d);

// Sensitivity-bounded version of the selected statistic with uniform Delta,
// computed by the contiguous-window DP over sorted values:
//   g(window) clamps f(window) into
//   [g(window minus min) - Delta, g(window minus max) + Delta].
// O(n^2) after an O(n log n) sort; matches the general subset recursion.
double preprocess_ordered(const OrderedStatSpec& spec, double delta,
                          const Database& d);

struct VarianceWitness {
  // Contiguous window of the value-sorted database with
  // g = Var(window) + (n - window_length) * Delta.
  std::size_t start = 0;
  std::size_t length = 0;
};

struct VarianceResult {
  double g_value = 0.0;
  VarianceWitness witness;
};

// Sensitivity-bounded population variance with uniform Delta and g(empty)=0:
//   g(window) = min{ Var(window), g(minus min) + Delta, g(minus max) + Delta }.
// O(n^2) with constant-time window-variance updates.
double preprocess_variance(double delta, const Database& d);
VarianceResult preprocess_variance_detail(double delta, const Database& d);

// Closed-form worst-case accuracy bound for the mean fast path:
//   max{|mean - mu_hat| - (n/3) Delta, 0}
//   + sum_i max{27 |x_i - mean| / n - Delta, 0}.
double mean_error_bound(double mu_hat, double delta, const Database& d);

// Closed-form worst-case accuracy bound for the variance fast path:
//   max{Var - (n/2) Delta, 0} + sum_i max{sum_j 4 (x_i-x_j)^2 / n^2 - Delta, 0}.
double variance_error_bound(double delta, const Database& d);

// O(n) envelopes sandwiching the mean fast path: h_lower recurses on prefixes
// of the sorted values (dropping the max), h_upper on suffixes (dropping the
// min); h_lower <= g <= h_upper.
struct MeanEnvelope {
  double h_lower = 0.0;
  double h_upper = 0.0;
};

MeanEnvelope mean_bounding(double mu_hat, double delta, const Database& d);

// Variance of an n-element database from the variances of the three
// sub-databases dropping x_a, x_b, and both, in O(1):
//   ((n-1)/n)^2 (var_a + var_b) - ((n-2)/n)^2 var_ab + (x_a - x_b)^2 / n^2.
double var_from_parts(double var_a, double var_b, double var_ab, double x_a,
                      double x_b, std::size_t n);

}  // namespace spf::stats

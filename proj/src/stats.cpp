#include "spf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace spf::stats {

namespace {

std::vector<double> sorted_values(const Database& d) {
  std::vector<double> x = d.values();
  std::sort(x.begin(), x.end());
  return x;
}

double mean_of_sorted(const std::vector<double>& x) {
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

double variance_of_range(const std::vector<double>& x, std::size_t start,
                         std::size_t len) {
  if (len < 2) return 0.0;
  double mu = 0.0;
  for (std::size_t i = 0; i < len; ++i) mu += x[start + i];
  mu /= static_cast<double>(len);
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double dev = x[start + i] - mu;
    s += dev * dev;
  }
  return s / static_cast<double>(len);
}

// floor(alpha * k) with slack for binary representation of alpha.
std::size_t trim_count(double alpha, std::size_t k) {
  return static_cast<std::size_t>(
      std::floor(alpha * static_cast<double>(k) + 1e-9));
}

double median_of_window(const std::vector<double>& x, std::size_t start,
                        std::size_t len) {
  if (len % 2 == 1) return x[start + len / 2];
  return 0.5 * (x[start + len / 2 - 1] + x[start + len / 2]);
}

// f(window) for a contiguous window of the sorted values; prefix[i] is the
// sum of the first i sorted values.
double window_stat(const OrderedStatSpec& spec, const std::vector<double>& x,
                   const std::vector<double>& prefix, std::size_t start,
                   std::size_t len) {
  switch (spec.kind) {
    case OrderedStat::kMean:
      return (prefix[start + len] - prefix[start]) / static_cast<double>(len);
    case OrderedStat::kTrimmedMean: {
      const std::size_t t = trim_count(spec.alpha, len);
      if (len <= 2 * t) return median_of_window(x, start, len);
      return (prefix[start + len - t] - prefix[start + t]) /
             static_cast<double>(len - 2 * t);
    }
    case OrderedStat::kMedian:
      return median_of_window(x, start, len);
    case OrderedStat::kMinimum:
      return x[start];
    case OrderedStat::kMaximum:
      return x[start + len - 1];
  }
  throw std::invalid_argument("unknown statistic kind");
}

double clamp_case(double f_value, double lower, double upper) {
  if (upper <= f_value) return upper;
  if (lower >= f_value) return lower;
  return f_value;
}

void validate_spec(const OrderedStatSpec& spec) {
  if (!std::isfinite(spec.empty_value)) {
    throw std::invalid_argument("empty_value must be finite");
  }
  if (spec.kind == OrderedStat::kTrimmedMean &&
      !(spec.alpha >= 0.0 && spec.alpha < 0.5)) {
    throw std::invalid_argument("trimmed-mean alpha must lie in [0, 0.5)");
  }
}

void validate_delta(double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
}

}  // namespace

double mean(const Database& d) {
  if (d.empty()) throw std::invalid_argument("mean of an empty database");
  return mean_of_sorted(sorted_values(d));
}

double variance(const Database& d) {
  if (d.empty()) return 0.0;
  const std::vector<double> x = sorted_values(d);
  return variance_of_range(x, 0, x.size());
}

double evaluate(const OrderedStatSpec& spec, const Database& d) {
  validate_spec(spec);
  if (d.empty()) return spec.empty_value;
  const std::vector<double> x = sorted_values(d);
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
  return window_stat(spec, x, prefix, 0, x.size());
}

double preprocess_ordered(const OrderedStatSpec& spec, double delta,
                          const Database& d) {
  validate_spec(spec);
  validate_delta(delta);
  const std::size_t n = d.size();
  if (n == 0) return spec.empty_value;

  const std::vector<double> x = sorted_values(d);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];

  // Row for window length k-1; the k = 0 row is g(empty) at every start.
  std::vector<double> g_prev(n + 1, spec.empty_value);
  std::vector<double> g_cur;
  for (std::size_t k = 1; k <= n; ++k) {
    g_cur.assign(n - k + 1, 0.0);
    for (std::size_t i = 0; i + k <= n; ++i) {
      const double f_w = window_stat(spec, x, prefix, i, k);
      const double upper = g_prev[i] + delta;      // window minus its max
      const double lower = g_prev[i + 1] - delta;  // window minus its min
      g_cur[i] = clamp_case(f_w, lower, upper);
    }
    std::swap(g_prev, g_cur);
  }
  return g_prev[0];
}

double var_from_parts(double var_a, double var_b, double var_ab, double x_a,
                      double x_b, std::size_t n) {
  if (n < 2) {
    throw std::invalid_argument("var_from_parts requires n >= 2");
  }
  const double dn = static_cast<double>(n);
  const double c1 = (dn - 1.0) / dn;
  const double c2 = (dn - 2.0) / dn;
  return c1 * c1 * (var_a + var_b) - c2 * c2 * var_ab +
         (x_a - x_b) * (x_a - x_b) / (dn * dn);
}

VarianceResult preprocess_variance_detail(double delta, const Database& d) {
  validate_delta(delta);
  const std::size_t n = d.size();
  if (n == 0) return VarianceResult{0.0, {0, 0}};

  const std::vector<double> x = sorted_values(d);

  // Window variances for lengths k-2, k-1, k, advanced by the constant-time
  // identity; the full window is evaluated directly so the returned value
  // is exactly bounded by variance(d).
  std::vector<double> var_pp(n + 1, 0.0), var_p(n + 1, 0.0), var_cur(n + 1,
                                                                     0.0);
  std::vector<double> g_prev(n + 1, 0.0), g_cur;
  std::vector<VarianceWitness> wit_prev(n + 1, VarianceWitness{0, 0}),
      wit_cur;

  // k = 1: singleton variance is 0 and g(empty) = 0, so g is 0 throughout.
  for (std::size_t i = 0; i < n; ++i) {
    var_p[i] = 0.0;
    g_prev[i] = std::min(0.0, delta);
    wit_prev[i] = VarianceWitness{i, 1};
  }

  for (std::size_t k = 2; k <= n; ++k) {
    g_cur.assign(n - k + 1, 0.0);
    wit_cur.assign(n - k + 1, VarianceWitness{0, 0});
    for (std::size_t i = 0; i + k <= n; ++i) {
      double var_w;
      if (k == n) {
        var_w = variance_of_range(x, 0, n);
      } else {
        var_w = var_from_parts(var_p[i + 1], var_p[i], var_pp[i + 1], x[i],
                               x[i + k - 1], k);
      }
      var_cur[i] = var_w;

      const double via_minus_max = g_prev[i] + delta;
      const double via_minus_min = g_prev[i + 1] + delta;
      double g = var_w;
      VarianceWitness w{i, k};
      if (via_minus_max < g) {
        g = via_minus_max;
        w = wit_prev[i];
      }
      if (via_minus_min < g) {
        g = via_minus_min;
        w = wit_prev[i + 1];
      }
      g_cur[i] = g;
      wit_cur[i] = w;
    }
    std::swap(var_pp, var_p);
    std::swap(var_p, var_cur);
    std::swap(g_prev, g_cur);
    std::swap(wit_prev, wit_cur);
  }
  return VarianceResult{g_prev[0], wit_prev[0]};
}

double preprocess_variance(double delta, const Database& d) {
  return preprocess_variance_detail(delta, d).g_value;
}

double mean_error_bound(double mu_hat, double delta, const Database& d) {
  const std::size_t n = d.size();
  if (n == 0) {
    throw std::invalid_argument("mean_error_bound requires n >= 1");
  }
  const std::vector<double> x = sorted_values(d);
  const double mu = mean_of_sorted(x);
  const double dn = static_cast<double>(n);
  double bound = std::max(std::abs(mu - mu_hat) - (dn / 3.0) * delta, 0.0);
  for (double xi : x) {
    bound += std::max(27.0 * std::abs(xi - mu) / dn - delta, 0.0);
  }
  return bound;
}

double variance_error_bound(double delta, const Database& d) {
  const std::size_t n = d.size();
  if (n == 0) {
    throw std::invalid_argument("variance_error_bound requires n >= 1");
  }
  const std::vector<double> x = sorted_values(d);
  const double dn = static_cast<double>(n);
  double bound =
      std::max(variance_of_range(x, 0, n) - (dn / 2.0) * delta, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double pair_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double diff = x[i] - x[j];
      pair_sum += 4.0 * diff * diff / (dn * dn);
    }
    bound += std::max(pair_sum - delta, 0.0);
  }
  return bound;
}

MeanEnvelope mean_bounding(double mu_hat, double delta, const Database& d) {
  validate_delta(delta);
  const std::size_t n = d.size();
  const std::vector<double> x = sorted_values(d);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];

  // Lower envelope walks prefixes (each step drops the current max);
  // upper envelope walks suffixes (each step drops the current min).
  double h_lower = mu_hat;
  for (std::size_t t = 1; t <= n; ++t) {
    const double mu_t = prefix[t] / static_cast<double>(t);
    h_lower = clamp_case(mu_t, h_lower - delta, h_lower + delta);
  }
  double h_upper = mu_hat;
  for (std::size_t t = 1; t <= n; ++t) {
    const double mu_t =
        (prefix[n] - prefix[n - t]) / static_cast<double>(t);
    h_upper = clamp_case(mu_t, h_upper - delta, h_upper + delta);
  }
  return MeanEnvelope{h_lower, h_upper};
}

}  // namespace spf::stats

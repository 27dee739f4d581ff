#include "spf/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "spf/errors.hpp"

namespace spf::core {

namespace {

constexpr double kIntervalTolerance = 1e-12;

std::vector<double> resolve_deltas(const Database& sorted_root,
                                   const SensitivityBounds& bounds) {
  std::vector<double> deltas;
  deltas.reserve(sorted_root.size());
  for (const auto& r : sorted_root.records()) {
    deltas.push_back(bounds.delta_for(r.individual_id));
  }
  return deltas;
}

}  // namespace

FeasibleInterval::FeasibleInterval(double lower, double upper)
    : lower_(lower), upper_(upper) {
  if (lower > upper) {
    const double scale =
        std::max({1.0, std::abs(lower), std::abs(upper)});
    if (lower - upper > kIntervalTolerance * scale) {
      throw InvariantViolationError(
          "feasible interval inverted beyond tolerance: lower=" +
          std::to_string(lower) + " upper=" + std::to_string(upper));
    }
    // Inversion at the accumulated-rounding scale: the exact-arithmetic
    // window is a point here, so collapse to one.
    lower_ = upper_ = 0.5 * (lower + upper);
  }
}

double FeasibleInterval::clamp(double f_value) const {
  if (upper_ <= f_value) return upper_;
  if (lower_ >= f_value) return lower_;
  return f_value;
}

FeasibleInterval feasible_interval(Mask subset, const MemoTable& memo,
                                   const std::vector<double>& deltas) {
  if (subset == 0) {
    throw std::invalid_argument(
        "the empty database has no feasible interval; its g value is the "
        "oracle's empty value");
  }
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < memo.n(); ++i) {
    const Mask bit = Mask{1} << i;
    if (!(subset & bit)) continue;
    const double neighbor = memo.at(subset & ~bit);
    upper = std::min(upper, neighbor + deltas[i]);
    lower = std::max(lower, neighbor - deltas[i]);
  }
  return FeasibleInterval(lower, upper);
}

FeasibleInterval feasible_interval(const Database& d, const MemoTable& memo,
                                   const SensitivityBounds& bounds) {
  return feasible_interval(memo.mask_of(d), memo,
                           resolve_deltas(memo.root(), bounds));
}

PreprocessResult preprocess(const FunctionOracle& f,
                            const SensitivityBounds& bounds, const Database& d,
                            const PreprocessOptions& options) {
  if (d.size() > options.max_n) {
    throw SizeLimitError("database size " + std::to_string(d.size()) +
                         " exceeds the preprocessing cap " +
                         std::to_string(options.max_n));
  }
  MemoTable memo = MemoTable::for_database(d);
  const std::vector<double> deltas = resolve_deltas(memo.root(), bounds);

  memo.set(0, f.empty_value);
  // Increasing mask order visits every subset after all of its one-smaller
  // neighbors.
  const Mask full = memo.full_mask();
  for (Mask m = 1; m <= full; ++m) {
    const double f_value = f(memo.subset_database(m));
    const FeasibleInterval window = feasible_interval(m, memo, deltas);
    memo.set(m, window.clamp(f_value));
  }
  const double g = memo.at(full);
  return PreprocessResult{g, std::move(memo)};
}

AuditReport sensitivity_audit(const MemoTable& memo,
                              const SensitivityBounds& bounds,
                              const Database& d, double tol) {
  const Mask universe = memo.mask_of(d);
  const std::vector<double> deltas = resolve_deltas(memo.root(), bounds);
  AuditReport report;
  // Enumerate submasks of the universe (including it) and every removal.
  Mask sub = universe;
  while (true) {
    if (sub != 0) {
      for (std::size_t i = 0; i < memo.n(); ++i) {
        const Mask bit = Mask{1} << i;
        if (!(sub & bit)) continue;
        const double excess =
            std::abs(memo.at(sub) - memo.at(sub & ~bit)) - deltas[i];
        if (excess > tol) {
          report.violations.push_back(
              AuditViolation{sub, memo.root()[i].individual_id, excess});
        }
      }
    }
    if (sub == 0) break;
    sub = (sub - 1) & universe;
  }
  return report;
}

namespace {

double marginal_term(double f_with, double f_without, double delta) {
  return std::max(std::abs(f_with - f_without) - delta, 0.0);
}

}  // namespace

PermutationBound error_bound(const FunctionOracle& f,
                             const SensitivityBounds& bounds, const Database& d,
                             const ErrorBoundOptions& options) {
  const std::size_t n = d.size();
  if (n > options.exact_limit) {
    throw SizeLimitError(
        "error_bound exact mode capped at n = " +
        std::to_string(options.exact_limit) +
        "; request error_bound_sampled explicitly for a lower estimate");
  }
  const Database root = d.sorted_canonical();
  const std::vector<double> deltas = [&] {
    std::vector<double> out;
    for (const auto& r : root.records()) {
      out.push_back(bounds.delta_for(r.individual_id));
    }
    return out;
  }();

  const Mask full = n == 0 ? 0 : ((Mask{1} << n) - 1);
  std::vector<double> f_of(full + 1, 0.0);
  for (Mask m = 0; m <= full; ++m) {
    std::vector<Record> recs;
    for (std::size_t i = 0; i < n; ++i) {
      if (m & (Mask{1} << i)) recs.push_back(root[i]);
    }
    f_of[m] = f(Database(std::move(recs)));
    if (m == full) break;
  }

  // The permutation sum decomposes along the insertion chain, so the maximum
  // over all n! insertion orders is a DP over subsets.
  std::vector<double> best(full + 1, 0.0);
  std::vector<std::size_t> step(full + 1, 0);
  for (Mask m = 1; m <= full; ++m) {
    double best_here = -std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Mask bit = Mask{1} << i;
      if (!(m & bit)) continue;
      const double cand = best[m & ~bit] +
                          marginal_term(f_of[m], f_of[m & ~bit], deltas[i]);
      if (cand > best_here) {
        best_here = cand;
        best_i = i;
      }
    }
    best[m] = best_here;
    step[m] = best_i;
  }

  PermutationBound out;
  out.value = best[full];
  out.exact = true;
  Mask m = full;
  while (m != 0) {
    out.witness.push_back(step[m]);
    m &= ~(Mask{1} << step[m]);
  }
  std::reverse(out.witness.begin(), out.witness.end());
  return out;
}

PermutationBound error_bound_sampled(const FunctionOracle& f,
                                     const SensitivityBounds& bounds,
                                     const Database& d, std::size_t samples,
                                     std::uint64_t seed) {
  const Database root = d.sorted_canonical();
  const std::size_t n = root.size();
  std::vector<double> deltas;
  for (const auto& r : root.records()) {
    deltas.push_back(bounds.delta_for(r.individual_id));
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::mt19937_64 rng(seed);
  PermutationBound out;
  out.value = 0.0;
  out.exact = false;
  out.witness = order;
  for (std::size_t s = 0; s < samples; ++s) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    std::vector<Record> prefix;
    double f_prev = f.empty_value;
    for (std::size_t i : order) {
      prefix.push_back(root[i]);
      const double f_next = f(Database(prefix));
      sum += marginal_term(f_next, f_prev, deltas[i]);
      f_prev = f_next;
    }
    if (sum > out.value) {
      out.value = sum;
      out.witness = order;
    }
  }
  return out;
}

}  // namespace spf::core

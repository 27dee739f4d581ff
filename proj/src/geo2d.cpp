#include "spf/geo2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "spf/errors.hpp"

namespace spf::geo2d {

namespace {

constexpr double kBoxTolerance = 1e-12;

double clamp_scalar(double x, double lo, double hi) {
  if (x < lo) return lo;
  if (x > hi) return hi;
  return x;
}

// Collapses a rounding-level inversion (lo exceeds hi by accumulated ulps
// only) to a point; genuine inversions are left for the caller to reject.
void collapse_rounding_inversion(double& lo, double& hi) {
  if (lo > hi &&
      lo - hi <= kBoxTolerance * std::max({1.0, std::abs(lo), std::abs(hi)})) {
    lo = hi = 0.5 * (lo + hi);
  }
}

std::vector<double> resolve_deltas(const Database2& sorted_root,
                                   const SensitivityBounds& bounds) {
  std::vector<double> deltas;
  deltas.reserve(sorted_root.size());
  for (const auto& r : sorted_root.records()) {
    deltas.push_back(bounds.delta_for(r.individual_id));
  }
  return deltas;
}

}  // namespace

std::optional<RotatedBox> intersect_balls(const std::vector<L1Ball>& balls) {
  if (balls.empty()) {
    throw std::invalid_argument("intersect_balls requires at least one ball");
  }
  RotatedBox box{-std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity(),
                 -std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
  for (const auto& ball : balls) {
    if (!(ball.radius >= 0.0)) {
      throw std::invalid_argument("l1 ball radius must be >= 0");
    }
    const double u = to_u(ball.center);
    const double v = to_v(ball.center);
    box.u_max = std::min(box.u_max, u + ball.radius);
    box.u_min = std::max(box.u_min, u - ball.radius);
    box.v_max = std::min(box.v_max, v + ball.radius);
    box.v_min = std::max(box.v_min, v - ball.radius);
  }
  if (box.u_min > box.u_max || box.v_min > box.v_max) return std::nullopt;
  return box;
}

Point2 project_to_box(const RotatedBox& box, const Point2& target) {
  if (box.u_min > box.u_max || box.v_min > box.v_max) {
    throw std::invalid_argument("cannot project onto an empty box");
  }
  const double u = clamp_scalar(to_u(target), box.u_min, box.u_max);
  const double v = clamp_scalar(to_v(target), box.v_min, box.v_max);
  return from_uv(u, v);
}

Preprocess2Result preprocess_2d(const FunctionOracle2& f,
                                const SensitivityBounds& bounds,
                                const Database2& d,
                                const core::PreprocessOptions& options) {
  if (d.size() > options.max_n) {
    throw SizeLimitError("database size " + std::to_string(d.size()) +
                         " exceeds the preprocessing cap " +
                         std::to_string(options.max_n));
  }
  MemoTable2 memo = MemoTable2::for_database(d);
  const std::vector<double> deltas = resolve_deltas(memo.root(), bounds);

  memo.set(0, f.empty_value);
  const Mask full = memo.full_mask();
  for (Mask m = 1; m <= full; ++m) {
    std::vector<L1Ball> balls;
    for (std::size_t i = 0; i < memo.n(); ++i) {
      const Mask bit = Mask{1} << i;
      if (!(m & bit)) continue;
      balls.push_back(L1Ball{memo.at(m & ~bit), deltas[i]});
    }
    auto box = intersect_balls(balls);
    if (!box) {
      // The exact-arithmetic intersection is nonempty for every reachable
      // state; retry after collapsing ulp-level inversions.
      RotatedBox raw{-std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()};
      for (const auto& ball : balls) {
        const double u = to_u(ball.center);
        const double v = to_v(ball.center);
        raw.u_max = std::min(raw.u_max, u + ball.radius);
        raw.u_min = std::max(raw.u_min, u - ball.radius);
        raw.v_max = std::min(raw.v_max, v + ball.radius);
        raw.v_min = std::max(raw.v_min, v - ball.radius);
      }
      collapse_rounding_inversion(raw.u_min, raw.u_max);
      collapse_rounding_inversion(raw.v_min, raw.v_max);
      if (raw.u_min > raw.u_max || raw.v_min > raw.v_max) {
        throw InvariantViolationError(
            "empty neighbor-ball intersection during 2D preprocessing; this "
            "cannot happen for any reachable state and signals a bug");
      }
      box = raw;
    }
    memo.set(m, project_to_box(*box, f(memo.subset_database(m))));
    if (m == full) break;
  }
  const Point2 g = memo.at(full);
  return Preprocess2Result{g, std::move(memo)};
}

core::AuditReport sensitivity_audit(const MemoTable2& memo,
                                    const SensitivityBounds& bounds,
                                    const Database2& d, double tol) {
  const Mask universe = memo.mask_of(d);
  const std::vector<double> deltas = resolve_deltas(memo.root(), bounds);
  core::AuditReport report;
  Mask sub = universe;
  while (true) {
    if (sub != 0) {
      for (std::size_t i = 0; i < memo.n(); ++i) {
        const Mask bit = Mask{1} << i;
        if (!(sub & bit)) continue;
        const double excess =
            l1_distance(memo.at(sub), memo.at(sub & ~bit)) - deltas[i];
        if (excess > tol) {
          report.violations.push_back(core::AuditViolation{
              sub, memo.root()[i].individual_id, excess});
        }
      }
    }
    if (sub == 0) break;
    sub = (sub - 1) & universe;
  }
  return report;
}

core::PermutationBound error_bound(const FunctionOracle2& f,
                                   const SensitivityBounds& bounds,
                                   const Database2& d,
                                   const core::ErrorBoundOptions& options) {
  const std::size_t n = d.size();
  if (n > options.exact_limit) {
    throw SizeLimitError("2D error_bound exact mode capped at n = " +
                         std::to_string(options.exact_limit));
  }
  const Database2 root = d.sorted_canonical();
  std::vector<double> deltas;
  for (const auto& r : root.records()) {
    deltas.push_back(bounds.delta_for(r.individual_id));
  }

  const Mask full = n == 0 ? 0 : ((Mask{1} << n) - 1);
  std::vector<Point2> f_of(full + 1);
  for (Mask m = 0; m <= full; ++m) {
    std::vector<Record2> recs;
    for (std::size_t i = 0; i < n; ++i) {
      if (m & (Mask{1} << i)) recs.push_back(root[i]);
    }
    f_of[m] = m == 0 ? f.empty_value : f(Database2(std::move(recs)));
    if (m == full) break;
  }

  std::vector<double> best(full + 1, 0.0);
  std::vector<std::size_t> step(full + 1, 0);
  for (Mask m = 1; m <= full; ++m) {
    double best_here = -std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Mask bit = Mask{1} << i;
      if (!(m & bit)) continue;
      const double term =
          std::max(l1_distance(f_of[m], f_of[m & ~bit]) - deltas[i], 0.0);
      const double cand = best[m & ~bit] + term;
      if (cand > best_here) {
        best_here = cand;
        best_i = i;
      }
    }
    best[m] = best_here;
    step[m] = best_i;
  }

  core::PermutationBound out;
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

}  // namespace spf::geo2d

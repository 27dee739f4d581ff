#pragma once

#include <optional>
#include <vector>

#include "spf/core.hpp"
#include "spf/database.hpp"
#include "spf/memo.hpp"
#include "spf/oracle.hpp"

namespace spf::geo2d {

// The diamond {x : ||x - center||_1 <= radius}.
struct L1Ball {
  Point2 center;
  double radius = 0.0;
};

// An l1 ball is an axis-aligned box in the rotated coordinates
// u = x1 + x2, v = x1 - x2; intersections of l1 balls are boxes there too.
// Invariant: u_min <= u_max and v_min <= v_max (nonempty by construction);
// the intersection routine returns nullopt instead of an inverted box.
struct RotatedBox {
  double u_min = 0.0;
  double u_max = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;
};

inline double to_u(const Point2& p) { return p.x1 + p.x2; }
inline double to_v(const Point2& p) { return p.x1 - p.x2; }
inline Point2 from_uv(double u, double v) {
  return Point2{(u + v) / 2.0, (u - v) / 2.0};
}

// Intersection of the balls as a rotated box:
//   u_max = min_i(u_i + r_i), u_min = max_i(u_i - r_i), likewise for v.
// Returns nullopt iff u_min > u_max or v_min > v_max.
std::optional<RotatedBox> intersect_balls(const std::vector<L1Ball>& balls);

// The unique l2-closest point of the box to target. Valid by clamping u and
// v independently: (u, v) is a uniform scaling of a rotation, which preserves
// l2 nearest points, and the box is axis-aligned in (u, v).
Point2 project_to_box(const RotatedBox& box, const Point2& target);

struct Preprocess2Result {
  Point2 g_value;
  MemoTable2 memo;
};

// 2D preprocessing under l1 individual sensitivity: for every nonempty
// subset, g is the l2 projection of f onto the intersection of the balls
// (g(D - x_i), Delta_i); g(empty) = f's empty value. An empty intersection is
// impossible (balls around one-smaller neighbors pairwise intersect, and in
// 2D pairwise implies total) and raises InvariantViolationError.
Preprocess2Result preprocess_2d(const FunctionOracle2& f,
                                const SensitivityBounds& bounds,
                                const Database2& d,
                                const core::PreprocessOptions& options = {});

// ||g(D') - g(D' - x_i)||_1 <= Delta_i + tol for every subset and removal.
core::AuditReport sensitivity_audit(const MemoTable2& memo,
                                    const SensitivityBounds& bounds,
                                    const Database2& d, double tol = 1e-9);

// Permutation accuracy bound with l1 marginals, exact over all insertion
// orders (subset DP); capped like core::error_bound.
core::PermutationBound error_bound(const FunctionOracle2& f,
                                   const SensitivityBounds& bounds,
                                   const Database2& d,
                                   const core::ErrorBoundOptions& options = {});

}  // namespace spf::geo2d

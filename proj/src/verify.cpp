#include "spf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "spf/errors.hpp"

namespace spf::verify {

namespace {

// Literal top-down transcription of the recursion: g(empty) = f(empty);
// otherwise clamp f(S) between max_i(g(S-i) - Delta_i) and
// min_i(g(S-i) + Delta_i), with the upper clamp checked first.
double brute_force_g(Mask subset, const Database& root,
                     const std::vector<double>& deltas,
                     const FunctionOracle& f, std::map<Mask, double>& memo) {
  auto it = memo.find(subset);
  if (it != memo.end()) return it->second;

  double g;
  if (subset == 0) {
    g = f.empty_value;
  } else {
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < root.size(); ++i) {
      const Mask bit = Mask{1} << i;
      if (!(subset & bit)) continue;
      const double neighbor =
          brute_force_g(subset & ~bit, root, deltas, f, memo);
      upper = std::min(upper, neighbor + deltas[i]);
      lower = std::max(lower, neighbor - deltas[i]);
    }
    std::vector<Record> recs;
    for (std::size_t i = 0; i < root.size(); ++i) {
      if (subset & (Mask{1} << i)) recs.push_back(root[i]);
    }
    const double f_value = f(Database(std::move(recs)));
    if (upper <= f_value) {
      g = upper;
    } else if (lower >= f_value) {
      g = lower;
    } else {
      g = f_value;
    }
  }
  memo.emplace(subset, g);
  return g;
}

}  // namespace

MemoTable brute_force_spf(const FunctionOracle& f,
                          const SensitivityBounds& bounds, const Database& d) {
  if (d.size() > 12) {
    throw SizeLimitError("brute_force_spf capped at n = 12, got n = " +
                         std::to_string(d.size()));
  }
  const Database root = d.sorted_canonical();
  std::vector<double> deltas;
  for (const auto& r : root.records()) {
    deltas.push_back(bounds.delta_for(r.individual_id));
  }

  std::map<Mask, double> values;
  const Mask full = root.size() == 0 ? 0 : ((Mask{1} << root.size()) - 1);
  brute_force_g(full, root, deltas, f, values);

  MemoTable table(root);
  for (const auto& [mask, g] : values) table.set(mask, g);
  return table;
}

namespace {

// Difference-constraint feasibility for a fixed t: variables g(S) for every
// lattice node S plus a virtual source; edges encode
//   g(S) - g(S-i) <= Delta_i,  g(S-i) - g(S) <= Delta_i,
//   g(S) <= f(S) + t,          g(S) >= f(S) - t.
// Feasible iff Bellman-Ford finds no negative cycle.
bool lattice_feasible(const SubsetLattice& lattice, double t) {
  const std::size_t nodes = lattice.f_values.size();
  const std::size_t source = nodes;

  struct Edge {
    std::size_t from;
    std::size_t to;
    double weight;
  };
  std::vector<Edge> edges;
  edges.reserve(lattice.n * nodes + 2 * nodes);
  for (std::size_t s = 0; s < nodes; ++s) {
    for (std::size_t i = 0; i < lattice.n; ++i) {
      const std::size_t bit = std::size_t{1} << i;
      if (!(s & bit)) continue;
      edges.push_back({s & ~bit, s, lattice.deltas[i]});
      edges.push_back({s, s & ~bit, lattice.deltas[i]});
    }
    edges.push_back({source, s, lattice.f_values[s] + t});
    edges.push_back({s, source, t - lattice.f_values[s]});
  }

  std::vector<double> dist(nodes + 1,
                           std::numeric_limits<double>::infinity());
  dist[source] = 0.0;
  for (std::size_t round = 0; round < nodes + 1; ++round) {
    bool changed = false;
    for (const Edge& e : edges) {
      if (dist[e.from] == std::numeric_limits<double>::infinity()) continue;
      const double cand = dist[e.from] + e.weight;
      if (cand < dist[e.to] - 1e-15) {
        dist[e.to] = cand;
        changed = true;
      }
    }
    if (!changed) return true;
  }
  return false;
}

}  // namespace

double opt_linf(const SubsetLattice& lattice) {
  if (lattice.n > 12) {
    throw SizeLimitError("opt_linf capped at 2^12 lattice nodes");
  }
  const std::size_t nodes = std::size_t{1} << lattice.n;
  if (lattice.f_values.size() != nodes) {
    throw std::invalid_argument(
        "lattice must supply exactly 2^n f values in mask order");
  }
  if (lattice.deltas.size() != lattice.n) {
    throw std::invalid_argument("lattice must supply one delta per element");
  }
  for (double delta : lattice.deltas) {
    if (!(delta >= 0.0)) {
      throw std::invalid_argument("lattice deltas must be >= 0");
    }
  }

  const auto [min_it, max_it] =
      std::minmax_element(lattice.f_values.begin(), lattice.f_values.end());
  const double spread = *max_it - *min_it;
  if (lattice_feasible(lattice, 0.0)) return 0.0;

  double lo = 0.0;
  double hi = spread;
  for (int iter = 0; iter < 64; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (lattice_feasible(lattice, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

SatGadget sat_gadget(const BoolFormula& phi) {
  if (phi.n_vars > 12) {
    throw SizeLimitError(
        "sat_gadget capped at 12 variables (the downstream recursion is "
        "exponential)");
  }
  const std::size_t n = phi.n_vars;

  std::vector<Record> markers;
  markers.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    markers.push_back(Record{"F" + std::to_string(i + 1),
                             static_cast<double>(i + 1)});
  }
  Database universe(std::move(markers));

  auto evaluator = phi.evaluate;
  FunctionOracle oracle;
  oracle.empty_value = 0.0;
  oracle.evaluate = [n, evaluator](const Database& db) -> double {
    std::vector<bool> assignment(n, true);
    for (const auto& r : db.records()) {
      const std::size_t var =
          static_cast<std::size_t>(std::llround(r.value)) - 1;
      assignment[var] = false;
    }
    const double phi_value = evaluator(assignment) ? 1.0 : 0.0;
    return static_cast<double>(db.size()) - phi_value;
  };

  return SatGadget{std::move(oracle), std::move(universe),
                   SensitivityBounds::uniform(1.0)};
}

namespace {

double l1_distance_n(const std::vector<double>& a,
                     const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
  return sum;
}

bool balls_pairwise_intersect(const std::vector<BallN>& balls) {
  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (std::size_t j = i + 1; j < balls.size(); ++j) {
      if (l1_distance_n(balls[i].center, balls[j].center) >
          balls[i].radius + balls[j].radius) {
        return false;
      }
    }
  }
  return true;
}

// Minimum over a regular grid of max_i(||x - c_i||_1 - r_i). The violation
// function is 1-Lipschitz in the l1 metric, so any point is within
// d * resolution / 2 of a grid point's value; a grid minimum above the margin
// (chosen with slack over that bound) certifies a positive true minimum,
// hence an empty intersection.
double grid_min_violation(const std::vector<BallN>& balls, std::size_t d,
                          const GridOptions& grid) {
  std::vector<double> lo(d, -std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, std::numeric_limits<double>::infinity());
  for (const auto& ball : balls) {
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::max(lo[k], ball.center[k] - ball.radius);
      hi[k] = std::min(hi[k], ball.center[k] + ball.radius);
    }
  }
  // Any intersection point lies in every ball's bounding box; an empty box
  // still gets scanned from its geometric midpoint outward so a certified
  // violation value is produced.
  std::vector<std::size_t> steps(d);
  for (std::size_t k = 0; k < d; ++k) {
    if (lo[k] > hi[k]) {
      const double mid = 0.5 * (lo[k] + hi[k]);
      lo[k] = hi[k] = mid;
    }
    steps[k] =
        static_cast<std::size_t>(std::floor((hi[k] - lo[k]) / grid.resolution)) +
        1;
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> x(d, 0.0);
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = std::min(lo[k] + static_cast<double>(idx[k]) * grid.resolution,
                      hi[k]);
    }
    double violation = -std::numeric_limits<double>::infinity();
    for (const auto& ball : balls) {
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k) dist += std::abs(x[k] - ball.center[k]);
      violation = std::max(violation, dist - ball.radius);
      if (violation >= best) break;
    }
    best = std::min(best, violation);

    std::size_t k = 0;
    while (k < d && ++idx[k] >= steps[k]) {
      idx[k] = 0;
      ++k;
    }
    if (k == d) break;
  }
  return best;
}

}  // namespace

IntersectionCheck pairwise_vs_total_intersection(std::size_t dimension,
                                                 const std::vector<BallN>& balls,
                                                 const GridOptions& grid) {
  if (dimension != 2 && dimension != 3) {
    throw std::invalid_argument(
        "pairwise_vs_total_intersection supports dimensions 2 and 3");
  }
  if (balls.empty()) {
    throw std::invalid_argument("at least one ball is required");
  }
  for (const auto& ball : balls) {
    if (ball.center.size() != dimension) {
      throw std::invalid_argument("ball center has wrong dimension");
    }
    if (!(ball.radius >= 0.0)) {
      throw std::invalid_argument("ball radius must be >= 0");
    }
  }

  IntersectionCheck out;
  out.pairwise_nonempty = balls_pairwise_intersect(balls);

  if (dimension == 2) {
    std::vector<geo2d::L1Ball> flat;
    flat.reserve(balls.size());
    for (const auto& ball : balls) {
      flat.push_back(
          geo2d::L1Ball{Point2{ball.center[0], ball.center[1]}, ball.radius});
    }
    const auto box = geo2d::intersect_balls(flat);
    out.total_nonempty = box.has_value();
    if (box) {
      out.min_violation = 0.0;
    } else {
      double u_gap = -std::numeric_limits<double>::infinity();
      double v_gap = -std::numeric_limits<double>::infinity();
      double u_min = -std::numeric_limits<double>::infinity(),
             u_max = std::numeric_limits<double>::infinity();
      double v_min = u_min, v_max = u_max;
      for (const auto& ball : flat) {
        const double u = geo2d::to_u(ball.center);
        const double v = geo2d::to_v(ball.center);
        u_min = std::max(u_min, u - ball.radius);
        u_max = std::min(u_max, u + ball.radius);
        v_min = std::max(v_min, v - ball.radius);
        v_max = std::min(v_max, v + ball.radius);
      }
      u_gap = u_min - u_max;
      v_gap = v_min - v_max;
      // A point must close the larger rotated-coordinate gap; the best
      // achievable max-violation is half that gap.
      out.min_violation = std::max({u_gap, v_gap, 0.0}) / 2.0;
    }
  } else {
    const double grid_min = grid_min_violation(balls, 3, grid);
    out.min_violation = grid_min;
    out.total_nonempty = !(grid_min > grid.margin);
  }
  return out;
}

bool lp_ball_counterexample_check() {
  return lp_ball_counterexample_check(
      {L2Ball{Point2{-1.0, 0.0}, 1.0}, L2Ball{Point2{1.0, 0.0}, 1.0},
       L2Ball{Point2{0.0, std::sqrt(3.0)}, 1.0}});
}

bool lp_ball_counterexample_check(const std::vector<L2Ball>& balls,
                                  const GridOptions& grid) {
  if (balls.size() < 2) {
    throw std::invalid_argument("need at least two balls to compare");
  }

  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (std::size_t j = i + 1; j < balls.size(); ++j) {
      const double dx = balls[i].center.x1 - balls[j].center.x1;
      const double dy = balls[i].center.x2 - balls[j].center.x2;
      const double dist = std::hypot(dx, dy);
      const double touch = balls[i].radius + balls[j].radius;
      if (std::abs(dist - touch) > 1e-12) return false;
    }
  }

  // Grid-certified emptiness of the total intersection. The l2 violation
  // function is 1-Lipschitz in l2, and every point of the bounding box is
  // within resolution * sqrt(2) / 2 of a grid point.
  double lo_x = -std::numeric_limits<double>::infinity(),
         hi_x = std::numeric_limits<double>::infinity();
  double lo_y = lo_x, hi_y = hi_x;
  for (const auto& ball : balls) {
    lo_x = std::max(lo_x, ball.center.x1 - ball.radius);
    hi_x = std::min(hi_x, ball.center.x1 + ball.radius);
    lo_y = std::max(lo_y, ball.center.x2 - ball.radius);
    hi_y = std::min(hi_y, ball.center.x2 + ball.radius);
  }
  if (lo_x > hi_x || lo_y > hi_y) return true;

  double best = std::numeric_limits<double>::infinity();
  const std::size_t nx =
      static_cast<std::size_t>(std::floor((hi_x - lo_x) / grid.resolution)) + 1;
  const std::size_t ny =
      static_cast<std::size_t>(std::floor((hi_y - lo_y) / grid.resolution)) + 1;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double x = std::min(lo_x + static_cast<double>(ix) * grid.resolution,
                              hi_x);
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double y = std::min(
          lo_y + static_cast<double>(iy) * grid.resolution, hi_y);
      double violation = -std::numeric_limits<double>::infinity();
      for (const auto& ball : balls) {
        const double dist =
            std::hypot(x - ball.center.x1, y - ball.center.x2);
        violation = std::max(violation, dist - ball.radius);
      }
      best = std::min(best, violation);
    }
  }
  return best > grid.margin;
}

double privacy_ratio_audit(const std::vector<double>& pdf_a,
                           const std::vector<double>& pdf_b) {
  if (pdf_a.size() != pdf_b.size() || pdf_a.empty()) {
    throw std::invalid_argument(
        "privacy_ratio_audit requires matched nonempty supports");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < pdf_a.size(); ++i) {
    if (!(pdf_a[i] > 0.0) || !(pdf_b[i] > 0.0)) {
      throw std::invalid_argument("densities must be strictly positive");
    }
    worst = std::max(worst, std::abs(std::log(pdf_a[i]) - std::log(pdf_b[i])));
  }
  return worst;
}

double privacy_ratio_audit(
    const std::vector<std::pair<std::string, double>>& table_a,
    const std::vector<std::pair<std::string, double>>& table_b) {
  if (table_a.size() != table_b.size() || table_a.empty()) {
    throw std::invalid_argument(
        "privacy_ratio_audit requires matched nonempty supports");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < table_a.size(); ++i) {
    if (table_a[i].first != table_b[i].first) {
      throw std::invalid_argument("outcome labels must match position-wise");
    }
    const double pa = table_a[i].second;
    const double pb = table_b[i].second;
    if (!(pa > 0.0) || !(pb > 0.0)) {
      throw std::invalid_argument("probabilities must be strictly positive");
    }
    worst = std::max(worst, std::abs(std::log(pa) - std::log(pb)));
  }
  return worst;
}

}  // namespace spf::verify

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spf/database.hpp"
#include "spf/geo2d.hpp"
#include "spf/memo.hpp"
#include "spf/oracle.hpp"

namespace spf::verify {

// Direct, unoptimized transcription of the sensitivity-preprocessing
// recursion, used as the reference implementation for equivalence tests.
// Top-down with an explicit map; shares no code with core::preprocess.
MemoTable brute_force_spf(const FunctionOracle& f,
                          const SensitivityBounds& bounds, const Database& d);

// f given explicitly on the whole subset lattice of an n-element universe:
// f_values[mask] is f of the subset encoded by mask; deltas[i] is the budget
// of element i.
struct SubsetLattice {
  std::size_t n = 0;
  std::vector<double> f_values;
  std::vector<double> deltas;
};

// Minimum over all functions with the given per-element sensitivity budgets
// of the worst-case absolute deviation from f, i.e. the l_inf-optimal
// approximation value. Binary search on t; feasibility of each t decided by
// Bellman-Ford on the difference-constraint system over the lattice.
double opt_linf(const SubsetLattice& lattice);

// Arbitrary boolean formula as a black-box evaluator over {true,false}^n.
struct BoolFormula {
  std::size_t n_vars = 0;
  std::function<bool(const std::vector<bool>&)> evaluate;
};

// Hardness gadget: universe of n marker individuals F_1..F_n; a database D
// encodes the assignment setting exactly the variables with markers in D to
// false. f(D) = |D| - phi(that assignment), with f(empty) pinned to 0 and
// uniform Delta = 1. Preprocessing the full universe then probes
// satisfiability: g(all markers) < n exactly when phi has a satisfying
// assignment with at least one false variable.
struct SatGadget {
  FunctionOracle oracle;
  Database universe;
  SensitivityBounds bounds;
};

SatGadget sat_gadget(const BoolFormula& phi);

// Axis-agnostic l1 ball in d dimensions.
struct BallN {
  std::vector<double> center;
  double radius = 0.0;
};

struct IntersectionCheck {
  bool pairwise_nonempty = false;
  bool total_nonempty = false;
  // For d=3 the grid-certified minimum of max_i(||x - c_i||_1 - r_i); for
  // d=2 the exact violation (0 when the intersection is nonempty).
  double min_violation = 0.0;
};

struct GridOptions {
  double resolution = 0.01;
  double margin = 0.02;
};

// d = 2: exact via the rotated-box intersection. d = 3: total emptiness is
// certified by grid minimization of the violation function over the bounding
// box; "empty" is reported only when the grid minimum exceeds the margin.
IntersectionCheck pairwise_vs_total_intersection(
    std::size_t dimension, const std::vector<BallN>& balls,
    const GridOptions& grid = {});

struct L2Ball {
  Point2 center;
  double radius = 1.0;
};

// True iff the given 2D l2 balls (default: unit balls centered at (-1,0),
// (1,0), (0,sqrt(3))) intersect pairwise at distance exactly 2 (tol 1e-12)
// while their triple intersection is grid-certified empty. Demonstrates that
// pairwise intersection does not imply total intersection for l2 balls.
bool lp_ball_counterexample_check();
bool lp_ball_counterexample_check(const std::vector<L2Ball>& balls,
                                  const GridOptions& grid = {});

// Maximum absolute log-ratio between two densities evaluated on a matched
// grid. Inputs must be positive and of equal length.
double privacy_ratio_audit(const std::vector<double>& pdf_a,
                           const std::vector<double>& pdf_b);

// Same for discrete probability tables; supports must match exactly.
double privacy_ratio_audit(
    const std::vector<std::pair<std::string, double>>& table_a,
    const std::vector<std::pair<std::string, double>>& table_b);

}  // namespace spf::verify

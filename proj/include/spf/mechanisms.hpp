#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spf/database.hpp"

namespace spf::mechanisms {

// Per-individual privacy budgets epsilon_i > 0, with an optional uniform
// default for ids absent from the map.
class PersonalEpsilons {
 public:
  PersonalEpsilons() = default;

  static PersonalEpsilons uniform(double epsilon) {
    PersonalEpsilons e;
    e.set_default(epsilon);
    return e;
  }

  void set_default(double epsilon) {
    check_positive(epsilon);
    default_ = epsilon;
  }

  void set(const std::string& individual_id, double epsilon) {
    check_positive(epsilon);
    per_individual_[individual_id] = epsilon;
  }

  std::optional<double> default_epsilon() const { return default_; }
  const std::unordered_map<std::string, double>& per_individual() const {
    return per_individual_;
  }

  double epsilon_for(const std::string& individual_id) const;

 private:
  static void check_positive(double epsilon);

  std::optional<double> default_;
  std::unordered_map<std::string, double> per_individual_;
};

// Deterministic uniform source. For seed s, draw k is
//   u_k = (high 53 bits of the k-th mt19937_64(s) output + 0.5) * 2^-53,
// a value in the open interval (0, 1). This sequence is part of the
// reproducibility contract: each Laplace sample and each exponential-
// mechanism selection consumes exactly one draw.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : engine_(seed) {}

  double next() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

// Laplace density (1/2b) exp(-|x|/b). b must be > 0.
double laplace_pdf(double x, double b);

// b = max_j Delta_j / epsilon_j over the supplied (Delta, epsilon) pairs:
// the union of ids appearing in either map, plus the default pair when both
// sides carry defaults. Throws if the pair set is empty.
double noise_scale(const SensitivityBounds& bounds,
                   const PersonalEpsilons& eps);

// One inverse-CDF Laplace draw at scale b from a single uniform u:
//   Y = -b * sgn(u - 1/2) * ln(1 - 2|u - 1/2|).
double laplace_sample(double b, UniformRng& rng);

// g_value + Lap(noise_scale(bounds, eps)); identical seed, identical output.
// All-zero sensitivities yield b = 0 and the exact g_value.
double laplace_mechanism(double g_value, const SensitivityBounds& bounds,
                         const PersonalEpsilons& eps, UniformRng& rng);

// Finite outcome set with per-outcome quality scores q(D, r) for a fixed D,
// plus the sensitivity budgets of q's database argument.
struct QualityScoreTable {
  std::vector<std::pair<std::string, double>> scores;  // (label, q value)
  SensitivityBounds delta_q;
};

// Selection probabilities proportional to exp(q(r) / (2b)), computed after
// subtracting the max score. b = 0 degenerates to uniform over the argmax set.
std::vector<double> exponential_probabilities(
    const std::vector<std::pair<std::string, double>>& scores, double b);

// Samples one outcome label with the above probabilities using one uniform
// draw (CDF inversion in table order); seed-deterministic.
std::string exponential_mechanism(const QualityScoreTable& q,
                                  const PersonalEpsilons& eps,
                                  UniformRng& rng);

}  // namespace spf::mechanisms

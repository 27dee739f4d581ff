#include "spf/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace spf::mechanisms {

void PersonalEpsilons::check_positive(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be > 0");
  }
}

double PersonalEpsilons::epsilon_for(const std::string& individual_id) const {
  auto it = per_individual_.find(individual_id);
  if (it != per_individual_.end()) return it->second;
  if (default_) return *default_;
  throw std::invalid_argument("no epsilon for individual '" + individual_id +
                              "' and no default set");
}

double laplace_pdf(double x, double b) {
  if (!(b > 0.0)) {
    throw std::invalid_argument("laplace_pdf requires scale b > 0");
  }
  return std::exp(-std::abs(x) / b) / (2.0 * b);
}

double noise_scale(const SensitivityBounds& bounds,
                   const PersonalEpsilons& eps) {
  // Deterministic pair enumeration: explicit ids from either side in sorted
  // order, plus the default pair when both sides have defaults.
  std::set<std::string> ids;
  for (const auto& [id, _] : bounds.per_individual()) ids.insert(id);
  for (const auto& [id, _] : eps.per_individual()) ids.insert(id);

  bool any = false;
  double b = 0.0;
  for (const auto& id : ids) {
    const double delta = bounds.delta_for(id);
    const double epsilon = eps.epsilon_for(id);
    b = std::max(b, delta / epsilon);
    any = true;
  }
  if (bounds.default_delta() && eps.default_epsilon()) {
    b = std::max(b, *bounds.default_delta() / *eps.default_epsilon());
    any = true;
  }
  if (!any) {
    throw std::invalid_argument(
        "noise_scale requires at least one (delta, epsilon) pair");
  }
  return b;
}

double laplace_sample(double b, UniformRng& rng) {
  const double u = rng.next();
  const double centered = u - 0.5;
  const double sign = centered > 0.0 ? 1.0 : (centered < 0.0 ? -1.0 : 0.0);
  return -b * sign * std::log(1.0 - 2.0 * std::abs(centered));
}

double laplace_mechanism(double g_value, const SensitivityBounds& bounds,
                         const PersonalEpsilons& eps, UniformRng& rng) {
  const double b = noise_scale(bounds, eps);
  return g_value + laplace_sample(b, rng);
}

std::vector<double> exponential_probabilities(
    const std::vector<std::pair<std::string, double>>& scores, double b) {
  if (scores.empty()) {
    throw std::invalid_argument("outcome range must be nonempty");
  }
  if (!(b >= 0.0)) {
    throw std::invalid_argument("scale b must be >= 0");
  }

  double max_score = scores.front().second;
  for (const auto& [_, q] : scores) max_score = std::max(max_score, q);

  std::vector<double> probs(scores.size(), 0.0);
  if (b == 0.0) {
    // Limit of the softmax: uniform over the argmax set.
    std::size_t ties = 0;
    for (const auto& [_, q] : scores) ties += (q == max_score) ? 1 : 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      probs[i] = scores[i].second == max_score
                     ? 1.0 / static_cast<double>(ties)
                     : 0.0;
    }
    return probs;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    probs[i] = std::exp((scores[i].second - max_score) / (2.0 * b));
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::string exponential_mechanism(const QualityScoreTable& q,
                                  const PersonalEpsilons& eps,
                                  UniformRng& rng) {
  const double b = noise_scale(q.delta_q, eps);
  const std::vector<double> probs = exponential_probabilities(q.scores, b);

  const double u = rng.next();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return q.scores[i].first;
  }
  return q.scores.back().first;
}

}  // namespace spf::mechanisms

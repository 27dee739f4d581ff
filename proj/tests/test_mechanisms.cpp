#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "spf/database.hpp"
#include "spf/mechanisms.hpp"
#include "spf/verify.hpp"

using spf::SensitivityBounds;
using namespace spf::mechanisms;

TEST_CASE("laplace density") {
  CHECK(laplace_pdf(0.0, 1.0) == 0.5);
  CHECK(laplace_pdf(1.0, 1.0) == doctest::Approx(std::exp(-1.0) / 2.0));
  for (double x : {0.3, 1.7, 42.0}) {
    CHECK(laplace_pdf(-x, 2.5) == laplace_pdf(x, 2.5));
  }
  CHECK_THROWS_AS(laplace_pdf(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(laplace_pdf(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("noise scale is the worst ratio over declared individuals") {
  SUBCASE("per-id pairs") {
    SensitivityBounds bounds;
    bounds.set("a", 1.0);
    bounds.set("b", 2.0);
    PersonalEpsilons eps;
    eps.set("a", 0.5);
    eps.set("b", 2.0);
    CHECK(noise_scale(bounds, eps) == 2.0);
  }
  SUBCASE("uniform defaults") {
    CHECK(noise_scale(SensitivityBounds::uniform(3.0),
                      PersonalEpsilons::uniform(1.5)) == 2.0);
  }
  SUBCASE("matched budgets give scale one") {
    SensitivityBounds bounds;
    PersonalEpsilons eps;
    for (const char* id : {"a", "b", "c"}) {
      bounds.set(id, 0.7);
      eps.set(id, 0.7);
    }
    CHECK(noise_scale(bounds, eps) == 1.0);
  }
  SUBCASE("no pairs at all is an error") {
    CHECK_THROWS_AS(noise_scale(SensitivityBounds{}, PersonalEpsilons{}),
                    std::invalid_argument);
  }
  SUBCASE("id without a resolvable epsilon is an error") {
    SensitivityBounds bounds;
    bounds.set("a", 1.0);
    CHECK_THROWS_AS(noise_scale(bounds, PersonalEpsilons{}),
                    std::invalid_argument);
  }
}

TEST_CASE("epsilons must be positive") {
  PersonalEpsilons eps;
  CHECK_THROWS_AS(eps.set_default(0.0), std::invalid_argument);
  CHECK_THROWS_AS(eps.set("a", -1.0), std::invalid_argument);
}

TEST_CASE("uniform source is deterministic and open-interval") {
  UniformRng a(12345);
  UniformRng b(12345);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.next();
    CHECK(u == b.next());
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  UniformRng c(54321);
  CHECK(UniformRng(12345).next() != c.next());
}

TEST_CASE("laplace mechanism determinism and composition") {
  const SensitivityBounds bounds = SensitivityBounds::uniform(2.0);
  const PersonalEpsilons eps = PersonalEpsilons::uniform(0.5);

  UniformRng r1(99);
  UniformRng r2(99);
  const double first = laplace_mechanism(10.0, bounds, eps, r1);
  CHECK(first == laplace_mechanism(10.0, bounds, eps, r2));

  // The mechanism is exactly g plus one laplace_sample at the same scale.
  UniformRng r3(99);
  const double b = noise_scale(bounds, eps);
  CHECK(b == 4.0);
  CHECK(first == 10.0 + laplace_sample(b, r3));
}

TEST_CASE("zero sensitivity adds zero noise but consumes one draw") {
  const SensitivityBounds bounds = SensitivityBounds::uniform(0.0);
  const PersonalEpsilons eps = PersonalEpsilons::uniform(1.0);
  UniformRng rng(7);
  CHECK(laplace_mechanism(3.25, bounds, eps, rng) == 3.25);
  UniformRng reference(7);
  reference.next();
  CHECK(rng.next() == reference.next());
}

TEST_CASE("laplace sampling fidelity at scale one") {
  UniformRng rng(2024);
  const std::size_t draws = 1000000;
  double abs_sum = 0.0;
  std::vector<double> sample;
  sample.reserve(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const double y = laplace_sample(1.0, rng);
    abs_sum += std::abs(y);
    sample.push_back(y);
  }
  const double mean_abs = abs_sum / static_cast<double>(draws);
  CHECK(mean_abs == doctest::Approx(1.0).epsilon(0.01));

  std::nth_element(sample.begin(), sample.begin() + draws / 2, sample.end());
  CHECK(std::abs(sample[draws / 2]) < 0.01);
}

TEST_CASE("exponential probabilities") {
  SUBCASE("equal scores are exactly uniform") {
    const auto p = exponential_probabilities(
        {{"a", 3.0}, {"b", 3.0}, {"c", 3.0}, {"d", 3.0}}, 1.0);
    for (double v : p) CHECK(v == 0.25);
  }
  SUBCASE("two-outcome ratio") {
    const auto p = exponential_probabilities({{"A", 0.0}, {"B", 2.0}}, 1.0);
    const double e = std::exp(1.0);
    CHECK(p[1] == doctest::Approx(e / (1.0 + e)).epsilon(1e-12));
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero scale is uniform over the argmax set") {
    const auto p =
        exponential_probabilities({{"a", 1.0}, {"b", 5.0}, {"c", 5.0}}, 0.0);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 0.5);
    CHECK(p[2] == 0.5);
  }
  SUBCASE("normalization on random tables") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> score(-50.0, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::pair<std::string, double>> scores;
      const std::size_t k = 2 + rng() % 6;
      for (std::size_t i = 0; i < k; ++i) {
        scores.emplace_back("r" + std::to_string(i), score(rng));
      }
      const auto p = exponential_probabilities(scores, 0.75);
      double total = 0.0;
      for (double v : p) {
        CHECK(v >= 0.0);
        total += v;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("exponential mechanism determinism and frequencies") {
  QualityScoreTable table;
  table.scores = {{"A", 0.0}, {"B", 2.0}, {"C", 1.0}};
  table.delta_q = SensitivityBounds::uniform(1.0);
  const PersonalEpsilons eps = PersonalEpsilons::uniform(2.0);

  UniformRng r1(5);
  UniformRng r2(5);
  for (int i = 0; i < 100; ++i) {
    CHECK(exponential_mechanism(table, eps, r1) ==
          exponential_mechanism(table, eps, r2));
  }

  const double b = noise_scale(table.delta_q, eps);
  const auto p = exponential_probabilities(table.scores, b);
  const std::size_t draws = 100000;
  std::vector<std::size_t> counts(3, 0);
  UniformRng rng(6);
  for (std::size_t i = 0; i < draws; ++i) {
    const std::string r = exponential_mechanism(table, eps, rng);
    counts[static_cast<std::size_t>(r[0] - 'A')] += 1;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double expected = p[i] * static_cast<double>(draws);
    const double sigma =
        std::sqrt(static_cast<double>(draws) * p[i] * (1.0 - p[i]));
    CHECK(std::abs(static_cast<double>(counts[i]) - expected) <= 3.0 * sigma);
  }
}

TEST_CASE("laplace privacy ratio is capped by the personal epsilon") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> delta_dist(0.1, 4.0);
  std::uniform_real_distribution<double> eps_dist(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double delta_i = delta_dist(rng);
    const double eps_i = eps_dist(rng);
    const double b = delta_i / eps_i;

    // Neighboring g values differ by exactly delta_i; grid spans 10b.
    std::vector<double> p;
    std::vector<double> q;
    for (int k = -1000; k <= 1000; ++k) {
      const double x = static_cast<double>(k) * (10.0 * b / 1000.0);
      p.push_back(laplace_pdf(x, b));
      q.push_back(laplace_pdf(x - delta_i, b));
    }
    const double ratio = spf::verify::privacy_ratio_audit(p, q);
    CHECK(ratio <= eps_i + 1e-9);
    CHECK(ratio == doctest::Approx(eps_i).epsilon(1e-9));
  }
}

TEST_CASE("exponential mechanism privacy ratio on perturbed tables") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> score(-10.0, 10.0);
  std::uniform_real_distribution<double> delta_dist(0.1, 2.0);
  std::uniform_real_distribution<double> eps_dist(0.2, 2.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  for (int trial = 0; trial < 50; ++trial) {
    const double delta_i = delta_dist(rng);
    const double eps_i = eps_dist(rng);
    const double b = delta_i / eps_i;

    const std::size_t k = 2 + rng() % 5;
    std::vector<std::pair<std::string, double>> q1;
    std::vector<std::pair<std::string, double>> q2;
    for (std::size_t i = 0; i < k; ++i) {
      const std::string label = "r" + std::to_string(i);
      const double s = score(rng);
      q1.emplace_back(label, s);
      q2.emplace_back(label, s + unit(rng) * delta_i);
    }
    const auto p1 = exponential_probabilities(q1, b);
    const auto p2 = exponential_probabilities(q2, b);
    std::vector<std::pair<std::string, double>> t1;
    std::vector<std::pair<std::string, double>> t2;
    for (std::size_t i = 0; i < k; ++i) {
      t1.emplace_back(q1[i].first, p1[i]);
      t2.emplace_back(q2[i].first, p2[i]);
    }
    CHECK(spf::verify::privacy_ratio_audit(t1, t2) <= eps_i + 1e-9);
  }
}

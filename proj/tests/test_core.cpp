#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "spf/core.hpp"
#include "spf/database.hpp"
#include "spf/errors.hpp"
#include "spf/memo.hpp"
#include "spf/oracle.hpp"
#include "test_util.hpp"

using spf::Database;
using spf::FunctionOracle;
using spf::MemoTable;
using spf::Record;
using spf::SensitivityBounds;

namespace {

// The worked two-entry configuration: f(empty)=0, f({a})=3, f({b})=-3,
// f({a,b})=0 with uniform Delta = 1.
FunctionOracle two_entry_oracle() {
  FunctionOracle f;
  f.empty_value = 0.0;
  f.evaluate = [](const Database& sub) {
    bool a = false;
    bool b = false;
    for (const auto& r : sub.records()) {
      if (r.individual_id == "a") a = true;
      if (r.individual_id == "b") b = true;
    }
    if (a && b) return 0.0;
    return a ? 3.0 : -3.0;
  };
  return f;
}

Database two_entry_database() {
  return Database({{"a", 1.0}, {"b", 2.0}});
}

FunctionOracle value_oracle(double single_value) {
  FunctionOracle f;
  f.empty_value = 0.0;
  f.evaluate = [single_value](const Database&) { return single_value; };
  return f;
}

}  // namespace

TEST_CASE("feasible interval from a single neighbor") {
  const Database d({{"a", 5.0}});
  MemoTable memo = MemoTable::for_database(d);
  memo.set(0, 0.0);
  const auto window =
      spf::core::feasible_interval(d, memo, SensitivityBounds::uniform(1.0));
  CHECK(window.lower() == -1.0);
  CHECK(window.upper() == 1.0);
}

TEST_CASE("feasible interval with symmetric neighbors") {
  const Database d({{"a", 1.0}, {"b", 2.0}});
  MemoTable memo = MemoTable::for_database(d);
  memo.set(0, 0.0);
  memo.set(1, 0.0);
  memo.set(2, 0.0);
  const auto window =
      spf::core::feasible_interval(d, memo, SensitivityBounds::uniform(2.0));
  CHECK(window.lower() == -2.0);
  CHECK(window.upper() == 2.0);
}

TEST_CASE("feasible interval requires every one-smaller entry") {
  const Database d({{"a", 1.0}, {"b", 2.0}});
  MemoTable memo = MemoTable::for_database(d);
  memo.set(0, 0.0);
  memo.set(1, 0.0);  // entry for {b} alone is missing
  CHECK_THROWS_AS(
      spf::core::feasible_interval(d, memo, SensitivityBounds::uniform(1.0)),
      spf::InternalConsistencyError);
}

TEST_CASE("inverted interval construction is rejected") {
  CHECK_THROWS_AS(spf::core::FeasibleInterval(1.0, -1.0),
                  spf::InvariantViolationError);
}

TEST_CASE("singleton value inside the window is kept") {
  const Database d({{"a", 7.0}});
  const auto result = spf::core::preprocess(value_oracle(0.5),
                                            SensitivityBounds::uniform(1.0), d);
  CHECK(result.g_value == 0.5);
}

TEST_CASE("singleton value above the window clamps to the upper bound") {
  const Database d({{"a", 7.0}});
  const auto result = spf::core::preprocess(value_oracle(5.0),
                                            SensitivityBounds::uniform(1.0), d);
  CHECK(result.g_value == 1.0);
}

TEST_CASE("two entry worked example") {
  const Database d = two_entry_database();
  const FunctionOracle f = two_entry_oracle();
  const SensitivityBounds bounds = SensitivityBounds::uniform(1.0);

  const auto result = spf::core::preprocess(f, bounds, d);
  CHECK(result.g_value == 0.0);
  CHECK(result.memo.at(result.memo.mask_of(Database({{"a", 1.0}}))) == 1.0);
  CHECK(result.memo.at(result.memo.mask_of(Database({{"b", 2.0}}))) == -1.0);

  const auto window = spf::core::feasible_interval(d, result.memo, bounds);
  CHECK(window.lower() == 0.0);
  CHECK(window.upper() == 0.0);

  CHECK(spf::core::sensitivity_audit(result.memo, bounds, d, 1e-9).clean());
}

TEST_CASE("audit flags a hand-built violation") {
  const Database d({{"a", 5.0}});
  MemoTable memo = MemoTable::for_database(d);
  memo.set(0, 0.0);
  memo.set(1, 5.0);
  const auto report =
      spf::core::sensitivity_audit(memo, SensitivityBounds::uniform(1.0), d);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].individual_id == "a");
  CHECK(report.violations[0].excess == doctest::Approx(4.0));
}

TEST_CASE("error bound is zero when every marginal fits the budget") {
  FunctionOracle f;
  f.empty_value = 0.0;
  f.evaluate = [](const Database& sub) {
    double sum = 0.0;
    for (const auto& r : sub.records()) sum += r.value;
    return sum;
  };
  const Database d({{"a", 0.5}, {"b", -0.7}, {"c", 0.9}});
  const auto bound =
      spf::core::error_bound(f, SensitivityBounds::uniform(1.0), d);
  CHECK(bound.value == 0.0);
  CHECK(bound.exact);
}

TEST_CASE("error bound of a clamped singleton") {
  const Database d({{"a", 7.0}});
  const auto bound = spf::core::error_bound(value_oracle(5.0),
                                            SensitivityBounds::uniform(1.0), d);
  CHECK(bound.value == doctest::Approx(4.0));
  CHECK(bound.exact);
  CHECK(bound.witness == std::vector<std::size_t>{0});
}

TEST_CASE("error bound of the two entry example") {
  const auto bound = spf::core::error_bound(
      two_entry_oracle(), SensitivityBounds::uniform(1.0),
      two_entry_database());
  // Both insertion orders give max{3-1,0} + max{3-1,0} = 4.
  CHECK(bound.value == doctest::Approx(4.0));
  CHECK(bound.exact);
  REQUIRE(bound.witness.size() == 2);
  std::vector<std::size_t> sorted_witness = bound.witness;
  std::sort(sorted_witness.begin(), sorted_witness.end());
  CHECK(sorted_witness == std::vector<std::size_t>{0, 1});
}

TEST_CASE("error bound equals the exhaustive permutation maximum") {
  std::mt19937_64 rng(20240801);
  for (int trial = 0; trial < 30; ++trial) {
    const Database d = testutil::random_database(rng, 5, -50.0, 50.0);
    const SensitivityBounds bounds = testutil::random_bounds(rng, d, 4.0);
    const FunctionOracle f = testutil::hashed_oracle(1000 + trial, 20.0);
    const auto bound = spf::core::error_bound(f, bounds, d);
    const double reference = testutil::brute_permutation_bound(f, bounds, d);
    CHECK(bound.value == doctest::Approx(reference).epsilon(1e-12));
    CHECK(bound.exact);
  }
}

TEST_CASE("error bound dominates the actual deviation") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 6);
    const Database d = testutil::random_database(rng, n, -10.0, 10.0);
    const SensitivityBounds bounds = testutil::random_bounds(rng, d, 3.0);
    const FunctionOracle f = testutil::hashed_oracle(500 + trial, 15.0);
    const auto result = spf::core::preprocess(f, bounds, d);
    const auto bound = spf::core::error_bound(f, bounds, d);
    CHECK(std::abs(f(d) - result.g_value) <= bound.value + 1e-9);
  }
}

TEST_CASE("witness permutation attains the bound value") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    const Database d = testutil::random_database(rng, 6, -50.0, 50.0);
    const SensitivityBounds bounds = testutil::random_bounds(rng, d, 4.0);
    const FunctionOracle f = testutil::hashed_oracle(9000 + trial, 25.0);
    const auto bound = spf::core::error_bound(f, bounds, d);

    const Database canonical = d.sorted_canonical();
    std::vector<Record> prefix;
    double total = 0.0;
    double f_prev = f(Database(prefix));
    for (std::size_t idx : bound.witness) {
      prefix.push_back(canonical.records()[idx]);
      const double f_cur = f(Database(prefix));
      const double delta = bounds.delta_for(canonical.records()[idx].individual_id);
      total += std::max(std::abs(f_cur - f_prev) - delta, 0.0);
      f_prev = f_cur;
    }
    CHECK(total == doctest::Approx(bound.value).epsilon(1e-12));
  }
}

TEST_CASE("clamp form and boundary tightness hold on every subset") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 25; ++trial) {
    const Database d = testutil::random_database(rng, 6, -30.0, 30.0);
    const SensitivityBounds bounds = testutil::random_bounds(rng, d, 5.0);
    const FunctionOracle f = testutil::hashed_oracle(100 + trial, 40.0);
    const auto result = spf::core::preprocess(f, bounds, d);

    for (spf::Mask m = 1; m <= result.memo.full_mask(); ++m) {
      const Database sub = result.memo.subset_database(m);
      const auto window = spf::core::feasible_interval(sub, result.memo, bounds);
      const double f_value = f(sub);
      const double g = result.memo.at(m);
      CHECK(window.lower() <= window.upper());
      const bool clamp_form =
          g == f_value || g == window.upper() || g == window.lower();
      CHECK(clamp_form);
      if (g != f_value) {
        CHECK((g == window.upper() || g == window.lower()));
      }
    }
  }
}

TEST_CASE("preprocess output is independent of record order") {
  std::mt19937_64 rng(99);
  const FunctionOracle f = testutil::hashed_oracle(8, 25.0);
  std::vector<Record> records;
  for (int i = 0; i < 7; ++i) {
    records.push_back({"p" + std::to_string(i),
                       std::uniform_real_distribution<double>(-9, 9)(rng)});
  }
  SensitivityBounds bounds;
  for (const auto& r : records) {
    bounds.set(r.individual_id,
               std::uniform_real_distribution<double>(0, 4)(rng));
  }

  const auto base = spf::core::preprocess(f, bounds, Database(records));
  std::ostringstream base_dump;
  base.memo.dump(base_dump);

  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    std::shuffle(records.begin(), records.end(), rng);
    const auto again = spf::core::preprocess(f, bounds, Database(records));
    CHECK(again.g_value == base.g_value);
    std::ostringstream dump;
    again.memo.dump(dump);
    CHECK(dump.str() == base_dump.str());
  }
}

TEST_CASE("empty database preprocesses to the empty value") {
  const auto result = spf::core::preprocess(
      testutil::hashed_oracle(3, 10.0, 2.5), SensitivityBounds::uniform(1.0),
      Database::from_values({}));
  CHECK(result.g_value == 2.5);
  CHECK(result.memo.n() == 0);
}

TEST_CASE("size caps raise dedicated errors") {
  std::mt19937_64 rng(5);
  const Database small = testutil::random_database(rng, 5, -1.0, 1.0);
  spf::core::PreprocessOptions options;
  options.max_n = 4;
  CHECK_THROWS_AS(spf::core::preprocess(testutil::hashed_oracle(1, 1.0),
                                        SensitivityBounds::uniform(1.0), small,
                                        options),
                  spf::SizeLimitError);

  const Database nine = testutil::random_database(rng, 9, -1.0, 1.0);
  CHECK_THROWS_AS(spf::core::error_bound(testutil::hashed_oracle(2, 1.0),
                                         SensitivityBounds::uniform(1.0), nine),
                  spf::SizeLimitError);
}

TEST_CASE("sampled bound is a flagged lower estimate") {
  std::mt19937_64 rng(6);
  const Database d = testutil::random_database(rng, 8, -20.0, 20.0);
  const SensitivityBounds bounds = testutil::random_bounds(rng, d, 2.0);
  const FunctionOracle f = testutil::hashed_oracle(11, 30.0);

  const auto exact = spf::core::error_bound(f, bounds, d);
  const auto sampled = spf::core::error_bound_sampled(f, bounds, d, 200, 1);
  CHECK_FALSE(sampled.exact);
  CHECK(sampled.value <= exact.value + 1e-12);

  const auto sampled_again = spf::core::error_bound_sampled(f, bounds, d, 200, 1);
  CHECK(sampled.value == sampled_again.value);
}

TEST_CASE("memo dump is one hex mask and value per line") {
  const auto result = spf::core::preprocess(two_entry_oracle(),
                                            SensitivityBounds::uniform(1.0),
                                            two_entry_database());
  std::ostringstream out;
  result.memo.dump(out);
  std::istringstream in(out.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(line.find(' ') != std::string::npos);
  }
  CHECK(lines == 4);
}

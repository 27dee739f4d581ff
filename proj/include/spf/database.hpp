#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace spf {

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend bool operator==(const Point2& a, const Point2& b) {
    return a.x1 == b.x1 && a.x2 == b.x2;
  }
  friend bool operator<(const Point2& a, const Point2& b) {
    if (a.x1 != b.x1) return a.x1 < b.x1;
    return a.x2 < b.x2;
  }
};

inline double l1_norm(const Point2& p) {
  return std::abs(p.x1) + std::abs(p.x2);
}

inline double l1_distance(const Point2& a, const Point2& b) {
  return std::abs(a.x1 - b.x1) + std::abs(a.x2 - b.x2);
}

// One individual's contribution: an opaque id plus that individual's data.
template <typename ValueT>
struct BasicRecord {
  std::string individual_id;
  ValueT value{};
};

using Record = BasicRecord<double>;
using Record2 = BasicRecord<Point2>;

// Finite ordered list of records with unique individual ids. Every subset of
// a database is itself a valid database.
template <typename ValueT>
class BasicDatabase {
 public:
  BasicDatabase() = default;

  explicit BasicDatabase(std::vector<BasicRecord<ValueT>> records)
      : records_(std::move(records)) {
    std::unordered_set<std::string> seen;
    for (const auto& r : records_) {
      if (!seen.insert(r.individual_id).second) {
        throw std::invalid_argument("duplicate individual_id '" +
                                    r.individual_id + "' in database");
      }
    }
  }

  // Convenience constructor synthesizing ids "0", "1", ... for bare values.
  static BasicDatabase from_values(const std::vector<ValueT>& values) {
    std::vector<BasicRecord<ValueT>> recs;
    recs.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      recs.push_back({std::to_string(i), values[i]});
    }
    return BasicDatabase(std::move(recs));
  }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<BasicRecord<ValueT>>& records() const { return records_; }
  const BasicRecord<ValueT>& operator[](std::size_t i) const {
    return records_[i];
  }

  std::vector<ValueT> values() const {
    std::vector<ValueT> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.value);
    return out;
  }

  // Canonical copy: records sorted by (value, individual_id). All subset
  // keying is done relative to this order, making results independent of the
  // order records arrive in.
  BasicDatabase sorted_canonical() const {
    std::vector<BasicRecord<ValueT>> recs = records_;
    std::sort(recs.begin(), recs.end(),
              [](const BasicRecord<ValueT>& a, const BasicRecord<ValueT>& b) {
                if (a.value < b.value) return true;
                if (b.value < a.value) return false;
                return a.individual_id < b.individual_id;
              });
    return BasicDatabase(std::move(recs));
  }

 private:
  std::vector<BasicRecord<ValueT>> records_;
};

using Database = BasicDatabase<double>;
using Database2 = BasicDatabase<Point2>;

// Per-individual sensitivity budgets Delta_i >= 0, with an optional uniform
// default for ids absent from the map.
class SensitivityBounds {
 public:
  SensitivityBounds() = default;

  static SensitivityBounds uniform(double delta) {
    SensitivityBounds b;
    b.set_default(delta);
    return b;
  }

  void set_default(double delta) {
    check_nonnegative(delta);
    default_ = delta;
  }

  void set(const std::string& individual_id, double delta) {
    check_nonnegative(delta);
    per_individual_[individual_id] = delta;
  }

  std::optional<double> default_delta() const { return default_; }
  const std::unordered_map<std::string, double>& per_individual() const {
    return per_individual_;
  }

  bool has_delta_for(const std::string& individual_id) const {
    return per_individual_.count(individual_id) > 0 || default_.has_value();
  }

  double delta_for(const std::string& individual_id) const {
    auto it = per_individual_.find(individual_id);
    if (it != per_individual_.end()) return it->second;
    if (default_) return *default_;
    throw std::invalid_argument("no sensitivity bound for individual '" +
                                individual_id + "' and no default set");
  }

 private:
  static void check_nonnegative(double delta) {
    if (!(delta >= 0.0)) {
      throw std::invalid_argument("sensitivity bound must be >= 0");
    }
  }

  std::optional<double> default_;
  std::unordered_map<std::string, double> per_individual_;
};

}  // namespace spf

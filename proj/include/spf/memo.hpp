#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "spf/database.hpp"
#include "spf/errors.hpp"

namespace spf {

// Subsets of a root database are keyed as bitmasks over its records, with the
// records presorted by (value, individual_id) so the keying is canonical.
using Mask = std::uint64_t;

inline int popcount(Mask m) { return __builtin_popcountll(m); }

template <typename ValueT>
class BasicMemoTable {
 public:
  BasicMemoTable() = default;

  // Takes ownership of the canonical (presorted) root database and allocates
  // dense storage for all 2^n subsets.
  explicit BasicMemoTable(BasicDatabase<ValueT> sorted_root)
      : root_(std::move(sorted_root)),
        values_(std::size_t{1} << root_.size()),
        present_(std::size_t{1} << root_.size(), 0) {}

  static BasicMemoTable for_database(const BasicDatabase<ValueT>& db) {
    return BasicMemoTable(db.sorted_canonical());
  }

  std::size_t n() const { return root_.size(); }
  const BasicDatabase<ValueT>& root() const { return root_; }
  Mask full_mask() const {
    return root_.size() == 0 ? 0 : ((Mask{1} << root_.size()) - 1);
  }

  bool contains(Mask subset) const {
    return subset <= full_mask() && present_[subset];
  }

  const ValueT& at(Mask subset) const {
    if (!contains(subset)) {
      throw InternalConsistencyError(
          "memo entry for subset mask " + std::to_string(subset) +
          " is missing");
    }
    return values_[subset];
  }

  void set(Mask subset, const ValueT& g_value) {
    values_[subset] = g_value;
    present_[subset] = 1;
  }

  // Mask of a subset database relative to the root, matched by individual_id.
  Mask mask_of(const BasicDatabase<ValueT>& subset) const {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < root_.size(); ++i) {
      index.emplace(root_[i].individual_id, i);
    }
    Mask m = 0;
    for (const auto& r : subset.records()) {
      auto it = index.find(r.individual_id);
      if (it == index.end()) {
        throw std::invalid_argument("individual '" + r.individual_id +
                                    "' is not part of the memo's root database");
      }
      m |= Mask{1} << it->second;
    }
    return m;
  }

  BasicDatabase<ValueT> subset_database(Mask subset) const {
    std::vector<BasicRecord<ValueT>> recs;
    recs.reserve(static_cast<std::size_t>(popcount(subset)));
    for (std::size_t i = 0; i < root_.size(); ++i) {
      if (subset & (Mask{1} << i)) recs.push_back(root_[i]);
    }
    return BasicDatabase<ValueT>(std::move(recs));
  }

  // Line-oriented debug dump: "<mask in hex> <g value(s), 17 significant
  // digits>" for every stored subset, in increasing mask order.
  void dump(std::ostream& out) const {
    for (Mask m = 0; m <= full_mask(); ++m) {
      if (!present_[m]) continue;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%llx",
                    static_cast<unsigned long long>(m));
      out << buf;
      write_value(out, values_[m]);
      out << '\n';
      if (m == full_mask()) break;
    }
  }

 private:
  static void write_value(std::ostream& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %.17g", v);
    out << buf;
  }
  static void write_value(std::ostream& out, const Point2& v) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), " %.17g %.17g", v.x1, v.x2);
    out << buf;
  }

  BasicDatabase<ValueT> root_;
  std::vector<ValueT> values_;
  std::vector<std::uint8_t> present_;
};

using MemoTable = BasicMemoTable<double>;
using MemoTable2 = BasicMemoTable<Point2>;

}  // namespace spf

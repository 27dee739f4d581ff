#pragma once

#include <functional>

#include "spf/database.hpp"

namespace spf {

// Query access to the function being preprocessed. evaluate must be
// deterministic; empty_value is the required value at the empty database
// (there is no silent default: the analyst chooses the empty-set anchor).
template <typename ValueT, typename ResultT>
struct BasicOracle {
  std::function<ResultT(const BasicDatabase<ValueT>&)> evaluate;
  ResultT empty_value{};

  ResultT operator()(const BasicDatabase<ValueT>& db) const {
    if (db.empty()) return empty_value;
    return evaluate(db);
  }
};

using FunctionOracle = BasicOracle<double, double>;
using FunctionOracle2 = BasicOracle<Point2, Point2>;

}  // namespace spf

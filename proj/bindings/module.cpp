#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spf/core.hpp"
#include "spf/database.hpp"
#include "spf/errors.hpp"
#include "spf/geo2d.hpp"
#include "spf/mechanisms.hpp"
#include "spf/memo.hpp"
#include "spf/oracle.hpp"
#include "spf/stats.hpp"
#include "spf/verify.hpp"

namespace py = pybind11;

namespace {

spf::Database make_database(
    const std::vector<std::pair<std::string, double>>& rows) {
  std::vector<spf::Record> records;
  records.reserve(rows.size());
  for (const auto& [id, value] : rows) records.push_back({id, value});
  return spf::Database(records);
}

spf::stats::OrderedStatSpec make_spec(const std::string& kind,
                                      double empty_value, double alpha) {
  spf::stats::OrderedStatSpec spec;
  if (kind == "mean") {
    spec.kind = spf::stats::OrderedStat::kMean;
  } else if (kind == "trimmed_mean") {
    spec.kind = spf::stats::OrderedStat::kTrimmedMean;
  } else if (kind == "median") {
    spec.kind = spf::stats::OrderedStat::kMedian;
  } else if (kind == "min") {
    spec.kind = spf::stats::OrderedStat::kMinimum;
  } else if (kind == "max") {
    spec.kind = spf::stats::OrderedStat::kMaximum;
  } else {
    throw std::invalid_argument("unknown statistic kind '" + kind + "'");
  }
  spec.empty_value = empty_value;
  spec.alpha = alpha;
  return spec;
}

}  // namespace

PYBIND11_MODULE(_spf, m) {
  m.doc() =
      "Sensitivity-bounded approximations of database statistics with "
      "personalized-DP release mechanisms";

  py::register_exception<spf::SizeLimitError>(m, "SizeLimitError",
                                              PyExc_RuntimeError);
  py::register_exception<spf::InvariantViolationError>(
      m, "InvariantViolationError", PyExc_RuntimeError);

  py::class_<spf::Database>(m, "Database")
      .def(py::init(&make_database), py::arg("rows"),
           "rows: list of (id, value) pairs with distinct ids")
      .def_static(
          "from_values",
          [](const std::vector<double>& values) {
            return spf::Database::from_values(values);
          },
          py::arg("values"))
      .def("__len__", &spf::Database::size)
      .def("values", &spf::Database::values)
      .def("rows", [](const spf::Database& d) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& r : d.records()) {
          out.emplace_back(r.individual_id, r.value);
        }
        return out;
      });

  py::class_<spf::SensitivityBounds>(m, "SensitivityBounds")
      .def(py::init<>())
      .def_static("uniform", &spf::SensitivityBounds::uniform,
                  py::arg("delta"))
      .def("set_default", &spf::SensitivityBounds::set_default)
      .def("set", &spf::SensitivityBounds::set)
      .def("delta_for", &spf::SensitivityBounds::delta_for);

  py::class_<spf::MemoTable>(m, "MemoTable")
      .def("n", &spf::MemoTable::n)
      .def("value",
           [](const spf::MemoTable& memo, spf::Mask mask) {
             return memo.at(mask);
           },
           py::arg("mask"))
      .def("dump", [](const spf::MemoTable& memo) {
        std::ostringstream out;
        memo.dump(out);
        return out.str();
      });

  m.def(
      "preprocess",
      [](const std::function<double(const spf::Database&)>& f,
         double empty_value, const spf::SensitivityBounds& bounds,
         const spf::Database& d, std::size_t max_n) {
        spf::FunctionOracle oracle;
        oracle.evaluate = f;
        oracle.empty_value = empty_value;
        spf::core::PreprocessOptions options;
        options.max_n = max_n;
        auto result = spf::core::preprocess(oracle, bounds, d, options);
        return py::make_tuple(result.g_value, std::move(result.memo));
      },
      py::arg("f"), py::arg("empty_value"), py::arg("bounds"), py::arg("d"),
      py::arg("max_n") = 24,
      "General sensitivity-bounded recursion; returns (g_value, memo)");

  m.def(
      "sensitivity_audit",
      [](const spf::MemoTable& memo, const spf::SensitivityBounds& bounds,
         const spf::Database& d, double tol) {
        const auto report = spf::core::sensitivity_audit(memo, bounds, d, tol);
        std::vector<std::tuple<std::uint64_t, std::string, double>> out;
        for (const auto& v : report.violations) {
          out.emplace_back(v.subset, v.individual_id, v.excess);
        }
        return out;
      },
      py::arg("memo"), py::arg("bounds"), py::arg("d"),
      py::arg("tol") = 1e-9,
      "Exhaustive per-subset sensitivity check; empty list means clean");

  m.def(
      "error_bound",
      [](const std::function<double(const spf::Database&)>& f,
         double empty_value, const spf::SensitivityBounds& bounds,
         const spf::Database& d) {
        spf::FunctionOracle oracle;
        oracle.evaluate = f;
        oracle.empty_value = empty_value;
        const auto bound = spf::core::error_bound(oracle, bounds, d);
        return py::make_tuple(bound.value, bound.witness, bound.exact);
      },
      py::arg("f"), py::arg("empty_value"), py::arg("bounds"), py::arg("d"),
      "Worst-case insertion-order error bound; returns (value, witness, "
      "exact)");

  m.def("mean", &spf::stats::mean, py::arg("d"));
  m.def("variance", &spf::stats::variance, py::arg("d"));

  m.def(
      "evaluate_statistic",
      [](const std::string& kind, const spf::Database& d, double empty_value,
         double alpha) {
        return spf::stats::evaluate(make_spec(kind, empty_value, alpha), d);
      },
      py::arg("kind"), py::arg("d"), py::arg("empty_value") = 0.0,
      py::arg("alpha") = 0.0);

  m.def(
      "preprocess_ordered",
      [](const std::string& kind, double empty_value, double alpha,
         double delta, const spf::Database& d) {
        return spf::stats::preprocess_ordered(
            make_spec(kind, empty_value, alpha), delta, d);
      },
      py::arg("kind"), py::arg("empty_value"), py::arg("alpha"),
      py::arg("delta"), py::arg("d"),
      "O(n^2) fast path for mean, trimmed_mean, median, min, max");

  m.def("preprocess_variance", &spf::stats::preprocess_variance,
        py::arg("delta"), py::arg("d"));
  m.def("mean_error_bound", &spf::stats::mean_error_bound, py::arg("mu_hat"),
        py::arg("delta"), py::arg("d"));
  m.def("variance_error_bound", &spf::stats::variance_error_bound,
        py::arg("delta"), py::arg("d"));
  m.def(
      "mean_bounding",
      [](double mu_hat, double delta, const spf::Database& d) {
        const auto env = spf::stats::mean_bounding(mu_hat, delta, d);
        return py::make_tuple(env.h_lower, env.h_upper);
      },
      py::arg("mu_hat"), py::arg("delta"), py::arg("d"),
      "O(n) envelopes (h_lower, h_upper) sandwiching the mean fast path");

  py::class_<spf::mechanisms::PersonalEpsilons>(m, "PersonalEpsilons")
      .def(py::init<>())
      .def_static("uniform", &spf::mechanisms::PersonalEpsilons::uniform,
                  py::arg("epsilon"))
      .def("set_default", &spf::mechanisms::PersonalEpsilons::set_default)
      .def("set", &spf::mechanisms::PersonalEpsilons::set)
      .def("epsilon_for", &spf::mechanisms::PersonalEpsilons::epsilon_for);

  py::class_<spf::mechanisms::UniformRng>(m, "UniformRng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next", &spf::mechanisms::UniformRng::next);

  m.def("laplace_pdf", &spf::mechanisms::laplace_pdf, py::arg("x"),
        py::arg("b"));
  m.def("noise_scale", &spf::mechanisms::noise_scale, py::arg("bounds"),
        py::arg("eps"));
  m.def("laplace_mechanism", &spf::mechanisms::laplace_mechanism,
        py::arg("g_value"), py::arg("bounds"), py::arg("eps"), py::arg("rng"),
        "Adds one Laplace draw at scale max_i delta_i / epsilon_i");
  m.def(
      "exponential_mechanism",
      [](const std::vector<std::pair<std::string, double>>& scores,
         const spf::SensitivityBounds& delta_q,
         const spf::mechanisms::PersonalEpsilons& eps,
         spf::mechanisms::UniformRng& rng) {
        spf::mechanisms::QualityScoreTable table{scores, delta_q};
        return spf::mechanisms::exponential_mechanism(table, eps, rng);
      },
      py::arg("scores"), py::arg("delta_q"), py::arg("eps"), py::arg("rng"));

  m.def(
      "intersect_balls",
      [](const std::vector<std::pair<std::pair<double, double>, double>>&
             balls) -> std::optional<std::tuple<double, double, double, double>> {
        std::vector<spf::geo2d::L1Ball> converted;
        for (const auto& [c, r] : balls) {
          converted.push_back({{c.first, c.second}, r});
        }
        const auto box = spf::geo2d::intersect_balls(converted);
        if (!box) return std::nullopt;
        return std::make_tuple(box->u_min, box->u_max, box->v_min, box->v_max);
      },
      py::arg("balls"),
      "Intersection of l1 balls as a rotated box (u_min, u_max, v_min, "
      "v_max), or None when empty");

  m.def(
      "project_to_box",
      [](const std::tuple<double, double, double, double>& box,
         const std::pair<double, double>& target) {
        const spf::geo2d::RotatedBox b{std::get<0>(box), std::get<1>(box),
                                       std::get<2>(box), std::get<3>(box)};
        const spf::Point2 p =
            spf::geo2d::project_to_box(b, {target.first, target.second});
        return std::make_pair(p.x1, p.x2);
      },
      py::arg("box"), py::arg("target"),
      "l2 projection onto a rotated box, exact minimizer per coordinate");

  m.def(
      "privacy_ratio_audit",
      [](const std::vector<double>& p, const std::vector<double>& q) {
        return spf::verify::privacy_ratio_audit(p, q);
      },
      py::arg("p"), py::arg("q"),
      "max |log p_i - log q_i| over matched outcome distributions");
}

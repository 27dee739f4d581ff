#include "spf/cli.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "spf/core.hpp"
#include "spf/database.hpp"
#include "spf/errors.hpp"
#include "spf/mechanisms.hpp"
#include "spf/oracle.hpp"
#include "spf/stats.hpp"

namespace spf::cli {

namespace {

// Malformed-input diagnostics; mapped to kExitMalformedInput.
struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

double parse_number(const std::string& field, std::size_t line_no,
                    const std::string& column) {
  if (field.empty()) {
    throw CsvError("line " + std::to_string(line_no) + ": column '" + column +
                   "' is empty");
  }
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + field.size() || !std::isfinite(v)) {
    throw CsvError("line " + std::to_string(line_no) + ": column '" + column +
                   "' has non-numeric value '" + field + "'");
  }
  return v;
}

struct ParsedInput {
  bool two_d = false;
  std::vector<Record> rows;
  std::vector<Record2> rows2;
};

ParsedInput read_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open input file '" + path + "'");

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw CsvError("input file is empty");
  ++line_no;

  const std::vector<std::string> header = split_fields(line);
  ParsedInput parsed;
  if (header == std::vector<std::string>{"id", "value"}) {
    parsed.two_d = false;
  } else if (header == std::vector<std::string>{"id", "x1", "x2"}) {
    parsed.two_d = true;
  } else {
    throw CsvError("line 1: expected header 'id,value' or 'id,x1,x2'");
  }

  std::unordered_set<std::string> seen;
  const std::size_t want = parsed.two_d ? 3 : 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != want) {
      throw CsvError("line " + std::to_string(line_no) + ": expected " +
                     std::to_string(want) + " columns, found " +
                     std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw CsvError("line " + std::to_string(line_no) +
                     ": column 'id' is empty");
    }
    if (!seen.insert(fields[0]).second) {
      throw CsvError("line " + std::to_string(line_no) + ": duplicate id '" +
                     fields[0] + "'");
    }
    if (parsed.two_d) {
      parsed.rows2.push_back(
          {fields[0], {parse_number(fields[1], line_no, "x1"),
                       parse_number(fields[2], line_no, "x2")}});
    } else {
      parsed.rows.push_back(
          {fields[0], parse_number(fields[1], line_no, "value")});
    }
  }
  return parsed;
}

struct BudgetFile {
  std::optional<double> default_value;
  std::vector<std::pair<std::string, double>> entries;
};

// CSV with header 'id,<column>'; a '*' id supplies the default.
BudgetFile read_budget_file(const std::string& path,
                            const std::string& column) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + column + " file '" + path + "'");

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw CsvError(column + " file is empty");
  }
  ++line_no;
  if (split_fields(line) != std::vector<std::string>{"id", column}) {
    throw CsvError("line 1: expected header 'id," + column + "' in '" + path +
                   "'");
  }

  BudgetFile out;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 2) {
      throw CsvError("line " + std::to_string(line_no) +
                     ": expected 2 columns, found " +
                     std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw CsvError("line " + std::to_string(line_no) +
                     ": column 'id' is empty");
    }
    if (!seen.insert(fields[0]).second) {
      throw CsvError("line " + std::to_string(line_no) + ": duplicate id '" +
                     fields[0] + "'");
    }
    const double v = parse_number(fields[1], line_no, column);
    if (fields[0] == "*") {
      out.default_value = v;
    } else {
      out.entries.emplace_back(fields[0], v);
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v, const char* absent) {
  return v ? fmt(*v) : std::string(absent);
}

struct Report {
  std::string statistic;
  std::size_t n = 0;
  std::optional<double> raw_value;
  double g_value = 0.0;
  std::optional<double> error_bound;
  std::optional<double> noise_scale;
  std::optional<double> noised_value;
  std::uint64_t seed = 0;
};

void write_table(const Report& r, std::ostream& out) {
  out << "statistic     " << r.statistic << "\n";
  out << "n             " << r.n << "\n";
  out << "raw_value     " << fmt_opt(r.raw_value, "(undefined)") << "\n";
  out << "g_value       " << fmt(r.g_value) << "\n";
  out << "error_bound   " << fmt_opt(r.error_bound, "(not applicable)")
      << "\n";
  out << "noise_scale   " << fmt_opt(r.noise_scale, "(no noise)") << "\n";
  out << "noised_value  " << fmt_opt(r.noised_value, "(no noise)") << "\n";
  out << "seed          " << r.seed << "\n";
}

void write_json(const Report& r, std::ostream& out) {
  const auto field = [](const std::optional<double>& v) {
    return v ? fmt(*v) : std::string("null");
  };
  out << "{\"statistic\":\"" << r.statistic << "\""
      << ",\"n\":" << r.n << ",\"raw_value\":" << field(r.raw_value)
      << ",\"g_value\":" << fmt(r.g_value)
      << ",\"error_bound\":" << field(r.error_bound)
      << ",\"noise_scale\":" << field(r.noise_scale)
      << ",\"noised_value\":" << field(r.noised_value)
      << ",\"seed\":" << r.seed << "}\n";
}

stats::OrderedStatSpec make_spec(const RunConfig& config, double anchor) {
  stats::OrderedStatSpec spec;
  switch (config.statistic) {
    case Statistic::kMean:
      spec.kind = stats::OrderedStat::kMean;
      break;
    case Statistic::kTrimmedMean:
      spec.kind = stats::OrderedStat::kTrimmedMean;
      break;
    case Statistic::kMedian:
      spec.kind = stats::OrderedStat::kMedian;
      break;
    case Statistic::kMin:
      spec.kind = stats::OrderedStat::kMinimum;
      break;
    case Statistic::kMax:
      spec.kind = stats::OrderedStat::kMaximum;
      break;
    case Statistic::kVariance:
      throw std::logic_error("variance has no ordered-statistic spec");
  }
  spec.empty_value = anchor;
  spec.alpha = config.alpha;
  return spec;
}

double resolve_anchor(const RunConfig& config) {
  if (config.mu_hat && config.empty_value) {
    throw std::invalid_argument(
        "--mu-hat and --empty-value both set; they are synonyms, pick one");
  }
  const double anchor =
      config.mu_hat ? *config.mu_hat : config.empty_value.value_or(0.0);
  if (!std::isfinite(anchor)) {
    throw std::invalid_argument("empty-database anchor must be finite");
  }
  if (config.statistic == Statistic::kVariance && anchor != 0.0) {
    throw std::invalid_argument(
        "variance anchors the empty database at 0; drop the anchor flag");
  }
  return anchor;
}

SensitivityBounds resolve_bounds(const RunConfig& config) {
  SensitivityBounds bounds;
  bool any = false;
  if (config.delta) {
    bounds.set_default(*config.delta);  // validates >= 0
    any = true;
  }
  if (!config.delta_file.empty()) {
    const BudgetFile file = read_budget_file(config.delta_file, "delta");
    if (file.default_value) bounds.set_default(*file.default_value);
    for (const auto& [id, v] : file.entries) bounds.set(id, v);
    any = true;
  }
  if (!any) {
    throw std::invalid_argument(
        "a sensitivity budget is required (--delta or --delta-file)");
  }
  return bounds;
}

// The O(n^2) recursions assume one shared Delta; heterogeneous budgets need
// the general subset recursion.
double uniform_delta(const SensitivityBounds& bounds, const Database& d) {
  std::optional<double> value = bounds.default_delta();
  const auto consider = [&value](double v) {
    if (!value) {
      value = v;
    } else if (*value != v) {
      throw std::invalid_argument(
          "per-individual budgets differ; rerun with --general");
    }
  };
  for (const auto& [id, v] : bounds.per_individual()) consider(v);
  for (const Record& r : d.records()) consider(bounds.delta_for(r.individual_id));
  if (!value) {
    throw std::invalid_argument(
        "a sensitivity budget is required (--delta or --delta-file)");
  }
  return *value;
}

double compute_general(const RunConfig& config, double anchor,
                       const SensitivityBounds& bounds, const Database& d) {
  FunctionOracle oracle;
  oracle.empty_value = anchor;
  if (config.statistic == Statistic::kVariance) {
    oracle.evaluate = [](const Database& sub) { return stats::variance(sub); };
  } else {
    const stats::OrderedStatSpec spec = make_spec(config, anchor);
    oracle.evaluate = [spec](const Database& sub) {
      return stats::evaluate(spec, sub);
    };
  }
  core::PreprocessOptions options;
  options.max_n = config.max_n;
  return core::preprocess(oracle, bounds, d, options).g_value;
}

}  // namespace

std::string statistic_name(Statistic s) {
  switch (s) {
    case Statistic::kMean:
      return "mean";
    case Statistic::kTrimmedMean:
      return "trimmed_mean";
    case Statistic::kMedian:
      return "median";
    case Statistic::kMin:
      return "min";
    case Statistic::kMax:
      return "max";
    case Statistic::kVariance:
      return "variance";
  }
  return "unknown";
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const ParsedInput parsed = read_input(config.input_path);
    if (parsed.two_d) {
      throw CsvError(
          "input has schema id,x1,x2 but the requested statistic is "
          "one-dimensional; supply id,value rows");
    }
    const Database d(parsed.rows);

    const double anchor = resolve_anchor(config);
    const SensitivityBounds bounds = resolve_bounds(config);

    Report report;
    report.statistic = statistic_name(config.statistic);
    report.n = d.size();
    report.seed = config.seed;

    if (config.statistic == Statistic::kVariance) {
      if (!d.empty()) report.raw_value = stats::variance(d);
    } else {
      const stats::OrderedStatSpec spec = make_spec(config, anchor);
      if (!d.empty()) report.raw_value = stats::evaluate(spec, d);
    }

    if (config.general) {
      report.g_value = compute_general(config, anchor, bounds, d);
      // The closed-form bounds still apply when the budget is uniform.
      std::optional<double> shared;
      try {
        shared = uniform_delta(bounds, d);
      } catch (const std::invalid_argument&) {
      }
      if (shared && !d.empty()) {
        if (config.statistic == Statistic::kMean) {
          report.error_bound = stats::mean_error_bound(anchor, *shared, d);
        } else if (config.statistic == Statistic::kVariance) {
          report.error_bound = stats::variance_error_bound(*shared, d);
        }
      }
    } else {
      const double delta = uniform_delta(bounds, d);
      if (config.statistic == Statistic::kVariance) {
        report.g_value = stats::preprocess_variance(delta, d);
        if (!d.empty()) {
          report.error_bound = stats::variance_error_bound(delta, d);
        }
      } else {
        const stats::OrderedStatSpec spec = make_spec(config, anchor);
        report.g_value = stats::preprocess_ordered(spec, delta, d);
        if (config.statistic == Statistic::kMean && !d.empty()) {
          report.error_bound = stats::mean_error_bound(anchor, delta, d);
        }
      }
    }

    if (!config.epsilon_file.empty()) {
      const BudgetFile file = read_budget_file(config.epsilon_file, "epsilon");
      mechanisms::PersonalEpsilons eps;
      if (file.default_value) eps.set_default(*file.default_value);
      for (const auto& [id, v] : file.entries) eps.set(id, v);
      report.noise_scale = mechanisms::noise_scale(bounds, eps);
      mechanisms::UniformRng rng(config.seed);
      report.noised_value =
          mechanisms::laplace_mechanism(report.g_value, bounds, eps, rng);
    }

    if (config.json) {
      write_json(report, out);
    } else {
      write_table(report, out);
    }
    return kExitOk;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformedInput;
  } catch (const SizeLimitError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSizeCap;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidParameters;
  }
}

}  // namespace spf::cli

#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "auclab/accuracy.hpp"
#include "auclab/boosting.hpp"
#include "auclab/consistency.hpp"
#include "auclab/distribution.hpp"
#include "auclab/optimizer.hpp"
#include "auclab/regret.hpp"

namespace auclab {

/// Malformed input files and config values; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<double> as_vector(const ScoreVector& f) { return {f.values().begin(), f.values().end()}; }

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::vector<double> number_array(const nlohmann::json& j, const std::string& field) {
  if (!j.contains(field)) throw ConfigError("missing field '" + field + "'");
  const auto& arr = j.at(field);
  if (!arr.is_array()) throw ConfigError("field '" + field + "' must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ConfigError("field '" + field + "'[" + std::to_string(i) + "] is not a number");
    out.push_back(arr[i].get<double>());
  }
  return out;
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError("expected a JSON object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError("unknown key '" + item.key() + "'");
    }
  }
}

inline nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace detail

/// {"marginal": [...], "eta": [...]}; other keys are rejected.
inline DiscreteDistribution distribution_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, {"marginal", "eta"});
  auto marginal = detail::number_array(j, "marginal");
  auto eta = detail::number_array(j, "eta");
  try {
    return DiscreteDistribution(std::move(marginal), std::move(eta));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

inline DiscreteDistribution load_distribution(const std::string& path) {
  try {
    return distribution_from_json(detail::parse_file(path));
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ConfigError(path + ": " + msg);
  }
}

inline nlohmann::json to_json(const DiscreteDistribution& d) {
  return {{"marginal", std::vector<double>(d.marginal().begin(), d.marginal().end())},
          {"eta", std::vector<double>(d.eta().begin(), d.eta().end())}};
}

/// Optional keys max_iters, tol, radius, seed; anything else is rejected.
inline OptimizerConfig optimizer_config_from_json(const nlohmann::json& j, OptimizerConfig base = {}) {
  detail::reject_unknown_keys(j, {"max_iters", "tol", "radius", "seed"});
  auto number = [&](const char* key) {
    if (!j.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' is not a number");
    return j.at(key).get<double>();
  };
  if (j.contains("max_iters")) {
    if (!j.at("max_iters").is_number_unsigned()) throw ConfigError("field 'max_iters' must be a positive integer");
    base.max_iters = j.at("max_iters").get<std::size_t>();
  }
  if (j.contains("tol")) base.tol = number("tol");
  if (j.contains("radius")) base.radius = number("radius");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("field 'seed' must be a nonnegative integer");
    base.seed = j.at("seed").get<std::uint64_t>();
  }
  if (!(base.radius > 0.0) || !(base.tol > 0.0) || base.max_iters == 0) {
    throw ConfigError("optimizer config needs radius > 0, tol > 0, max_iters > 0");
  }
  return base;
}

inline OptimizerConfig load_optimizer_config(const std::string& path) {
  try {
    return optimizer_config_from_json(detail::parse_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Comma-separated rows with a header; doubles in %.17g.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out) { write(header); }

  void write(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

inline std::string join(const std::vector<double>& v, char sep = ';') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_double(v[i]);
  }
  return s;
}

/// trial, n, lhs, rhs, slack, then the seed. A non-empty `id_column` adds
/// the check id under that name right after the trial.
inline void write_bound_csv(std::ostream& out, const std::vector<BoundCheck>& checks,
                            const std::string& id_column = "") {
  std::vector<std::string> header{"trial"};
  if (!id_column.empty()) header.push_back(id_column);
  for (const char* h : {"n", "lhs", "rhs", "slack", "seed"}) header.emplace_back(h);
  CsvWriter w(out, header);
  for (const auto& c : checks) {
    std::vector<std::string> row{std::to_string(c.trial)};
    if (!id_column.empty()) row.push_back(c.id);
    row.push_back(std::to_string(c.n()));
    row.push_back(format_double(c.lhs));
    row.push_back(format_double(c.rhs));
    row.push_back(format_double(c.slack));
    row.push_back(std::to_string(c.seed));
    w.write(row);
  }
}

inline nlohmann::json to_json(const BoundCheck& c) {
  return {{"trial", c.trial}, {"seed", c.seed},         {"id", c.id},   {"loss", c.loss},
          {"lhs", c.lhs},     {"rhs", c.rhs},           {"slack", c.slack}, {"marginal", c.marginal},
          {"eta", c.eta},     {"scores", c.scores}};
}

inline nlohmann::json to_json(const CalibrationReport& r) {
  return {{"loss", r.loss.name()},
          {"p", r.p},
          {"grid_lo", r.grid_lo},
          {"grid_hi", r.grid_hi},
          {"resolution", r.resolution},
          {"cells", r.grid.size()},
          {"min_margin", r.min_margin},
          {"worst_cell", {r.worst_cell.first, r.worst_cell.second}},
          {"calibrated", r.calibrated}};
}

inline nlohmann::json to_json(const CounterexampleReport& r) {
  return {{"construction", to_string(r.construction)},
          {"etas", r.etas},
          {"constraints_ok", r.constraints_ok},
          {"kappa0", r.kappa0},
          {"kappa1", r.kappa1},
          {"closed_form_optimum", r.closed_form_optimum},
          {"numeric_optimum", r.numeric_optimum},
          {"suboptimal_value", r.suboptimal_value},
          {"strict_gap", r.strict_gap},
          {"closed_form_gap", r.closed_form_gap},
          {"sequence_phi_risk", r.sequence_phi_risk},
          {"persistent_auc_regret", r.persistent_auc_regret},
          {"closed_form_auc_regret", r.closed_form_auc_regret},
          {"numeric_minimizer", as_vector(r.numeric_minimizer)}};
}

inline nlohmann::json to_json(const Lemma2Gap& g) {
  return {{"inf_full", g.inf_full}, {"pointwise_bound", g.pointwise_bound}, {"gap", g.gap}};
}

inline nlohmann::json to_json(const AttainmentReport& r) {
  return {{"scores", as_vector(r.scores)},
          {"constructed_risk", r.constructed_risk},
          {"pointwise_bound", r.pointwise_bound}};
}

inline nlohmann::json to_json(const EquivalenceRow& r) {
  return {{"size", r.size},         {"trial", r.trial},       {"seed", r.seed},
          {"auc_ada", r.auc_ada},   {"auc_rank", r.auc_rank}, {"auc_gap", r.auc_gap},
          {"acc_ada", r.acc_ada},   {"acc_rank", r.acc_rank}, {"acc_gap", r.acc_gap},
          {"acc_rank_best", r.acc_rank_best}, {"acc_gap_best", r.acc_gap_best}};
}

}  // namespace auclab

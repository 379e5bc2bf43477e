#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "auclab/auclab.hpp"
#include "auclab/io.hpp"

namespace {

using namespace auclab;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct Options {
  bool json = false;
  std::string config;
  std::string dist;
  std::string out;

  std::string loss;
  std::vector<std::string> losses;
  std::size_t trials = 1000;
  std::uint64_t seed = 42;
  bool realizable = false;
  std::size_t resolution = 25;
  std::string etas;
  std::string sizes = "100,1000,10000";
  std::size_t rounds = 100;
  std::size_t test_size = 10000;
  std::string generator = "gaussian";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError(std::string("bad value '") + item + "' in " + what);
    out.push_back(v);
  }
  return out;
}

OptimizerConfig optimizer_config(const Options& o) {
  return o.config.empty() ? OptimizerConfig{} : load_optimizer_config(o.config);
}

DiscreteDistribution fixture_or_file(const Options& o) {
  if (!o.dist.empty()) return load_distribution(o.dist);
  return DiscreteDistribution::uniform({0.4, 0.45, 0.55});
}

SurrogateLoss parse_loss(const std::string& text) {
  try {
    return SurrogateLoss::parse(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Opens --out before any computation so a bad path fails fast.
std::ofstream open_out(const Options& o) {
  std::ofstream f;
  if (o.out.empty()) return f;
  f.open(o.out);
  if (!f) throw ConfigError("cannot write '" + o.out + "'");
  return f;
}

void print(const Options& o, const json& j) {
  if (o.json) std::cout << j.dump(2) << '\n';
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void row(const std::string& key, const std::string& value) {
  std::printf("  %-26s %s\n", key.c_str(), value.c_str());
}

int report_violations(const std::vector<BoundCheck>& checks, double tolerance = kBoundTolerance) {
  int bad = 0;
  for (const auto& c : checks) {
    if (!c.holds(tolerance)) {
      std::cerr << "violation: " << to_json(c).dump() << '\n';
      ++bad;
    }
  }
  return bad;
}

int run_calibration(const Options& o) {
  std::vector<SurrogateLoss> losses;
  if (o.losses.empty()) {
    losses = SurrogateLoss::catalogue();
  } else {
    for (const auto& s : o.losses) losses.push_back(parse_loss(s));
  }
  json all = json::array();
  bool ok = true;
  if (!o.json) std::printf("%-14s %-18s %s\n", "loss", "min(H^- - H)", "calibrated");
  for (const auto& phi : losses) {
    const CalibrationReport r = calibration_check(phi, o.resolution);
    ok = ok && r.calibrated;
    all.push_back(to_json(r));
    if (!o.json) std::printf("%-14s %-18s %s\n", phi.name().c_str(), fmt(r.min_margin).c_str(), r.calibrated ? "yes" : "no");
  }
  print(o, all);
  return ok ? kOk : kViolation;
}

int run_counterexample(const Options& o, Construction which) {
  const auto e = parse_list(o.etas, "--etas");
  if (e.size() != 3) throw UsageError("--etas needs three values");
  const CounterexampleReport r = which == Construction::hinge ? hinge_counterexample(e[0], e[1], e[2], optimizer_config(o))
                                                              : absolute_counterexample(e[0], e[1], e[2], optimizer_config(o));
  if (!r.constraints_ok) throw UsageError("etas violate the " + to_string(which) + " construction constraints");
  const bool match = std::abs(r.numeric_optimum - r.closed_form_optimum) <= 1e-8 && r.strict_gap > 0.0 &&
                     std::abs(r.strict_gap - r.closed_form_gap) <= 1e-8 &&
                     std::abs(r.persistent_auc_regret - r.closed_form_auc_regret) <= 1e-10;
  if (o.json) {
    print(o, to_json(r));
  } else {
    std::printf("%s counterexample\n", to_string(which).c_str());
    row("constraints_ok", r.constraints_ok ? "true" : "false");
    row("kappa0", fmt(r.kappa0));
    row("kappa1", fmt(r.kappa1));
    row("closed_form_optimum", fmt(r.closed_form_optimum));
    row("numeric_optimum", fmt(r.numeric_optimum));
    row("strict_gap", fmt(r.strict_gap));
    row("closed_form_gap", fmt(r.closed_form_gap));
    row("persistent_auc_regret", fmt(r.persistent_auc_regret));
    row("closed_form_auc_regret", fmt(r.closed_form_auc_regret));
  }
  if (!match) {
    std::cerr << "mismatch: " << to_json(r).dump() << '\n';
    return kViolation;
  }
  return kOk;
}

int run_lemma2(const Options& o) {
  const auto d = fixture_or_file(o);
  std::vector<SurrogateLoss> losses;
  if (o.losses.empty()) {
    losses = SurrogateLoss::catalogue();
  } else {
    for (const auto& s : o.losses) losses.push_back(parse_loss(s));
  }
  json all = json::array();
  if (!o.json) std::printf("%-14s %-16s %-16s %s\n", "loss", "inf R_phi", "E[H]", "gap");
  for (const auto& phi : losses) {
    const Lemma2Gap g = lemma2_gap_check(phi, d, optimizer_config(o));
    json j = to_json(g);
    j["loss"] = phi.name();
    all.push_back(j);
    if (!o.json) {
      std::printf("%-14s %-16s %-16s %s\n", phi.name().c_str(), fmt(g.inf_full).c_str(), fmt(g.pointwise_bound).c_str(),
                  fmt(g.gap).c_str());
    }
  }
  print(o, all);
  return kOk;
}

int run_attainment(const Options& o) {
  const auto d = fixture_or_file(o);
  const SurrogateLoss phi = parse_loss(o.loss.empty() ? "exp" : o.loss);
  AttainmentReport r;
  try {
    r = pointwise_attainment(d, phi);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const double diff = std::abs(r.constructed_risk - r.pointwise_bound);
  if (o.json) {
    json j = to_json(r);
    j["loss"] = phi.name();
    print(o, j);
  } else {
    std::printf("pointwise attainment (%s)\n", phi.name().c_str());
    row("constructed_risk", fmt(r.constructed_risk));
    row("pointwise_bound", fmt(r.pointwise_bound));
    row("difference", fmt(diff));
  }
  return diff <= 1e-9 ? kOk : kViolation;
}

void summarize(const Options& o, const std::string& title, const std::vector<BoundCheck>& checks, int violations) {
  double min_slack = INFINITY;
  for (const auto& c : checks) min_slack = std::min(min_slack, c.slack);
  if (o.json) {
    print(o, {{"suite", title}, {"trials", checks.size()}, {"violations", violations}, {"min_slack", min_slack}});
  } else {
    std::printf("%-24s checks %-6zu violations %-4d min slack %s\n", title.c_str(), checks.size(), violations,
                fmt(min_slack).c_str());
  }
}

int run_realizable_losses(const Options& o, const std::vector<SurrogateLoss>& losses) {
  const auto realizable = realizable_losses();
  for (const auto& phi : losses) {
    if (std::find(realizable.begin(), realizable.end(), phi) == realizable.end()) {
      throw UsageError("no realizable-setting bound for " + phi.name());
    }
  }
  auto out = open_out(o);
  std::vector<BoundCheck> all;
  int bad = 0;
  for (const auto& phi : losses) {
    const auto checks = verify_realizable_bounds(phi, o.trials, o.seed);
    const int v = report_violations(checks);
    bad += v;
    summarize(o, "realizable " + phi.name(), checks, v);
    all.insert(all.end(), checks.begin(), checks.end());
  }
  if (out.is_open()) write_bound_csv(out, all, "loss");
  return bad == 0 ? kOk : kViolation;
}

int run_realizable(const Options& o) {
  std::vector<SurrogateLoss> losses;
  if (o.losses.empty()) {
    losses = realizable_losses();
  } else {
    for (const auto& s : o.losses) losses.push_back(parse_loss(s));
  }
  return run_realizable_losses(o, losses);
}

int run_regret(const Options& o) {
  if (o.trials == 0) throw UsageError("--trials must be >= 1");
  const SurrogateLoss phi = parse_loss(o.loss.empty() ? "exp" : o.loss);
  if (o.realizable) return run_realizable_losses(o, {phi});
  if (phi.kind() != LossKind::exponential && phi.kind() != LossKind::logistic) {
    throw UsageError("no general regret bound for " + phi.name() + "; use --realizable");
  }
  const auto config = optimizer_config(o);
  auto out = open_out(o);
  const auto checks = phi.kind() == LossKind::exponential ? verify_exp_bound(o.trials, o.seed, config)
                                                          : verify_logistic_bound(o.trials, o.seed, config);
  const int bad = report_violations(checks);
  summarize(o, "regret " + phi.name(), checks, bad);
  if (out.is_open()) write_bound_csv(out, checks);
  return bad == 0 ? kOk : kViolation;
}

int run_bridge(const Options& o) {
  if (o.trials == 0) throw UsageError("--trials must be >= 1");
  auto out = open_out(o);
  const auto checks = verify_combined_chain(o.trials, o.seed);
  int bad = 0;
  for (const auto& id : chain_ids()) {
    std::vector<BoundCheck> subset;
    for (const auto& c : checks) {
      if (c.id == id) subset.push_back(c);
    }
    const int v = report_violations(subset);
    bad += v;
    summarize(o, "bridge " + id, subset, v);
  }
  if (out.is_open()) write_bound_csv(out, checks, "ineq_id");
  return bad == 0 ? kOk : kViolation;
}

int run_boost(const Options& o) {
  EquivalenceConfig config;
  config.sizes.clear();
  for (double s : parse_list(o.sizes, "--sizes")) {
    if (!(s >= 2.0) || s != std::floor(s)) throw UsageError("--sizes entries must be integers >= 2");
    config.sizes.push_back(static_cast<std::size_t>(s));
  }
  if (o.trials == 0 || o.rounds == 0) throw UsageError("--trials and --rounds must be >= 1");
  config.rounds = o.rounds;
  config.trials = o.trials;
  config.seed = o.seed;
  config.test_size = o.test_size;
  try {
    config.generator.kind = parse_generator(o.generator);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto out = open_out(o);
  const EquivalenceReport rep = equivalence_experiment(config);
  if (out.is_open()) {
    CsvWriter w(out, {"size", "trial", "seed", "auc_ada", "auc_rank", "auc_gap", "acc_ada", "acc_rank", "acc_gap",
                      "acc_rank_best", "acc_gap_best"});
    for (const auto& r : rep.rows) {
      w.write({std::to_string(r.size), std::to_string(r.trial), std::to_string(r.seed), format_double(r.auc_ada),
               format_double(r.auc_rank), format_double(r.auc_gap), format_double(r.acc_ada), format_double(r.acc_rank),
               format_double(r.acc_gap), format_double(r.acc_rank_best), format_double(r.acc_gap_best)});
    }
  }
  if (o.json) {
    json j = {{"sizes", config.sizes},
              {"median_auc_gap", rep.median_auc_gap},
              {"median_acc_gap", rep.median_acc_gap},
              {"median_acc_gap_best", rep.median_acc_gap_best},
              {"auc_trend_ok", rep.auc_trend_ok}};
    print(o, j);
  } else {
    std::printf("%-8s %-14s %-14s %s\n", "size", "median |dAUC|", "median |dACC|", "median |dACC| (best t)");
    for (std::size_t k = 0; k < config.sizes.size(); ++k) {
      std::printf("%-8zu %-14s %-14s %s\n", config.sizes[k], fmt(rep.median_auc_gap[k]).c_str(),
                  fmt(rep.median_acc_gap[k]).c_str(), fmt(rep.median_acc_gap_best[k]).c_str());
    }
    std::printf("AUC gap non-increasing: %s\n", rep.auc_trend_ok ? "yes" : "no");
  }
  return rep.auc_trend_ok ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AUC surrogate-consistency laboratory"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json, "Print reports as JSON");
  app.add_option("--config", o.config, "Optimizer config JSON")->check(CLI::ExistingFile);
  app.add_option("--dist", o.dist, "Distribution JSON {\"marginal\": [...], \"eta\": [...]}")->check(CLI::ExistingFile);

  auto* calibration = app.add_subcommand("calibration", "H^- - H on an (eta, eta') grid");
  calibration->add_option("--loss", o.losses, "Losses (default: catalogue)");
  calibration->add_option("--resolution", o.resolution, "Grid points per axis")->check(CLI::Range(3, 1000));

  auto* counterexample = app.add_subcommand("counterexample", "Three-point inconsistency constructions");
  counterexample->require_subcommand(1);
  auto* hinge = counterexample->add_subcommand("hinge", "Hinge-loss construction");
  auto* absolute = counterexample->add_subcommand("absolute", "Absolute-loss construction");
  for (auto* sub : {hinge, absolute}) sub->add_option("--etas", o.etas, "eta1,eta2,eta3")->required();

  auto* lemma2 = app.add_subcommand("lemma2", "inf R_phi against the pointwise bound");
  lemma2->add_option("--loss", o.losses, "Losses (default: catalogue)");

  auto* attainment = app.add_subcommand("attainment", "Closed-form optimum for exp/logistic");
  attainment->add_option("--loss", o.loss, "exp or logistic");

  auto* regret = app.add_subcommand("regret", "Square-root regret bounds");
  regret->add_option("--loss", o.loss, "exp or logistic");
  regret->add_option("--trials", o.trials);
  regret->add_option("--seed", o.seed);
  regret->add_flag("--realizable", o.realizable, "Check the realizable-setting bound instead");

  auto* realizable = app.add_subcommand("realizable", "Linear bounds on realizable distributions");
  realizable->add_option("--loss", o.losses, "Losses (default: all with a bound)");
  realizable->add_option("--trials", o.trials);
  realizable->add_option("--seed", o.seed);

  auto* bridge = app.add_subcommand("bridge", "AUC/accuracy regret chain");
  bridge->add_option("--trials", o.trials);
  bridge->add_option("--seed", o.seed);

  auto* boost = app.add_subcommand("boost", "AdaBoost vs RankBoost equivalence");
  boost->add_option("--sizes", o.sizes, "Comma-separated training sizes");
  boost->add_option("--rounds", o.rounds);
  boost->add_option("--trials", o.trials)->default_val(20);
  boost->add_option("--seed", o.seed);
  boost->add_option("--test-size", o.test_size);
  boost->add_option("--generator", o.generator, "gaussian, separable or identical");

  for (auto* sub : {regret, realizable, bridge, boost}) sub->add_option("--out", o.out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (calibration->parsed()) return run_calibration(o);
    if (hinge->parsed()) return run_counterexample(o, Construction::hinge);
    if (absolute->parsed()) return run_counterexample(o, Construction::absolute);
    if (lemma2->parsed()) return run_lemma2(o);
    if (attainment->parsed()) return run_attainment(o);
    if (regret->parsed()) return run_regret(o);
    if (realizable->parsed()) return run_realizable(o);
    if (bridge->parsed()) return run_bridge(o);
    if (boost->parsed()) return run_boost(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kViolation;
  }
  return kUsage;
}

#include "cfrag/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "cfrag/errors.hpp"
#include "cfrag/lyapunov.hpp"
#include "cfrag/one_enzyme.hpp"
#include "cfrag/report_json.hpp"
#include "cfrag/rng.hpp"
#include "cfrag/simulator.hpp"

namespace cfrag {

using nlohmann::json;

namespace {

// threshold-scan
constexpr double kScanKappaF[] = {1.9, 2.0, 2.1};
constexpr double kScanHorizon = 100.0;
constexpr double kScanEmptyAfter = 10.0;
constexpr std::size_t kScanTrajectories = 100;
constexpr std::uint64_t kScanBudget = 100'000'000;
constexpr double kScanMinEmptyFraction = 0.8;
constexpr double kScanMinMassRatio = 5.0;

// duso-zechner
constexpr double kDzHorizon = 200.0;
constexpr double kDzPoissonRate = 5.0;
constexpr std::size_t kDzTrajectories = 100;
constexpr double kDzReturnAfter = 1.0;
constexpr double kDzMinReturnFraction = 0.95;
constexpr double kDzWindowTolerance = 0.10;
constexpr double kDzWindows[][2] = {{50.0, 100.0}, {100.0, 150.0}, {150.0, 200.0}};

// explosivity-probe
constexpr double kProbeAlpha = 1.0;
constexpr double kProbeExplosiveP = 0.6;
constexpr double kProbeRecurrentP = 0.2;
constexpr Count kProbeInitial = 100;
constexpr std::size_t kProbeSeeds = 50;
constexpr std::uint64_t kProbeExplosiveBudget = 1'000'000;
constexpr std::uint64_t kProbeRecurrentBudget = 100'000;
constexpr Count kProbeReturnLevel = 10;
constexpr std::uint64_t kProbeMinReturns = 100;
constexpr double kProbeMinFraction = 0.9;

// projection-crn
constexpr std::size_t kProjectionTrajectories = 20;
constexpr double kProjectionHorizon = 10.0;
constexpr std::uint64_t kProjectionBudget = 1'000'000;

std::string str(double v) { return format_real(v); }
std::string str(std::uint64_t v) { return std::to_string(v); }

ModelConfig scan_config(double kappa_f) {
  const Model4Params p{1.0, 1.0, 1.0, 1.0, kappa_f, 0.0, 0.0};
  ModelConfig c{make_model4(p, InflowDistribution::point_mass({0}), FragmentationKernel::binomial_half()), {}};
  c.simulation.t_max = kScanHorizon;
  c.simulation.event_budget = kScanBudget;
  c.simulation.trajectories = kScanTrajectories;
  c.simulation.initial = PopulationState(1);
  return c;
}

ModelConfig duso_zechner_config() {
  const Model4Params p{0.0, 0.0, 1.0, 1.0, 1.0, 0.1, kDzPoissonRate};
  ModelConfig c{make_model4(p, InflowDistribution::poisson_product({kDzPoissonRate}),
                            FragmentationKernel::uniform_unordered_pairs()),
                {}};
  c.simulation.t_max = kDzHorizon;
  c.simulation.trajectories = kDzTrajectories;
  for (int t = 0; t <= static_cast<int>(kDzHorizon); ++t) c.simulation.grid.push_back(t);
  c.simulation.initial = PopulationState(1);
  return c;
}

bool is_empty(const PopulationState& n) { return n.empty(); }

ExperimentResult threshold_scan(std::uint64_t master_seed, unsigned threads) {
  ExperimentResult out;
  out.columns = {"kappa_F", "trajectory", "seed", "final_time", "events", "stop_reason", "final_C",
                 "final_mass", "empty_visits_after_10", "first_empty_after_10"};
  json ensembles = json::array();
  double empty_19 = 0.0, mass_19 = 0.0, mass_21 = 0.0;
  for (double kf : kScanKappaF) {
    const ModelConfig cfg = scan_config(kf);
    StopCondition stop;
    stop.t_max = cfg.simulation.t_max;
    stop.event_budget = cfg.simulation.event_budget;
    RunOptions opt;
    opt.hits.push_back({"empty_after_10", is_empty, kScanEmptyAfter});
    const EnsembleResult res =
        run_ensemble(cfg.model, cfg.simulation.initial, stop, master_seed, cfg.simulation.trajectories, opt, threads);
    for (std::size_t i = 0; i < res.reports.size(); ++i) {
      const auto& r = res.reports[i];
      out.rows.push_back({str(kf), str(i), str(r.seed), str(r.final_time), str(r.event_count),
                          std::string(to_string(r.stop_reason)), str(total_compartments(r.final_state)),
                          str(population_mass(r.final_state)), str(r.hits[0].visits),
                          r.hits[0].first_time ? str(*r.hits[0].first_time) : ""});
    }
    const double frac = res.summary.hit_fraction[0];
    if (kf == 1.9) {
      empty_19 = frac;
      mass_19 = res.summary.median_final_mass;
    }
    if (kf == 2.1) mass_21 = res.summary.median_final_mass;
    ensembles.push_back({{"kappa_F", kf},
                         {"fraction_visiting_empty_after_10", frac},
                         {"median_final_mass", res.summary.median_final_mass},
                         {"median_final_compartments", res.summary.median_final_compartments},
                         {"assertion", kf == 2.0 ? "reported only" : "checked"}});
  }
  const bool check_empty = empty_19 >= kScanMinEmptyFraction;
  const bool check_mass = mass_21 >= kScanMinMassRatio * mass_19;
  out.passed = check_empty && check_mass;
  out.aggregate = {{"ensembles", ensembles},
                   {"outcome",
                    {{"tag", "returns_to_empty_below_threshold_growth_above"},
                     {"empty_fraction_at_1.9", empty_19},
                     {"required_empty_fraction", kScanMinEmptyFraction},
                     {"mass_ratio_2.1_over_1.9", mass_19 > 0.0 ? json(mass_21 / mass_19) : json(nullptr)},
                     {"required_mass_ratio", kScanMinMassRatio},
                     {"passed", out.passed}}}};
  return out;
}

ExperimentResult duso_zechner(std::uint64_t master_seed, unsigned threads) {
  ExperimentResult out;
  out.columns = {"trajectory", "seed", "final_time", "events", "final_C", "final_mass", "empty_visits",
                 "first_empty", "mean_C_50_100", "mean_C_100_150", "mean_C_150_200"};
  const ModelConfig cfg = duso_zechner_config();
  StopCondition stop;
  stop.t_max = cfg.simulation.t_max;
  RunOptions opt;
  opt.grid = cfg.simulation.grid;
  opt.hits.push_back({"empty", is_empty, kDzReturnAfter});
  const EnsembleResult res =
      run_ensemble(cfg.model, cfg.simulation.initial, stop, master_seed, cfg.simulation.trajectories, opt, threads);

  auto window_mean = [](const std::vector<GridPoint>& grid, double lo, double hi) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& g : grid) {
      if (g.time >= lo && g.time < hi) {
        s += static_cast<double>(g.compartments);
        ++n;
      }
    }
    return n > 0 ? s / static_cast<double>(n) : std::nan("");
  };
  std::vector<double> window_sums(std::size(kDzWindows), 0.0);
  for (std::size_t i = 0; i < res.reports.size(); ++i) {
    const auto& r = res.reports[i];
    std::vector<std::string> row = {str(i), str(r.seed), str(r.final_time), str(r.event_count),
                                    str(total_compartments(r.final_state)), str(population_mass(r.final_state)),
                                    str(r.hits[0].visits), r.hits[0].first_time ? str(*r.hits[0].first_time) : ""};
    for (std::size_t w = 0; w < std::size(kDzWindows); ++w) {
      const double m = window_mean(r.grid, kDzWindows[w][0], kDzWindows[w][1]);
      window_sums[w] += m;
      row.push_back(str(m));
    }
    out.rows.push_back(std::move(row));
  }
  std::vector<double> means;
  for (double s : window_sums) means.push_back(s / static_cast<double>(res.reports.size()));
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  const double spread = *lo > 0.0 ? *hi / *lo - 1.0 : std::numeric_limits<double>::infinity();
  const double ret = res.summary.hit_fraction[0];
  out.passed = spread <= kDzWindowTolerance && ret >= kDzMinReturnFraction;
  out.aggregate = {{"parameters", model_to_json(cfg.model)},
                   {"summary", summary_to_json(cfg.model, res.summary)},
                   {"outcome",
                    {{"tag", "positive_recurrent"},
                     {"window_mean_C", means},
                     {"window_relative_spread", spread},
                     {"allowed_spread", kDzWindowTolerance},
                     {"fraction_returning_to_empty", ret},
                     {"required_return_fraction", kDzMinReturnFraction},
                     {"passed", out.passed}}}};
  return out;
}

ExperimentResult explosivity_probe(std::uint64_t master_seed) {
  ExperimentResult out;
  out.columns = {"p", "trajectory", "seed", "final_time", "events", "stop_reason", "suspected_explosion",
                 "returns_below_10", "max_substrate", "final_substrate"};
  std::size_t fast_budget = 0, many_returns = 0;
  for (double p : {kProbeExplosiveP, kProbeRecurrentP}) {
    const bool explosive = p == kProbeExplosiveP;
    const OneEnzymeStop stop{std::nullopt, explosive ? kProbeExplosiveBudget : kProbeRecurrentBudget};
    for (std::size_t i = 0; i < kProbeSeeds; ++i) {
      const OneEnzymeReport r =
          run_one_enzyme_chain(kProbeAlpha, p, kProbeInitial, stop, derive_seed(master_seed, i), kProbeReturnLevel);
      if (explosive && r.stop_reason == StopReason::budget && r.final_time < 1.0) ++fast_budget;
      if (!explosive && r.returns_below >= kProbeMinReturns) ++many_returns;
      out.rows.push_back({str(p), str(i), str(r.seed), str(r.final_time), str(r.event_count),
                          std::string(to_string(r.stop_reason)), r.suspected_explosion ? "1" : "0",
                          str(r.returns_below), str(r.max_substrate), str(r.final_substrate)});
    }
  }
  const double n = static_cast<double>(kProbeSeeds);
  const double f_exp = static_cast<double>(fast_budget) / n;
  const double f_rec = static_cast<double>(many_returns) / n;
  out.passed = f_exp >= kProbeMinFraction && f_rec >= kProbeMinFraction;
  out.aggregate = {{"alpha", kProbeAlpha},
                   {"initial_substrate", kProbeInitial},
                   {"outcome",
                    {{"tag", "explosive_above_exp_minus_alpha"},
                     {"explosive_p", kProbeExplosiveP},
                     {"fraction_budget_exhausted_before_t1", f_exp},
                     {"recurrent_p", kProbeRecurrentP},
                     {"fraction_with_100_returns", f_rec},
                     {"required_fraction", kProbeMinFraction},
                     {"passed", out.passed}}}};
  return out;
}

ExperimentResult projection_crn(std::uint64_t master_seed) {
  ExperimentResult out;
  out.columns = {"trajectory", "seed", "final_time", "events", "stop_reason", "suspected_explosion", "X", "E", "S"};
  const ReactionNetwork net({"X", "E", "S"}, {Reaction{{2, 0, 0}, {1, 0, 0}, 1.0},
                                              Reaction{{1, 0, 0}, {1, 1, 0}, 1.0},
                                              Reaction{{0, 1, 1}, {0, 1, 2}, 1.0},
                                              Reaction{{0, 0, 1}, {1, 0, 1}, 1.0}});
  const CrnStopCondition stop{kProjectionHorizon, kProjectionBudget, nullptr};
  std::size_t flagged = 0;
  std::vector<double> final_s;
  for (std::size_t i = 0; i < kProjectionTrajectories; ++i) {
    const CrnRunReport r = simulate_crn(net, {1, 0, 1}, stop, derive_seed(master_seed, i));
    if (r.suspected_explosion) ++flagged;
    final_s.push_back(static_cast<double>(r.final_state[2]));
    out.rows.push_back({str(i), str(r.seed), str(r.final_time), str(r.event_count),
                        std::string(to_string(r.stop_reason)), r.suspected_explosion ? "1" : "0",
                        str(r.final_state[0]), str(r.final_state[1]), str(r.final_state[2])});
  }
  out.aggregate = {{"outcome",
                    {{"tag", "reported_only"},
                     {"suspected_explosion_fraction",
                      static_cast<double>(flagged) / static_cast<double>(kProjectionTrajectories)},
                     {"median_final_S", median(final_s)}}}};
  return out;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"threshold-scan", "duso-zechner", "explosivity-probe",
                                                 "projection-crn"};
  return names;
}

std::vector<ModelConfig> preset_configs(const std::string& name) {
  if (name == "threshold-scan") {
    std::vector<ModelConfig> out;
    for (double kf : kScanKappaF) out.push_back(scan_config(kf));
    return out;
  }
  if (name == "duso-zechner") return {duso_zechner_config()};
  if (name == "explosivity-probe" || name == "projection-crn") return {};
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

ExperimentResult run_experiment(const std::string& name, std::uint64_t master_seed, unsigned threads) {
  ExperimentResult out;
  if (name == "threshold-scan") {
    out = threshold_scan(master_seed, threads);
  } else if (name == "duso-zechner") {
    out = duso_zechner(master_seed, threads);
  } else if (name == "explosivity-probe") {
    out = explosivity_probe(master_seed);
  } else if (name == "projection-crn") {
    out = projection_crn(master_seed);
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "'");
  }
  out.preset = name;
  out.master_seed = master_seed;
  out.aggregate["preset"] = name;
  out.aggregate["master_seed"] = master_seed;
  return out;
}

std::string rows_to_csv(const ExperimentResult& result) {
  std::string csv;
  for (std::size_t i = 0; i < result.columns.size(); ++i) csv += (i ? "," : "") + result.columns[i];
  csv += "\n";
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) csv += (i ? "," : "") + row[i];
    csv += "\n";
  }
  return csv;
}

}  // namespace cfrag

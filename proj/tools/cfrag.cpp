// cfrag: simulate, drift-check, classify and run experiment presets.
//
// Exit status: 0 success / no violation, 1 violation or failed outcome,
// 2 usage or configuration error.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cfrag/config.hpp"
#include "cfrag/errors.hpp"
#include "cfrag/experiments.hpp"
#include "cfrag/lyapunov.hpp"
#include "cfrag/regime.hpp"
#include "cfrag/report_json.hpp"
#include "cfrag/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_max;
  std::optional<std::uint64_t> event_budget;
  std::string grid;
  std::string out;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path out_dir(const CommonFlags& f) {
  if (!f.out.empty()) return f.out;
  if (const char* env = std::getenv("CFRAG_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cfrag::Error("cannot write " + path.string());
  out << text;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !(v >= 0.0)) throw UsageError("--grid: bad time '" + item + "'");
    grid.push_back(v);
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] < grid[i - 1]) throw UsageError("--grid: times must be non-decreasing");
  }
  return grid;
}

// "name:key=value,key=value" -> (name, {key: value}).
std::pair<std::string, std::map<std::string, std::string>> parse_spec(const std::string& spec,
                                                                      const char* flag) {
  std::map<std::string, std::string> params;
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    std::string last_key;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        // Continuation of a vector value such as w=1,1.
        if (last_key.empty()) throw UsageError(std::string(flag) + ": expected key=value in '" + item + "'");
        params[last_key] += "," + item;
        continue;
      }
      last_key = item.substr(0, eq);
      params[last_key] = item.substr(eq + 1);
    }
  }
  return {name, params};
}

double number_param(const std::map<std::string, std::string>& params, const std::string& key, double fallback,
                    const char* flag) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string(flag) + ": bad number for " + key);
}

std::vector<double> vector_param(const std::map<std::string, std::string>& params, const std::string& key,
                                 const char* flag) {
  auto it = params.find(key);
  if (it == params.end()) throw UsageError(std::string(flag) + ": missing " + key);
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": bad number in " + key);
    }
  }
  return out;
}

void reject_unknown(const std::map<std::string, std::string>& params, std::initializer_list<const char*> keys,
                    const char* flag) {
  for (const auto& [k, v] : params) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) throw UsageError(std::string(flag) + ": unknown parameter '" + k + "'");
  }
}

cfrag::ModelConfig load(const CommonFlags& f) {
  if (f.config.empty()) throw UsageError("--config is required");
  cfrag::ModelConfig cfg = cfrag::load_config(f.config);
  if (f.seed) cfg.simulation.seed = *f.seed;
  if (f.t_max) cfg.simulation.t_max = *f.t_max;
  if (f.event_budget) cfg.simulation.event_budget = *f.event_budget;
  if (!f.grid.empty()) cfg.simulation.grid = parse_grid(f.grid);
  return cfg;
}

int cmd_simulate(const CommonFlags& flags) {
  const cfrag::ModelConfig cfg = load(flags);
  const auto& model = cfg.model;
  const auto& chem = model.chemistry();
  if (!cfg.simulation.t_max && !cfg.simulation.event_budget) {
    throw UsageError("simulate needs simulation.t_max or simulation.event_budget (or --t-max / --event-budget)");
  }
  cfrag::StopCondition stop;
  stop.t_max = cfg.simulation.t_max;
  stop.event_budget = cfg.simulation.event_budget;

  const bool with_s_hat = model.enzyme_pair().has_value() && chem.dimension() == 2;
  std::string csv = "time,event_kind,C";
  for (const auto& s : chem.species()) csv += "," + s;
  if (with_s_hat) csv += ",S_hat";
  csv += "\n";
  auto row = [&](double t, std::string_view kind, cfrag::Count c, const std::vector<cfrag::Count>& totals,
                 std::optional<cfrag::Count> s_hat) {
    csv += cfrag::format_real(t);
    csv += ',';
    csv += kind;
    csv += ',' + std::to_string(c);
    for (auto v : totals) csv += ',' + std::to_string(v);
    if (with_s_hat) csv += ',' + std::to_string(s_hat.value_or(0));
    csv += '\n';
  };
  {
    std::vector<cfrag::Count> totals;
    for (std::size_t i = 0; i < chem.dimension(); ++i) totals.push_back(cfrag::species_total(cfg.simulation.initial, i));
    std::optional<cfrag::Count> s_hat;
    if (with_s_hat) {
      s_hat = cfrag::substrate_without_enzyme(cfg.simulation.initial, model.enzyme_pair()->first,
                                              model.enzyme_pair()->second);
    }
    row(0.0, "initial", cfrag::total_compartments(cfg.simulation.initial), totals, s_hat);
  }

  cfrag::RunOptions options;
  options.grid = cfg.simulation.grid;
  options.hits.push_back({"empty_after_10", [](const cfrag::PopulationState& n) { return n.empty(); }, 10.0});
  options.observer = [&](const cfrag::EventRecord& e) {
    row(e.time, cfrag::to_string(e.kind), e.compartments, *e.species_totals, e.substrate_without_enzyme);
  };
  const cfrag::SimulationReport report =
      cfrag::run_trajectory(model, cfg.simulation.initial, stop, cfg.simulation.seed, options);

  const fs::path dir = out_dir(flags);
  write_file(dir / "trajectory.csv", csv);
  json summary = cfrag::report_to_json(model, report);
  summary["config"] = cfrag::to_json(cfg);
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "events " << report.event_count << ", stop " << cfrag::to_string(report.stop_reason) << ", t "
            << cfrag::format_real(report.final_time) << "; wrote " << (dir / "trajectory.csv").string() << " and "
            << (dir / "summary.json").string() << "\n";
  return report.overflow ? kViolation : kOk;
}

cfrag::RegionSpec parse_region(const std::string& spec) {
  cfrag::RegionSpec region;
  if (spec.empty()) return region;
  auto [name, params] = parse_spec("region:" + spec, "--region");
  reject_unknown(params,
                 {"c_max", "mass_max", "samples", "sample_c_min", "sample_c_max", "sample_mass_max", "seed"},
                 "--region");
  auto count = [&](const char* key, cfrag::Count fallback) {
    const double v = number_param(params, key, static_cast<double>(fallback), "--region");
    if (v < 0.0 || v != std::floor(v)) throw UsageError(std::string("--region: ") + key + " must be a non-negative integer");
    return static_cast<cfrag::Count>(v);
  };
  region.c_max = count("c_max", region.c_max);
  region.mass_max = count("mass_max", region.mass_max);
  region.samples = count("samples", region.samples);
  region.sample_c_min = count("sample_c_min", region.sample_c_min);
  region.sample_c_max = count("sample_c_max", region.sample_c_max);
  region.sample_mass_max = count("sample_mass_max", region.sample_mass_max);
  region.seed = count("seed", region.seed);
  return region;
}

int cmd_drift_check(const CommonFlags& flags, const std::string& function_spec, const std::string& bound_spec,
                    const std::string& region_spec) {
  const cfrag::ModelConfig cfg = load(flags);
  const auto& model = cfg.model;
  auto [fname, fparams] = parse_spec(function_spec, "--function");
  auto [bname, bparams] = parse_spec(bound_spec, "--bound");

  cfrag::BoundParams bound;
  if (bname == "le_minus_one") {
    bound.form = cfrag::BoundForm::le_minus_one_outside;
    reject_unknown(bparams, {}, "--bound");
  } else if (bname == "le_cv_plus_d") {
    bound.form = cfrag::BoundForm::le_cv_plus_d;
    reject_unknown(bparams, {"c", "d"}, "--bound");
    bound.c = number_param(bparams, "c", 0.0, "--bound");
    bound.d = number_param(bparams, "d", 0.0, "--bound");
  } else if (bname == "ge_zero") {
    bound.form = cfrag::BoundForm::ge_zero_outside;
    reject_unknown(bparams, {}, "--bound");
  } else {
    throw UsageError("--bound: expected le_minus_one, le_cv_plus_d:c=..,d=.. or ge_zero");
  }

  json out;
  cfrag::DriftReport report;
  if (fname == "linear_crn") {
    reject_unknown(fparams, {"w"}, "--function");
    if (bound.form != cfrag::BoundForm::le_cv_plus_d) throw UsageError("linear_crn is checked against le_cv_plus_d");
    const std::vector<double> w = vector_param(fparams, "w", "--function");
    auto [rname, rparams] = parse_spec("region:" + region_spec, "--region");
    reject_unknown(rparams, {"box"}, "--region");
    const auto box = static_cast<cfrag::Count>(number_param(rparams, "box", 100.0, "--region"));
    report = cfrag::check_crn_linear_bound(model.chemistry(), w, bound.c, bound.d, box);
    const auto diag = cfrag::first_diagonal_violation(model.chemistry(), w, bound.c, bound.d, box);
    out = cfrag::report_to_json(report);
    out["first_diagonal_violation"] = diag ? json(*diag) : json(nullptr);
  } else {
    cfrag::RegionSpec region = parse_region(region_spec);
    std::optional<cfrag::CandidateFunction> V;
    if ((fname == "population_weighted" || fname == "transience_witness") && fparams.count("alpha") == 0) {
      // Automatic alpha and exceptional region from the classifier.
      const cfrag::Classification c = cfrag::classify_regime(model);
      if (!c.certificate) throw UsageError("automatic alpha needs a model the classifier certifies");
      const cfrag::Model4Params p = cfrag::model4_params(model);
      cfrag::CertificateCheck check = cfrag::certificate_check(p, c, region);
      if (check.function.kind() != (fname == "population_weighted" ? cfrag::CandidateFunction::Kind::population_weighted
                                                                   : cfrag::CandidateFunction::Kind::transience_witness)) {
        throw UsageError("--function " + fname + " does not match the classifier certificate");
      }
      V = check.function;
      region = check.region;
    } else if (fname == "population_weighted") {
      reject_unknown(fparams, {"alpha", "w"}, "--function");
      std::vector<double> w(model.dimension(), 1.0);
      if (fparams.count("w")) w = vector_param(fparams, "w", "--function");
      V = cfrag::CandidateFunction::population_weighted(number_param(fparams, "alpha", 1.0, "--function"), w);
    } else if (fname == "transience_witness") {
      reject_unknown(fparams, {"alpha"}, "--function");
      V = cfrag::CandidateFunction::transience_witness(number_param(fparams, "alpha", 1.0, "--function"));
    } else if (fname == "composite_step3") {
      reject_unknown(fparams, {"lambda"}, "--function");
      if (!model.enzyme_pair()) throw UsageError("composite_step3 needs an enzyme_substrate kernel");
      V = cfrag::CandidateFunction::composite_step3(number_param(fparams, "lambda", 0.5, "--function"),
                                                    model.enzyme_pair()->first, model.enzyme_pair()->second);
    } else if (fname == "constant") {
      reject_unknown(fparams, {"value"}, "--function");
      V = cfrag::CandidateFunction::constant(number_param(fparams, "value", 0.0, "--function"));
    } else {
      throw UsageError("--function: unknown candidate '" + fname + "'");
    }
    report = cfrag::check_population_drift(model, *V, bound, region);
    out = cfrag::report_to_json(report);
    out["function"] = V->describe();
  }
  out["bound"] = std::string(cfrag::to_string(bound.form));
  const fs::path dir = out_dir(flags);
  write_file(dir / "drift_report.json", out.dump(2) + "\n");
  std::cout << (report.passed() ? "no violations" : std::to_string(report.violation_count) + " violations")
            << " on " << report.states_in_scope << " states; wrote " << (dir / "drift_report.json").string() << "\n";
  return report.passed() ? kOk : kViolation;
}

int cmd_classify(const CommonFlags& flags) {
  const cfrag::ModelConfig cfg = load(flags);
  const cfrag::Model4Params p = cfrag::model4_params(cfg.model);
  const cfrag::Classification c = cfrag::classify_regime(cfg.model);
  const json out = cfrag::classification_to_json(p, c);
  const fs::path dir = out_dir(flags);
  write_file(dir / "classification.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_experiment(const CommonFlags& flags, const std::string& preset, unsigned threads) {
  const cfrag::ExperimentResult result = cfrag::run_experiment(preset, flags.seed.value_or(0), threads);
  const fs::path dir = out_dir(flags);
  write_file(dir / (preset + ".csv"), cfrag::rows_to_csv(result));
  write_file(dir / (preset + ".json"), result.aggregate.dump(2) + "\n");
  std::cout << preset << ": " << (result.passed ? "outcome as expected" : "outcome NOT as expected") << "; wrote "
            << (dir / (preset + ".csv")).string() << " and " << (dir / (preset + ".json")).string() << "\n";
  return result.passed ? kOk : kViolation;
}

void add_common(CLI::App* cmd, CommonFlags& f, bool with_config = true) {
  if (with_config) cmd->add_option("--config", f.config, "Model configuration (JSON)")->required();
  cmd->add_option("--seed", f.seed, "Random seed (master seed for experiments)");
  cmd->add_option("--t-max", f.t_max, "Time horizon override");
  cmd->add_option("--event-budget", f.event_budget, "Event budget override");
  cmd->add_option("--grid", f.grid, "Observation times, comma separated");
  cmd->add_option("--out", f.out, "Output directory (default: $CFRAG_OUT_DIR or .)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic simulation and drift checks for compartmentalized reaction networks"};
  app.require_subcommand(1);

  CommonFlags sim_flags, drift_flags, class_flags, exp_flags;
  auto* sim = app.add_subcommand("simulate", "Run one trajectory; write trajectory.csv and summary.json");
  add_common(sim, sim_flags);

  std::string function_spec = "population_weighted", bound_spec = "le_minus_one", region_spec;
  auto* drift = app.add_subcommand("drift-check", "Scan a candidate Lyapunov function; write drift_report.json");
  add_common(drift, drift_flags);
  drift->add_option("--function", function_spec,
                    "population_weighted[:alpha=A,w=..] | transience_witness[:alpha=A] | composite_step3:lambda=L | "
                    "constant:value=V | linear_crn:w=W1,W2,...");
  drift->add_option("--bound", bound_spec, "le_minus_one | le_cv_plus_d:c=C,d=D | ge_zero");
  drift->add_option("--region", region_spec,
                    "c_max=..,mass_max=..,samples=..,sample_c_min=..,sample_c_max=..,sample_mass_max=..,seed=.. "
                    "(linear_crn: box=N)");

  auto* classify = app.add_subcommand("classify", "Classify a one-species model; write classification.json");
  add_common(classify, class_flags);

  std::string preset;
  unsigned threads = 0;
  auto* exp = app.add_subcommand("experiment", "Run a preset ensemble; write <preset>.csv and <preset>.json");
  exp->add_option("preset", preset, "threshold-scan | duso-zechner | explosivity-probe | projection-crn")->required();
  add_common(exp, exp_flags, false);
  exp->add_option("--threads", threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_flags);
    if (drift->parsed()) return cmd_drift_check(drift_flags, function_spec, bound_spec, region_spec);
    if (classify->parsed()) return cmd_classify(class_flags);
    if (exp->parsed()) return cmd_experiment(exp_flags, preset, threads);
  } catch (const cfrag::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const cfrag::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kViolation;
  }
  return kUsage;
}

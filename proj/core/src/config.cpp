#include "cfrag/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

#include "cfrag/errors.hpp"

namespace cfrag {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw ConfigError(join(path, key), "unknown key");
  }
}

const json& require(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(join(path, key), "missing required key");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double non_negative(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (v < 0.0) throw ConfigError(path, "must be >= 0");
  return v;
}

std::uint64_t unsigned_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw ConfigError(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::string string_value(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  return j;
}

std::size_t species_ref(const ReactionNetwork& chem, const json& j, const std::string& path) {
  const std::string name = string_value(j, path);
  auto idx = chem.find_species(name);
  if (!idx) throw ConfigError(path, "unknown species '" + name + "'");
  return *idx;
}

Complex content(const std::vector<std::string>& species, const json& j, const std::string& path) {
  require_object(j, path);
  Complex x(species.size(), 0);
  for (const auto& [name, value] : j.items()) {
    std::size_t i = 0;
    while (i < species.size() && species[i] != name) ++i;
    if (i == species.size()) throw ConfigError(join(path, name), "unknown species");
    x[i] = unsigned_integer(value, join(path, name));
  }
  return x;
}

ReactionNetwork parse_chemistry(const json& j, const std::string& path) {
  allow_keys(j, path, {"species", "reactions"});
  const std::string sp_path = join(path, "species");
  std::vector<std::string> species;
  const json& sp = array(require(j, path, "species"), sp_path);
  for (std::size_t i = 0; i < sp.size(); ++i) species.push_back(string_value(sp[i], index_path(sp_path, i)));
  std::vector<Reaction> reactions;
  if (auto it = j.find("reactions"); it != j.end()) {
    const std::string r_path = join(path, "reactions");
    array(*it, r_path);
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& r = (*it)[i];
      const std::string p = index_path(r_path, i);
      allow_keys(r, p, {"source", "product", "rate"});
      reactions.push_back(Reaction{content(species, require(r, p, "source"), join(p, "source")),
                                   content(species, require(r, p, "product"), join(p, "product")),
                                   non_negative(require(r, p, "rate"), join(p, "rate"))});
    }
  }
  try {
    return ReactionNetwork(species, reactions);
  } catch (const ModelError& e) {
    throw ConfigError(path, e.what());
  }
}

InflowDistribution parse_inflow(const ReactionNetwork& chem, const json& j, const std::string& path) {
  require_object(j, path);
  const std::string kind = string_value(require(j, path, "kind"), join(path, "kind"));
  const auto& species = chem.species();
  try {
    if (kind == "point_mass") {
      allow_keys(j, path, {"kind", "content"});
      Complex x(species.size(), 0);
      if (auto it = j.find("content"); it != j.end()) x = content(species, *it, join(path, "content"));
      return InflowDistribution::point_mass(x);
    }
    if (kind == "categorical") {
      allow_keys(j, path, {"kind", "table"});
      const std::string t_path = join(path, "table");
      const json& t = array(require(j, path, "table"), t_path);
      InflowDistribution::Table table;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const std::string p = index_path(t_path, i);
        allow_keys(t[i], p, {"content", "probability"});
        table.emplace_back(content(species, require(t[i], p, "content"), join(p, "content")),
                           non_negative(require(t[i], p, "probability"), join(p, "probability")));
      }
      return InflowDistribution::categorical(std::move(table));
    }
    if (kind == "poisson_product") {
      allow_keys(j, path, {"kind", "rates", "tail_bound"});
      const std::string r_path = join(path, "rates");
      const json& r = require(j, path, "rates");
      require_object(r, r_path);
      std::vector<double> rates(species.size(), 0.0);
      for (const auto& [name, value] : r.items()) {
        auto idx = chem.find_species(name);
        if (!idx) throw ConfigError(join(r_path, name), "unknown species");
        rates[*idx] = non_negative(value, join(r_path, name));
      }
      double tail = 1e-12;
      if (auto it = j.find("tail_bound"); it != j.end()) tail = non_negative(*it, join(path, "tail_bound"));
      return InflowDistribution::poisson_product(rates, tail);
    }
  } catch (const ModelError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(join(path, "kind"), "unknown inflow kind '" + kind + "'");
}

FragmentationKernel parse_kernel(const ReactionNetwork& chem, const json& j, const std::string& path) {
  require_object(j, path);
  const std::string kind = string_value(require(j, path, "kind"), join(path, "kind"));
  const auto& species = chem.species();
  try {
    if (kind == "binomial_half") {
      allow_keys(j, path, {"kind"});
      return FragmentationKernel::binomial_half();
    }
    if (kind == "uniform_unordered_pairs") {
      allow_keys(j, path, {"kind"});
      return FragmentationKernel::uniform_unordered_pairs();
    }
    if (kind == "enzyme_substrate") {
      allow_keys(j, path, {"kind", "p", "enzyme", "substrate"});
      return FragmentationKernel::enzyme_substrate(number(require(j, path, "p"), join(path, "p")),
                                                   species_ref(chem, require(j, path, "enzyme"), join(path, "enzyme")),
                                                   species_ref(chem, require(j, path, "substrate"),
                                                               join(path, "substrate")));
    }
    if (kind == "table") {
      allow_keys(j, path, {"kind", "entries"});
      const std::string e_path = join(path, "entries");
      const json& e = array(require(j, path, "entries"), e_path);
      FragmentationKernel::TableEntries entries;
      for (std::size_t i = 0; i < e.size(); ++i) {
        const std::string p = index_path(e_path, i);
        allow_keys(e[i], p, {"parent", "pmf"});
        const Complex parent = content(species, require(e[i], p, "parent"), join(p, "parent"));
        const std::string pmf_path = join(p, "pmf");
        const json& pmf = array(require(e[i], p, "pmf"), pmf_path);
        FragmentationKernel::Pmf row;
        for (std::size_t k = 0; k < pmf.size(); ++k) {
          const std::string q = index_path(pmf_path, k);
          allow_keys(pmf[k], q, {"content", "probability"});
          row.emplace_back(content(species, require(pmf[k], q, "content"), join(q, "content")),
                           non_negative(require(pmf[k], q, "probability"), join(q, "probability")));
        }
        if (!entries.emplace(parent, std::move(row)).second) throw ConfigError(p, "duplicate parent content");
      }
      return FragmentationKernel::table(std::move(entries));
    }
  } catch (const ModelError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(join(path, "kind"), "unknown kernel kind '" + kind + "'");
}

SimulationSettings parse_simulation(const ReactionNetwork& chem, const json& j, const std::string& path) {
  allow_keys(j, path, {"t_max", "event_budget", "grid", "seed", "trajectories", "initial"});
  SimulationSettings s;
  s.initial = PopulationState(chem.dimension());
  if (auto it = j.find("t_max"); it != j.end() && !it->is_null()) s.t_max = non_negative(*it, join(path, "t_max"));
  if (auto it = j.find("event_budget"); it != j.end() && !it->is_null()) {
    s.event_budget = unsigned_integer(*it, join(path, "event_budget"));
  }
  if (auto it = j.find("grid"); it != j.end()) {
    const std::string g_path = join(path, "grid");
    array(*it, g_path);
    for (std::size_t i = 0; i < it->size(); ++i) s.grid.push_back(non_negative((*it)[i], index_path(g_path, i)));
    for (std::size_t i = 1; i < s.grid.size(); ++i) {
      if (s.grid[i] < s.grid[i - 1]) throw ConfigError(g_path, "grid times must be non-decreasing");
    }
  }
  if (auto it = j.find("seed"); it != j.end()) s.seed = unsigned_integer(*it, join(path, "seed"));
  if (auto it = j.find("trajectories"); it != j.end()) {
    s.trajectories = unsigned_integer(*it, join(path, "trajectories"));
    if (s.trajectories == 0) throw ConfigError(join(path, "trajectories"), "must be >= 1");
  }
  if (auto it = j.find("initial"); it != j.end()) {
    const std::string i_path = join(path, "initial");
    array(*it, i_path);
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = index_path(i_path, i);
      allow_keys((*it)[i], p, {"content", "count"});
      const Count count = unsigned_integer(require((*it)[i], p, "count"), join(p, "count"));
      if (count > 0) s.initial.add(content(chem.species(), require((*it)[i], p, "content"), join(p, "content")), count);
    }
  }
  return s;
}

}  // namespace

ModelConfig parse_config(const json& doc) {
  allow_keys(doc, "", {"chemistry", "compartments", "inflow", "kernel", "simulation"});
  const ReactionNetwork chem = parse_chemistry(require(doc, "", "chemistry"), "chemistry");

  const json& comp = require(doc, "", "compartments");
  allow_keys(comp, "compartments", {"kappa_I", "kappa_E", "kappa_F", "kappa_C", "fragmentation_species"});
  CompartmentRates rates;
  auto rate = [&](const char* key) {
    auto it = comp.find(key);
    return it == comp.end() ? 0.0 : non_negative(*it, join("compartments", key));
  };
  rates.inflow = rate("kappa_I");
  rates.exit = rate("kappa_E");
  rates.fragmentation = rate("kappa_F");
  rates.coagulation = rate("kappa_C");
  std::size_t frag = 0;
  if (auto it = comp.find("fragmentation_species"); it != comp.end()) {
    frag = species_ref(chem, *it, "compartments.fragmentation_species");
  } else if (chem.dimension() != 1) {
    throw ConfigError("compartments.fragmentation_species", "required when there is more than one species");
  }

  InflowDistribution inflow = InflowDistribution::point_mass(Complex(chem.dimension(), 0));
  if (auto it = doc.find("inflow"); it != doc.end()) inflow = parse_inflow(chem, *it, "inflow");
  FragmentationKernel kernel = FragmentationKernel::binomial_half();
  if (auto it = doc.find("kernel"); it != doc.end()) kernel = parse_kernel(chem, *it, "kernel");
  SimulationSettings sim;
  sim.initial = PopulationState(chem.dimension());
  if (auto it = doc.find("simulation"); it != doc.end()) sim = parse_simulation(chem, *it, "simulation");

  try {
    return ModelConfig{CompartmentModel(chem, rates, frag, std::move(inflow), std::move(kernel)), std::move(sim)};
  } catch (const ModelError& e) {
    throw ConfigError("", e.what());
  }
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json content_to_json(const ReactionNetwork& chem, const Complex& x) {
  json out = json::object();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0) out[chem.species()[i]] = x[i];
  }
  return out;
}

json model_to_json(const CompartmentModel& model) {
  const auto& chem = model.chemistry();
  json doc;
  json reactions = json::array();
  for (const auto& r : chem.reactions()) {
    reactions.push_back({{"source", content_to_json(chem, r.source)},
                         {"product", content_to_json(chem, r.product)},
                         {"rate", r.rate_constant}});
  }
  doc["chemistry"] = {{"species", chem.species()}, {"reactions", reactions}};
  const auto& k = model.rates();
  doc["compartments"] = {{"kappa_I", k.inflow},
                         {"kappa_E", k.exit},
                         {"kappa_F", k.fragmentation},
                         {"kappa_C", k.coagulation},
                         {"fragmentation_species", chem.species()[model.fragmentation_species()]}};

  const auto& inflow = model.inflow();
  switch (inflow.kind()) {
    case InflowDistribution::Kind::point_mass:
      doc["inflow"] = {{"kind", "point_mass"}, {"content", content_to_json(chem, inflow.support().front().first)}};
      break;
    case InflowDistribution::Kind::categorical: {
      json table = json::array();
      for (const auto& [x, prob] : inflow.support()) {
        table.push_back({{"content", content_to_json(chem, x)}, {"probability", prob}});
      }
      doc["inflow"] = {{"kind", "categorical"}, {"table", table}};
      break;
    }
    case InflowDistribution::Kind::poisson_product: {
      json rates = json::object();
      for (std::size_t i = 0; i < chem.dimension(); ++i) rates[chem.species()[i]] = inflow.poisson_rates()[i];
      doc["inflow"] = {{"kind", "poisson_product"}, {"rates", rates}, {"tail_bound", inflow.tail_bound()}};
      break;
    }
  }

  const auto& kernel = model.kernel();
  switch (kernel.kind()) {
    case FragmentationKernel::Kind::binomial_half: doc["kernel"] = {{"kind", "binomial_half"}}; break;
    case FragmentationKernel::Kind::uniform_unordered_pairs:
      doc["kernel"] = {{"kind", "uniform_unordered_pairs"}};
      break;
    case FragmentationKernel::Kind::enzyme_substrate:
      doc["kernel"] = {{"kind", "enzyme_substrate"},
                       {"p", kernel.p()},
                       {"enzyme", chem.species()[kernel.enzyme()]},
                       {"substrate", chem.species()[kernel.substrate()]}};
      break;
    case FragmentationKernel::Kind::table: {
      json entries = json::array();
      for (const auto& [parent, pmf] : kernel.table_entries()) {
        json rows = json::array();
        for (const auto& [y, prob] : pmf) rows.push_back({{"content", content_to_json(chem, y)}, {"probability", prob}});
        entries.push_back({{"parent", content_to_json(chem, parent)}, {"pmf", rows}});
      }
      doc["kernel"] = {{"kind", "table"}, {"entries", entries}};
      break;
    }
  }
  return doc;
}

json to_json(const ModelConfig& config) {
  json doc = model_to_json(config.model);
  const auto& s = config.simulation;
  json sim = json::object();
  if (s.t_max) sim["t_max"] = *s.t_max;
  if (s.event_budget) sim["event_budget"] = *s.event_budget;
  sim["grid"] = s.grid;
  sim["seed"] = s.seed;
  sim["trajectories"] = s.trajectories;
  json initial = json::array();
  for (const auto& [x, k] : s.initial) {
    initial.push_back({{"content", content_to_json(config.model.chemistry(), x)}, {"count", k}});
  }
  sim["initial"] = initial;
  doc["simulation"] = sim;
  return doc;
}

}  // namespace cfrag

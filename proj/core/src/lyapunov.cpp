#include "cfrag/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cfrag/distributions.hpp"
#include "cfrag/errors.hpp"
#include "cfrag/rng.hpp"

namespace cfrag {

namespace {

void require_positive_weights(const std::vector<double>& w) {
  if (w.empty()) throw ModelError("weight vector must not be empty");
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ModelError("weights must be finite and > 0");
  }
}

double dot(const std::vector<double>& w, const Complex& x) {
  if (w.size() != x.size()) throw ModelError("weight vector dimension does not match state");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * static_cast<double>(x[i]);
  return s;
}

Count single_count(const CrnState& x) {
  if (x.size() != 1) throw ModelError("scalar candidate needs a one-species state");
  return x[0];
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

CandidateFunction CandidateFunction::linear_crn(std::vector<double> w) {
  require_positive_weights(w);
  CandidateFunction f;
  f.kind_ = Kind::linear_crn;
  f.w_ = std::move(w);
  return f;
}

CandidateFunction CandidateFunction::population_weighted(double alpha, std::vector<double> w) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ModelError("alpha must be finite and > 0");
  require_positive_weights(w);
  CandidateFunction f;
  f.kind_ = Kind::population_weighted;
  f.alpha_ = alpha;
  f.w_ = std::move(w);
  return f;
}

CandidateFunction CandidateFunction::power(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ModelError("power exponent must lie in (0, 1)");
  CandidateFunction f;
  f.kind_ = Kind::power;
  f.lambda_ = lambda;
  return f;
}

CandidateFunction CandidateFunction::recip_log() {
  CandidateFunction f;
  f.kind_ = Kind::recip_log;
  return f;
}

CandidateFunction CandidateFunction::log_shift() {
  CandidateFunction f;
  f.kind_ = Kind::log_shift;
  return f;
}

CandidateFunction CandidateFunction::composite_step3(double lambda, std::size_t enzyme, std::size_t substrate) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ModelError("power exponent must lie in (0, 1)");
  if (enzyme == substrate) throw ModelError("enzyme and substrate must differ");
  CandidateFunction f;
  f.kind_ = Kind::composite_step3;
  f.lambda_ = lambda;
  f.enzyme_ = enzyme;
  f.substrate_ = substrate;
  return f;
}

CandidateFunction CandidateFunction::transience_witness(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ModelError("alpha must be finite and > 0");
  CandidateFunction f;
  f.kind_ = Kind::transience_witness;
  f.alpha_ = alpha;
  return f;
}

CandidateFunction CandidateFunction::table(std::map<PopulationState, double> population_values,
                                           std::map<CrnState, double> crn_values, double default_value) {
  CandidateFunction f;
  f.kind_ = Kind::table;
  f.population_table_ = std::move(population_values);
  f.crn_table_ = std::move(crn_values);
  f.default_ = default_value;
  return f;
}

std::string CandidateFunction::describe() const {
  std::string w;
  for (std::size_t i = 0; i < w_.size(); ++i) w += (i ? "," : "") + format_number(w_[i]);
  switch (kind_) {
    case Kind::linear_crn: return "linear_crn(w=" + w + ")";
    case Kind::population_weighted: return "population_weighted(alpha=" + format_number(alpha_) + ", w=" + w + ")";
    case Kind::power: return "power(lambda=" + format_number(lambda_) + ")";
    case Kind::recip_log: return "recip_log";
    case Kind::log_shift: return "log_shift";
    case Kind::composite_step3: return "composite_step3(lambda=" + format_number(lambda_) + ")";
    case Kind::transience_witness: return "transience_witness(alpha=" + format_number(alpha_) + ")";
    case Kind::table: return "table(" + std::to_string(population_table_.size() + crn_table_.size()) +
                             " entries, default=" + format_number(default_) + ")";
  }
  return "unknown";
}

bool CandidateFunction::acts_on_population() const noexcept {
  return kind_ == Kind::population_weighted || kind_ == Kind::composite_step3 ||
         kind_ == Kind::transience_witness || kind_ == Kind::table;
}

bool CandidateFunction::acts_on_crn() const noexcept {
  return kind_ == Kind::linear_crn || kind_ == Kind::power || kind_ == Kind::recip_log ||
         kind_ == Kind::log_shift || kind_ == Kind::table;
}

double CandidateFunction::scalar(Count x) const {
  const auto xd = static_cast<double>(x);
  switch (kind_) {
    case Kind::linear_crn:
      if (w_.size() != 1) throw ModelError("scalar linear candidate needs one weight");
      return w_[0] * xd;
    case Kind::power: return std::pow(xd, lambda_);
    case Kind::recip_log: return 1.0 / std::log(xd + 2.0);
    case Kind::table: {
      auto it = crn_table_.find(CrnState{x});
      return it == crn_table_.end() ? default_ : it->second;
    }
    default: throw ModelError(describe() + " is not a function of one count");
  }
}

double CandidateFunction::operator()(const CrnState& x) const {
  switch (kind_) {
    case Kind::linear_crn: return dot(w_, x);
    case Kind::power:
    case Kind::recip_log: return scalar(single_count(x));
    case Kind::log_shift:
      if (x.size() != 2) throw ModelError("log_shift needs a two-species state (e, s)");
      return static_cast<double>(x[0]) + std::log1p(static_cast<double>(x[1]));
    case Kind::table: {
      auto it = crn_table_.find(x);
      return it == crn_table_.end() ? default_ : it->second;
    }
    default: throw ModelError(describe() + " does not act on chemistry states");
  }
}

double CandidateFunction::operator()(const PopulationState& n) const {
  switch (kind_) {
    case Kind::population_weighted: {
      double weighted = 0.0;
      Count c = 0;
      for (const auto& [x, k] : n) {
        weighted += static_cast<double>(k) * dot(w_, x);
        c += k;
      }
      return static_cast<double>(c) + alpha_ * weighted;
    }
    case Kind::composite_step3: {
      const auto with = static_cast<double>(substrate_with_enzyme(n, enzyme_, substrate_));
      const auto hat = static_cast<double>(substrate_without_enzyme(n, enzyme_, substrate_));
      const auto c = static_cast<double>(total_compartments(n));
      return std::pow(with, lambda_) + std::log(std::max(hat + c, 1.0));
    }
    case Kind::transience_witness: {
      const auto w = static_cast<double>(total_compartments(n)) +
                     alpha_ * static_cast<double>(nonempty_compartments(n));
      return 1.0 - 1.0 / (w + 1.0);
    }
    case Kind::table: {
      auto it = population_table_.find(n);
      return it == population_table_.end() ? default_ : it->second;
    }
    default: throw ModelError(describe() + " does not act on population states");
  }
}

std::optional<IncrementBound> CandidateFunction::increment_bound() const {
  switch (kind_) {
    case Kind::population_weighted:
      return IncrementBound{1.0, alpha_ * *std::max_element(w_.begin(), w_.end())};
    case Kind::composite_step3: return IncrementBound{1.0, 2.0};
    case Kind::transience_witness: return IncrementBound{1.0, 0.0};
    case Kind::table: {
      double lo = default_, hi = default_;
      for (const auto& [n, v] : population_table_) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      return IncrementBound{hi - lo, 0.0};
    }
    default: return std::nullopt;
  }
}

PopulationFunction CandidateFunction::as_population_function() const {
  if (!acts_on_population()) throw ModelError(describe() + " does not act on population states");
  return [f = *this](const PopulationState& n) { return f(n); };
}

CrnFunction CandidateFunction::as_crn_function() const {
  if (!acts_on_crn()) throw ModelError(describe() + " does not act on chemistry states");
  return [f = *this](const CrnState& x) { return f(x); };
}

std::string_view to_string(BoundForm form) noexcept {
  switch (form) {
    case BoundForm::le_minus_one_outside: return "le_minus_one_outside";
    case BoundForm::le_cv_plus_d: return "le_cv_plus_d";
    case BoundForm::ge_zero_outside: return "ge_zero_outside";
  }
  return "unknown";
}

namespace {

struct LinearBoxCheck {
  const ReactionNetwork& network;
  std::vector<double> gains;  // w . delta per reaction
  const std::vector<double>& w;
  double c, d;

  LinearBoxCheck(const ReactionNetwork& net, const std::vector<double>& weights, double c_, double d_)
      : network(net), w(weights), c(c_), d(d_) {
    for (std::size_t r = 0; r < net.reactions().size(); ++r) {
      double g = 0.0;
      const Delta& delta = net.delta(r);
      for (std::size_t i = 0; i < delta.size(); ++i) g += w[i] * static_cast<double>(delta[i]);
      gains.push_back(g);
    }
  }

  double drift(const CrnState& x) const {
    double a = 0.0;
    for (std::size_t r : network.active_reactions()) {
      a += mass_action_rate(network.reactions()[r], x) * gains[r];
    }
    return a;
  }

  double bound(const CrnState& x) const { return c * dot(w, x) + d; }
};

void validate_linear(const ReactionNetwork& network, const std::vector<double>& w, double c, double d) {
  require_positive_weights(w);
  if (w.size() != network.dimension()) throw ModelError("weight vector dimension does not match network");
  if (!(c >= 0.0) || !(d >= 0.0)) throw ModelError("c and d must be >= 0");
}

std::string crn_state_string(const CrnState& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + std::to_string(x[i]);
  return s + ")";
}

}  // namespace

DriftReport check_crn_linear_bound(const ReactionNetwork& network, const std::vector<double>& w, double c,
                                   double d, Count x_bound) {
  validate_linear(network, w, c, d);
  const std::size_t dim = network.dimension();
  long double box = 1.0L;
  for (std::size_t i = 0; i < dim; ++i) box *= static_cast<long double>(x_bound) + 1.0L;
  if (box > 1e9L) throw ModelError("box too large to enumerate");

  LinearBoxCheck check(network, w, c, d);
  DriftReport report;
  report.region_checked = "box [0, " + std::to_string(x_bound) + "]^" + std::to_string(dim);
  report.certificate_params = {{"c", c}, {"d", d}};
  report.tolerance = 1e-9;
  report.max_drift = -std::numeric_limits<double>::infinity();
  report.min_drift = std::numeric_limits<double>::infinity();
  report.max_excess = -std::numeric_limits<double>::infinity();

  CrnState x(dim, 0);
  while (true) {
    const double a = check.drift(x);
    const double b = check.bound(x);
    ++report.states_checked;
    ++report.states_in_scope;
    report.max_drift = std::max(report.max_drift, a);
    report.min_drift = std::min(report.min_drift, a);
    report.max_excess = std::max(report.max_excess, a - b);
    if (a - b > 1e-9 * (1.0 + std::fabs(b))) {
      ++report.violation_count;
      if (report.violations.size() < DriftReport::kMaxListed) {
        report.violations.push_back({crn_state_string(x), a, b});
      }
    }
    std::size_t i = 0;
    while (i < dim && x[i] == x_bound) x[i++] = 0;
    if (i == dim) break;
    ++x[i];
  }
  return report;
}

std::optional<Count> first_diagonal_violation(const ReactionNetwork& network, const std::vector<double>& w,
                                              double c, double d, Count s_bound) {
  validate_linear(network, w, c, d);
  LinearBoxCheck check(network, w, c, d);
  CrnState x(network.dimension(), 0);
  for (Count s = 0; s <= s_bound; ++s) {
    std::fill(x.begin(), x.end(), s);
    const double b = check.bound(x);
    if (check.drift(x) - b > 1e-9 * (1.0 + std::fabs(b))) return s;
  }
  return std::nullopt;
}

std::vector<PopulationState> enumerate_population_states(std::size_t dimension, Count c_max, Count mass_max,
                                                         std::uint64_t cap) {
  // All contents with mass <= mass_max, lexicographic.
  std::vector<Complex> contents;
  Complex x(dimension, 0);
  std::function<void(std::size_t, Count)> gen = [&](std::size_t i, Count left) {
    if (i == dimension) {
      contents.push_back(x);
      return;
    }
    for (Count v = 0; v <= left; ++v) {
      x[i] = v;
      gen(i + 1, left - v);
    }
    x[i] = 0;
  };
  gen(0, mass_max);

  std::vector<PopulationState> out;
  PopulationState current(dimension);
  // Multisets as non-decreasing index sequences.
  std::function<void(std::size_t, Count, Count)> rec = [&](std::size_t start, Count slots, Count mass) {
    if (out.size() >= cap) throw ModelError("population enumeration exceeds cap of " + std::to_string(cap));
    out.push_back(current);
    if (slots == 0) return;
    for (std::size_t i = start; i < contents.size(); ++i) {
      const Count m = total_mass(contents[i]);
      if (m > mass) continue;
      current.add(contents[i]);
      rec(i, slots - 1, mass - m);
      current.remove(contents[i]);
    }
  };
  rec(0, c_max, mass_max);
  return out;
}

PopulationState sample_population_state(std::size_t dimension, Count c_min, Count c_max, Count mass_max,
                                        Rng& rng) {
  if (c_min > c_max) throw ModelError("sample_c_min exceeds sample_c_max");
  const Count c = c_min + rng.below(c_max - c_min + 1);
  PopulationState n(dimension);
  if (c == 0) return n;
  const Count mass = rng.below(mass_max + 1);
  const Count occupied = mass == 0 ? 0 : 1 + rng.below(std::min(c, mass));
  std::vector<Complex> boxes(c, Complex(dimension, 0));
  for (Count m = 0; m < mass; ++m) {
    const Count box = m < occupied ? m : rng.below(occupied);
    ++boxes[box][rng.below(dimension)];
  }
  for (const auto& b : boxes) n.add(b);
  return n;
}

DriftReport check_population_drift(const CompartmentModel& model, const CandidateFunction& V,
                                   const BoundParams& bound, const RegionSpec& region) {
  if (!V.acts_on_population()) throw ModelError(V.describe() + " does not act on population states");
  if (bound.form == BoundForm::le_cv_plus_d && (!(bound.c >= 0.0) || !(bound.d >= 0.0))) {
    throw ModelError("c and d must be >= 0");
  }
  const PopulationFunction f = V.as_population_function();
  std::optional<IncrementBound> inc;
  if (model.rates().inflow > 0.0 && model.inflow().truncated()) {
    inc = V.increment_bound();
    if (!inc) throw ModelError("inflow law is truncated and " + V.describe() + " has no increment bound");
  }

  DriftReport report;
  std::ostringstream region_text;
  region_text << "all states with C <= " << region.c_max << " and mass <= " << region.mass_max << ", plus "
              << region.samples << " sampled states with C in [" << region.sample_c_min << ", "
              << region.sample_c_max << "] and mass <= " << region.sample_mass_max << " (seed " << region.seed
              << ")";
  if (region.exclude) {
    region_text << ", excluding "
                << (region.exclude_description.empty() ? std::string("a caller-defined set")
                                                       : region.exclude_description);
  }
  report.region_checked = region_text.str();
  report.tolerance = 1e-9;
  report.max_drift = -std::numeric_limits<double>::infinity();
  report.min_drift = std::numeric_limits<double>::infinity();
  report.max_excess = -std::numeric_limits<double>::infinity();
  if (bound.form == BoundForm::le_cv_plus_d) report.certificate_params = {{"c", bound.c}, {"d", bound.d}};

  auto visit = [&](const PopulationState& n) {
    ++report.states_checked;
    if (region.exclude && region.exclude(n)) return;
    ++report.states_in_scope;
    const GeneratorValue g = apply_population_generator(model, f, n, inc);
    report.truncation_error_bound = std::max(report.truncation_error_bound, g.truncation_error);
    double b = 0.0;
    switch (bound.form) {
      case BoundForm::le_minus_one_outside: b = -1.0; break;
      case BoundForm::le_cv_plus_d: b = bound.c * f(n) + bound.d; break;
      case BoundForm::ge_zero_outside: b = 0.0; break;
    }
    const double excess = bound.form == BoundForm::ge_zero_outside ? b - g.value : g.value - b;
    report.max_drift = std::max(report.max_drift, g.value);
    report.min_drift = std::min(report.min_drift, g.value);
    report.max_excess = std::max(report.max_excess, excess);
    if (excess > 1e-9 * (1.0 + std::fabs(b)) + g.truncation_error) {
      ++report.violation_count;
      if (report.violations.size() < DriftReport::kMaxListed) {
        report.violations.push_back({to_string(n), g.value, b});
      }
    }
  };

  for (const auto& n : enumerate_population_states(model.dimension(), region.c_max, region.mass_max,
                                                   region.enumeration_cap)) {
    visit(n);
  }
  Rng rng(region.seed);
  for (std::size_t i = 0; i < region.samples; ++i) {
    visit(sample_population_state(model.dimension(), region.sample_c_min, region.sample_c_max,
                                  region.sample_mass_max, rng));
  }
  if (report.states_in_scope == 0) {
    report.max_drift = report.min_drift = report.max_excess = 0.0;
  }
  return report;
}

Model4Params model4_params(const CompartmentModel& model) {
  const auto& chem = model.chemistry();
  if (chem.dimension() != 1) throw ModelError("one-species model needs exactly one species");
  Model4Params p;
  bool birth = false, death = false;
  for (const auto& r : chem.reactions()) {
    if (r.source == Complex{0} && r.product == Complex{1} && !birth) {
      birth = true;
      p.kappa_b = r.rate_constant;
    } else if (r.source == Complex{1} && r.product == Complex{0} && !death) {
      death = true;
      p.kappa_d = r.rate_constant;
    } else {
      throw ModelError("one-species model allows only the reactions 0 -> S and S -> 0, once each");
    }
  }
  const auto& k = model.rates();
  p.kappa_I = k.inflow;
  p.kappa_E = k.exit;
  p.kappa_F = k.fragmentation;
  p.kappa_C = k.coagulation;
  const auto& inflow = model.inflow();
  if (inflow.kind() == InflowDistribution::Kind::poisson_product) {
    p.lambda = inflow.poisson_rates()[0];
  } else {
    p.lambda = inflow.mean_mass();
  }
  return p;
}

CompartmentModel make_model4(const Model4Params& params, InflowDistribution inflow, FragmentationKernel kernel) {
  ReactionNetwork chem({"S"}, {Reaction{{0}, {1}, params.kappa_b}, Reaction{{1}, {0}, params.kappa_d}});
  return CompartmentModel(std::move(chem),
                          CompartmentRates{params.kappa_I, params.kappa_E, params.kappa_F, params.kappa_C}, 0,
                          std::move(inflow), std::move(kernel));
}

double closed_form_drift_model4(const Model4Params& p, double alpha, const PopulationState& n) {
  if (n.dimension() != 1) throw ModelError("one-species model states have dimension 1");
  const auto c = static_cast<double>(total_compartments(n));
  const auto s = static_cast<double>(species_total(n, 0));
  return -p.kappa_C * c * (c - 1.0) / 2.0 + (p.kappa_F - alpha * (p.kappa_E + p.kappa_d)) * s +
         (alpha * p.kappa_b - p.kappa_E) * c + p.kappa_I + p.kappa_I * p.lambda * alpha;
}

namespace {

// Binomial(x, p) terms below this are dropped; they cannot move a double sum
// of terms bounded by max |f| * x.
constexpr double kNegligiblePmf = 1e-300;

double binomial_expectation(Count x, double p, const std::function<double(Count)>& g) {
  if (x == 0) return g(0);
  const auto xd = static_cast<double>(x);
  auto mode = static_cast<Count>(std::floor((xd + 1.0) * p));
  if (mode > x) mode = x;
  const double at_mode = binomial_probability(x, mode, p);
  const double odds = p / (1.0 - p);
  double sum = at_mode * g(mode);
  double pmf = at_mode;
  for (Count y = mode; y < x; ++y) {
    pmf *= static_cast<double>(x - y) / static_cast<double>(y + 1) * odds;
    if (pmf < kNegligiblePmf) break;
    sum += pmf * g(y + 1);
  }
  pmf = at_mode;
  for (Count y = mode; y > 0; --y) {
    pmf *= static_cast<double>(y) / static_cast<double>(x - y + 1) / odds;
    if (pmf < kNegligiblePmf) break;
    sum += pmf * g(y - 1);
  }
  return sum;
}

}  // namespace

double one_enzyme_drift(double alpha, double p, const std::function<double(Count)>& f, Count x) {
  if (!(p > 0.0 && p < 1.0)) throw ModelError("p must lie in (0, 1)");
  if (!(alpha >= 0.0)) throw ModelError("alpha must be >= 0");
  const double fx = f(x);
  const auto xd = static_cast<double>(x);
  const double up = (alpha * xd * (xd - 1.0) + 1.0) * (f(x + 1) - fx);
  if (x == 0) return up;
  return up + xd * binomial_expectation(x, p, [&](Count y) { return f(y) - fx; });
}

double one_enzyme_drift(double alpha, double p, const CandidateFunction& f, Count x) {
  return one_enzyme_drift(alpha, p, [&](Count y) { return f.scalar(y); }, x);
}

DriftScan scan_one_enzyme_drift(double alpha, double p, const CandidateFunction& f, Count x_max) {
  std::vector<double> table(x_max + 2);
  for (Count y = 0; y < table.size(); ++y) table[y] = f.scalar(y);
  const std::function<double(Count)> lookup = [&](Count y) { return table[y]; };
  DriftScan scan;
  std::optional<Count> last_above;
  std::vector<double> values(x_max + 1);
  for (Count x = 0; x <= x_max; ++x) {
    values[x] = one_enzyme_drift(alpha, p, lookup, x);
    if (values[x] > -1.0) last_above = x;
  }
  scan.drift_at_x_max = values[x_max];
  if (!last_above) {
    scan.x_star = 0;
  } else if (*last_above < x_max) {
    scan.x_star = *last_above + 1;
  }
  if (scan.x_star) {
    scan.max_drift_beyond_x_star = *std::max_element(values.begin() + static_cast<std::ptrdiff_t>(*scan.x_star),
                                                     values.end());
  }
  return scan;
}

std::optional<double> choose_lambda(double alpha, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ModelError("p must lie in (0, 1)");
  if (!(alpha > 0.0)) throw ModelError("alpha must be > 0");
  double best = std::numeric_limits<double>::infinity();
  double best_lambda = 0.0;
  for (int k = 1; k <= 999; ++k) {
    const double l = k / 1000.0;
    const double v = alpha * l + std::pow(p, l) - 1.0;
    if (v < best) {
      best = v;
      best_lambda = l;
    }
  }
  if (!(alpha * best_lambda + std::pow(p, best_lambda) - 1.0 < 0.0)) return std::nullopt;
  return best_lambda;
}

}  // namespace cfrag

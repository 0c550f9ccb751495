#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfrag/compartment_model.hpp"
#include "cfrag/crn.hpp"
#include "cfrag/population.hpp"

namespace cfrag {

/// Parametric families of candidate Lyapunov functions.
///
/// Chemistry-level kinds act on a CRN state (or a scalar count):
///   linear_crn(w)     f(x) = w . x
///   power(l)          g(x) = x^l            (scalar, l in (0, 1))
///   recip_log         f(x) = 1 / ln(x + 2)  (scalar)
///   log_shift         g(e, s) = e + ln(s + 1)
/// Population-level kinds act on a PopulationState:
///   population_weighted(a, w)   V(n) = C(n) + a * sum_x n_x (w . x)
///   composite_step3(l, E, S)    V(n) = S_E(n)^l + ln(max(S_hat(n) + C(n), 1)),
///                               S_E = substrate sharing a compartment with an enzyme
///   transience_witness(a)       W = C + a * C_{>0}, V = 1 - 1 / (W + 1)
/// table: finite lookup for either level with a default elsewhere.
class CandidateFunction {
 public:
  enum class Kind {
    linear_crn,
    population_weighted,
    power,
    recip_log,
    log_shift,
    composite_step3,
    transience_witness,
    table
  };

  static CandidateFunction linear_crn(std::vector<double> w);
  static CandidateFunction population_weighted(double alpha, std::vector<double> w);
  static CandidateFunction power(double lambda);
  static CandidateFunction recip_log();
  static CandidateFunction log_shift();
  static CandidateFunction composite_step3(double lambda, std::size_t enzyme, std::size_t substrate);
  static CandidateFunction transience_witness(double alpha);
  static CandidateFunction table(std::map<PopulationState, double> population_values,
                                 std::map<CrnState, double> crn_values, double default_value);
  static CandidateFunction constant(double value) { return table({}, {}, value); }

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double lambda() const noexcept { return lambda_; }
  const std::vector<double>& weights() const noexcept { return w_; }
  std::size_t enzyme() const noexcept { return enzyme_; }
  std::size_t substrate() const noexcept { return substrate_; }
  double default_value() const noexcept { return default_; }
  std::string describe() const;

  bool acts_on_population() const noexcept;
  bool acts_on_crn() const noexcept;

  /// Throws ModelError for population-only kinds.
  double operator()(const CrnState& x) const;
  /// Scalar evaluation f(x) for one-dimensional kinds.
  double scalar(Count x) const;
  /// Throws ModelError for chemistry-only kinds.
  double operator()(const PopulationState& n) const;

  /// Bound on |V(n + e_x) - V(n)| in terms of |x|, for truncated inflow.
  /// nullopt when the kind has no simple bound (table: uses the spread).
  std::optional<IncrementBound> increment_bound() const;

  PopulationFunction as_population_function() const;
  CrnFunction as_crn_function() const;

 private:
  Kind kind_ = Kind::table;
  double alpha_ = 0.0;
  double lambda_ = 0.0;
  std::vector<double> w_;
  std::size_t enzyme_ = 0;
  std::size_t substrate_ = 1;
  std::map<PopulationState, double> population_table_;
  std::map<CrnState, double> crn_table_;
  double default_ = 0.0;
};

enum class BoundForm { le_minus_one_outside, le_cv_plus_d, ge_zero_outside };

std::string_view to_string(BoundForm form) noexcept;

struct DriftViolation {
  std::string state;  ///< human-readable state
  double drift = 0.0;
  double bound = 0.0;
};

struct DriftReport {
  std::string region_checked;
  std::vector<DriftViolation> violations;  ///< first kMaxListed violations
  std::uint64_t violation_count = 0;
  std::uint64_t states_checked = 0;   ///< states enumerated or sampled
  std::uint64_t states_in_scope = 0;  ///< of those, outside the excluded set
  double max_drift = 0.0;             ///< over in-scope states
  double min_drift = 0.0;
  /// Largest value of drift - bound over in-scope states (ge form: bound - drift).
  double max_excess = 0.0;
  std::map<std::string, double> certificate_params;
  double truncation_error_bound = 0.0;
  double tolerance = 0.0;
  bool passed() const noexcept { return violation_count == 0; }

  static constexpr std::size_t kMaxListed = 50;
};

/// Evaluates A f(x) - c f(x) - d with f = w . x over the box [0, x_bound]^d.
/// Violations are states where the value exceeds 1e-9 * (1 + |c f + d|).
DriftReport check_crn_linear_bound(const ReactionNetwork& network, const std::vector<double>& w,
                                   double c, double d, Count x_bound);

/// Same check restricted to the diagonal x = (s, s, ..., s), s in [0, s_bound].
/// Returns the first violating s, if any.
std::optional<Count> first_diagonal_violation(const ReactionNetwork& network,
                                              const std::vector<double>& w, double c, double d,
                                              Count s_bound);

struct RegionSpec {
  /// Enumerate every state with C(n) <= c_max and mass <= mass_max.
  Count c_max = 8;
  Count mass_max = 16;
  /// Enumeration aborts with ModelError past this many states.
  std::uint64_t enumeration_cap = 2'000'000;
  /// Plus `samples` random states with C in [sample_c_min, sample_c_max]
  /// and mass <= sample_mass_max.
  std::size_t samples = 200;
  Count sample_c_min = 0;
  Count sample_c_max = 30;
  Count sample_mass_max = 60;
  std::uint64_t seed = 0;
  /// States for which the bound is not required (the finite exceptional set
  /// or the sublevel set).
  std::function<bool(const PopulationState&)> exclude;
  std::string exclude_description;
};

struct BoundParams {
  BoundForm form = BoundForm::le_minus_one_outside;
  double c = 0.0;
  double d = 0.0;
};

/// Evaluates L V on every enumerated and sampled state outside the excluded
/// set and tests the bound. Pass margin: 1e-9 * (1 + |bound|) plus the
/// inflow truncation error bound.
DriftReport check_population_drift(const CompartmentModel& model, const CandidateFunction& V,
                                   const BoundParams& bound, const RegionSpec& region);

/// All population states with C(n) <= c_max and mass <= mass_max.
std::vector<PopulationState> enumerate_population_states(std::size_t dimension, Count c_max,
                                                         Count mass_max, std::uint64_t cap);

/// Random state: C uniform in [c_min, c_max], mass uniform in [0, mass_max],
/// molecules spread over a uniform number of non-empty compartments.
PopulationState sample_population_state(std::size_t dimension, Count c_min, Count c_max,
                                        Count mass_max, Rng& rng);

/// Parameters of the one-species model: chemistry 0 -> S (kappa_b), S -> 0
/// (kappa_d), compartment rates, and the inflow mean lambda.
struct Model4Params {
  double kappa_b = 0.0;
  double kappa_d = 0.0;
  double kappa_I = 0.0;
  double kappa_E = 0.0;
  double kappa_F = 0.0;
  double kappa_C = 0.0;
  double lambda = 0.0;
};

/// Reads Model4Params off a model whose chemistry is exactly one species with
/// reactions 0 -> S and/or S -> 0. Throws ModelError otherwise.
Model4Params model4_params(const CompartmentModel& model);

/// Builds the one-species model (species "S", fragmentation species S).
CompartmentModel make_model4(const Model4Params& params, InflowDistribution inflow,
                             FragmentationKernel kernel);

/// L V for V(n) = alpha S(n) + C(n):
/// -kC C(C-1)/2 + (kF - alpha (kE + kd)) S + (alpha kb - kE) C + kI + kI lambda alpha.
double closed_form_drift_model4(const Model4Params& params, double alpha, const PopulationState& n);

/// A f(x) for the substrate chain of the single-enzyme compartment with full
/// binomial sum:
/// (alpha x (x-1) + 1)(f(x+1) - f(x)) + x sum_y C(x,y) p^y (1-p)^(x-y) (f(y) - f(x)).
double one_enzyme_drift(double alpha, double p, const CandidateFunction& f, Count x);
double one_enzyme_drift(double alpha, double p, const std::function<double(Count)>& f, Count x);

/// Scan result of one_enzyme_drift over [1, x_max].
struct DriftScan {
  /// Smallest X such that drift <= -1 on all of [X, x_max] (nullopt if the
  /// drift is > -1 at x_max).
  std::optional<Count> x_star;
  double drift_at_x_max = 0.0;
  double max_drift_beyond_x_star = 0.0;
};

DriftScan scan_one_enzyme_drift(double alpha, double p, const CandidateFunction& f, Count x_max);

/// lambda = k / 1000 minimizing alpha lambda + p^lambda - 1 over k = 1..999,
/// returned only when that minimum is negative.
std::optional<double> choose_lambda(double alpha, double p);

}  // namespace cfrag

#include "cfrag/regime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cfrag/errors.hpp"

namespace cfrag {

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::positive_recurrent: return "positive_recurrent";
    case Regime::transient: return "transient";
    case Regime::degenerate: return "degenerate";
    case Regime::unknown_gap: return "unknown_gap";
  }
  return "unknown";
}

namespace {

void validate(const Model4Params& p) {
  for (double v : {p.kappa_b, p.kappa_d, p.kappa_I, p.kappa_E, p.kappa_F, p.kappa_C}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ModelError("rate constants must be finite and >= 0");
  }
  if (!std::isfinite(p.lambda)) throw ModelError("inflow mean lambda must be finite");
  if (!(p.lambda >= 0.0)) throw ModelError("inflow mean lambda must be >= 0");
}

// Bounds of {n : closed-form drift > -1} for V = alpha S + C, given a
// negative S coefficient. Drift at S = 0 is a concave quadratic (or a line
// with negative slope) in C.
void exceptional_box(const Model4Params& p, double alpha, Certificate& cert) {
  const double a = p.kappa_F - alpha * (p.kappa_E + p.kappa_d);
  const double b = alpha * p.kappa_b - p.kappa_E;
  const double k = p.kappa_I + p.kappa_I * p.lambda * alpha;
  auto at_zero = [&](double c) { return -p.kappa_C * c * (c - 1.0) / 2.0 + b * c + k; };
  // Past the vertex the S = 0 drift is decreasing; find the last C above -1.
  const double vertex = p.kappa_C > 0.0 ? std::max(0.0, b / p.kappa_C + 0.5) : 0.0;
  double c = std::ceil(vertex);
  while (at_zero(c) > -1.0) c += 1.0;
  const double c_bound = c - 1.0;
  double s_bound = 0.0;
  for (double ci = 0.0; ci <= c_bound; ci += 1.0) {
    const double excess = at_zero(ci) + 1.0;
    if (excess > 0.0) s_bound = std::max(s_bound, std::floor(excess / -a));
  }
  cert.c_bound = std::max(c_bound, 0.0);
  cert.s_bound = s_bound;
}

void recurrent_subcases_ab(const Model4Params& p, bool delta0, std::vector<std::string>& out) {
  out.push_back("the state with no compartments is positive recurrent");
  if (p.kappa_I > 0.0 && (p.kappa_b > 0.0 || !delta0)) {
    out.push_back("every state is reachable from the empty population, so all states are positive recurrent");
  } else if (p.kappa_I > 0.0) {
    out.push_back("states with S = 0 are positive recurrent; all others are transient and reach S = 0 in finite expected time");
  } else {
    out.push_back("states with at least one compartment are transient and absorbed by the state with zero compartments in finite expected time");
  }
}

void recurrent_subcases_c(const Model4Params& p, bool delta0, std::vector<std::string>& out) {
  out.push_back("the state with one empty compartment is positive recurrent");
  if (p.kappa_I * p.kappa_b > 0.0 || p.kappa_F * p.kappa_b > 0.0 || (p.kappa_I > 0.0 && !delta0)) {
    out.push_back("every state except the empty population is reachable from one empty compartment, so all of them are positive recurrent");
  } else if (p.kappa_I > 0.0) {
    out.push_back("states with S = 0 and at least one compartment are positive recurrent; all others are transient and reach S = 0 in finite expected time");
  } else if (p.kappa_b > 0.0) {
    out.push_back("one-compartment states are positive recurrent; all others are transient and reach one compartment in finite expected time");
  } else {
    out.push_back("the empty population and the single empty compartment are absorbing; all other states are transient and absorbed by the single empty compartment in finite expected time");
  }
}

}  // namespace

Classification classify_regime(const Model4Params& p, bool inflow_is_delta0) {
  validate(p);
  Classification out;
  const double inf = std::numeric_limits<double>::infinity();
  const double kb = p.kappa_b, kd = p.kappa_d, kI = p.kappa_I, kE = p.kappa_E, kF = p.kappa_F, kC = p.kappa_C;
  const double lhs_b = kE * kE + kE * kd;
  const double rhs_b = kb * kF;

  if ((kC > 0.0 && kE > 0.0) || (kC > 0.0 && kd > 0.0 && kE == 0.0)) {
    const bool a = kE > 0.0;
    out.regime = Regime::positive_recurrent;
    out.condition = a ? "a" : "c";
    out.reason = a ? "coagulation and exit are both active" : "coagulation and degradation are active, exit is off";
    out.alpha_interval = std::make_pair(kF / (kd + kE), inf);
    Certificate cert;
    cert.alpha = kF > 0.0 ? 2.0 * kF / (kd + kE) : 1.0;
    exceptional_box(p, cert.alpha, cert);
    out.certificate = cert;
    if (a) {
      recurrent_subcases_ab(p, inflow_is_delta0, out.subcases);
    } else {
      recurrent_subcases_c(p, inflow_is_delta0, out.subcases);
    }
  } else if (lhs_b > rhs_b) {
    out.regime = Regime::positive_recurrent;
    out.condition = "b";
    out.reason = "kE^2 + kE kd > kb kF";
    const double lo = kF / (kE + kd);
    const double hi = kb > 0.0 ? kE / kb : inf;
    out.alpha_interval = std::make_pair(lo, hi);
    Certificate cert;
    cert.alpha = kb > 0.0 ? 0.5 * (lo + hi) : lo + 1.0;
    exceptional_box(p, cert.alpha, cert);
    out.certificate = cert;
    recurrent_subcases_ab(p, inflow_is_delta0, out.subcases);
  } else if (kC == 0.0 && kI > 0.0 && (kF - kE) * kb > (kE + kd) * kE) {
    out.regime = Regime::transient;
    out.condition = "transient";
    out.reason = "(kF - kE) kb > (kE + kd) kE with inflow on and coagulation off";
    const double lo = kE / kb;
    const double hi = (kF - kE) / (kE + kd);
    out.alpha_interval = std::make_pair(lo, hi);
    Certificate cert;
    const double alpha = kE + kd > 0.0 ? 0.5 * (lo + hi) : lo + 1.0;
    cert.alpha = alpha;
    // Largest eps keeping both leading coefficients positive, halved.
    const double A = alpha * kb - kE;
    const double B = kF - (1.0 + alpha) * kE - alpha * kd;
    double eps_max = A / (alpha * kb + kE);
    const double denom = (1.0 + alpha) * kE + alpha * kd;
    if (denom > 0.0) eps_max = std::min(eps_max, B / denom);
    const double eps = std::min(0.5 * eps_max, 0.5);
    cert.epsilon = eps;
    // W beyond which (W+2)/(W+1+a) >= 1-eps and (W+2)/W, (W+2)/(W-a),
    // (W+2)/(W+1-a) are all <= 1+eps.
    double k = std::max({((1.0 - eps) * (1.0 + alpha) - 2.0) / eps, 2.0 / eps,
                         (2.0 + alpha * (1.0 + eps)) / eps, (2.0 - (1.0 + eps) * (1.0 - alpha)) / eps,
                         alpha + 1.0});
    cert.k_epsilon = std::ceil(k);
    out.certificate = cert;
    out.subcases.push_back("all states are transient");
  } else if (kd == 0.0 && kE == 0.0 && kC > 0.0) {
    out.regime = Regime::degenerate;
    out.condition = "degenerate";
    out.reason = "no exit and no degradation: total S never decreases";
  } else {
    out.regime = Regime::unknown_gap;
    out.condition = "gap";
    out.reason = "none of the recurrence or transience conditions hold";
    if (kC == 0.0 && kI > 0.0 && rhs_b > lhs_b && lhs_b >= rhs_b - kb * kE) {
      out.tags.push_back("conjectured_transient");
    }
    if (lhs_b == rhs_b) out.tags.push_back("boundary");
  }
  return out;
}

Classification classify_regime(const CompartmentModel& model) {
  return classify_regime(model4_params(model), model.inflow().is_point_mass_at_zero());
}

CertificateCheck certificate_check(const Model4Params& p, const Classification& c, RegionSpec region) {
  if (!c.certificate) throw ModelError("classification carries no certificate");
  const Certificate cert = *c.certificate;
  std::ostringstream desc;
  if (c.regime == Regime::positive_recurrent) {
    region.exclude = [p, alpha = cert.alpha](const PopulationState& n) {
      return closed_form_drift_model4(p, alpha, n) > -1.0;
    };
    desc << "the finite set where the closed-form drift of alpha S + C exceeds -1 (within C <= "
         << *cert.c_bound << ", S <= " << *cert.s_bound << ")";
    region.exclude_description = desc.str();
    return {CandidateFunction::population_weighted(cert.alpha, {1.0}), {BoundForm::le_minus_one_outside, 0, 0},
            region};
  }
  const double k = *cert.k_epsilon;
  region.exclude = [alpha = cert.alpha, k](const PopulationState& n) {
    const double w = static_cast<double>(total_compartments(n)) +
                     alpha * static_cast<double>(nonempty_compartments(n));
    return w < k;
  };
  desc << "{W < " << k << "}, W = C + " << cert.alpha << " C_{>0}";
  region.exclude_description = desc.str();
  // Sample around and beyond the sublevel boundary.
  const auto c_lo = static_cast<Count>(std::floor(k / (1.0 + cert.alpha)));
  region.sample_c_min = std::max(region.sample_c_min, c_lo);
  region.sample_c_max = std::max(region.sample_c_max, static_cast<Count>(std::ceil(k)) + 10);
  region.sample_mass_max = std::max(region.sample_mass_max, 2 * region.sample_c_max);
  return {CandidateFunction::transience_witness(cert.alpha), {BoundForm::ge_zero_outside, 0, 0}, region};
}

DriftReport check_certificate(const CompartmentModel& model, const Classification& c, RegionSpec defaults) {
  const Model4Params p = model4_params(model);
  CertificateCheck check = certificate_check(p, c, std::move(defaults));
  DriftReport report = check_population_drift(model, check.function, check.bound, check.region);
  report.certificate_params["alpha"] = c.certificate->alpha;
  if (c.certificate->epsilon) report.certificate_params["epsilon"] = *c.certificate->epsilon;
  if (c.certificate->k_epsilon) report.certificate_params["k_epsilon"] = *c.certificate->k_epsilon;
  if (c.certificate->c_bound) report.certificate_params["exceptional_c_bound"] = *c.certificate->c_bound;
  if (c.certificate->s_bound) report.certificate_params["exceptional_s_bound"] = *c.certificate->s_bound;
  return report;
}

}  // namespace cfrag

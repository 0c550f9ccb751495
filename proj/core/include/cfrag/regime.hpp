#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfrag/compartment_model.hpp"
#include "cfrag/lyapunov.hpp"

namespace cfrag {

enum class Regime { positive_recurrent, transient, degenerate, unknown_gap };

std::string_view to_string(Regime regime) noexcept;

/// Drift certificate attached to a classification.
///
/// positive_recurrent: V = alpha S + C with L V <= -1 outside the finite set
/// where the closed-form drift exceeds -1 (contained in C <= c_bound,
/// S <= s_bound).
/// transient: V = transience_witness(alpha) with L V >= 0 wherever
/// W = C + alpha C_{>0} >= k_epsilon.
struct Certificate {
  double alpha = 0.0;
  std::optional<double> epsilon;
  std::optional<double> k_epsilon;
  std::optional<double> c_bound;
  std::optional<double> s_bound;
};

struct Classification {
  bool non_explosive = true;
  Regime regime = Regime::unknown_gap;
  /// "a", "b", "c", "transient", "degenerate" or "gap".
  std::string condition;
  std::string reason;
  /// "conjectured_transient" for the band between the recurrence and
  /// transience conditions, "boundary" when kE^2 + kE kd == kb kF exactly.
  std::vector<std::string> tags;
  /// Open interval of admissible alpha (upper may be +inf).
  std::optional<std::pair<double, double>> alpha_interval;
  std::optional<Certificate> certificate;
  /// Which states are positive recurrent, transient or absorbed.
  std::vector<std::string> subcases;
};

/// Classifies the one-species model. `inflow_is_delta0` distinguishes
/// mu = delta_0 in the reachability sub-cases. Throws ModelError when lambda
/// is not finite or a constant is negative.
Classification classify_regime(const Model4Params& params, bool inflow_is_delta0);

Classification classify_regime(const CompartmentModel& model);

/// Candidate function, bound and region that check the attached certificate.
/// Throws ModelError if the classification has none.
struct CertificateCheck {
  CandidateFunction function;
  BoundParams bound;
  RegionSpec region;
};

CertificateCheck certificate_check(const Model4Params& params, const Classification& c,
                                   RegionSpec defaults = {});

DriftReport check_certificate(const CompartmentModel& model, const Classification& c,
                              RegionSpec defaults = {});

}  // namespace cfrag

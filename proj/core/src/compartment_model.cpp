#include "cfrag/compartment_model.hpp"

#include <cmath>
#include <string>

#include "cfrag/errors.hpp"

namespace cfrag {

namespace {

void require_rate(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ModelError(std::string(name) + " must be finite and >= 0");
  }
}

Complex merge(const Complex& a, const Complex& b) {
  Complex out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = checked_add(a[i], b[i]);
  return out;
}

}  // namespace

CompartmentModel::CompartmentModel(ReactionNetwork chemistry, CompartmentRates rates,
                                   std::size_t fragmentation_species,
                                   InflowDistribution inflow, FragmentationKernel kernel)
    : chemistry_(std::move(chemistry)),
      rates_(rates),
      fragmentation_species_(fragmentation_species),
      inflow_(std::move(inflow)),
      kernel_(std::move(kernel)) {
  require_rate(rates_.inflow, "kappa_I");
  require_rate(rates_.exit, "kappa_E");
  require_rate(rates_.fragmentation, "kappa_F");
  require_rate(rates_.coagulation, "kappa_C");
  const std::size_t d = chemistry_.dimension();
  if (d == 0) throw ModelError("compartment model needs at least one species");
  if (fragmentation_species_ >= d) throw ModelError("fragmentation species index out of range");
  if (inflow_.dimension() != d) throw ModelError("inflow distribution dimension does not match chemistry");
  if (kernel_.kind() == FragmentationKernel::Kind::enzyme_substrate &&
      (kernel_.enzyme() >= d || kernel_.substrate() >= d)) {
    throw ModelError("enzyme_substrate kernel species out of range");
  }
}

std::optional<std::pair<std::size_t, std::size_t>> CompartmentModel::enzyme_pair() const {
  if (kernel_.kind() != FragmentationKernel::Kind::enzyme_substrate) return std::nullopt;
  return std::make_pair(kernel_.enzyme(), kernel_.substrate());
}

std::string_view to_string(ChannelKind kind) noexcept {
  switch (kind) {
    case ChannelKind::inflow: return "inflow";
    case ChannelKind::internal: return "internal";
    case ChannelKind::exit: return "exit";
    case ChannelKind::fragmentation: return "fragmentation";
    case ChannelKind::coagulation: return "coagulation";
  }
  return "unknown";
}

std::vector<EventChannel> event_channels(const CompartmentModel& model, const PopulationState& n) {
  const auto& k = model.rates();
  const auto& chem = model.chemistry();
  std::vector<EventChannel> out;
  if (k.inflow > 0.0) out.push_back({ChannelKind::inflow, {}, {}, 0, k.inflow});
  for (const auto& [x, nx] : n) {
    const auto m = static_cast<double>(nx);
    for (std::size_t r : chem.active_reactions()) {
      const double lambda = mass_action_rate(chem.reactions()[r], x);
      if (lambda > 0.0) out.push_back({ChannelKind::internal, x, {}, r, m * lambda});
    }
    if (k.exit > 0.0) out.push_back({ChannelKind::exit, x, {}, 0, k.exit * m});
    const auto s = static_cast<double>(x[model.fragmentation_species()]);
    if (k.fragmentation > 0.0 && s > 0.0) {
      out.push_back({ChannelKind::fragmentation, x, {}, 0, k.fragmentation * s * m});
    }
  }
  if (k.coagulation > 0.0) {
    for (auto it = n.begin(); it != n.end(); ++it) {
      const auto nx = static_cast<double>(it->second);
      if (it->second >= 2) {
        out.push_back({ChannelKind::coagulation, it->first, it->first, 0,
                       k.coagulation * nx * (nx - 1.0) / 2.0});
      }
      for (auto jt = std::next(it); jt != n.end(); ++jt) {
        out.push_back({ChannelKind::coagulation, it->first, jt->first, 0,
                       k.coagulation * nx * static_cast<double>(jt->second)});
      }
    }
  }
  return out;
}

GeneratorValue apply_population_generator(const CompartmentModel& model, const PopulationFunction& V,
                                          const PopulationState& n,
                                          std::optional<IncrementBound> bound) {
  const auto& k = model.rates();
  const auto& chem = model.chemistry();
  const auto& inflow = model.inflow();
  if (n.dimension() != model.dimension()) throw ModelError("population dimension does not match model");
  if (k.inflow > 0.0 && inflow.truncated() && !bound) {
    throw ModelError("inflow law is truncated: an increment bound for V is required");
  }

  const double base = V(n);
  PopulationState work = n;
  auto diff = [&] { return V(work) - base; };
  double internal = 0.0, exits = 0.0, fragments = 0.0, coag_same = 0.0, coag_distinct = 0.0,
         inflows = 0.0;

  for (const auto& [x, nx] : n) {
    const auto m = static_cast<double>(nx);

    for (std::size_t r : chem.active_reactions()) {
      const double lambda = mass_action_rate(chem.reactions()[r], x);
      if (lambda == 0.0) continue;
      const Complex moved = apply_delta(x, chem.delta(r));
      work.remove(x);
      work.add(moved);
      internal += m * lambda * diff();
      work.remove(moved);
      work.add(x);
    }

    if (k.exit > 0.0) {
      work.remove(x);
      exits += k.exit * m * diff();
      work.add(x);
    }

    const auto s = static_cast<double>(x[model.fragmentation_species()]);
    if (k.fragmentation > 0.0 && s > 0.0) {
      double expected = 0.0;
      for (const auto& [y, psi] : model.kernel().pmf(x)) {
        Complex rest(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) rest[i] = x[i] - y[i];
        work.remove(x);
        work.add(y);
        work.add(rest);
        expected += psi * diff();
        work.remove(y);
        work.remove(rest);
        work.add(x);
      }
      fragments += k.fragmentation * s * m * expected;
    }

    if (k.coagulation > 0.0) {
      if (nx >= 2) {
        const Complex doubled = merge(x, x);
        work.remove(x, 2);
        work.add(doubled);
        coag_same += k.coagulation * m * (m - 1.0) / 2.0 * diff();
        work.remove(doubled);
        work.add(x, 2);
      }
      // Ordered sum over y != x with weight n_x n_y / 2.
      for (const auto& [y, ny] : n) {
        if (y == x) continue;
        const Complex merged = merge(x, y);
        work.remove(x);
        work.remove(y);
        work.add(merged);
        coag_distinct += k.coagulation * m * static_cast<double>(ny) / 2.0 * diff();
        work.remove(merged);
        work.add(x);
        work.add(y);
      }
    }
  }

  GeneratorValue out;
  if (k.inflow > 0.0) {
    for (const auto& [x, mu] : inflow.support()) {
      work.add(x);
      inflows += k.inflow * mu * diff();
      work.remove(x);
    }
    if (inflow.truncated()) {
      const double tau = inflow.tail_mass();
      out.truncation_error =
          k.inflow * (tau * (bound->constant + bound->per_unit_mass * inflow.mean_mass()) +
                      bound->constant * tau + bound->per_unit_mass * inflow.tail_first_moment());
    }
  }
  out.value = internal + inflows + exits + fragments + coag_same + coag_distinct;
  return out;
}

}  // namespace cfrag

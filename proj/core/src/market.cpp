#include "fairsignal/market.hpp"

#include <algorithm>
#include <map>

#include "fairsignal/errors.hpp"

namespace fairsignal {

// ---------------------------------------------------------------------------
// ValueDistribution

ValueDistribution::ValueDistribution(std::vector<Rational> values, std::vector<Rational> masses)
    : values_(std::move(values)), masses_(std::move(masses)) {
  if (values_.empty()) throw InvalidInput("distribution needs at least one value");
  if (values_.size() != masses_.size()) {
    throw InvalidInput("distribution: " + std::to_string(values_.size()) + " values but " +
                       std::to_string(masses_.size()) + " masses");
  }
  Rational total = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] <= 0) throw InvalidInput("value " + to_string(values_[i]) + " is not positive");
    if (i > 0 && values_[i] <= values_[i - 1]) {
      throw InvalidInput("values must be strictly increasing (index " + std::to_string(i) + ")");
    }
    if (masses_[i] <= 0) {
      throw InvalidInput("mass at index " + std::to_string(i) + " is not positive");
    }
    total += masses_[i];
    cdf_.push_back(total);
  }
  if (total != 1) throw InvalidInput("masses sum to " + to_string(total) + ", not 1");
}

ValueDistribution ValueDistribution::ingest(std::vector<Rational> values, std::vector<Rational> masses) {
  if (values.size() != masses.size()) {
    throw InvalidInput("distribution: " + std::to_string(values.size()) + " values but " +
                       std::to_string(masses.size()) + " masses");
  }
  Rational total = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (masses[i] < 0) throw InvalidInput("mass at index " + std::to_string(i) + " is negative");
    if (i > 0 && values[i] < values[i - 1]) {
      throw InvalidInput("values must be non-decreasing (index " + std::to_string(i) + ")");
    }
    total += masses[i];
  }
  if (total != 1) throw InvalidInput("masses sum to " + to_string(total) + ", not 1");

  std::vector<Rational> vs, ms;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (masses[i] == 0) continue;
    if (!vs.empty() && vs.back() == values[i]) {
      ms.back() += masses[i];
    } else {
      vs.push_back(values[i]);
      ms.push_back(masses[i]);
    }
  }
  return ValueDistribution(std::move(vs), std::move(ms));
}

ValueDistribution ValueDistribution::from_weights(std::vector<Rational> values,
                                                  std::vector<Rational> weights) {
  Rational total = 0;
  for (const Rational& w : weights) total += w;
  if (total <= 0) throw InvalidInput("weights must have a positive sum");
  for (Rational& w : weights) w /= total;
  return ValueDistribution(std::move(values), std::move(weights));
}

Rational ValueDistribution::expected_value() const {
  Rational total = 0;
  for (std::size_t i = 0; i < size(); ++i) total += values_[i] * masses_[i];
  return total;
}

// ---------------------------------------------------------------------------
// Signal

Signal::Signal(std::vector<SignalMass> support) : support_(std::move(support)) {
  if (support_.empty()) throw InvalidInput("signal support is empty");
  Rational total = 0;
  for (std::size_t k = 0; k < support_.size(); ++k) {
    if (k > 0 && support_[k].index <= support_[k - 1].index) {
      throw InvalidInput("signal support indices must be strictly increasing");
    }
    if (support_[k].mass <= 0) throw InvalidInput("signal masses must be positive");
    total += support_[k].mass;
  }
  if (total != 1) throw InvalidInput("signal masses sum to " + to_string(total) + ", not 1");
}

std::pair<Signal, Rational> Signal::from_masses(std::vector<SignalMass> masses) {
  std::erase_if(masses, [](const SignalMass& m) { return m.mass == 0; });
  std::sort(masses.begin(), masses.end(),
            [](const SignalMass& a, const SignalMass& b) { return a.index < b.index; });
  Rational total = 0;
  for (const SignalMass& m : masses) total += m.mass;
  if (total <= 0) throw InvalidInput("signal has no positive mass");
  for (SignalMass& m : masses) m.mass /= total;
  return {Signal(std::move(masses)), total};
}

Signal Signal::singleton(std::size_t index) { return Signal({{index, Rational(1)}}); }

Signal Signal::equal_revenue(const ValueDistribution& dist, std::size_t low, std::size_t high) {
  if (low >= high || high >= dist.size()) throw InvalidInput("equal-revenue signal needs low < high");
  Rational ratio = dist.value(low) / dist.value(high);
  return Signal({{low, 1 - ratio}, {high, ratio}});
}

Rational Signal::mass_at(std::size_t index) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), index,
                             [](const SignalMass& m, std::size_t i) { return m.index < i; });
  if (it != support_.end() && it->index == index) return it->mass;
  return 0;
}

// ---------------------------------------------------------------------------
// SignalingScheme

std::optional<std::size_t> plausibility_violation(std::span<const SchemeEntry> entries,
                                                  const ValueDistribution& dist) {
  std::vector<Rational> agg(dist.size(), Rational(0));
  for (const SchemeEntry& e : entries) {
    for (const SignalMass& m : e.signal.support()) {
      if (m.index >= dist.size()) return m.index;
      agg[m.index] += e.weight * m.mass;
    }
  }
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (agg[i] != dist.mass(i)) return i;
  }
  return std::nullopt;
}

SignalingScheme::SignalingScheme(std::vector<SchemeEntry> entries, const ValueDistribution& dist)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw InvalidInput("scheme has no signals");
  Rational total = 0;
  for (const SchemeEntry& e : entries_) {
    if (e.weight <= 0) throw InvalidInput("scheme weights must be positive");
    total += e.weight;
  }
  if (total != 1) throw InvalidInput("scheme weights sum to " + to_string(total) + ", not 1");
  if (auto bad = plausibility_violation(entries_, dist)) {
    throw PlausibilityError(*bad, "scheme is not Bayes plausible at value index " + std::to_string(*bad));
  }
}

SignalingScheme SignalingScheme::consolidated(std::vector<SchemeEntry> entries,
                                              const ValueDistribution& dist) {
  using Key = std::vector<std::pair<std::size_t, Rational>>;
  std::map<Key, std::size_t> seen;
  std::vector<SchemeEntry> out;
  for (SchemeEntry& e : entries) {
    if (e.weight == 0) continue;
    Key key;
    for (const SignalMass& m : e.signal.support()) key.emplace_back(m.index, m.mass);
    auto [it, inserted] = seen.try_emplace(std::move(key), out.size());
    if (inserted) {
      out.push_back(std::move(e));
    } else {
      out[it->second].weight += e.weight;
    }
  }
  return SignalingScheme(std::move(out), dist);
}

// ---------------------------------------------------------------------------
// Pricing and accounting

std::vector<Rational> price_revenues(const ValueDistribution& dist) {
  std::vector<Rational> out;
  out.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) out.push_back(dist.value(i) * dist.ccdf(i));
  return out;
}

PostedPrice myerson(const ValueDistribution& dist) {
  std::vector<Rational> revenues = price_revenues(dist);
  std::size_t best = 0;
  for (std::size_t i = 1; i < revenues.size(); ++i) {
    if (revenues[i] > revenues[best]) best = i;
  }
  return {best, dist.value(best), revenues[best]};
}

PostedPrice optimal_price(const Signal& signal, const ValueDistribution& dist) {
  const auto& support = signal.support();
  // Suffix masses give G_S at each support value.
  std::vector<Rational> tail(support.size());
  Rational acc = 0;
  for (std::size_t k = support.size(); k-- > 0;) {
    acc += support[k].mass;
    tail[k] = acc;
  }
  std::size_t best = 0;
  Rational best_revenue = dist.value(support[0].index) * tail[0];
  for (std::size_t k = 1; k < support.size(); ++k) {
    Rational r = dist.value(support[k].index) * tail[k];
    if (r > best_revenue) {
      best = k;
      best_revenue = r;
    }
  }
  return {support[best].index, dist.value(support[best].index), best_revenue};
}

Rational SurplusProfile::total() const {
  Rational t = 0;
  for (std::size_t i = 0; i < masses.size(); ++i) t += masses[i] * surplus[i];
  return t;
}

SurplusProfile scheme_surplus(const SignalingScheme& scheme, const ValueDistribution& dist) {
  if (auto bad = plausibility_violation(scheme.entries(), dist)) {
    throw PlausibilityError(*bad, "scheme is not Bayes plausible at value index " + std::to_string(*bad));
  }
  std::vector<Rational> gained(dist.size(), Rational(0));
  for (const SchemeEntry& e : scheme.entries()) {
    PostedPrice p = optimal_price(e.signal, dist);
    for (const SignalMass& m : e.signal.support()) {
      if (m.index > p.index) gained[m.index] += (dist.value(m.index) - p.price) * e.weight * m.mass;
    }
  }
  SurplusProfile profile{dist.masses(), {}};
  profile.surplus.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) profile.surplus.push_back(gained[i] / dist.mass(i));
  return profile;
}

Rational scheme_revenue(const SignalingScheme& scheme, const ValueDistribution& dist) {
  Rational total = 0;
  for (const SchemeEntry& e : scheme.entries()) total += e.weight * optimal_price(e.signal, dist).revenue;
  return total;
}

bool is_efficient(const SignalingScheme& scheme, const ValueDistribution& dist) {
  return std::all_of(scheme.entries().begin(), scheme.entries().end(), [&](const SchemeEntry& e) {
    return optimal_price(e.signal, dist).index == e.signal.lowest_index();
  });
}

bool is_monotone(const SurplusProfile& profile) {
  return std::is_sorted(profile.surplus.begin(), profile.surplus.end());
}

SignalingScheme canonicalize(const SignalingScheme& scheme, const ValueDistribution& dist) {
  const std::size_t n = dist.size();
  // placed[k][i]: mass of v_i in the merged signal whose lowest support is v_k.
  std::vector<std::vector<Rational>> placed(n, std::vector<Rational>(n, Rational(0)));
  for (const SchemeEntry& e : scheme.entries()) {
    std::size_t price = optimal_price(e.signal, dist).index;
    for (const SignalMass& m : e.signal.support()) {
      Rational mass = e.weight * m.mass;
      // Buyers below the price never buy; their mass becomes a singleton,
      // which then merges into the signal led by that same value.
      if (m.index < price) {
        placed[m.index][m.index] += mass;
      } else {
        placed[price][m.index] += mass;
      }
    }
  }
  std::vector<SchemeEntry> entries;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<SignalMass> masses;
    for (std::size_t i = k; i < n; ++i) {
      if (placed[k][i] != 0) masses.push_back({i, placed[k][i]});
    }
    if (masses.empty()) continue;
    auto [signal, weight] = Signal::from_masses(std::move(masses));
    entries.push_back({std::move(signal), std::move(weight)});
  }
  return SignalingScheme(std::move(entries), dist);
}

SignalingScheme full_revelation(const ValueDistribution& dist) {
  std::vector<SchemeEntry> entries;
  for (std::size_t i = 0; i < dist.size(); ++i) entries.push_back({Signal::singleton(i), dist.mass(i)});
  return SignalingScheme(std::move(entries), dist);
}

SignalingScheme no_signal(const ValueDistribution& dist) {
  std::vector<SignalMass> support;
  for (std::size_t i = 0; i < dist.size(); ++i) support.push_back({i, dist.mass(i)});
  return SignalingScheme({{Signal(std::move(support)), Rational(1)}}, dist);
}

}  // namespace fairsignal

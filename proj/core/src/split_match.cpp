#include "fairsignal/split_match.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "fairsignal/errors.hpp"

namespace fairsignal {

Rational EqualRevenueBinary::giver_mass(const ValueDistribution& dist) const {
  return weight * (1 - dist.value(giver) / dist.value(taker));
}

Rational EqualRevenueBinary::taker_mass(const ValueDistribution& dist) const {
  return weight * dist.value(giver) / dist.value(taker);
}

Rational EqualRevenueBinary::surplus_mass(const ValueDistribution& dist) const {
  return taker_mass(dist) * (dist.value(taker) - dist.value(giver));
}

BinaryScheme::BinaryScheme(ValueDistribution dist, std::vector<EqualRevenueBinary> binaries)
    : dist_(std::move(dist)), binaries_(std::move(binaries)), residual_(dist_.masses()) {
  for (const EqualRevenueBinary& b : binaries_) {
    if (b.giver >= b.taker || b.taker >= dist_.size()) {
      throw InvariantViolation("binary signal with giver not below taker");
    }
    if (b.weight < 0) throw InvariantViolation("binary signal with negative weight");
    residual_[b.giver] -= b.giver_mass(dist_);
    residual_[b.taker] -= b.taker_mass(dist_);
  }
  for (std::size_t i = 0; i < residual_.size(); ++i) {
    if (residual_[i] < 0) {
      throw InvariantViolation("binary signals overdraw the prior at value index " + std::to_string(i));
    }
  }
}

SurplusProfile BinaryScheme::surplus() const {
  std::vector<Rational> gained(dist_.size(), Rational(0));
  for (const EqualRevenueBinary& b : binaries_) gained[b.taker] += b.surplus_mass(dist_);
  SurplusProfile profile{dist_.masses(), {}};
  for (std::size_t i = 0; i < dist_.size(); ++i) profile.surplus.push_back(gained[i] / dist_.mass(i));
  return profile;
}

SignalingScheme BinaryScheme::to_scheme() const {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
  std::vector<SchemeEntry> entries;
  for (const EqualRevenueBinary& b : binaries_) {
    if (b.weight == 0) continue;
    auto [it, inserted] = slot.try_emplace({b.giver, b.taker}, entries.size());
    if (inserted) {
      entries.push_back({Signal::equal_revenue(dist_, b.giver, b.taker), b.weight});
    } else {
      entries[it->second].weight += b.weight;
    }
  }
  for (std::size_t i = 0; i < dist_.size(); ++i) {
    if (residual_[i] > 0) entries.push_back({Signal::singleton(i), residual_[i]});
  }
  return SignalingScheme(std::move(entries), dist_);
}

HalfMassLedger HalfMassLedger::initial(const ValueDistribution& dist) {
  HalfMassLedger ledger;
  for (const Rational& m : dist.masses()) {
    ledger.giver.push_back(m / 2);
    ledger.taker.push_back(m / 2);
  }
  return ledger;
}

SplitMatchResult split_and_match(const ValueDistribution& dist) {
  const std::size_t n = dist.size();
  HalfMassLedger ledger = HalfMassLedger::initial(dist);
  std::vector<EqualRevenueBinary> binaries;
  std::vector<SplitMatchStep> trace;

  // Both cursors only move right: a giver entry, once zero, stays zero, and
  // the same holds for taker entries.
  std::size_t s = 0;
  std::size_t l = 1;
  while (true) {
    while (s < n && ledger.giver[s] == 0) ++s;
    if (s >= n) break;
    l = std::max(l, s + 1);
    while (l < n && ledger.taker[l] == 0) ++l;
    if (l >= n) break;

    Rational ratio = dist.value(s) / dist.value(l);
    Rational by_giver = ledger.giver[s] / (1 - ratio);
    Rational by_taker = ledger.taker[l] / ratio;
    Rational weight = std::min(by_giver, by_taker);
    ledger.giver[s] -= weight * (1 - ratio);
    ledger.taker[l] -= weight * ratio;
    if (ledger.giver[s] < 0 || ledger.taker[l] < 0) {
      throw InvariantViolation("split-and-match ledger went negative");
    }
    binaries.push_back({s, l, weight});
    trace.push_back({s, l, weight});
  }
  return {BinaryScheme(dist, std::move(binaries)), std::move(trace), std::move(ledger)};
}

Rational surplus_prefix_sum(const ValueDistribution& dist, std::size_t k) {
  if (k > dist.size()) throw InvalidInput("prefix length exceeds support size");
  Rational total = 0;
  for (std::size_t i = 0; i < k; ++i) total += dist.value(i) * dist.mass(i);
  return total;
}

Rational truncated_upper_bound(const ValueDistribution& dist, std::size_t k) {
  if (k == 0 || k > dist.size()) throw InvalidInput("truncation index must lie in [1, n]");
  Rational best = 0;
  Rational tail = 0;
  for (std::size_t i = k; i-- > 0;) {
    tail += dist.mass(i);
    best = std::max(best, Rational(dist.value(i) * tail));
  }
  return surplus_prefix_sum(dist, k) - best;
}

std::string trace_csv(const std::vector<SplitMatchStep>& trace) {
  std::ostringstream out;
  out << "round,giver,taker,weight\n";
  for (std::size_t q = 0; q < trace.size(); ++q) {
    out << q + 1 << ',' << trace[q].giver << ',' << trace[q].taker << ',' << to_string(trace[q].weight)
        << '\n';
  }
  return out.str();
}

}  // namespace fairsignal

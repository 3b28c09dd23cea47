#pragma once

#include <string>
#include <vector>

#include "fairsignal/market.hpp"

namespace fairsignal {

// Equal-revenue binary signal on (v_giver, v_taker) with v_giver < v_taker,
// carried with weight `weight`. Posting either value earns v_giver, so the
// seller prices at the giver and the taker keeps v_taker - v_giver.
struct EqualRevenueBinary {
  std::size_t giver;
  std::size_t taker;
  Rational weight;

  Rational giver_mass(const ValueDistribution& dist) const;
  Rational taker_mass(const ValueDistribution& dist) const;
  // Surplus mass delivered to the taker class (taker mass times the margin).
  Rational surplus_mass(const ValueDistribution& dist) const;

  friend bool operator==(const EqualRevenueBinary&, const EqualRevenueBinary&) = default;
};

// A scheme made only of equal-revenue binaries, with every unused unit of
// prior mass emitted as a singleton on its own value. This is the working
// form of every stage of the fair construction.
class BinaryScheme {
 public:
  // Throws InvariantViolation when a weight is negative or the binaries use
  // more mass at some value than the prior holds.
  BinaryScheme(ValueDistribution dist, std::vector<EqualRevenueBinary> binaries);

  const ValueDistribution& distribution() const { return dist_; }
  const std::vector<EqualRevenueBinary>& binaries() const { return binaries_; }

  // Prior mass at value i not used by any binary; becomes a singleton.
  const Rational& singleton_mass(std::size_t i) const { return residual_[i]; }

  // Per-class surplus accumulated from taker margins.
  SurplusProfile surplus() const;

  // Binaries (identical pairs merged, zero weights dropped) followed by
  // singletons in ascending value order.
  SignalingScheme to_scheme() const;

 private:
  ValueDistribution dist_;
  std::vector<EqualRevenueBinary> binaries_;
  std::vector<Rational> residual_;
};

// Remaining giver and taker budgets, each starting at half the prior mass.
struct HalfMassLedger {
  std::vector<Rational> giver;
  std::vector<Rational> taker;

  static HalfMassLedger initial(const ValueDistribution& dist);
};

struct SplitMatchStep {
  std::size_t giver;
  std::size_t taker;
  Rational weight;
};

struct SplitMatchResult {
  BinaryScheme scheme;
  std::vector<SplitMatchStep> trace;
  HalfMassLedger ledger;  // state at termination
};

// Greedy decomposition of the prior into equal-revenue binaries and
// singletons. Each round pairs the lowest value with giver budget left with
// the lowest higher value with taker budget left, and adds the largest
// binary that fits, exhausting at least one of the two budgets.
SplitMatchResult split_and_match(const ValueDistribution& dist);

// V_k: sum over the k lowest values of v_i * f(v_i).
Rational surplus_prefix_sum(const ValueDistribution& dist, std::size_t k);

// Upper bound on the surplus any scheme can give the k lowest value
// classes: V_k minus the best revenue a single price extracts from them.
// Requires 1 <= k <= n.
Rational truncated_upper_bound(const ValueDistribution& dist, std::size_t k);

// CSV rows "round,giver,taker,weight" (value indices are zero-based).
std::string trace_csv(const std::vector<SplitMatchStep>& trace);

}  // namespace fairsignal

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairsignal/rational.hpp"
#include "fairsignal/step_function.hpp"

namespace fairsignal {

// The prior over buyer values: v_1 < ... < v_n, all positive, with positive
// masses summing to exactly one.
class ValueDistribution {
 public:
  // Strict constructor; throws InvalidInput unless every invariant holds.
  ValueDistribution(std::vector<Rational> values, std::vector<Rational> masses);

  // Lenient ingestion for user files: drops zero-mass entries and merges
  // repeated values (which must be adjacent, i.e. input sorted
  // non-decreasingly). Still rejects decreasing values, negative masses and
  // masses not summing to one.
  static ValueDistribution ingest(std::vector<Rational> values, std::vector<Rational> masses);

  // Normalizes positive weights by their sum.
  static ValueDistribution from_weights(std::vector<Rational> values, std::vector<Rational> weights);

  std::size_t size() const { return values_.size(); }
  const std::vector<Rational>& values() const { return values_; }
  const std::vector<Rational>& masses() const { return masses_; }
  const Rational& value(std::size_t i) const { return values_[i]; }
  const Rational& mass(std::size_t i) const { return masses_[i]; }

  // F(v_i) = Pr[v <= v_i].
  const Rational& cdf(std::size_t i) const { return cdf_[i]; }
  // F(v_{i-1}), with F(v_0) = 0.
  Rational cdf_before(std::size_t i) const { return i == 0 ? Rational(0) : cdf_[i - 1]; }
  // G(v_i) = Pr[v >= v_i].
  Rational ccdf(std::size_t i) const { return 1 - cdf_before(i); }

  Rational expected_value() const;

  friend bool operator==(const ValueDistribution&, const ValueDistribution&) = default;

 private:
  std::vector<Rational> values_;
  std::vector<Rational> masses_;
  std::vector<Rational> cdf_;
};

struct SignalMass {
  std::size_t index;  // into ValueDistribution::values()
  Rational mass;

  friend bool operator==(const SignalMass&, const SignalMass&) = default;
};

// A posterior over the value grid of some distribution, stored sparsely by
// value index. Support is nonempty, strictly ascending in index, masses are
// positive and sum to one.
class Signal {
 public:
  explicit Signal(std::vector<SignalMass> support);

  // Normalizes positive masses; returns the signal and the normalizer (which
  // is the weight the posterior carries in a scheme built from raw masses).
  static std::pair<Signal, Rational> from_masses(std::vector<SignalMass> masses);

  static Signal singleton(std::size_t index);

  // Two-point posterior on v_low < v_high on which both prices earn v_low.
  static Signal equal_revenue(const ValueDistribution& dist, std::size_t low, std::size_t high);

  const std::vector<SignalMass>& support() const { return support_; }
  std::size_t lowest_index() const { return support_.front().index; }
  std::size_t highest_index() const { return support_.back().index; }
  Rational mass_at(std::size_t index) const;

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::vector<SignalMass> support_;
};

struct SchemeEntry {
  Signal signal;
  Rational weight;

  friend bool operator==(const SchemeEntry&, const SchemeEntry&) = default;
};

// Index of the first value whose aggregate mass over the entries differs from
// the prior, or nullopt when the entries are Bayes plausible. Also reports
// signals referencing indices outside the distribution.
std::optional<std::size_t> plausibility_violation(std::span<const SchemeEntry> entries,
                                                  const ValueDistribution& dist);

// Weighted posteriors whose weights sum to one and whose weighted average
// reproduces the prior exactly.
class SignalingScheme {
 public:
  // Throws InvalidInput on non-positive weights or weights not summing to
  // one, and PlausibilityError (with the offending value index) when the
  // posteriors do not average to `dist`.
  SignalingScheme(std::vector<SchemeEntry> entries, const ValueDistribution& dist);

  // Builds from (signal, weight) pairs after dropping zero weights and
  // merging identical signals. Same validation as the constructor.
  static SignalingScheme consolidated(std::vector<SchemeEntry> entries, const ValueDistribution& dist);

  const std::vector<SchemeEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<SchemeEntry> entries_;
};

// Seller's best response to a posterior: the revenue-maximizing posted price
// with ties broken toward the lowest price.
struct PostedPrice {
  std::size_t index;
  Rational price;
  Rational revenue;
};

PostedPrice myerson(const ValueDistribution& dist);

// v_i * G(v_i) for every i.
std::vector<Rational> price_revenues(const ValueDistribution& dist);

PostedPrice optimal_price(const Signal& signal, const ValueDistribution& dist);

// Per-class expected consumer surplus together with the class masses.
struct SurplusProfile {
  std::vector<Rational> masses;
  std::vector<Rational> surplus;

  StepFunction step() const { return StepFunction::from_widths(masses, surplus); }
  Rational total() const;

  friend bool operator==(const SurplusProfile&, const SurplusProfile&) = default;
};

SurplusProfile scheme_surplus(const SignalingScheme& scheme, const ValueDistribution& dist);

Rational scheme_revenue(const SignalingScheme& scheme, const ValueDistribution& dist);

// Every signal's optimal price is its lowest support value.
bool is_efficient(const SignalingScheme& scheme, const ValueDistribution& dist);

// Surplus is non-decreasing in value.
bool is_monotone(const SurplusProfile& profile);

// Equivalent efficient scheme with at most n signals and pairwise distinct
// lowest supports. Mass below each signal's posted price is moved into
// per-value singletons, then signals sharing a lowest support are merged.
// Every buyer's expected surplus is unchanged.
SignalingScheme canonicalize(const SignalingScheme& scheme, const ValueDistribution& dist);

// Every value revealed: all singletons.
SignalingScheme full_revelation(const ValueDistribution& dist);

// A single signal equal to the prior.
SignalingScheme no_signal(const ValueDistribution& dist);

}  // namespace fairsignal

#pragma once

#include <string>
#include <vector>

#include "fairsignal/split_match.hpp"

namespace fairsignal {

// Maximal run of value classes over which the convex envelope lies strictly
// below the cumulative surplus; the ironed surplus is constant there.
struct IroningInterval {
  std::size_t first_class;  // inclusive
  std::size_t last_class;   // inclusive
  Rational left;            // open interval (left, right) in mass coordinates
  Rational right;
  Rational level;
};

// Cumulative surplus F, its lower convex envelope, and the envelope's slope.
// Knot j sits at mass coordinate F_D(v_j) (knot 0 at 0), so class i spans
// knots i and i + 1. The envelope of a piecewise-linear F is attained on
// these knots, which makes the ironed surplus constant on every class.
struct IronedFunction {
  std::vector<Rational> knots;       // n + 1 mass coordinates
  std::vector<Rational> cumulative;  // F at each knot
  std::vector<Rational> envelope;    // lower convex envelope at each knot
  std::vector<Rational> level;       // ironed surplus per class (n entries)
  std::vector<std::size_t> contact;  // knots where F equals its envelope, ascending
  std::vector<IroningInterval> intervals;

  StepFunction step() const;
  // Mass coordinates of the contact knots, excluding 0.
  std::vector<Rational> contact_points() const;
};

IronedFunction iron(const SurplusProfile& profile);

struct Rectangle {
  std::size_t value_index;
  Rational x;       // left edge in mass coordinates
  Rational width;
  Rational height;  // distance from the interval level

  Rational area() const { return width * height; }
};

// Equal-area excess (above the level, left) and deficit (below, right).
struct RectanglePair {
  Rectangle plus;
  Rectangle minus;
};

// Sweeps the excess and deficit of interval `t` left to right in lockstep,
// cutting each step at the smaller of the two remaining frontier areas.
std::vector<RectanglePair> pair_rectangles(const SurplusProfile& profile, const IronedFunction& ironed,
                                           std::size_t t);

std::vector<std::vector<RectanglePair>> pair_all_intervals(const SurplusProfile& profile,
                                                          const IronedFunction& ironed);

// Lifts every class whose surplus is below half its interval level. For each
// pair whose deficit height exceeds half the level, a share of the deficit
// class's taker mass and a share of the giver mass feeding the excess class
// are recombined into new equal-revenue binaries with the deficit class as
// taker. Weight adjustments use the weights of `base`, never the running
// ones. Result satisfies surplus >= level / 2 on every class.
BinaryScheme smooth(const BinaryScheme& base, const IronedFunction& ironed,
                    const std::vector<std::vector<RectanglePair>>& pairings);

// Scales down each class's taker binaries so its surplus is exactly half the
// ironed level; the removed mass falls back to singletons.
BinaryScheme finalize(const BinaryScheme& smoothed, const IronedFunction& ironed);

struct FairScheme {
  SplitMatchResult split;
  SurplusProfile base_profile;
  IronedFunction ironed;
  std::vector<std::vector<RectanglePair>> pairings;
  BinaryScheme smoothed;
  BinaryScheme final;
};

// Split-and-match, ironing, smoothing and final scaling, with every stage
// guarantee checked at runtime (InvariantViolation on failure).
FairScheme build_fair_scheme(const ValueDistribution& dist);

// CSV rows "t,y,v_plus,w_plus,h_plus,v_minus,w_minus,h_minus" followed by a
// blank line and the per-class ironed levels "class,value,surplus,ironed".
std::string ironing_csv(const ValueDistribution& dist, const SurplusProfile& profile,
                        const IronedFunction& ironed,
                        const std::vector<std::vector<RectanglePair>>& pairings);

}  // namespace fairsignal

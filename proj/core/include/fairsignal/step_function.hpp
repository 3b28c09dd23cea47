#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fairsignal/rational.hpp"

namespace fairsignal {

// Right-continuous-from-the-left step function on (0, 1]: segment k is
// (breakpoints[k-1], breakpoints[k]] with breakpoints[-1] = 0.
class StepFunction {
 public:
  StepFunction(std::vector<Rational> breakpoints, std::vector<Rational> values);

  // Segment widths and heights, the form most callers have at hand.
  static StepFunction from_widths(std::span<const Rational> widths, std::span<const Rational> values);

  std::size_t size() const { return values_.size(); }
  const std::vector<Rational>& breakpoints() const { return breakpoints_; }
  const std::vector<Rational>& values() const { return values_; }
  Rational width(std::size_t k) const;
  Rational segment_start(std::size_t k) const;

  // Value at x in (0, 1].
  const Rational& operator()(const Rational& x) const;

  // Segments rearranged in ascending order of value (stable).
  StepFunction sorted() const;

  StepFunction scaled(const Rational& factor) const;

 private:
  std::vector<Rational> breakpoints_;
  std::vector<Rational> values_;
};

// Integral of f over (0, m]; requires 0 < m <= 1.
Rational integration_prefix(const StepFunction& f, const Rational& m);

// Integral over (0, m] of the ascending rearrangement of f: the least total
// that any sub-population of mass m can carry.
Rational sorted_prefix(const StepFunction& f, const Rational& m);

// The points where the ascending rearrangement changes value, excluding 0.
std::vector<Rational> sorted_breakpoints(const StepFunction& f);

// Union of both functions' original and sorted breakpoints. Both prefix
// functions are linear between consecutive grid points.
std::vector<Rational> certification_grid(const StepFunction& f1, const StepFunction& f2);

struct AlphaResult {
  bool infinite = false;
  Rational value;                   // meaningful only when !infinite
  std::optional<Rational> argmax;   // grid point attaining the ratio
};

// Smallest alpha >= 0 with alpha * PF(covering, m) >= PF(covered, m) at
// every grid point. Infinite when PF(covering, m) = 0 < PF(covered, m)
// somewhere. An empty grid means certification_grid(covering, covered).
AlphaResult alpha_between(const StepFunction& covering, const StepFunction& covered,
                          std::span<const Rational> grid = {});

// One row of a prefix-sum comparison table.
struct PrefixRow {
  Rational m;
  Rational lhs;   // PF(covering, m)
  Rational rhs;   // PF(covered, m)
  std::optional<Rational> ratio;  // rhs / lhs; empty when lhs = 0
};

std::vector<PrefixRow> prefix_table(const StepFunction& covering, const StepFunction& covered,
                                    std::span<const Rational> grid);

// CSV with header "m,pf_lhs,pf_rhs,ratio,m_dec,pf_lhs_dec,pf_rhs_dec,ratio_dec".
std::string prefix_table_csv(std::span<const PrefixRow> rows);

enum class WelfareKind { utilitarian, nash, maxmin };

struct Welfare {
  WelfareKind kind;
  std::optional<Rational> exact;  // utilitarian and maxmin
  double approx = 0.0;            // always populated
};

// Welfare of a per-class surplus vector where each class carries its mass
// as weight: weighted mean, weighted geometric mean, and minimum over
// positive-width segments respectively. Nash is evaluated through logs in
// double precision (relative error around 1e-12) and is 0 whenever some
// segment has zero surplus.
Welfare evaluate_welfare(const StepFunction& profile, WelfareKind kind);

const char* to_string(WelfareKind kind);

}  // namespace fairsignal

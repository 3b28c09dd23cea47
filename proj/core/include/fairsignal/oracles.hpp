#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairsignal/lp.hpp"
#include "fairsignal/market.hpp"

namespace fairsignal {

inline constexpr std::size_t kDefaultAdversaryMaxN = 8;

// Canonical efficient scheme: x[k][i] (k <= i) is the mass of value i placed
// in the signal whose lowest support, and posted price, is value k. Entries
// with k > i are zero.
struct CanonicalSchemeVars {
  std::vector<std::vector<Rational>> x;

  // Per-class surplus: cs_i = sum_k x[k][i] (v_i - v_k) / f_i.
  SurplusProfile surplus(const ValueDistribution& dist) const;
  // One signal per nonempty row, in ascending order of k.
  SignalingScheme to_scheme(const ValueDistribution& dist) const;
};

struct BuyerOptimalResult {
  CanonicalSchemeVars vars;
  SignalingScheme scheme;
  Rational total_surplus;
};

// Maximizes total consumer surplus over canonical schemes.
BuyerOptimalResult buyer_optimal_scheme(const ValueDistribution& dist);

// The LP solved by buyer_optimal_scheme, for dumping.
LinearProgram buyer_optimal_program(const ValueDistribution& dist);

// E[v] - R^My: the surplus of a scheme that always sells and leaves the
// seller exactly the no-signal revenue.
Rational buyer_optimal_surplus(const ValueDistribution& dist);

struct AdversaryResult {
  Rational m;
  Rational value;
  CanonicalSchemeVars vars;
  Rational lambda;
  std::vector<Rational> nu;
};

// max over all schemes Z' of PF(s_{Z'}, m). Canonical schemes suffice since
// canonicalization preserves every buyer's surplus. The inner minimum over
// mass-m sub-populations is replaced by its LP dual, so the whole problem is
// one LP. Throws InvalidInput unless 0 < m <= 1 and n <= max_n.
AdversaryResult adversary_sorted_prefix(const ValueDistribution& dist, const Rational& m,
                                        std::size_t max_n = kDefaultAdversaryMaxN);

LinearProgram adversary_program(const ValueDistribution& dist, const Rational& m);

// Sorted breakpoints of the profile under test together with every F_D(v_k).
// Between consecutive grid points the tested PF is linear and the adversary
// optimum, being a maximum of functions linear in m, is convex; checking the
// grid therefore checks all of (0, 1].
std::vector<Rational> adversary_grid(const StepFunction& profile, const ValueDistribution& dist);

struct CertificateRow {
  Rational m;
  Rational scheme_pf;
  Rational adversary_pf;
  std::optional<Rational> ratio;  // adversary / scheme; empty when 0/0 or x/0
};

struct Certificate {
  std::vector<CertificateRow> rows;
  bool infinite = false;  // some adversary value is positive where the scheme's PF is zero
  Rational alpha;         // smallest alpha with alpha * PF >= adversary on the grid
};

// Combines adversary values computed elsewhere (possibly in parallel) with
// the tested profile's PF on the same grid.
Certificate make_certificate(const StepFunction& profile, std::span<const Rational> grid,
                             std::span<const Rational> adversary_values);

// Sequential convenience wrapper; the default grid is adversary_grid.
Certificate certify_alpha(const StepFunction& profile, const ValueDistribution& dist,
                          std::vector<Rational> grid = {}, std::size_t max_n = kDefaultAdversaryMaxN);

// True when every price that is revenue-optimal for the prior is also
// revenue-optimal (among all value grid prices) in every signal.
bool prior_prices_remain_optimal(const SignalingScheme& scheme, const ValueDistribution& dist);

// Three values with masses that need not be normalized.
struct ThreeValueInstance {
  std::vector<Rational> values;
  std::vector<Rational> masses;

  ValueDistribution normalized() const;
};

// Signals <x, y, z>, <0, y', z'>, <0, 0, z''> (as mass vectors) and the
// smallest surplus s_min among the two upper classes.
struct MaxMinPoint {
  Rational x, y, z, y2, z2, z3, s_min;
};

// Maximizes the smallest surplus of the v_2 and v_3 classes over canonical
// schemes with three signals; surplus constraints are multiplied through by
// the class mass so empty classes are allowed. Throws InvalidInput unless
// there are exactly three increasing positive values and nonnegative masses.
MaxMinPoint max_min_surplus_lp(const ThreeValueInstance& inst);
LinearProgram max_min_surplus_program(const ThreeValueInstance& inst);

// Smallest of the two upper-class surpluses at a point, or nullopt when the
// point violates a constraint of max_min_surplus_program.
std::optional<Rational> evaluate_max_min_point(const ThreeValueInstance& inst, const MaxMinPoint& p);

// Values <1, 1+eps, 2+eps> with unnormalized masses
// <eps^2 + 2 eps, 1 + (1+eps)^2, (1+eps) + (1+eps)^3>.
struct UniversalLowerBound {
  Rational eps;
  ThreeValueInstance instance;
  Rational closed_form;   // ((4 + 3 eps + eps^2) / (2 + eps)) * eps / f(v_2)
  MaxMinPoint reference;  // feasible point attaining closed_form
};

// Requires 0 < eps <= 1/100.
UniversalLowerBound universal_lb_instance(const Rational& eps);

struct BestAlpha {
  std::vector<Rational> grid;
  std::vector<Rational> adversary_values;
  Rational alpha;  // no scheme does better than this on the grid
  CanonicalSchemeVars vars;
  Certificate certificate;  // of the scheme attaining `alpha`, on its own grid
};

// Smallest alpha for which some scheme is alpha-majorized at every F_D(v_k),
// found as one LP. This lower-bounds the majorization factor of every scheme
// on the instance; the certificate of the optimizing scheme upper-bounds it.
BestAlpha best_alpha_scheme(const ValueDistribution& dist, std::size_t max_n = kDefaultAdversaryMaxN);

// Values <1, N, N+1> where v_2 and v_3 are both optimal prices.
struct BuyerOptimalLowerBound {
  Rational N;
  ValueDistribution dist;
  SignalingScheme buyer_optimal;  // the unique canonical buyer-optimal scheme
  SignalingScheme comparison;     // Z_2
  Rational cs2_buyer_optimal;     // (N - 1) / (N^2 + 1)
  Rational cs3_buyer_optimal;     // (N + N^2) / (N^2 + 1)
  Rational cs2_comparison;        // (N^2 - 1) / (N^2 + 1)
  Rational cs3_comparison;        // (N^2 - N) / (N^2 + 1)
};

// Requires N > 1.
BuyerOptimalLowerBound buyer_optimal_lb_instance(const Rational& N);

// Smallest positive per-class surplus, or nullopt when all are zero.
std::optional<Rational> min_positive_surplus(const SurplusProfile& profile);

}  // namespace fairsignal

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairsignal/rational.hpp"

namespace fairsignal {

enum class Sense { less_equal, equal, greater_equal };
enum class Direction { maximize, minimize };

struct LinearConstraint {
  std::vector<std::pair<std::size_t, Rational>> terms;  // (variable, coefficient)
  Sense sense;
  Rational rhs;
  std::string name;
};

// An LP over named variables with per-variable bounds. A missing lower bound
// means the variable is free.
struct LinearProgram {
  Direction direction = Direction::maximize;
  std::vector<Rational> objective;
  std::vector<std::string> names;
  std::vector<std::optional<Rational>> lower;
  std::vector<std::optional<Rational>> upper;
  std::vector<LinearConstraint> constraints;

  std::size_t add_variable(std::string name, Rational cost = 0,
                           std::optional<Rational> lower_bound = Rational(0),
                           std::optional<Rational> upper_bound = std::nullopt);
  void add_constraint(std::vector<std::pair<std::size_t, Rational>> terms, Sense sense, Rational rhs,
                      std::string name = {});

  std::size_t num_variables() const { return objective.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Rational value;               // objective value when optimal
  std::vector<Rational> point;  // one entry per variable when optimal
  std::size_t pivots = 0;
};

// Exact two-phase primal simplex on a dense rational tableau. Pricing is
// Dantzig's rule, switching to Bland's rule after any degenerate pivot, which
// rules out cycling. Deterministic for a given program.
LpSolution solve_lp(const LinearProgram& lp);

// Plain-text dump: one line for the objective, one per constraint, one per
// bounded variable; all coefficients as exact rationals.
std::string dump_lp(const LinearProgram& lp);

const char* to_string(LpStatus status);

}  // namespace fairsignal

#include "fairsignal/lp.hpp"

#include <limits>
#include <sstream>

#include "fairsignal/errors.hpp"

namespace fairsignal {

std::size_t LinearProgram::add_variable(std::string name, Rational cost, std::optional<Rational> lower_bound,
                                        std::optional<Rational> upper_bound) {
  objective.push_back(std::move(cost));
  names.push_back(std::move(name));
  lower.push_back(std::move(lower_bound));
  upper.push_back(std::move(upper_bound));
  return objective.size() - 1;
}

void LinearProgram::add_constraint(std::vector<std::pair<std::size_t, Rational>> terms, Sense sense,
                                   Rational rhs, std::string name) {
  for (const auto& [var, coef] : terms) {
    if (var >= num_variables()) throw InvalidInput("constraint references unknown variable");
  }
  constraints.push_back({std::move(terms), sense, std::move(rhs), std::move(name)});
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Standard-form image of an original variable: x = shift + pos - neg, where
// neg is only present for free variables.
struct Column {
  Rational shift;
  std::size_t pos = kNone;
  std::size_t neg = kNone;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : a_(rows, std::vector<Rational>(cols, Rational(0))), rhs_(rows, Rational(0)), basis_(rows, kNone) {}

  std::vector<std::vector<Rational>> a_;
  std::vector<Rational> rhs_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> cost_row_;  // reduced costs: c_B B^-1 A_j - c_j
  Rational value_;
  std::size_t pivots_ = 0;

  std::size_t rows() const { return a_.size(); }
  std::size_t cols() const { return a_.empty() ? 0 : a_[0].size(); }

  void set_objective(const std::vector<Rational>& c) {
    cost_row_.assign(cols(), Rational(0));
    for (std::size_t j = 0; j < cols(); ++j) cost_row_[j] = -c[j];
    value_ = 0;
    for (std::size_t i = 0; i < rows(); ++i) {
      const Rational& cb = c[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j < cols(); ++j) {
        if (a_[i][j] != 0) cost_row_[j] += cb * a_[i][j];
      }
      value_ += cb * rhs_[i];
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    ++pivots_;
    Rational inv = 1 / a_[r][c];
    for (std::size_t j = 0; j < cols(); ++j) {
      if (a_[r][j] != 0) a_[r][j] *= inv;
    }
    rhs_[r] *= inv;
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < cols(); ++j) {
      if (a_[r][j] != 0) nz.push_back(j);
    }
    auto eliminate = [&](std::vector<Rational>& row, Rational& row_rhs) {
      if (row[c] == 0) return;
      Rational f = row[c];
      for (std::size_t j : nz) row[j] -= f * a_[r][j];
      row_rhs -= f * rhs_[r];
    };
    for (std::size_t i = 0; i < rows(); ++i) {
      if (i != r) eliminate(a_[i], rhs_[i]);
    }
    eliminate(cost_row_, value_);
    basis_[r] = c;
  }

  // Maximizes the current objective over columns allowed to enter.
  // Returns false when unbounded.
  bool optimize(const std::vector<bool>& may_enter) {
    bool bland = false;
    while (true) {
      std::size_t enter = kNone;
      for (std::size_t j = 0; j < cols(); ++j) {
        if (!may_enter[j] || cost_row_[j] >= 0) continue;
        if (enter == kNone || (!bland && cost_row_[j] < cost_row_[enter])) enter = j;
        if (bland) break;
      }
      if (enter == kNone) return true;

      std::size_t leave = kNone;
      Rational best;
      for (std::size_t i = 0; i < rows(); ++i) {
        if (a_[i][enter] <= 0) continue;
        Rational ratio = rhs_[i] / a_[i][enter];
        if (leave == kNone || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == kNone) return false;
      bland = best == 0;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t nvars = lp.num_variables();
  if (lp.names.size() != nvars || lp.lower.size() != nvars || lp.upper.size() != nvars) {
    throw InvalidInput("linear program: inconsistent variable arrays");
  }

  // Map original variables onto non-negative structural columns.
  std::vector<Column> map(nvars);
  std::size_t ncols = 0;
  for (std::size_t v = 0; v < nvars; ++v) {
    map[v].pos = ncols++;
    if (lp.lower[v]) {
      map[v].shift = *lp.lower[v];
    } else {
      map[v].shift = 0;
      map[v].neg = ncols++;
    }
  }
  const std::size_t structural = ncols;

  struct Row {
    std::vector<std::pair<std::size_t, Rational>> terms;
    Sense sense;
    Rational rhs;
  };
  std::vector<Row> rows;
  auto add_row = [&](const std::vector<std::pair<std::size_t, Rational>>& terms, Sense sense, Rational rhs) {
    Row row{{}, sense, std::move(rhs)};
    for (const auto& [v, coef] : terms) {
      if (coef == 0) continue;
      row.rhs -= coef * map[v].shift;
      row.terms.emplace_back(map[v].pos, coef);
      if (map[v].neg != kNone) row.terms.emplace_back(map[v].neg, -coef);
    }
    if (row.rhs < 0) {
      row.rhs = -row.rhs;
      for (auto& t : row.terms) t.second = -t.second;
      if (row.sense == Sense::less_equal) {
        row.sense = Sense::greater_equal;
      } else if (row.sense == Sense::greater_equal) {
        row.sense = Sense::less_equal;
      }
    }
    rows.push_back(std::move(row));
  };
  for (const LinearConstraint& c : lp.constraints) add_row(c.terms, c.sense, c.rhs);
  for (std::size_t v = 0; v < nvars; ++v) {
    if (!lp.upper[v]) continue;
    if (lp.lower[v] && *lp.upper[v] < *lp.lower[v]) return LpSolution{LpStatus::infeasible, 0, {}, 0};
    add_row({{v, Rational(1)}}, Sense::less_equal, *lp.upper[v]);
  }

  // Slack/surplus columns, then artificials.
  std::vector<std::size_t> slack_col(rows.size(), kNone);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].sense != Sense::equal) slack_col[i] = ncols++;
  }
  const std::size_t first_artificial = ncols;
  std::vector<std::size_t> art_col(rows.size(), kNone);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].sense != Sense::less_equal) art_col[i] = ncols++;
  }

  Tableau tab(rows.size(), ncols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [col, coef] : rows[i].terms) tab.a_[i][col] += coef;
    tab.rhs_[i] = rows[i].rhs;
    if (rows[i].sense == Sense::less_equal) {
      tab.a_[i][slack_col[i]] = 1;
      tab.basis_[i] = slack_col[i];
    } else {
      if (rows[i].sense == Sense::greater_equal) tab.a_[i][slack_col[i]] = -1;
      tab.a_[i][art_col[i]] = 1;
      tab.basis_[i] = art_col[i];
    }
  }

  std::vector<bool> may_enter(ncols, true);
  if (first_artificial < ncols) {
    std::vector<Rational> phase1(ncols, Rational(0));
    for (std::size_t j = first_artificial; j < ncols; ++j) phase1[j] = -1;
    tab.set_objective(phase1);
    tab.optimize(may_enter);
    if (tab.value_ < 0) return LpSolution{LpStatus::infeasible, 0, {}, tab.pivots_};

    // Drive zero-level artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < tab.rows();) {
      if (tab.basis_[i] < first_artificial) {
        ++i;
        continue;
      }
      std::size_t col = kNone;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (tab.a_[i][j] != 0) {
          col = j;
          break;
        }
      }
      if (col != kNone) {
        tab.pivot(i, col);
        ++i;
      } else {
        tab.a_.erase(tab.a_.begin() + static_cast<std::ptrdiff_t>(i));
        tab.rhs_.erase(tab.rhs_.begin() + static_cast<std::ptrdiff_t>(i));
        tab.basis_.erase(tab.basis_.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    for (std::size_t j = first_artificial; j < ncols; ++j) may_enter[j] = false;
  }

  const bool minimize = lp.direction == Direction::minimize;
  std::vector<Rational> phase2(ncols, Rational(0));
  for (std::size_t v = 0; v < nvars; ++v) {
    Rational c = minimize ? Rational(-lp.objective[v]) : lp.objective[v];
    phase2[map[v].pos] = c;
    if (map[v].neg != kNone) phase2[map[v].neg] = -c;
  }
  tab.set_objective(phase2);
  if (!tab.optimize(may_enter)) return LpSolution{LpStatus::unbounded, 0, {}, tab.pivots_};

  std::vector<Rational> standard(structural, Rational(0));
  for (std::size_t i = 0; i < tab.rows(); ++i) {
    if (tab.basis_[i] < structural) standard[tab.basis_[i]] = tab.rhs_[i];
  }
  LpSolution sol{LpStatus::optimal, 0, {}, tab.pivots_};
  sol.point.reserve(nvars);
  for (std::size_t v = 0; v < nvars; ++v) {
    Rational x = map[v].shift + standard[map[v].pos];
    if (map[v].neg != kNone) x -= standard[map[v].neg];
    sol.value += lp.objective[v] * x;
    sol.point.push_back(std::move(x));
  }
  return sol;
}

std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream out;
  auto term_list = [&](const std::vector<std::pair<std::size_t, Rational>>& terms) {
    std::ostringstream s;
    bool first = true;
    for (const auto& [v, coef] : terms) {
      if (coef == 0) continue;
      s << (first ? "" : " ") << (coef < 0 ? "- " : (first ? "" : "+ ")) << to_string(abs(coef)) << ' '
        << lp.names[v];
      first = false;
    }
    return first ? std::string("0") : s.str();
  };
  std::vector<std::pair<std::size_t, Rational>> obj;
  for (std::size_t v = 0; v < lp.num_variables(); ++v) obj.emplace_back(v, lp.objective[v]);
  out << (lp.direction == Direction::maximize ? "maximize" : "minimize") << "\t" << term_list(obj) << '\n';
  for (std::size_t k = 0; k < lp.constraints.size(); ++k) {
    const LinearConstraint& c = lp.constraints[k];
    const char* op = c.sense == Sense::less_equal ? "<=" : c.sense == Sense::equal ? "=" : ">=";
    out << (c.name.empty() ? "c" + std::to_string(k) : c.name) << "\t" << term_list(c.terms) << ' ' << op
        << ' ' << to_string(c.rhs) << '\n';
  }
  for (std::size_t v = 0; v < lp.num_variables(); ++v) {
    if (lp.lower[v] && *lp.lower[v] == 0 && !lp.upper[v]) continue;
    out << "bound\t" << (lp.lower[v] ? to_string(*lp.lower[v]) : std::string("-inf")) << " <= "
        << lp.names[v] << " <= " << (lp.upper[v] ? to_string(*lp.upper[v]) : std::string("+inf")) << '\n';
  }
  return out.str();
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

}  // namespace fairsignal

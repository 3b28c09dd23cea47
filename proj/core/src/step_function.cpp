#include "fairsignal/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fairsignal/errors.hpp"

namespace fairsignal {

StepFunction::StepFunction(std::vector<Rational> breakpoints, std::vector<Rational> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.empty()) throw InvalidInput("step function needs at least one segment");
  if (breakpoints_.size() != values_.size()) {
    throw InvalidInput("step function: breakpoint and value counts differ");
  }
  Rational prev = 0;
  for (const Rational& b : breakpoints_) {
    if (b <= prev) throw InvalidInput("step function: breakpoints must increase strictly from 0");
    prev = b;
  }
  if (breakpoints_.back() != 1) throw InvalidInput("step function: last breakpoint must be 1");
  for (const Rational& v : values_) {
    if (v < 0) throw InvalidInput("step function: negative segment value");
  }
}

StepFunction StepFunction::from_widths(std::span<const Rational> widths,
                                       std::span<const Rational> values) {
  std::vector<Rational> bps;
  bps.reserve(widths.size());
  Rational acc = 0;
  for (const Rational& w : widths) {
    acc += w;
    bps.push_back(acc);
  }
  return StepFunction(std::move(bps), std::vector<Rational>(values.begin(), values.end()));
}

Rational StepFunction::width(std::size_t k) const { return breakpoints_[k] - segment_start(k); }

Rational StepFunction::segment_start(std::size_t k) const {
  return k == 0 ? Rational(0) : breakpoints_[k - 1];
}

const Rational& StepFunction::operator()(const Rational& x) const {
  if (x <= 0 || x > 1) throw InvalidInput("step function evaluated outside (0, 1]");
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

StepFunction StepFunction::sorted() const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values_[a] < values_[b]; });
  std::vector<Rational> widths, vals;
  widths.reserve(size());
  vals.reserve(size());
  for (std::size_t k : order) {
    widths.push_back(width(k));
    vals.push_back(values_[k]);
  }
  return from_widths(widths, vals);
}

StepFunction StepFunction::scaled(const Rational& factor) const {
  std::vector<Rational> vals = values_;
  for (Rational& v : vals) v *= factor;
  return StepFunction(breakpoints_, std::move(vals));
}

namespace {

void check_mass(const Rational& m) {
  if (m <= 0 || m > 1) throw InvalidInput("prefix mass must lie in (0, 1], got " + to_string(m));
}

Rational prefix_integral(const StepFunction& f, const Rational& m) {
  Rational total = 0;
  Rational start = 0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Rational& end = f.breakpoints()[k];
    if (m <= end) {
      total += (m - start) * f.values()[k];
      return total;
    }
    total += (end - start) * f.values()[k];
    start = end;
  }
  return total;
}

void push_unique_sorted(std::vector<Rational>& grid) {
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
}

}  // namespace

Rational integration_prefix(const StepFunction& f, const Rational& m) {
  check_mass(m);
  return prefix_integral(f, m);
}

Rational sorted_prefix(const StepFunction& f, const Rational& m) {
  check_mass(m);
  return prefix_integral(f.sorted(), m);
}

std::vector<Rational> sorted_breakpoints(const StepFunction& f) {
  return f.sorted().breakpoints();
}

std::vector<Rational> certification_grid(const StepFunction& f1, const StepFunction& f2) {
  std::vector<Rational> grid;
  for (const StepFunction* f : {&f1, &f2}) {
    grid.insert(grid.end(), f->breakpoints().begin(), f->breakpoints().end());
    auto sb = sorted_breakpoints(*f);
    grid.insert(grid.end(), sb.begin(), sb.end());
  }
  push_unique_sorted(grid);
  return grid;
}

std::vector<PrefixRow> prefix_table(const StepFunction& covering, const StepFunction& covered,
                                    std::span<const Rational> grid) {
  StepFunction lhs_sorted = covering.sorted();
  StepFunction rhs_sorted = covered.sorted();
  std::vector<PrefixRow> rows;
  rows.reserve(grid.size());
  for (const Rational& m : grid) {
    check_mass(m);
    PrefixRow row{m, prefix_integral(lhs_sorted, m), prefix_integral(rhs_sorted, m), std::nullopt};
    if (row.lhs != 0) row.ratio = Rational(row.rhs / row.lhs);
    rows.push_back(std::move(row));
  }
  return rows;
}

AlphaResult alpha_between(const StepFunction& covering, const StepFunction& covered,
                          std::span<const Rational> grid) {
  std::vector<Rational> owned;
  if (grid.empty()) {
    owned = certification_grid(covering, covered);
    grid = owned;
  }
  AlphaResult result;
  result.value = 0;
  for (const PrefixRow& row : prefix_table(covering, covered, grid)) {
    if (row.lhs == 0) {
      if (row.rhs > 0) {
        result.infinite = true;
        result.argmax = row.m;
        return result;
      }
      continue;
    }
    if (!result.argmax || *row.ratio > result.value) {
      result.value = *row.ratio;
      result.argmax = row.m;
    }
  }
  return result;
}

std::string prefix_table_csv(std::span<const PrefixRow> rows) {
  std::ostringstream out;
  out << "m,pf_lhs,pf_rhs,ratio,m_dec,pf_lhs_dec,pf_rhs_dec,ratio_dec\n";
  for (const PrefixRow& r : rows) {
    out << to_string(r.m) << ',' << to_string(r.lhs) << ',' << to_string(r.rhs) << ','
        << (r.ratio ? to_string(*r.ratio) : std::string("inf")) << ',' << to_decimal(r.m) << ','
        << to_decimal(r.lhs) << ',' << to_decimal(r.rhs) << ','
        << (r.ratio ? to_decimal(*r.ratio) : std::string("inf")) << '\n';
  }
  return out.str();
}

Welfare evaluate_welfare(const StepFunction& profile, WelfareKind kind) {
  Welfare w{kind, std::nullopt, 0.0};
  switch (kind) {
    case WelfareKind::utilitarian: {
      Rational total = 0;
      for (std::size_t k = 0; k < profile.size(); ++k) total += profile.width(k) * profile.values()[k];
      w.exact = total;
      w.approx = to_double(total);
      break;
    }
    case WelfareKind::maxmin: {
      Rational low = profile.values().front();
      for (const Rational& v : profile.values()) low = std::min(low, v);
      w.exact = low;
      w.approx = to_double(low);
      break;
    }
    case WelfareKind::nash: {
      double log_sum = 0.0;
      for (std::size_t k = 0; k < profile.size(); ++k) {
        const Rational& v = profile.values()[k];
        if (v == 0) return w;
        log_sum += to_double(profile.width(k)) * std::log(to_double(v));
      }
      w.approx = std::exp(log_sum);
      break;
    }
  }
  return w;
}

const char* to_string(WelfareKind kind) {
  switch (kind) {
    case WelfareKind::utilitarian: return "utilitarian";
    case WelfareKind::nash: return "nash";
    case WelfareKind::maxmin: return "maxmin";
  }
  return "unknown";
}

}  // namespace fairsignal

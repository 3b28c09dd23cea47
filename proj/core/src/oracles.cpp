#include "fairsignal/oracles.hpp"

#include <algorithm>
#include <map>

#include "fairsignal/errors.hpp"

namespace fairsignal {

namespace {

using Terms = std::vector<std::pair<std::size_t, Rational>>;

// Variables of a canonical scheme inside a larger LP: var[k][i] for i >= k.
struct CanonicalLayout {
  std::vector<std::vector<std::size_t>> var;

  CanonicalSchemeVars read(const ValueDistribution& dist, const std::vector<Rational>& point) const {
    const std::size_t n = dist.size();
    CanonicalSchemeVars out{std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, Rational(0)))};
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = k; i < n; ++i) out.x[k][i] = point[var[k][i]];
    }
    return out;
  }

  // f_i * cs_i as a linear form.
  Terms surplus_mass(const ValueDistribution& dist, std::size_t i) const {
    Terms t;
    for (std::size_t k = 0; k < i; ++k) t.emplace_back(var[k][i], dist.value(i) - dist.value(k));
    return t;
  }
};

CanonicalLayout add_canonical(LinearProgram& lp, const ValueDistribution& dist) {
  const std::size_t n = dist.size();
  CanonicalLayout layout{std::vector<std::vector<std::size_t>>(n, std::vector<std::size_t>(n, 0))};
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = k; i < n; ++i) {
      layout.var[k][i] = lp.add_variable("x_" + std::to_string(k) + "_" + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    Terms t;
    for (std::size_t k = 0; k <= i; ++k) t.emplace_back(layout.var[k][i], Rational(1));
    lp.add_constraint(std::move(t), Sense::equal, dist.mass(i), "mass_" + std::to_string(i));
  }
  // Posting v_k in signal k earns at least as much as any higher price.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = k + 1; j < n; ++j) {
      Terms t;
      for (std::size_t i = k; i < n; ++i) {
        Rational c = dist.value(k);
        if (i >= j) c -= dist.value(j);
        t.emplace_back(layout.var[k][i], c);
      }
      lp.add_constraint(std::move(t), Sense::greater_equal, 0,
                        "price_" + std::to_string(k) + "_" + std::to_string(j));
    }
  }
  return layout;
}

LpSolution solve_or_throw(const LinearProgram& lp, const char* what) {
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) {
    throw InvariantViolation(std::string(what) + " LP is " + to_string(sol.status));
  }
  return sol;
}

struct AdversaryLayout {
  CanonicalLayout scheme;
  std::size_t lambda;
  std::vector<std::size_t> nu;
};

// PF(s, m) >= m * lambda - sum_i f_i nu_i whenever f_i (lambda - nu_i) <= f_i cs_i.
// Returns the linear form m * lambda - sum f_i nu_i.
Terms add_prefix_dual(LinearProgram& lp, const ValueDistribution& dist, const CanonicalLayout& scheme,
                      const Rational& m, const std::string& tag, std::size_t& lambda,
                      std::vector<std::size_t>& nu) {
  const std::size_t n = dist.size();
  lambda = lp.add_variable("lambda" + tag);
  nu.clear();
  Terms value{{lambda, m}};
  for (std::size_t i = 0; i < n; ++i) {
    nu.push_back(lp.add_variable("nu" + tag + "_" + std::to_string(i)));
    value.emplace_back(nu.back(), -dist.mass(i));
    Terms t{{lambda, dist.mass(i)}, {nu.back(), -dist.mass(i)}};
    for (auto& [v, c] : scheme.surplus_mass(dist, i)) t.emplace_back(v, -c);
    lp.add_constraint(std::move(t), Sense::less_equal, 0, "dual" + tag + "_" + std::to_string(i));
  }
  return value;
}

AdversaryLayout build_adversary(LinearProgram& lp, const ValueDistribution& dist, const Rational& m) {
  if (m <= 0 || m > 1) throw InvalidInput("adversary mass must lie in (0, 1]");
  AdversaryLayout layout{add_canonical(lp, dist), 0, {}};
  Terms objective = add_prefix_dual(lp, dist, layout.scheme, m, "", layout.lambda, layout.nu);
  for (auto& [v, c] : objective) lp.objective[v] = c;
  return layout;
}

}  // namespace

SurplusProfile CanonicalSchemeVars::surplus(const ValueDistribution& dist) const {
  SurplusProfile p{dist.masses(), {}};
  for (std::size_t i = 0; i < dist.size(); ++i) {
    Rational acc = 0;
    for (std::size_t k = 0; k < i; ++k) acc += x[k][i] * (dist.value(i) - dist.value(k));
    p.surplus.push_back(acc / dist.mass(i));
  }
  return p;
}

SignalingScheme CanonicalSchemeVars::to_scheme(const ValueDistribution& dist) const {
  std::vector<SchemeEntry> entries;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    std::vector<SignalMass> masses;
    for (std::size_t i = k; i < dist.size(); ++i) {
      if (x[k][i] > 0) masses.push_back({i, x[k][i]});
    }
    if (masses.empty()) continue;
    auto [signal, weight] = Signal::from_masses(std::move(masses));
    entries.push_back({std::move(signal), std::move(weight)});
  }
  return SignalingScheme(std::move(entries), dist);
}

LinearProgram buyer_optimal_program(const ValueDistribution& dist) {
  LinearProgram lp;
  CanonicalLayout layout = add_canonical(lp, dist);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    for (auto& [v, c] : layout.surplus_mass(dist, i)) lp.objective[v] += c;
  }
  return lp;
}

BuyerOptimalResult buyer_optimal_scheme(const ValueDistribution& dist) {
  LinearProgram lp;
  CanonicalLayout layout = add_canonical(lp, dist);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    for (auto& [v, c] : layout.surplus_mass(dist, i)) lp.objective[v] += c;
  }
  LpSolution sol = solve_or_throw(lp, "buyer-optimal");
  CanonicalSchemeVars vars = layout.read(dist, sol.point);
  SignalingScheme scheme = vars.to_scheme(dist);
  return {std::move(vars), std::move(scheme), std::move(sol.value)};
}

Rational buyer_optimal_surplus(const ValueDistribution& dist) {
  return dist.expected_value() - myerson(dist).revenue;
}

LinearProgram adversary_program(const ValueDistribution& dist, const Rational& m) {
  LinearProgram lp;
  build_adversary(lp, dist, m);
  return lp;
}

AdversaryResult adversary_sorted_prefix(const ValueDistribution& dist, const Rational& m, std::size_t max_n) {
  if (dist.size() > max_n) {
    throw InvalidInput("adversary oracle limited to " + std::to_string(max_n) + " values, instance has " +
                       std::to_string(dist.size()));
  }
  LinearProgram lp;
  AdversaryLayout layout = build_adversary(lp, dist, m);
  LpSolution sol = solve_or_throw(lp, "adversary");
  AdversaryResult out{m, sol.value, layout.scheme.read(dist, sol.point), sol.point[layout.lambda], {}};
  for (std::size_t v : layout.nu) out.nu.push_back(sol.point[v]);
  return out;
}

std::vector<Rational> adversary_grid(const StepFunction& profile, const ValueDistribution& dist) {
  std::vector<Rational> grid = sorted_breakpoints(profile);
  for (std::size_t k = 0; k < dist.size(); ++k) grid.push_back(dist.cdf(k));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

Certificate make_certificate(const StepFunction& profile, std::span<const Rational> grid,
                             std::span<const Rational> adversary_values) {
  if (grid.size() != adversary_values.size()) throw InvalidInput("grid and adversary values differ in length");
  Certificate cert;
  cert.alpha = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CertificateRow row{grid[g], sorted_prefix(profile, grid[g]), adversary_values[g], std::nullopt};
    if (row.scheme_pf > 0) {
      row.ratio = row.adversary_pf / row.scheme_pf;
      cert.alpha = std::max(cert.alpha, *row.ratio);
    } else if (row.adversary_pf > 0) {
      cert.infinite = true;
    }
    cert.rows.push_back(std::move(row));
  }
  return cert;
}

Certificate certify_alpha(const StepFunction& profile, const ValueDistribution& dist, std::vector<Rational> grid,
                          std::size_t max_n) {
  if (grid.empty()) grid = adversary_grid(profile, dist);
  std::vector<Rational> values;
  values.reserve(grid.size());
  for (const Rational& m : grid) values.push_back(adversary_sorted_prefix(dist, m, max_n).value);
  return make_certificate(profile, grid, values);
}

bool prior_prices_remain_optimal(const SignalingScheme& scheme, const ValueDistribution& dist) {
  std::vector<Rational> prior = price_revenues(dist);
  const Rational best = *std::max_element(prior.begin(), prior.end());
  for (const SchemeEntry& e : scheme.entries()) {
    std::vector<Rational> revenue(dist.size(), Rational(0));
    for (const SignalMass& sm : e.signal.support()) {
      for (std::size_t p = 0; p <= sm.index; ++p) revenue[p] += dist.value(p) * sm.mass;
    }
    const Rational top = *std::max_element(revenue.begin(), revenue.end());
    for (std::size_t p = 0; p < dist.size(); ++p) {
      if (prior[p] == best && revenue[p] != top) return false;
    }
  }
  return true;
}

ValueDistribution ThreeValueInstance::normalized() const { return ValueDistribution::from_weights(values, masses); }

namespace {

void check_three(const ThreeValueInstance& inst) {
  if (inst.values.size() != 3 || inst.masses.size() != 3) {
    throw InvalidInput("max-min surplus LP needs exactly three values");
  }
  if (inst.values[0] <= 0 || inst.values[0] >= inst.values[1] || inst.values[1] >= inst.values[2]) {
    throw InvalidInput("values must be positive and strictly increasing");
  }
  for (const Rational& f : inst.masses) {
    if (f < 0) throw InvalidInput("masses must be nonnegative");
  }
}

}  // namespace

LinearProgram max_min_surplus_program(const ThreeValueInstance& inst) {
  check_three(inst);
  const auto& v = inst.values;
  const auto& f = inst.masses;
  LinearProgram lp;
  std::size_t x = lp.add_variable("x", 0, Rational(0), f[0]);
  std::size_t y = lp.add_variable("y");
  std::size_t z = lp.add_variable("z");
  std::size_t y2 = lp.add_variable("y'");
  std::size_t z2 = lp.add_variable("z'");
  std::size_t z3 = lp.add_variable("z''");
  std::size_t s = lp.add_variable("s_min", 1, std::nullopt);
  lp.add_constraint({{y, v[1] - v[0]}, {s, -f[1]}}, Sense::greater_equal, 0, "surplus_v2");
  lp.add_constraint({{z, v[2] - v[0]}, {z2, v[2] - v[1]}, {s, -f[2]}}, Sense::greater_equal, 0, "surplus_v3");
  lp.add_constraint({{x, v[0]}, {y, v[0] - v[1]}, {z, v[0] - v[1]}}, Sense::greater_equal, 0, "price1_v2");
  lp.add_constraint({{x, v[0]}, {y, v[0]}, {z, v[0] - v[2]}}, Sense::greater_equal, 0, "price1_v3");
  lp.add_constraint({{y2, v[1]}, {z2, v[1] - v[2]}}, Sense::greater_equal, 0, "price2_v3");
  lp.add_constraint({{y, 1}, {y2, 1}}, Sense::less_equal, f[1], "mass_v2");
  lp.add_constraint({{z, 1}, {z2, 1}, {z3, 1}}, Sense::less_equal, f[2], "mass_v3");
  return lp;
}

MaxMinPoint max_min_surplus_lp(const ThreeValueInstance& inst) {
  LinearProgram lp = max_min_surplus_program(inst);
  LpSolution sol = solve_or_throw(lp, "max-min surplus");
  const auto& p = sol.point;
  return {p[0], p[1], p[2], p[3], p[4], p[5], p[6]};
}

std::optional<Rational> evaluate_max_min_point(const ThreeValueInstance& inst, const MaxMinPoint& p) {
  check_three(inst);
  const auto& v = inst.values;
  const auto& f = inst.masses;
  for (const Rational* q : {&p.x, &p.y, &p.z, &p.y2, &p.z2, &p.z3}) {
    if (*q < 0) return std::nullopt;
  }
  const Rational total1 = p.x + p.y + p.z;
  if (p.x > f[0] || p.y + p.y2 > f[1] || p.z + p.z2 + p.z3 > f[2]) return std::nullopt;
  if (v[0] * total1 < v[1] * (p.y + p.z) || v[0] * total1 < v[2] * p.z) return std::nullopt;
  if (v[1] * (p.y2 + p.z2) < v[2] * p.z2) return std::nullopt;

  std::optional<Rational> low;
  auto consider = [&](const Rational& surplus_mass, const Rational& mass) {
    if (mass == 0) return;
    Rational cs = surplus_mass / mass;
    if (!low || cs < *low) low = cs;
  };
  consider(p.y * (v[1] - v[0]), f[1]);
  consider(p.z * (v[2] - v[0]) + p.z2 * (v[2] - v[1]), f[2]);
  return low ? low : Rational(0);
}

UniversalLowerBound universal_lb_instance(const Rational& eps) {
  if (eps <= 0 || eps > Rational(1, 100)) throw InvalidInput("epsilon must lie in (0, 1/100]");
  const Rational one_e = 1 + eps;
  ThreeValueInstance inst{{Rational(1), one_e, Rational(2 + eps)},
                          {eps * eps + 2 * eps, 1 + one_e * one_e, one_e + one_e * one_e * one_e}};
  const Rational y = (4 + 3 * eps + eps * eps) / (2 + eps);
  const Rational closed = y * eps / inst.masses[1];
  MaxMinPoint ref;
  ref.x = inst.masses[0];
  ref.y = y;
  ref.z = eps / (2 + eps);
  ref.y2 = inst.masses[1] - y;
  ref.z2 = ref.y2 * one_e;
  ref.z3 = 0;
  ref.s_min = closed;
  return {eps, std::move(inst), closed, std::move(ref)};
}

BestAlpha best_alpha_scheme(const ValueDistribution& dist, std::size_t max_n) {
  BestAlpha out;
  for (std::size_t k = 0; k < dist.size(); ++k) out.grid.push_back(dist.cdf(k));
  for (const Rational& m : out.grid) out.adversary_values.push_back(adversary_sorted_prefix(dist, m, max_n).value);

  LinearProgram lp;
  CanonicalLayout scheme = add_canonical(lp, dist);
  std::size_t t = lp.add_variable("t", 1);
  bool any = false;
  for (std::size_t g = 0; g < out.grid.size(); ++g) {
    if (out.adversary_values[g] == 0) continue;
    any = true;
    std::size_t lambda = 0;
    std::vector<std::size_t> nu;
    Terms value = add_prefix_dual(lp, dist, scheme, out.grid[g], "_g" + std::to_string(g), lambda, nu);
    value.emplace_back(t, -out.adversary_values[g]);
    lp.add_constraint(std::move(value), Sense::greater_equal, 0, "cover_g" + std::to_string(g));
  }
  if (!any) {
    // Nothing to cover: every scheme is trivially majorized.
    out.vars = buyer_optimal_scheme(dist).vars;
    out.alpha = 0;
  } else {
    LpSolution sol = solve_or_throw(lp, "best-alpha");
    if (sol.value <= 0) throw InvariantViolation("no scheme covers the adversary with a finite factor");
    out.vars = scheme.read(dist, sol.point);
    out.alpha = 1 / sol.value;
  }

  StepFunction profile = out.vars.surplus(dist).step();
  std::vector<Rational> grid = adversary_grid(profile, dist);
  std::map<Rational, Rational> known;
  for (std::size_t g = 0; g < out.grid.size(); ++g) known.emplace(out.grid[g], out.adversary_values[g]);
  std::vector<Rational> values;
  for (const Rational& m : grid) {
    auto it = known.find(m);
    values.push_back(it != known.end() ? it->second : adversary_sorted_prefix(dist, m, max_n).value);
  }
  out.certificate = make_certificate(profile, grid, values);
  return out;
}

BuyerOptimalLowerBound buyer_optimal_lb_instance(const Rational& N) {
  if (N <= 1) throw InvalidInput("N must exceed 1");
  const Rational denom = N * N * N + 2 * N * N + N;
  ValueDistribution dist({Rational(1), N, Rational(N + 1)},
                         {(N * N - 1) / denom, (N * N + 1) / denom, (N * N * N + N) / denom});

  const Rational s1 = N * N + N;
  std::vector<SchemeEntry> opt{
      {Signal({{0, (N * N - 1) / s1}, {1, 1 / s1}, {2, N / s1}}), 1 / (N + 1)},
      {Signal({{1, 1 / (N + 1)}, {2, N / (N + 1)}}), N / (N + 1)},
  };
  const Rational s2 = N * N * N - N;
  std::vector<SchemeEntry> cmp{
      {Signal({{0, (N * N - 1) / s1}, {1, (N + 1) / s1}}), 1 / (N + 1)},
      {Signal({{1, (N * N - N) / s2}, {2, (N * N * N - N * N) / s2}}), (N - 1) / (N + 1)},
      {Signal::singleton(2), 1 / (N + 1)},
  };
  const Rational q = N * N + 1;
  SignalingScheme opt_scheme(std::move(opt), dist);
  SignalingScheme cmp_scheme(std::move(cmp), dist);
  return {N,
          std::move(dist),
          std::move(opt_scheme),
          std::move(cmp_scheme),
          (N - 1) / q,
          (N + N * N) / q,
          (N * N - 1) / q,
          (N * N - N) / q};
}

std::optional<Rational> min_positive_surplus(const SurplusProfile& profile) {
  std::optional<Rational> low;
  for (const Rational& s : profile.surplus) {
    if (s > 0 && (!low || s < *low)) low = s;
  }
  return low;
}

}  // namespace fairsignal

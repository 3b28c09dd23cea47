#include <doctest.h>

#include <cmath>
#include <random>

#include "corpus.hpp"
#include "fairsignal/errors.hpp"
#include "fairsignal/step_function.hpp"

using namespace fairsignal;
using fairsignal::testing::q;

namespace {

StepFunction quartiles(std::vector<Rational> values) {
  std::vector<Rational> widths(values.size(), Rational(1, static_cast<long>(values.size())));
  return StepFunction::from_widths(widths, values);
}

const StepFunction nonmono = quartiles({q(0), q(3, 5), q(2, 5), q(3)});
const StepFunction mono = quartiles({q(0), q(1, 7), q(10, 7), q(17, 7)});

StepFunction random_step(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 7), w(1, 9), v(0, 12);
  int n = size(rng);
  std::vector<Rational> widths, values;
  Rational total = 0;
  for (int i = 0; i < n; ++i) {
    widths.push_back(Rational(w(rng)));
    total += widths.back();
    values.push_back(q(v(rng), 3));
  }
  for (Rational& x : widths) x /= total;
  return StepFunction::from_widths(widths, values);
}

}  // namespace

TEST_SUITE("step_function") {
  TEST_CASE("construction checks") {
    CHECK_THROWS_AS(StepFunction({}, {}), InvalidInput);
    CHECK_THROWS_AS(StepFunction({q(1, 2), q(1, 2), q(1)}, {q(1), q(2), q(3)}), InvalidInput);
    CHECK_THROWS_AS(StepFunction({q(1, 2), q(3, 4)}, {q(1), q(2)}), InvalidInput);
    CHECK_THROWS_AS(StepFunction({q(1)}, {q(-1)}), InvalidInput);
    CHECK_THROWS_AS(StepFunction({q(1)}, {q(1), q(2)}), InvalidInput);
  }

  TEST_CASE("evaluation is left-closed at breakpoints") {
    StepFunction f({q(1, 2), q(1)}, {q(1), q(2)});
    CHECK(f(q(1, 4)) == 1);
    CHECK(f(q(1, 2)) == 1);
    CHECK(f(q(3, 4)) == 2);
    CHECK(f(q(1)) == 2);
    CHECK(f.segment_start(1) == q(1, 2));
    CHECK(f.width(1) == q(1, 2));
  }

  TEST_CASE("integration prefix") {
    CHECK(integration_prefix(nonmono, q(3, 4)) == q(1, 4));
    StepFunction z0 = quartiles({q(0), q(1, 2), q(1), q(1, 2)});
    CHECK(integration_prefix(z0, q(1, 2)) == q(1, 8));
    CHECK(integration_prefix(z0, q(3, 4)) == q(3, 8));
    CHECK(integration_prefix(z0, q(1)) == q(1, 2));
    CHECK(integration_prefix(z0, q(5, 8)) == q(1, 4));
    CHECK_THROWS_AS(integration_prefix(z0, q(0)), InvalidInput);
    CHECK_THROWS_AS(integration_prefix(z0, q(3, 2)), InvalidInput);
  }

  TEST_CASE("sorted prefix") {
    CHECK(sorted_prefix(mono, q(1, 2)) == q(1, 28));
    CHECK(sorted_prefix(nonmono, q(1, 2)) == q(1, 10));
    CHECK(sorted_prefix(nonmono, q(3, 4)) == q(1, 4));
    CHECK(sorted_prefix(mono, q(3, 4)) == q(11, 28));
    StepFunction constant({q(1, 3), q(1)}, {q(5, 2), q(5, 2)});
    for (const Rational& m : {q(1, 7), q(1, 3), q(1, 2), q(1)}) CHECK(sorted_prefix(constant, m) == q(5, 2) * m);
  }

  TEST_CASE("sorted breakpoints and rearrangement") {
    StepFunction s = nonmono.sorted();
    CHECK(s.values() == std::vector<Rational>{q(0), q(2, 5), q(3, 5), q(3)});
    CHECK(sorted_breakpoints(nonmono) == std::vector<Rational>{q(1, 4), q(1, 2), q(3, 4), q(1)});
    StepFunction flat({q(1, 2), q(1)}, {q(1), q(1)});
    // Equal neighbours are not merged; extra grid points are harmless.
    CHECK(sorted_breakpoints(flat) == std::vector<Rational>{q(1, 2), q(1)});
  }

  TEST_CASE("alpha between profiles") {
    CHECK(alpha_between(nonmono, nonmono).value == 1);
    AlphaResult ab = alpha_between(nonmono, mono);
    AlphaResult ba = alpha_between(mono, nonmono);
    CHECK_FALSE(ab.infinite);
    CHECK_FALSE(ba.infinite);
    CHECK(ab.value > 1);
    CHECK(ba.value > 1);

    StepFunction f2 = quartiles({q(1), q(2), q(1, 2), q(3)});
    StepFunction f1 = f2.scaled(2);
    CHECK(alpha_between(f1, f2).value == q(1, 2));
    CHECK(alpha_between(f2, f1).value == 2);

    StepFunction zero = quartiles({q(0), q(0), q(0), q(0)});
    CHECK(alpha_between(zero, f2).infinite);
    CHECK(alpha_between(zero, zero).value == 0);
  }

  TEST_CASE("prefix table csv") {
    std::vector<Rational> grid{q(1, 2), q(1)};
    auto rows = prefix_table(nonmono, mono, grid);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].lhs == q(1, 10));
    CHECK(rows[0].rhs == q(1, 28));
    CHECK(*rows[0].ratio == q(5, 14));
    std::string csv = prefix_table_csv(rows);
    CHECK(csv.rfind("m,pf_lhs,pf_rhs,ratio,m_dec,pf_lhs_dec,pf_rhs_dec,ratio_dec\n", 0) == 0);
    CHECK(csv.find("1/2,1/10,1/28,5/14,0.500000000000,0.100000000000,0.035714285714,0.357142857143\n") !=
          std::string::npos);
  }

  TEST_CASE("welfare") {
    StepFunction nosig = quartiles({q(0), q(0), q(0), q(1)});
    CHECK(*evaluate_welfare(nosig, WelfareKind::utilitarian).exact == q(1, 4));
    CHECK(*evaluate_welfare(nosig, WelfareKind::maxmin).exact == 0);
    CHECK(evaluate_welfare(nosig, WelfareKind::nash).approx == 0.0);
    CHECK(*evaluate_welfare(mono, WelfareKind::utilitarian).exact == 1);
    CHECK(*evaluate_welfare(nonmono, WelfareKind::utilitarian).exact == 1);
    StepFunction pos = quartiles({q(1), q(4), q(1), q(4)});
    CHECK(evaluate_welfare(pos, WelfareKind::nash).approx == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(*evaluate_welfare(pos, WelfareKind::maxmin).exact == 1);
  }

  TEST_CASE("properties on random step functions") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      StepFunction f = random_step(rng);
      StepFunction g = random_step(rng);
      std::vector<Rational> grid = certification_grid(f, g);
      Rational prev_m = 0, prev_pf = 0;
      std::optional<Rational> prev_slope;
      for (const Rational& m : grid) {
        Rational pf = sorted_prefix(f, m);
        // The smallest-mass sub-population never beats the left-to-right one.
        CHECK(pf <= integration_prefix(f, m));
        CHECK(pf >= prev_pf);
        // PF is convex: an ascending rearrangement has increasing slopes.
        Rational slope = (pf - prev_pf) / (m - prev_m);
        if (prev_slope) CHECK(slope >= *prev_slope);
        prev_slope = slope;
        prev_m = m;
        prev_pf = pf;
      }
      CHECK(sorted_prefix(f, q(1)) == integration_prefix(f, q(1)));

      // Checking the grid suffices: no midpoint beats the grid alpha.
      AlphaResult a = alpha_between(f, g);
      if (!a.infinite && a.value > 0) {
        for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
          Rational mid = (grid[k] + grid[k + 1]) / 2;
          CHECK(a.value * sorted_prefix(f, mid) >= sorted_prefix(g, mid));
        }
      }
    }
  }
}

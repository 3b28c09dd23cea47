#include <doctest.h>

#include "corpus.hpp"
#include "fairsignal/errors.hpp"
#include "fairsignal/split_match.hpp"

using namespace fairsignal;
using fairsignal::testing::q;

namespace {

std::vector<EqualRevenueBinary> merged(const BinaryScheme& s) {
  std::vector<EqualRevenueBinary> out;
  for (const EqualRevenueBinary& b : s.binaries()) {
    if (!out.empty() && out.back().giver == b.giver && out.back().taker == b.taker) {
      out.back().weight += b.weight;
    } else {
      out.push_back(b);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("split_match") {
  TEST_CASE("equal-revenue binary masses") {
    ValueDistribution d = fairsignal::testing::running_example();
    EqualRevenueBinary b{1, 2, q(5, 24)};
    CHECK(b.giver_mass(d) == q(5, 24) * q(3, 5));
    CHECK(b.taker_mass(d) == q(5, 24) * q(2, 5));
    CHECK(b.surplus_mass(d) == q(1, 4));
  }

  TEST_CASE("running example hand trace") {
    ValueDistribution d = fairsignal::testing::running_example();
    SplitMatchResult r = split_and_match(d);
    REQUIRE(r.trace.size() == 3);
    CHECK(r.trace[0].giver == 0);
    CHECK(r.trace[0].taker == 1);
    CHECK(r.trace[0].weight == q(1, 4));
    CHECK(r.trace[1].giver == 1);
    CHECK(r.trace[1].taker == 2);
    CHECK(r.trace[1].weight == q(5, 24));
    CHECK(r.trace[2].giver == 2);
    CHECK(r.trace[2].taker == 3);
    CHECK(r.trace[2].weight == q(3, 20));
    CHECK(r.scheme.singleton_mass(0) == q(1, 8));
    CHECK(r.scheme.singleton_mass(1) == 0);
    CHECK(r.scheme.singleton_mass(2) == q(1, 10) + q(1, 24));
    CHECK(r.scheme.singleton_mass(3) == q(1, 8));
    CHECK(r.scheme.surplus().surplus == std::vector<Rational>{q(0), q(1, 2), q(1), q(1, 2)});

    SignalingScheme s = r.scheme.to_scheme();
    CHECK(is_efficient(s, d));
    // Every signal sells at its lowest support.
    Rational revenue = 0;
    for (const SchemeEntry& e : s.entries()) revenue += e.weight * d.value(e.signal.lowest_index());
    CHECK(scheme_revenue(s, d) == revenue);
    CHECK(scheme_surplus(s, d) == r.scheme.surplus());
  }

  TEST_CASE("five-value instance hand trace") {
    ValueDistribution d = fairsignal::testing::five_value_instance();
    SplitMatchResult r = split_and_match(d);
    SignalingScheme s = r.scheme.to_scheme();
    const SchemeEntry& first = s.entries().front();
    CHECK(first.signal.support().size() == 2);
    CHECK(first.signal.mass_at(0) == q(1, 2));
    CHECK(first.signal.mass_at(1) == q(1, 2));
    CHECK(first.weight == q(1, 10));

    std::vector<EqualRevenueBinary> expect{
        {0, 1, q(1, 10)}, {1, 2, q(9, 40)}, {1, 3, q(1, 10)}, {1, 4, q(3, 80)}, {2, 4, q(7, 40)}};
    CHECK(merged(r.scheme) == expect);
    std::vector<Rational> singles{q(1, 20), q(1, 10), q(1, 16), q(1, 20), q(1, 10)};
    for (std::size_t i = 0; i < singles.size(); ++i) CHECK(r.scheme.singleton_mass(i) == singles[i]);
    CHECK(r.ledger.giver[2] == q(1, 16));
    CHECK(r.scheme.surplus().surplus == std::vector<Rational>{q(0), q(1, 6), q(1, 2), q(1), q(25, 16)});
    CHECK(trace_csv(r.trace).rfind("round,giver,taker,weight\n1,0,1,1/10\n", 0) == 0);
  }

  TEST_CASE("single value") {
    ValueDistribution d({q(4)}, {q(1)});
    SplitMatchResult r = split_and_match(d);
    CHECK(r.trace.empty());
    SignalingScheme s = r.scheme.to_scheme();
    REQUIRE(s.size() == 1);
    CHECK(s.entries()[0].weight == 1);
    CHECK(s.entries()[0].signal == Signal::singleton(0));
  }

  TEST_CASE("binary schemes reject overdraw and negative weight") {
    ValueDistribution d = fairsignal::testing::running_example();
    CHECK_THROWS_AS(BinaryScheme(d, {{0, 1, q(1)}}), InvariantViolation);
    CHECK_THROWS_AS(BinaryScheme(d, {{0, 1, q(-1, 8)}}), InvariantViolation);
    CHECK_THROWS_AS(BinaryScheme(d, {{2, 1, q(1, 8)}}), InvariantViolation);
  }

  TEST_CASE("truncated upper bound") {
    ValueDistribution d = fairsignal::testing::running_example();
    CHECK(truncated_upper_bound(d, 1) == 0);
    CHECK(truncated_upper_bound(d, 2) == q(1, 4));
    CHECK(truncated_upper_bound(d, 4) == 1);
    CHECK(surplus_prefix_sum(d, 4) == q(7, 2));
    CHECK_THROWS_AS(truncated_upper_bound(d, 0), InvalidInput);
    CHECK_THROWS_AS(truncated_upper_bound(d, 5), InvalidInput);
  }

  TEST_CASE("ledger and output properties on random instances") {
    for (const ValueDistribution& d : fairsignal::testing::random_corpus(3, 300)) {
      SplitMatchResult r = split_and_match(d);
      // Half-mass budgets: a value never gives or takes more than half its mass.
      std::vector<Rational> given(d.size(), Rational(0)), taken(d.size(), Rational(0));
      for (const EqualRevenueBinary& b : r.scheme.binaries()) {
        CHECK(b.weight > 0);
        given[b.giver] += b.giver_mass(d);
        taken[b.taker] += b.taker_mass(d);
      }
      for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(given[i] <= d.mass(i) / 2);
        CHECK(taken[i] <= d.mass(i) / 2);
        CHECK(r.ledger.giver[i] == d.mass(i) / 2 - given[i]);
        CHECK(r.ledger.taker[i] == d.mass(i) / 2 - taken[i]);
      }
      // Termination: no giver budget left below a taker budget.
      for (std::size_t s = 0; s < d.size(); ++s) {
        for (std::size_t l = s + 1; l < d.size(); ++l) CHECK((r.ledger.giver[s] == 0 || r.ledger.taker[l] == 0));
      }
      SignalingScheme s = r.scheme.to_scheme();
      CHECK(is_efficient(s, d));
      CHECK(scheme_surplus(s, d) == r.scheme.surplus());
    }
  }
}

#include "fairsignal/ironing.hpp"

#include <sstream>

#include "fairsignal/errors.hpp"

namespace fairsignal {

StepFunction IronedFunction::step() const {
  return StepFunction(std::vector<Rational>(knots.begin() + 1, knots.end()), level);
}

std::vector<Rational> IronedFunction::contact_points() const {
  std::vector<Rational> out;
  for (std::size_t j : contact) {
    if (j > 0) out.push_back(knots[j]);
  }
  return out;
}

IronedFunction iron(const SurplusProfile& profile) {
  const std::size_t n = profile.masses.size();
  IronedFunction out;
  out.knots.assign(1, Rational(0));
  out.cumulative.assign(1, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    out.knots.push_back(out.knots.back() + profile.masses[i]);
    out.cumulative.push_back(out.cumulative.back() + profile.masses[i] * profile.surplus[i]);
  }
  const auto& x = out.knots;
  const auto& y = out.cumulative;

  // Lower hull, monotone chain. A knot on or above the chord of its
  // neighbours is dropped, so consecutive hull slopes increase strictly.
  std::vector<std::size_t> hull;
  for (std::size_t j = 0; j <= n; ++j) {
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2];
      std::size_t b = hull.back();
      if ((y[b] - y[a]) * (x[j] - x[a]) >= (y[j] - y[a]) * (x[b] - x[a])) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(j);
  }

  out.envelope.resize(n + 1);
  out.level.resize(n);
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    std::size_t a = hull[h];
    std::size_t b = hull[h + 1];
    Rational slope = (y[b] - y[a]) / (x[b] - x[a]);
    for (std::size_t j = a; j <= b; ++j) out.envelope[j] = y[a] + slope * (x[j] - x[a]);
    for (std::size_t i = a; i < b; ++i) out.level[i] = slope;
  }

  for (std::size_t j = 0; j <= n; ++j) {
    if (out.envelope[j] == y[j]) out.contact.push_back(j);
  }
  for (std::size_t c = 0; c + 1 < out.contact.size(); ++c) {
    std::size_t a = out.contact[c];
    std::size_t b = out.contact[c + 1];
    if (b - a > 1) out.intervals.push_back({a, b - 1, x[a], x[b], out.level[a]});
  }
  return out;
}

std::vector<RectanglePair> pair_rectangles(const SurplusProfile& profile, const IronedFunction& ironed,
                                           std::size_t t) {
  const IroningInterval& iv = ironed.intervals.at(t);
  struct Frontier {
    std::size_t cls;
    Rational height;
    Rational remaining;  // area not yet paired
    Rational x;          // left edge of the unpaired part
  };
  std::vector<Frontier> plus, minus;
  for (std::size_t i = iv.first_class; i <= iv.last_class; ++i) {
    const Rational& s = profile.surplus[i];
    if (s > iv.level) {
      Rational h = s - iv.level;
      plus.push_back({i, h, h * profile.masses[i], ironed.knots[i]});
    } else if (s < iv.level) {
      Rational h = iv.level - s;
      minus.push_back({i, h, h * profile.masses[i], ironed.knots[i]});
    }
  }

  std::vector<RectanglePair> pairs;
  std::size_t p = 0, m = 0;
  while (p < plus.size() && m < minus.size()) {
    Frontier& fp = plus[p];
    Frontier& fm = minus[m];
    Rational area = std::min(fp.remaining, fm.remaining);
    Rectangle a_plus{fp.cls, fp.x, area / fp.height, fp.height};
    Rectangle a_minus{fm.cls, fm.x, area / fm.height, fm.height};
    fp.remaining -= area;
    fm.remaining -= area;
    fp.x += a_plus.width;
    fm.x += a_minus.width;
    pairs.push_back({std::move(a_plus), std::move(a_minus)});
    if (fp.remaining == 0) ++p;
    if (fm.remaining == 0) ++m;
  }
  if (p != plus.size() || m != minus.size()) {
    throw InvariantViolation("ironing interval excess and deficit areas do not balance");
  }
  return pairs;
}

std::vector<std::vector<RectanglePair>> pair_all_intervals(const SurplusProfile& profile,
                                                          const IronedFunction& ironed) {
  std::vector<std::vector<RectanglePair>> out;
  for (std::size_t t = 0; t < ironed.intervals.size(); ++t) out.push_back(pair_rectangles(profile, ironed, t));
  return out;
}

BinaryScheme smooth(const BinaryScheme& base, const IronedFunction& ironed,
                    const std::vector<std::vector<RectanglePair>>& pairings) {
  const ValueDistribution& dist = base.distribution();
  const auto& original = base.binaries();
  std::vector<EqualRevenueBinary> current = original;

  for (std::size_t t = 0; t < pairings.size(); ++t) {
    const Rational& level = ironed.intervals.at(t).level;
    for (const RectanglePair& pair : pairings[t]) {
      if (!(pair.minus.height > level / 2)) continue;
      const std::size_t poor = pair.minus.value_index;
      const std::size_t rich = pair.plus.value_index;

      // Release a share of the poor class's taker and singleton mass.
      Rational poor_share = pair.minus.width / dist.mass(poor);
      Rational released = base.singleton_mass(poor) * poor_share;
      for (std::size_t q = 0; q < original.size(); ++q) {
        if (original[q].taker != poor) continue;
        current[q].weight -= original[q].weight * poor_share;
        released += original[q].taker_mass(dist) * poor_share;
      }

      // Take the matching share of giver mass from the rich class's
      // binaries and re-pair each giver with the poor class.
      Rational rich_share = pair.plus.width / dist.mass(rich) * pair.plus.height / (level + pair.plus.height);
      Rational used = 0;
      for (std::size_t q = 0; q < original.size(); ++q) {
        if (original[q].taker != rich) continue;
        const std::size_t giver = original[q].giver;
        Rational removed = original[q].weight * rich_share;
        current[q].weight -= removed;
        Rational weight = removed * (1 - dist.value(giver) / dist.value(rich)) /
                          (1 - dist.value(giver) / dist.value(poor));
        EqualRevenueBinary fresh{giver, poor, weight};
        used += fresh.taker_mass(dist);
        current.push_back(std::move(fresh));
      }
      if (used > released) {
        throw InvariantViolation("smoothing needs more taker mass at value index " + std::to_string(poor) +
                                 " than it released");
      }
    }
  }

  BinaryScheme out(dist, std::move(current));
  SurplusProfile after = out.surplus();
  for (std::size_t i = 0; i < after.surplus.size(); ++i) {
    if (2 * after.surplus[i] < ironed.level[i]) {
      throw InvariantViolation("smoothed surplus below half the ironed level at value index " +
                               std::to_string(i));
    }
  }
  return out;
}

BinaryScheme finalize(const BinaryScheme& smoothed, const IronedFunction& ironed) {
  SurplusProfile profile = smoothed.surplus();
  std::vector<Rational> keep(profile.surplus.size(), Rational(1));
  for (std::size_t i = 0; i < profile.surplus.size(); ++i) {
    const Rational& s = profile.surplus[i];
    Rational target = ironed.level[i] / 2;
    if (s < target) {
      throw InvariantViolation("surplus below half the ironed level at value index " + std::to_string(i));
    }
    // Keeping target / s of each taker binary leaves exactly the target.
    if (s > target) keep[i] = target / s;
  }
  std::vector<EqualRevenueBinary> binaries = smoothed.binaries();
  for (EqualRevenueBinary& b : binaries) b.weight *= keep[b.taker];
  return BinaryScheme(smoothed.distribution(), std::move(binaries));
}

FairScheme build_fair_scheme(const ValueDistribution& dist) {
  SplitMatchResult split = split_and_match(dist);
  SurplusProfile base_profile = split.scheme.surplus();
  IronedFunction ironed = iron(base_profile);
  auto pairings = pair_all_intervals(base_profile, ironed);
  BinaryScheme smoothed = smooth(split.scheme, ironed, pairings);
  BinaryScheme final_scheme = finalize(smoothed, ironed);

  SurplusProfile final_profile = final_scheme.surplus();
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (2 * final_profile.surplus[i] != ironed.level[i]) {
      throw InvariantViolation("final surplus differs from half the ironed level at value index " +
                               std::to_string(i));
    }
  }
  return {std::move(split), std::move(base_profile), std::move(ironed), std::move(pairings),
          std::move(smoothed), std::move(final_scheme)};
}

std::string ironing_csv(const ValueDistribution& dist, const SurplusProfile& profile,
                        const IronedFunction& ironed,
                        const std::vector<std::vector<RectanglePair>>& pairings) {
  std::ostringstream out;
  out << "t,y,v_plus,w_plus,h_plus,v_minus,w_minus,h_minus\n";
  for (std::size_t t = 0; t < pairings.size(); ++t) {
    for (std::size_t y = 0; y < pairings[t].size(); ++y) {
      const RectanglePair& p = pairings[t][y];
      out << t + 1 << ',' << y + 1 << ',' << to_string(dist.value(p.plus.value_index)) << ','
          << to_string(p.plus.width) << ',' << to_string(p.plus.height) << ','
          << to_string(dist.value(p.minus.value_index)) << ',' << to_string(p.minus.width) << ','
          << to_string(p.minus.height) << '\n';
    }
  }
  out << "\nclass,value,surplus,ironed\n";
  for (std::size_t i = 0; i < dist.size(); ++i) {
    out << i << ',' << to_string(dist.value(i)) << ',' << to_string(profile.surplus[i]) << ','
        << to_string(ironed.level[i]) << '\n';
  }
  return out.str();
}

}  // namespace fairsignal

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fairsignal/market.hpp"

namespace fairsignal::testing {

// Random instances with 1..max_n distinct values a/b (1 <= a <= 40,
// 1 <= b <= 4) and integer weights in [1, 20], normalized. Same seed, same
// corpus.
std::vector<ValueDistribution> random_corpus(std::uint64_t seed, std::size_t count, std::size_t max_n = 8);

// The corpus every property suite and the acceptance binary share.
inline constexpr std::uint64_t kCorpusSeed = 20240611;
inline constexpr std::size_t kCorpusSize = 1000;

std::filesystem::path data_dir();

inline Rational q(long num, long den = 1) { return make_rational(num, den); }

ValueDistribution running_example();
ValueDistribution five_value_instance();

}  // namespace fairsignal::testing

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fairsignal/market.hpp"

namespace fairsignal {

// Instance: {"values": [...], "masses": [...]}. Each number may be a JSON
// number (decimals are read from their literal text, so "0.1" is exactly
// 1/10) or a string "p/q". Ingestion merges repeated values and drops zero
// masses; anything else malformed raises InvalidInput.
ValueDistribution parse_instance(std::string_view json_text);
std::string instance_json(const ValueDistribution& dist);

// Scheme: {"values": [...], "entries": [{"weight": w, "support": {"i": mass}}]}
// with zero-based value indices as object keys. "values" is optional on
// input; when present it must match the instance. Raises PlausibilityError
// when the posteriors do not average to the prior.
SignalingScheme parse_scheme(std::string_view json_text, const ValueDistribution& dist);
std::string scheme_json(const SignalingScheme& scheme, const ValueDistribution& dist);

ValueDistribution load_instance(const std::filesystem::path& path);
SignalingScheme load_scheme(const std::filesystem::path& path, const ValueDistribution& dist);

// Whole-file helpers; failures raise InvalidInput naming the path.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace fairsignal

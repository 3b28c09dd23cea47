#include "fairsignal/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairsignal/errors.hpp"

namespace fairsignal {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// DOM builder that keeps every number as its literal text, so decimals never
// pass through binary floating point.
class ExactSax {
 public:
  explicit ExactSax(json& root) : dom_(root, true) {}

  bool null() { return dom_.null(); }
  bool boolean(bool b) { return dom_.boolean(b); }
  bool number_integer(json::number_integer_t v) {
    std::string s = std::to_string(v);
    return dom_.string(s);
  }
  bool number_unsigned(json::number_unsigned_t v) {
    std::string s = std::to_string(v);
    return dom_.string(s);
  }
  bool number_float(json::number_float_t, const std::string& literal) {
    std::string s = literal;
    return dom_.string(s);
  }
  bool string(std::string& s) { return dom_.string(s); }
  bool binary(json::binary_t& b) { return dom_.binary(b); }
  bool start_object(std::size_t n) { return dom_.start_object(n); }
  bool key(std::string& k) { return dom_.key(k); }
  bool end_object() { return dom_.end_object(); }
  bool start_array(std::size_t n) { return dom_.start_array(n); }
  bool end_array() { return dom_.end_array(); }
  bool parse_error(std::size_t pos, const std::string& token, const nlohmann::detail::exception& ex) {
    throw InvalidInput("malformed JSON at byte " + std::to_string(pos) + " near '" + token + "': " + ex.what());
  }

 private:
  nlohmann::detail::json_sax_dom_parser<json> dom_;
};

json parse_exact(std::string_view text) {
  json root;
  ExactSax sax(root);
  json::sax_parse(text.begin(), text.end(), &sax);
  return root;
}

Rational read_number(const json& j, const std::string& where) {
  if (!j.is_string()) throw InvalidInput(where + ": expected a number or a \"p/q\" string");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const ParseError& e) {
    throw InvalidInput(where + ": " + e.what());
  }
}

std::vector<Rational> read_array(const json& root, const char* key) {
  if (!root.is_object() || !root.contains(key)) throw InvalidInput(std::string("missing \"") + key + "\"");
  const json& arr = root.at(key);
  if (!arr.is_array()) throw InvalidInput(std::string("\"") + key + "\" must be an array");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(read_number(arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::size_t read_index(const std::string& key, std::size_t n) {
  std::size_t idx = 0;
  auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
  if (ec != std::errc() || ptr != key.data() + key.size() || key.empty()) {
    throw InvalidInput("support key \"" + key + "\" is not a value index");
  }
  if (idx >= n) throw InvalidInput("support index " + key + " out of range");
  return idx;
}

ordered_json rational_array(const std::vector<Rational>& xs) {
  ordered_json arr = ordered_json::array();
  for (const Rational& x : xs) arr.push_back(to_string(x));
  return arr;
}

}  // namespace

ValueDistribution parse_instance(std::string_view json_text) {
  json root = parse_exact(json_text);
  std::vector<Rational> values = read_array(root, "values");
  std::vector<Rational> masses = read_array(root, "masses");
  return ValueDistribution::ingest(std::move(values), std::move(masses));
}

std::string instance_json(const ValueDistribution& dist) {
  ordered_json out;
  out["values"] = rational_array(dist.values());
  out["masses"] = rational_array(dist.masses());
  return out.dump(2) + "\n";
}

SignalingScheme parse_scheme(std::string_view json_text, const ValueDistribution& dist) {
  json root = parse_exact(json_text);
  if (!root.is_object()) throw InvalidInput("scheme must be a JSON object");
  if (root.contains("values") && read_array(root, "values") != dist.values()) {
    throw InvalidInput("scheme values do not match the instance");
  }
  if (!root.contains("entries") || !root.at("entries").is_array()) {
    throw InvalidInput("scheme needs an \"entries\" array");
  }
  std::vector<SchemeEntry> entries;
  const json& list = root.at("entries");
  for (std::size_t q = 0; q < list.size(); ++q) {
    const std::string where = "entries[" + std::to_string(q) + "]";
    const json& e = list[q];
    if (!e.is_object() || !e.contains("weight") || !e.contains("support") || !e.at("support").is_object()) {
      throw InvalidInput(where + ": needs \"weight\" and a \"support\" object");
    }
    Rational weight = read_number(e.at("weight"), where + ".weight");
    std::vector<SignalMass> support;
    for (const auto& [key, mass] : e.at("support").items()) {
      Rational m = read_number(mass, where + ".support." + key);
      if (m < 0) throw InvalidInput(where + ": negative mass");
      if (m > 0) support.push_back({read_index(key, dist.size()), std::move(m)});
    }
    std::sort(support.begin(), support.end(),
              [](const SignalMass& a, const SignalMass& b) { return a.index < b.index; });
    if (support.empty()) throw InvalidInput(where + ": empty support");
    entries.push_back({Signal(std::move(support)), std::move(weight)});
  }
  return SignalingScheme(std::move(entries), dist);
}

std::string scheme_json(const SignalingScheme& scheme, const ValueDistribution& dist) {
  ordered_json out;
  out["values"] = rational_array(dist.values());
  ordered_json entries = ordered_json::array();
  for (const SchemeEntry& e : scheme.entries()) {
    ordered_json entry;
    entry["weight"] = to_string(e.weight);
    ordered_json support = ordered_json::object();
    for (const SignalMass& sm : e.signal.support()) support[std::to_string(sm.index)] = to_string(sm.mass);
    entry["support"] = std::move(support);
    entries.push_back(std::move(entry));
  }
  out["entries"] = std::move(entries);
  return out.dump(2) + "\n";
}

ValueDistribution load_instance(const std::filesystem::path& path) { return parse_instance(read_text(path)); }

SignalingScheme load_scheme(const std::filesystem::path& path, const ValueDistribution& dist) {
  return parse_scheme(read_text(path), dist);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
  if (!out) throw InvalidInput("failed writing " + path.string());
}

}  // namespace fairsignal

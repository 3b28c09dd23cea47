#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairsignal/market.hpp"
#include "fairsignal/oracles.hpp"

namespace fairsignal::cli {

enum ExitCode : int { kOk = 0, kGuaranteeFailed = 1, kBadInput = 2, kInvariant = 3 };

enum class SchemeKind { splitmatch, final, buyeropt, fullreveal, nosignal };
enum class Format { text, json, csv };

std::optional<SchemeKind> parse_scheme_kind(std::string_view name);
const char* to_string(SchemeKind kind);

// Comma-separated masses in (0, 1], e.g. "1/4,0.5,1".
std::vector<Rational> parse_grid(std::string_view text);

// FAIRSIGNAL_MAX_N when set to a positive integer, else the library default.
std::size_t adversary_limit_from_env();

struct BuildArtifacts {
  SignalingScheme scheme;
  std::string trace_csv;  // splitmatch and final
  std::string iron_csv;   // final
  std::string lp_dump;    // buyeropt
};

BuildArtifacts build_scheme(const ValueDistribution& dist, SchemeKind kind);

// Adversary optimum at every grid point, solved on up to `threads` workers.
// Output order follows the grid, so results do not depend on scheduling.
std::vector<Rational> adversary_values(const ValueDistribution& dist, const std::vector<Rational>& grid,
                                       std::size_t max_n, unsigned threads);

struct TableRow {
  Rational m;
  Rational pfv;
  Rational pf;
  std::optional<Rational> adversary;
  std::optional<Rational> ratio;
};

struct RunReport {
  ValueDistribution dist;
  std::string scheme_name;
  std::size_t signals = 0;
  PostedPrice myerson;
  Rational revenue;
  SurplusProfile profile;
  bool efficient = false;
  bool monotone = false;
  Rational utilitarian;
  double nash = 0.0;
  Rational maxmin;
  std::vector<TableRow> table;
  std::optional<Certificate> certificate;  // present only when the adversary ran
};

struct ReportOptions {
  bool adversary = false;
  std::vector<Rational> grid;  // empty: adversary_grid of the scheme's profile
  std::size_t max_n = kDefaultAdversaryMaxN;
  unsigned threads = 1;
};

RunReport make_report(const ValueDistribution& dist, const SignalingScheme& scheme, std::string scheme_name,
                      const ReportOptions& options);

std::string render(const RunReport& report, Format format);

// Full command line front end. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairsignal::cli

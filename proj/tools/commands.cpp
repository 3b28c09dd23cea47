#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "fairsignal/errors.hpp"
#include "fairsignal/io.hpp"
#include "fairsignal/ironing.hpp"
#include "fairsignal/lp.hpp"
#include "fairsignal/split_match.hpp"

namespace fairsignal::cli {

using fairsignal::to_string;
using nlohmann::ordered_json;

std::optional<SchemeKind> parse_scheme_kind(std::string_view name) {
  if (name == "splitmatch") return SchemeKind::splitmatch;
  if (name == "final") return SchemeKind::final;
  if (name == "buyeropt") return SchemeKind::buyeropt;
  if (name == "fullreveal") return SchemeKind::fullreveal;
  if (name == "nosignal") return SchemeKind::nosignal;
  return std::nullopt;
}

const char* to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::splitmatch: return "splitmatch";
    case SchemeKind::final: return "final";
    case SchemeKind::buyeropt: return "buyeropt";
    case SchemeKind::fullreveal: return "fullreveal";
    case SchemeKind::nosignal: return "nosignal";
  }
  return "unknown";
}

std::vector<Rational> parse_grid(std::string_view text) {
  std::vector<Rational> grid;
  while (!text.empty()) {
    std::size_t comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    Rational m;
    try {
      m = parse_rational(item);
    } catch (const ParseError& e) {
      throw InvalidInput(std::string("bad grid point: ") + e.what());
    }
    if (m <= 0 || m > 1) throw InvalidInput("grid points must lie in (0, 1]");
    grid.push_back(std::move(m));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::size_t adversary_limit_from_env() {
  const char* raw = std::getenv("FAIRSIGNAL_MAX_N");
  if (raw == nullptr || *raw == '\0') return kDefaultAdversaryMaxN;
  char* end = nullptr;
  unsigned long v = std::strtoul(raw, &end, 10);
  if (*end != '\0' || v == 0) throw InvalidInput("FAIRSIGNAL_MAX_N must be a positive integer");
  return static_cast<std::size_t>(v);
}

BuildArtifacts build_scheme(const ValueDistribution& dist, SchemeKind kind) {
  switch (kind) {
    case SchemeKind::splitmatch: {
      SplitMatchResult r = split_and_match(dist);
      return {r.scheme.to_scheme(), trace_csv(r.trace), {}, {}};
    }
    case SchemeKind::final: {
      FairScheme f = build_fair_scheme(dist);
      return {f.final.to_scheme(), trace_csv(f.split.trace),
              ironing_csv(dist, f.base_profile, f.ironed, f.pairings), {}};
    }
    case SchemeKind::buyeropt: {
      BuyerOptimalResult r = buyer_optimal_scheme(dist);
      if (r.total_surplus != buyer_optimal_surplus(dist)) {
        throw InvariantViolation("buyer-optimal LP optimum differs from E[v] - R^My");
      }
      return {std::move(r.scheme), {}, {}, dump_lp(buyer_optimal_program(dist))};
    }
    case SchemeKind::fullreveal: return {full_revelation(dist), {}, {}, {}};
    case SchemeKind::nosignal: return {no_signal(dist), {}, {}, {}};
  }
  throw InvalidInput("unknown scheme kind");
}

std::vector<Rational> adversary_values(const ValueDistribution& dist, const std::vector<Rational>& grid,
                                       std::size_t max_n, unsigned threads) {
  if (dist.size() > max_n) {
    throw InvalidInput("adversary oracle limited to " + std::to_string(max_n) + " values (set FAIRSIGNAL_MAX_N)");
  }
  std::vector<Rational> values(grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&] {
    for (std::size_t g = next++; g < grid.size(); g = next++) {
      try {
        values[g] = adversary_sorted_prefix(dist, grid[g], max_n).value;
      } catch (...) {
        std::lock_guard lock(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(grid.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return values;
}

RunReport make_report(const ValueDistribution& dist, const SignalingScheme& scheme, std::string scheme_name,
                      const ReportOptions& options) {
  RunReport r{dist, std::move(scheme_name), scheme.size(), myerson(dist), scheme_revenue(scheme, dist),
              scheme_surplus(scheme, dist), false, false, 0, 0.0, 0, {}, std::nullopt};
  r.efficient = is_efficient(scheme, dist);
  r.monotone = is_monotone(r.profile);
  StepFunction step = r.profile.step();
  r.utilitarian = *evaluate_welfare(step, WelfareKind::utilitarian).exact;
  r.nash = evaluate_welfare(step, WelfareKind::nash).approx;
  r.maxmin = *evaluate_welfare(step, WelfareKind::maxmin).exact;

  std::vector<Rational> grid = options.grid.empty() ? adversary_grid(step, dist) : options.grid;
  std::vector<Rational> adv;
  if (options.adversary) {
    adv = adversary_values(dist, grid, options.max_n, options.threads);
    r.certificate = make_certificate(step, grid, adv);
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    TableRow row{grid[g], integration_prefix(step, grid[g]), sorted_prefix(step, grid[g]), std::nullopt,
                 std::nullopt};
    if (options.adversary) {
      row.adversary = adv[g];
      row.ratio = r.certificate->rows[g].ratio;
    }
    r.table.push_back(std::move(row));
  }
  return r;
}

namespace {

std::string join(const std::vector<Rational>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + to_string(xs[i]);
  return s;
}

std::string with_decimal(const Rational& r) { return to_string(r) + " (" + to_decimal(r, 6) + ")"; }

std::string nash_text(double x) {
  std::ostringstream s;
  s << std::setprecision(12) << x;
  return s.str();
}

std::string alpha_text(const Certificate& c) { return c.infinite ? "inf" : to_string(c.alpha); }

std::string render_text(const RunReport& r) {
  std::ostringstream out;
  auto line = [&](const char* key, const std::string& value) {
    out << std::left << std::setw(18) << key << value << '\n';
  };
  line("values", join(r.dist.values()));
  line("masses", join(r.dist.masses()));
  line("myerson price", to_string(r.myerson.price));
  line("myerson revenue", to_string(r.myerson.revenue));
  line("scheme", r.scheme_name + " (" + std::to_string(r.signals) + " signals)");
  line("revenue", to_string(r.revenue));
  line("consumer surplus", with_decimal(r.profile.total()));
  line("efficient", r.efficient ? "yes" : "no");
  line("monotone", r.monotone ? "yes" : "no");
  line("surplus", join(r.profile.surplus));
  line("utilitarian", with_decimal(r.utilitarian));
  line("nash", nash_text(r.nash));
  line("maxmin", with_decimal(r.maxmin));
  if (r.certificate) line("certified alpha", alpha_text(*r.certificate));
  std::vector<std::vector<std::string>> cells{{"m", "pfv", "pf"}};
  if (r.certificate) cells[0].insert(cells[0].end(), {"adversary", "ratio"});
  for (const TableRow& row : r.table) {
    std::vector<std::string> c{to_string(row.m), to_string(row.pfv), to_string(row.pf)};
    if (row.adversary) {
      c.push_back(to_string(*row.adversary));
      c.push_back(row.ratio ? to_string(*row.ratio) : std::string(*row.adversary > 0 ? "inf" : "-"));
    }
    cells.push_back(std::move(c));
  }
  out << '\n';
  for (const auto& c : cells) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k + 1 < c.size()) {
        out << std::left << std::setw(14) << c[k];
      } else {
        out << c[k];
      }
    }
    out << '\n';
  }
  return out.str();
}

ordered_json strings(const std::vector<Rational>& xs) {
  ordered_json a = ordered_json::array();
  for (const Rational& x : xs) a.push_back(to_string(x));
  return a;
}

std::string render_json(const RunReport& r) {
  ordered_json j;
  j["values"] = strings(r.dist.values());
  j["masses"] = strings(r.dist.masses());
  j["myerson"] = {{"price", to_string(r.myerson.price)}, {"revenue", to_string(r.myerson.revenue)}};
  j["scheme"] = r.scheme_name;
  j["signals"] = r.signals;
  j["revenue"] = to_string(r.revenue);
  j["consumer_surplus"] = to_string(r.profile.total());
  j["efficient"] = r.efficient;
  j["monotone"] = r.monotone;
  j["surplus"] = strings(r.profile.surplus);
  j["welfare"] = {{"utilitarian", to_string(r.utilitarian)}, {"nash", r.nash}, {"maxmin", to_string(r.maxmin)}};
  if (r.certificate) j["certified_alpha"] = alpha_text(*r.certificate);
  ordered_json rows = ordered_json::array();
  for (const TableRow& row : r.table) {
    ordered_json o;
    o["m"] = to_string(row.m);
    o["pfv"] = to_string(row.pfv);
    o["pf"] = to_string(row.pf);
    if (row.adversary) {
      o["adversary_pf"] = to_string(*row.adversary);
      o["ratio"] = row.ratio ? ordered_json(to_string(*row.ratio)) : ordered_json(nullptr);
    }
    rows.push_back(std::move(o));
  }
  j["table"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string render_csv(const RunReport& r) {
  std::ostringstream out;
  const bool adv = r.certificate.has_value();
  out << "m,pfv,pf" << (adv ? ",adversary_pf,ratio" : "") << ",m_dec,pfv_dec,pf_dec"
      << (adv ? ",adversary_pf_dec,ratio_dec" : "") << '\n';
  for (const TableRow& row : r.table) {
    out << to_string(row.m) << ',' << to_string(row.pfv) << ',' << to_string(row.pf);
    if (adv) out << ',' << to_string(*row.adversary) << ',' << (row.ratio ? to_string(*row.ratio) : "");
    out << ',' << to_decimal(row.m) << ',' << to_decimal(row.pfv) << ',' << to_decimal(row.pf);
    if (adv) out << ',' << to_decimal(*row.adversary) << ',' << (row.ratio ? to_decimal(*row.ratio) : "");
    out << '\n';
  }
  return out.str();
}

// Ordered (name, value) pairs for the lower-bound reports.
struct Facts {
  std::vector<std::pair<std::string, std::string>> rows;
  bool ok = true;

  void add(std::string key, std::string value) { rows.emplace_back(std::move(key), std::move(value)); }
  void check(std::string key, bool pass) {
    ok = ok && pass;
    add(std::move(key), pass ? "pass" : "FAIL");
  }

  std::string render(Format format) const {
    std::ostringstream out;
    if (format == Format::json) {
      ordered_json j;
      for (const auto& [k, v] : rows) j[k] = v;
      j["ok"] = ok;
      return j.dump(2) + "\n";
    }
    if (format == Format::csv) {
      out << "quantity,value\n";
      for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
      return out.str();
    }
    for (const auto& [k, v] : rows) out << std::left << std::setw(38) << k << v << '\n';
    return out.str();
  }
};

Facts lowerbound_buyeropt(const Rational& N) {
  BuyerOptimalLowerBound lb = buyer_optimal_lb_instance(N);
  SurplusProfile opt = scheme_surplus(lb.buyer_optimal, lb.dist);
  SurplusProfile cmp = scheme_surplus(lb.comparison, lb.dist);
  Facts f;
  f.add("N", to_string(N));
  f.add("values", join(lb.dist.values()));
  f.add("masses", join(lb.dist.masses()));
  f.add("buyer_optimal_surplus", join(opt.surplus));
  f.add("comparison_surplus", join(cmp.surplus));
  f.check("cs_v2_buyer_optimal", opt.surplus[1] == lb.cs2_buyer_optimal);
  f.check("cs_v3_buyer_optimal", opt.surplus[2] == lb.cs3_buyer_optimal);
  f.check("cs_v2_comparison", cmp.surplus[1] == lb.cs2_comparison);
  f.check("cs_v3_comparison", cmp.surplus[2] == lb.cs3_comparison);
  Rational lp = buyer_optimal_scheme(lb.dist).total_surplus;
  f.add("buyer_optimal_lp", to_string(lp));
  f.check("buyer_optimal_matches_lp", opt.total() == lp);
  f.check("prior_prices_remain_optimal", prior_prices_remain_optimal(lb.buyer_optimal, lb.dist));
  auto low_opt = min_positive_surplus(opt);
  auto low_cmp = min_positive_surplus(cmp);
  if (low_opt && low_cmp) {
    Rational ratio = *low_cmp / *low_opt;
    f.add("min_positive_ratio", to_string(ratio));
    f.check("ratio_equals_N", ratio == N);
  } else {
    f.check("ratio_equals_N", false);
  }
  return f;
}

Facts lowerbound_universal(const Rational& eps, std::size_t max_n, bool dump_lp_text, std::string& lp_text) {
  UniversalLowerBound u = universal_lb_instance(eps);
  Facts f;
  f.add("epsilon", to_string(eps));
  f.add("values", join(u.instance.values));
  f.add("unnormalized_masses", join(u.instance.masses));
  MaxMinPoint p = max_min_surplus_lp(u.instance);
  f.add("lp_optimum", with_decimal(p.s_min));
  f.add("closed_form", with_decimal(u.closed_form));
  f.check("lp_equals_closed_form", p.s_min == u.closed_form);
  auto at_ref = evaluate_max_min_point(u.instance, u.reference);
  f.check("reference_point_attains", at_ref && *at_ref == u.closed_form);
  if (dump_lp_text) lp_text = dump_lp(max_min_surplus_program(u.instance));

  BestAlpha best = best_alpha_scheme(u.instance.normalized(), max_n);
  const Rational floor = Rational(3, 2) - 10 * eps;
  f.add("grid_optimal_alpha", with_decimal(best.alpha));
  f.add("best_scheme_certified_alpha",
        best.certificate.infinite ? std::string("inf") : with_decimal(best.certificate.alpha));
  f.check("alpha_at_least_1.5_minus_10eps", best.alpha >= floor);
  f.check("certificate_not_below_grid_optimum",
          !best.certificate.infinite && best.certificate.alpha >= best.alpha);
  return f;
}

std::vector<char*> as_argv(std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return argv;
}

}  // namespace

std::string render(const RunReport& report, Format format) {
  switch (format) {
    case Format::text: return render_text(report);
    case Format::json: return render_json(report);
    case Format::csv: return render_csv(report);
  }
  return {};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair signaling schemes for third-degree price discrimination", "fairsignal"};
  app.require_subcommand(1);

  const std::map<std::string, Format> formats{{"text", Format::text}, {"json", Format::json}, {"csv", Format::csv}};
  std::string in_path, out_path, scheme_arg = "final", grid_text, trace_path, iron_path, lp_path;
  Format format = Format::text;
  bool adversary = false;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> require;
  std::string max_alpha_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Report format")->transform(CLI::CheckedTransformer(formats));
    sub->add_option("--lp-dump", lp_path, "Write the LP in plain text to this file");
  };

  CLI::App* build = app.add_subcommand("build", "Construct a scheme for an instance");
  build->add_option("--in", in_path, "Instance JSON")->required();
  build->add_option("--out", out_path, "Write the scheme JSON here");
  build->add_option("--scheme", scheme_arg, "splitmatch | final | buyeropt | fullreveal | nosignal");
  build->add_option("--trace", trace_path, "Split-and-match trace CSV");
  build->add_option("--iron-dump", iron_path, "Ironing intervals and rectangle pairs CSV");
  build->add_flag("--adversary", adversary, "Certify against the adversary oracle");
  build->add_option("--grid", grid_text, "Comma-separated masses for the prefix table");
  build->add_option("--threads", threads, "Worker threads for adversary solves");
  add_common(build);

  CLI::App* verify = app.add_subcommand("verify", "Check a scheme file against an instance");
  verify->add_option("--in", in_path, "Instance JSON")->required();
  verify->add_option("--scheme", scheme_arg, "Scheme JSON")->required();
  verify->add_flag("--adversary", adversary, "Certify against the adversary oracle");
  verify->add_option("--grid", grid_text, "Comma-separated masses for the prefix table");
  verify->add_option("--threads", threads, "Worker threads for adversary solves");
  verify->add_option("--require", require, "Guarantees that must hold: efficient, monotone")
      ->check(CLI::IsMember({"efficient", "monotone"}));
  verify->add_option("--max-alpha", max_alpha_text, "Fail unless the certified alpha is at most this");
  verify->add_option("--out", out_path, "Also write the report here");
  add_common(verify);

  std::string lb_kind, lb_param;
  CLI::App* lower = app.add_subcommand("lowerbound", "Reproduce a lower-bound instance");
  lower->add_option("kind", lb_kind, "buyeropt | universal")->required()->check(CLI::IsMember({"buyeropt", "universal"}));
  lower->add_option("param", lb_param, "N > 1 for buyeropt, epsilon in (0, 1/100] for universal")->required();
  add_common(lower);

  std::vector<std::string> argv_store{"fairsignal"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv = as_argv(argv_store);
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kBadInput;
  }

  try {
    const std::size_t max_n = adversary_limit_from_env();
    if (*lower) {
      Rational param = parse_rational(lb_param);
      std::string lp_text;
      Facts f = lb_kind == "buyeropt" ? lowerbound_buyeropt(param)
                                      : lowerbound_universal(param, max_n, !lp_path.empty(), lp_text);
      if (!lp_path.empty()) {
        if (lb_kind == "buyeropt") lp_text = dump_lp(buyer_optimal_program(buyer_optimal_lb_instance(param).dist));
        write_text(lp_path, lp_text);
      }
      out << f.render(format);
      return f.ok ? kOk : kGuaranteeFailed;
    }

    ValueDistribution dist = load_instance(in_path);
    ReportOptions options{adversary, grid_text.empty() ? std::vector<Rational>{} : parse_grid(grid_text), max_n,
                          threads};

    if (*build) {
      auto kind = parse_scheme_kind(scheme_arg);
      if (!kind) throw InvalidInput("unknown scheme '" + scheme_arg + "'");
      BuildArtifacts built = build_scheme(dist, *kind);
      if (!out_path.empty()) write_text(out_path, scheme_json(built.scheme, dist));
      if (!trace_path.empty()) write_text(trace_path, built.trace_csv);
      if (!iron_path.empty()) write_text(iron_path, built.iron_csv);
      if (!lp_path.empty()) write_text(lp_path, built.lp_dump);
      out << render(make_report(dist, built.scheme, to_string(*kind), options), format);
      return kOk;
    }

    SignalingScheme scheme = load_scheme(scheme_arg, dist);
    std::optional<Rational> max_alpha;
    if (!max_alpha_text.empty()) {
      max_alpha = parse_rational(max_alpha_text);
      options.adversary = true;
    }
    RunReport report = make_report(dist, scheme, scheme_arg, options);
    if (!lp_path.empty() && report.certificate) {
      std::string text;
      for (const CertificateRow& row : report.certificate->rows) {
        text += "# m = " + to_string(row.m) + "\n" + dump_lp(adversary_program(dist, row.m));
      }
      write_text(lp_path, text);
    }
    std::string rendered = render(report, format);
    if (!out_path.empty()) write_text(out_path, rendered);
    out << rendered;

    bool ok = true;
    for (const std::string& g : require) {
      if (g == "efficient" && !report.efficient) ok = false;
      if (g == "monotone" && !report.monotone) ok = false;
    }
    if (max_alpha && (report.certificate->infinite || report.certificate->alpha > *max_alpha)) ok = false;
    if (!ok) err << "requested guarantee failed\n";
    return ok ? kOk : kGuaranteeFailed;
  } catch (const PlausibilityError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const InvariantViolation& e) {
    err << "internal invariant violated: " << e.what() << '\n';
    return kInvariant;
  }
}

}  // namespace fairsignal::cli

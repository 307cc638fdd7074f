// iltm: enumeration, vacuum integrals and moment reports for the planar
// intersection local time.

#include "iltm/combinatorics.hpp"
#include "iltm/error.hpp"
#include "iltm/integrals.hpp"
#include "iltm/moments.hpp"
#include "iltm/specfun.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef ILTM_VERSION
#define ILTM_VERSION "0.0.0"
#endif

namespace {

using json = nlohmann::json;
using namespace iltm;

constexpr int kExitOk = 0;
constexpr int kExitCompute = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMismatch = 3;

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  int r = 4;
  std::string matrix_class;
  std::string method = "closed";
  std::int64_t samples = 10'000'000;
  std::uint64_t seed = 1;
  double tol = 1e-4;
  std::string constants_path;
  std::string format = "text";
  int threads = 0;
  std::string output;
  int points = 8;
};

// One output line; uncertainty is empty for exact values.
struct Row {
  std::string name;
  double value;
  std::optional<double> uncertainty;
  std::string provenance;
};

std::string rational_text(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

json number_or_null(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

json meta(const Config& c) {
  return {{"seed", c.seed}, {"samples", c.samples}, {"tol", c.tol}, {"version", ILTM_VERSION}};
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(15) << v;
  return out.str();
}

void render_rows(const Config& c, const std::vector<Row>& rows, json extra = json::object()) {
  if (c.format == "json") {
    json doc;
    doc["meta"] = meta(c);
    doc["results"] = json::object();
    doc["provenance"] = json::object();
    for (const auto& r : rows) {
      doc["results"][r.name] = {
          {"value", r.value}, {"uncertainty", number_or_null(r.uncertainty)}, {"provenance", r.provenance}};
      doc["provenance"][r.name] = r.provenance;
    }
    for (auto& [k, v] : extra.items()) doc[k] = v;
    std::cout << doc.dump(2) << '\n';
  } else if (c.format == "csv") {
    std::cout << "name,value,uncertainty,provenance\n";
    for (const auto& r : rows)
      std::cout << r.name << ',' << format_double(r.value) << ','
                << (r.uncertainty ? format_double(*r.uncertainty) : "") << ',' << r.provenance << '\n';
  } else {
    for (const auto& r : rows) {
      std::cout << std::left << std::setw(16) << r.name << std::setw(22) << format_double(r.value);
      if (r.uncertainty) std::cout << "+- " << std::setw(12) << format_double(*r.uncertainty);
      else std::cout << std::setw(15) << "exact";
      std::cout << r.provenance << '\n';
    }
    if (extra.contains("notes"))
      for (const auto& n : extra["notes"]) std::cout << "note: " << n.get<std::string>() << '\n';
    if (extra.contains("diagnostics"))
      for (const auto& d : extra["diagnostics"]) std::cout << "diagnostic: " << d.get<std::string>() << '\n';
  }
}

Row row(const std::string& name, const Quantity& q) {
  const bool exact = q.provenance == Provenance::closed_form ||
                     (q.provenance == Provenance::external_constant && q.uncertainty == 0);
  return {name, q.value, exact ? std::nullopt : std::optional<double>(q.uncertainty), to_string(q.provenance)};
}

McOptions mc_options(const Config& c) {
  McOptions o;
  o.threads = c.threads;
  return o;
}

void require_samples(const Config& c) {
  if (c.samples < 1000) throw UsageError("--samples must be at least 1000 for Monte Carlo methods");
}

int parse_class(const std::string& s) {
  if (s.size() == 2 && s[0] == 'f' && s[1] >= '1' && s[1] <= '8') return s[1] - '0';
  throw UsageError("--class must be one of f1 ... f8");
}

// ---------------------------------------------------------------------------

int run_enumerate(const Config& c) {
  const auto classes = classify(enumerate_matrices(c.r));
  if (c.format == "json") {
    json doc;
    doc["meta"] = meta(c);
    doc["meta"]["r"] = c.r;
    json list = json::array();
    for (const auto& k : classes) {
      list.push_back({{"label", k.label.empty() ? json(nullptr) : json(k.label)},
                      {"g", k.weight},
                      {"cof", k.cofactor},
                      {"M", k.multiplicity},
                      {"gU", k.weighted_coefficient ? json(rational_text(*k.weighted_coefficient))
                                                    : json(nullptr)},
                      {"representative", k.representative.to_string()},
                      {"members", k.members.size()}});
    }
    doc["results"] = {{"classes", list}};
    doc["provenance"] = {{"classes", "enumeration"}};
    std::cout << doc.dump(2) << '\n';
    return kExitOk;
  }
  const bool csv = c.format == "csv";
  if (csv)
    std::cout << "F,g,cof,M,gU,representative\n";
  else
    std::cout << std::left << std::setw(6) << "F" << std::setw(6) << "g" << std::setw(6) << "cof" << std::setw(6)
              << "M" << std::setw(8) << "gU" << "representative\n";
  for (const auto& k : classes) {
    const std::string label = k.label.empty() ? "-" : k.label;
    const std::string gu =
        k.weighted_coefficient ? rational_text(*k.weighted_coefficient) : std::string(csv ? "" : "-");
    if (csv)
      std::cout << label << ',' << k.weight << ',' << k.cofactor << ',' << k.multiplicity << ',' << gu << ",\""
                << k.representative.to_string() << "\"\n";
    else
      std::cout << std::left << std::setw(6) << label << std::setw(6) << k.weight << std::setw(6) << k.cofactor
                << std::setw(6) << k.multiplicity << std::setw(8) << gu << k.representative.to_string() << '\n';
  }
  return kExitOk;
}

int run_integrals(const Config& c) {
  IntegralOptions o;
  o.method = parse_integral_method(c.method);
  o.samples = c.samples;
  o.seed = c.seed;
  o.tol = c.tol;
  o.mc = mc_options(c);
  o.quadrature_points = c.points;
  if (o.method == IntegralMethod::parametric) require_samples(c);
  ConstantsTable constants;
  if (!c.constants_path.empty()) {
    constants = load_constants(c.constants_path);
    for (const auto& w : constants.warnings) std::cerr << "warning: " << w << '\n';
    o.constants = &constants;
  }
  std::vector<int> classes;
  if (c.matrix_class.empty())
    for (int k = 1; k <= 8; ++k) classes.push_back(k);
  else
    classes.push_back(parse_class(c.matrix_class));

  std::vector<Row> rows;
  for (int k : classes) {
    if (o.method == IntegralMethod::closed && k >= 4) require_samples(c);
    IntegralOptions ok = o;
    ok.seed = substream_seed(c.seed, static_cast<std::uint64_t>(k));
    const auto rec = integral_record(k, ok);
    const std::string f = "f" + std::to_string(k);
    if (rec.I) rows.push_back(row("I_" + f, *rec.I));
    if (rec.script_I) rows.push_back(row("script_I_" + f, *rec.script_I));
  }
  render_rows(c, rows);
  return kExitOk;
}

std::vector<Row> report_rows(const MomentReport& r) {
  auto moment = [&](const std::string& name, double v) {
    const double u = r.error_budget.count(name) ? r.error_budget.at(name) : 0;
    bool exact = true;
    std::string prov = "closed-form";
    if (name == "m4" || name == "gamma2") {
      exact = false;
      prov = "assembled";
      bool all_external = true;
      for (const char* k : {"gamma_V5", "gamma_V7", "gamma_V8", "T_D"})
        if (!r.constants_used.count(k) || r.constants_used.at(k).provenance != Provenance::external_constant)
          all_external = false;
      if (all_external) {
        prov = "external-constant";
        exact = u == 0;
      }
    }
    return Row{name, v, exact ? std::nullopt : std::optional<double>(u), prov};
  };
  std::vector<Row> rows = {moment("m2", r.m2), moment("m3", r.m3)};
  if (r.m4) rows.push_back(moment("m4", *r.m4));
  rows.push_back(moment("m2_closed", r.m2_closed));
  rows.push_back(moment("m3_closed", r.m3_closed));
  rows.push_back(moment("gamma1", r.gamma1));
  if (r.gamma2) rows.push_back(moment("gamma2", *r.gamma2));
  rows.push_back(moment("gamma1_closed", r.gamma1_closed));
  for (const auto& [name, q] : r.constants_used) rows.push_back(row(name, q));
  return rows;
}

ReportOptions report_options(const Config& c) {
  ReportOptions o;
  o.samples = c.samples;
  o.seed = c.seed;
  o.tol = c.tol;
  o.mc = mc_options(c);
  if (!c.constants_path.empty()) o.constants_path = c.constants_path;
  return o;
}

bool constants_complete(const Config& c) {
  if (c.constants_path.empty()) return false;
  const auto t = load_constants(c.constants_path);
  for (const char* k : {"gamma_V5", "gamma_V7", "gamma_V8"})
    if (!t.get(k)) return false;
  return true;
}

int run_moments(const Config& c) {
  if (!constants_complete(c)) require_samples(c);
  const auto report = build_report(report_options(c));
  json extra = {{"diagnostics", report.diagnostics}, {"notes", report.notes}};
  json budget = json::object();
  for (const auto& [k, v] : report.error_budget) budget[k] = v;
  extra["error_budget"] = budget;
  render_rows(c, report_rows(report), extra);
  if (!report.diagnostics.empty()) {
    for (const auto& d : report.diagnostics) std::cerr << "error: " << d << '\n';
    return kExitCompute;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

// printed values are truncated after their last digit
double printed_unit(const std::string& printed) {
  const auto dot = printed.find('.');
  if (dot == std::string::npos) return 1;
  return std::pow(10.0, -static_cast<double>(printed.size() - dot - 1));
}

Check compare_printed(const std::string& name, double value, const std::string& printed, double tol) {
  const double target = std::stod(printed);
  const double allowance = std::max(tol, printed_unit(printed));
  std::ostringstream detail;
  detail << std::setprecision(12) << value << " vs " << printed;
  return {name, std::abs(value - target) <= allowance, detail.str()};
}

int run_verify(const Config& c) {
  std::vector<Check> checks;
  auto add = [&](Check ch) {
    std::cout << (ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << std::endl;
    checks.push_back(std::move(ch));
  };

  {
    const auto problems = table_mismatches();
    add({"class table r=2..4", problems.empty(), problems.empty() ? "g, cof, M reproduced" : problems.front()});
  }
  {
    bool ok = true;
    int count = 0;
    for (int r = 2; r <= 4; ++r)
      for (const auto& f : enumerate_matrices(r)) {
        ++count;
        ok = ok && cofactor(f) == arborescence_count(f, 0);
      }
    add({"cofactor vs arborescences", ok, std::to_string(count) + " matrices"});
  }
  {
    const auto s = zeta_f_series(20'000'000);
    const bool ok = std::abs(zeta_f() - 0.781302412896486) <= 1e-14 && std::abs(zeta_f() - s.midpoint()) <= 1e-12;
    add({"zeta_f", ok, format_double(zeta_f())});
  }
  {
    const double lhs = k0_cubed_moment().value;
    const double rhs = 1.5 * kPi * zeta_f();
    double worst = 0;
    for (double x : {0.5, 1.0, 2.0}) worst = std::max(worst, k0_convolution_check(x));
    add({"kernel identities", std::abs(lhs - rhs) <= 1e-9 * rhs && worst <= 1e-6,
         "K0^3 moment rel " + format_double(std::abs(lhs - rhs) / rhs) + ", convolution " + format_double(worst)});
  }
  {
    const bool ok = gamma_f1_recurrence(0, 7 * zeta3()) == 1 && std::abs(gamma_f1_recurrence(1, 1) - 4) < 1e-12 &&
                    std::abs(gamma_f2_recurrence(0, 1, 1) - 1) < 1e-12 &&
                    std::abs(gamma_f2_recurrence(1, 1, 1) - 12) < 1e-12;
    add({"gamma recurrences", ok, "targets 1, 4, 1, 12"});
  }
  {
    const auto [m2c, m3c] = closed_moments();
    const double m2 = moment2();
    const double m3 = moment3();
    add(compare_printed("m2", m2, "0.043035", c.tol));
    add(compare_printed("m3", m3, "0.010178", c.tol));
    add(compare_printed("m2_closed", m2c, "0.0649029", c.tol));
    add(compare_printed("m3_closed", m3c, "-0.016961", c.tol));
    add(compare_printed("gamma1", m3 / std::pow(m2, 1.5), "1.140051529", c.tol));
    add(compare_printed("gamma1_closed", m3c / std::pow(m2c, 1.5), "-1.0257865", c.tol));
  }
  {
    const auto coarse = t_d(1e-3);
    const auto fine = t_d(1e-4);
    const double rel = std::abs(coarse.value - fine.value) / fine.value;
    add({"T_D stability", rel <= 1e-3, format_double(fine.value) + ", relative change " + format_double(rel)});
  }
  {
    ReportOptions o = report_options(c);
    const bool external = constants_complete(c);
    if (!external) require_samples(c);
    const auto report = build_report(o);
    if (!report.m4) {
      add({"m4", false, report.diagnostics.empty() ? "missing" : report.diagnostics.front()});
    } else if (external) {
      add({"m4 (constants file)", std::abs(*report.m4 - 0.010063) <= 1e-5, format_double(*report.m4)});
      add({"gamma2 (constants file)", std::abs(*report.gamma2 - 2.4335) <= 5e-3, format_double(*report.gamma2)});
    } else {
      add({"m4 (internal)", std::abs(*report.m4 - 0.010063) <= 5e-4,
           format_double(*report.m4) + " +- " + format_double(report.error_budget.at("m4"))});
    }
  }

  const auto failed = std::count_if(checks.begin(), checks.end(), [](const Check& ch) { return !ch.passed; });
  std::cout << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitMismatch;
}

// ---------------------------------------------------------------------------
// constants

int run_constants(const Config& c) {
  const double tol = std::max(c.tol, 1e-11);
  std::map<std::string, double> values;
  std::ostringstream header;
  header << "Deterministic evaluations written by iltm " << ILTM_VERSION << ".\n";
  const auto v8 = gamma_v_deterministic(VGraph::v8, tol);
  const auto v7 = gamma_v_deterministic(VGraph::v7, tol);
  const auto v5 = gamma_v_deterministic(VGraph::v5, tol, c.points, c.threads);
  const auto td = t_d_graf(tol);
  values["gamma_V8"] = v8.value;
  values["gamma_V7"] = v7.value;
  values["gamma_V5"] = v5.value;
  values["T_D"] = td.value;
  values["zeta_f"] = zeta_f();
  header << std::setprecision(3) << "gamma_V8: momentum-space ring integral, error " << v8.error << "\n"
         << "gamma_V7: angular-averaged position integral, error " << v7.error << "\n"
         << "gamma_V5: sector quadrature, " << c.points << " nodes per axis, error " << v5.error << "\n"
         << "T_D: angular-averaged position integral, error " << td.error;
  const auto text = format_constants(values, header.str());
  if (c.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(c.output);
    if (!out) throw Error("cannot write " + c.output);
    out << text;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moments of the renormalized intersection local time of planar Brownian motion"};
  app.set_version_flag("--version", ILTM_VERSION);
  app.require_subcommand(1);
  Config config;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", config.format, "Output format")
        ->check(CLI::IsMember({"text", "json", "csv"}))
        ->capture_default_str();
    sub->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    sub->add_option("--samples", config.samples, "Monte Carlo samples per estimate")->capture_default_str();
    sub->add_option("--tol", config.tol, "Relative tolerance")->capture_default_str();
    sub->add_option("--threads", config.threads, "Worker threads (0: ILTM_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--constants", config.constants_path, "High-precision constants file")
        ->check(CLI::ExistingFile);
  };

  auto* enumerate = app.add_subcommand("enumerate", "Classes of admissible connectivity matrices");
  enumerate->add_option("--r", config.r, "Matrix order")->check(CLI::Range(2, 6))->capture_default_str();
  common(enumerate);

  auto* integrals = app.add_subcommand("integrals", "I(F) and script-I(F) of the tabulated classes");
  integrals->add_option("--class", config.matrix_class, "f1 ... f8 (default: all)");
  integrals->add_option("--method", config.method, "Evaluation route")
      ->check(CLI::IsMember({"closed", "parametric", "position"}))
      ->capture_default_str();
  integrals->add_option("--points", config.points, "Gauss nodes per axis for sector quadrature")
      ->check(CLI::Range(3, 24));
  common(integrals);

  auto* moments = app.add_subcommand("moments", "Moment report");
  common(moments);

  auto* verify = app.add_subcommand("verify", "Check the published values");
  common(verify);

  auto* constants = app.add_subcommand("constants", "Write a constants file from the deterministic routes");
  constants->add_option("-o,--output", config.output, "Output path (default: stdout)");
  constants->add_option("--points", config.points, "Gauss nodes per axis for the V5 sector quadrature (default 10)")
      ->check(CLI::Range(3, 24));
  common(constants);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (!(config.tol >= 1e-12 && config.tol <= 1e-2)) throw UsageError("--tol must lie in [1e-12, 1e-2]");
    if (enumerate->parsed()) return run_enumerate(config);
    if (integrals->parsed()) return run_integrals(config);
    if (moments->parsed()) return run_moments(config);
    if (verify->parsed()) return run_verify(config);
    if (constants->parsed()) {
      if (constants->count("--points") == 0) config.points = 10;
      return run_constants(config);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "constants file: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCompute;
  }
  return kExitUsage;
}

#include "iltm/moments.hpp"

#include "iltm/combinatorics.hpp"
#include "iltm/error.hpp"
#include "iltm/specfun.hpp"

#include <cmath>
#include <sstream>
#include <tuple>

namespace iltm {

namespace {

constexpr double kPi2 = kPi * kPi;
constexpr double kPi3 = kPi2 * kPi;
constexpr double kPi4 = kPi2 * kPi2;

}  // namespace

double moment2(std::optional<double> zeta_f_override) {
  const double zf = zeta_f_override.value_or(zeta_f());
  return (1 + 3 * zf - zeta2()) / (4 * kPi2);
}

double moment3(std::optional<double> zeta_f_override) {
  const double zf = zeta_f_override.value_or(zeta_f());
  return (311 * zeta3() / 18 - 4 - 15 * zf) / (16 * kPi3);
}

std::pair<double, double> closed_moments() {
  const double z3 = zeta3();
  return {(7 * z3 - 2 * zeta2()) / (8 * kPi2), -7 * z3 / (16 * kPi3)};
}

std::map<std::string, double> moment4_coefficients() {
  const double c = 1 / (16 * kPi4);
  return {{"gamma_V5", 11 * c}, {"gamma_V7", 11 * c}, {"gamma_V8", 5 * c}, {"T_D", 6 * c / kPi3}};
}

Moment4 moment4(const Moment4Inputs& in) {
  std::string missing;
  auto need = [&](const std::optional<Quantity>& q, const char* name) {
    if (!q) missing += missing.empty() ? name : std::string(", ") + name;
  };
  need(in.gamma_v5, "gamma_V5");
  need(in.gamma_v7, "gamma_V7");
  need(in.gamma_v8, "gamma_V8");
  need(in.t_d, "T_D");
  if (!missing.empty()) throw IncompleteConstants("fourth moment needs " + missing);

  const double zf = in.zeta_f.value_or(zeta_f());
  const auto coef = moment4_coefficients();
  const std::pair<const char*, const Quantity*> inputs[] = {
      {"gamma_V5", &*in.gamma_v5}, {"gamma_V7", &*in.gamma_v7}, {"gamma_V8", &*in.gamma_v8}, {"T_D", &*in.t_d}};

  const double known = 9 - kPi2 + kPi4 / 60 + (37 - 3 * kPi2) * zf + 9 * zf * zf - 1243 * zeta3() / 54;
  Moment4 out;
  out.value = known / (16 * kPi4);
  double variance = 0;
  for (const auto& [name, q] : inputs) {
    if (!std::isfinite(q->value) || !std::isfinite(q->uncertainty))
      throw InvalidArgument(std::string("non-finite input ") + name);
    const double c = coef.at(name);
    out.value += c * q->value;
    const double contribution = std::abs(c) * q->uncertainty;
    out.error_budget[name] = contribution;
    variance += contribution * contribution;
  }
  out.uncertainty = std::sqrt(variance);
  return out;
}

MomentReport build_report(const ReportOptions& options) {
  MomentReport report;

  for (const auto& problem : table_mismatches()) report.diagnostics.push_back("class table: " + problem);

  ConstantsTable constants;
  if (options.constants_path) {
    try {
      constants = load_constants(*options.constants_path);
      for (const auto& w : constants.warnings) report.diagnostics.push_back("constants: " + w);
    } catch (const Error& e) {
      report.diagnostics.push_back(std::string("constants: ") + e.what());
    }
  }

  const auto zf_override = constants.get("zeta_f");
  report.constants_used["zeta_f"] = zf_override ? Quantity{*zf_override, 0, Provenance::external_constant, ""}
                                                : Quantity{zeta_f(), 0, Provenance::closed_form,
                                                           "(psi1(1/3)-psi1(2/3))/9"};
  report.constants_used["zeta3"] = {zeta3(), 0, Provenance::closed_form, "zeta(3)"};

  report.m2 = moment2(zf_override);
  report.m3 = moment3(zf_override);
  std::tie(report.m2_closed, report.m3_closed) = closed_moments();
  report.gamma1 = report.m3 / std::pow(report.m2, 1.5);
  report.gamma1_closed = report.m3_closed / std::pow(report.m2_closed, 1.5);
  for (const char* name : {"m2", "m3", "m2_closed", "m3_closed", "gamma1", "gamma1_closed"})
    report.error_budget[name] = 0;

  Moment4Inputs inputs;
  inputs.zeta_f = zf_override;
  const VGraph vs[] = {VGraph::v5, VGraph::v7, VGraph::v8};
  std::optional<Quantity>* slots[] = {&inputs.gamma_v5, &inputs.gamma_v7, &inputs.gamma_v8};
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string name = "gamma_" + to_string(vs[i]);
    try {
      if (auto v = constants.get(name)) {
        *slots[i] = Quantity{*v, 0, Provenance::external_constant, ""};
      } else {
        const auto est = gamma_v(vs[i], options.samples, substream_seed(options.seed, i), options.mc);
        *slots[i] = Quantity{est.value, est.error, Provenance::internal_mc, ""};
      }
      report.constants_used[name] = **slots[i];
    } catch (const Error& e) {
      report.diagnostics.push_back(name + ": " + e.what());
    }
  }
  try {
    if (auto v = constants.get("T_D")) {
      inputs.t_d = Quantity{*v, 0, Provenance::external_constant, ""};
    } else {
      const auto est = t_d(options.tol);
      inputs.t_d = Quantity{est.value, est.error, Provenance::internal_cubature, ""};
    }
    report.constants_used["T_D"] = *inputs.t_d;
  } catch (const Error& e) {
    report.diagnostics.push_back(std::string("T_D: ") + e.what());
  }

  try {
    const auto m4 = moment4(inputs);
    report.m4 = m4.value;
    report.gamma2 = m4.value / (report.m2 * report.m2) - 3;
    report.error_budget["m4"] = m4.uncertainty;
    report.error_budget["gamma2"] = m4.uncertainty / (report.m2 * report.m2);
    for (const auto& [name, c] : m4.error_budget) report.error_budget["m4." + name] = c;
  } catch (const Error& e) {
    report.diagnostics.push_back(std::string("m4: ") + e.what());
  }

  std::ostringstream walk;
  walk.precision(10);
  walk << "rescaled random-walk multiple point range: skewness " << -report.gamma1;
  if (report.gamma2) walk << ", excess kurtosis " << *report.gamma2;
  report.notes.push_back(walk.str());
  return report;
}

}  // namespace iltm

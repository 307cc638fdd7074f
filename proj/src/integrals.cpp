#include "iltm/integrals.hpp"

#include "iltm/combinatorics.hpp"
#include "iltm/error.hpp"
#include "iltm/specfun.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <sstream>

namespace iltm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// radial integrals involving I0 are cut here; the integrands are below
// e^-150 beyond it
constexpr double kRadialCutoff = 80;

const char* const kConstantNames[] = {"gamma_V5", "gamma_V7", "gamma_V8", "T_D", "zeta_f"};

CubatureOptions rel(double tol) {
  CubatureOptions o;
  o.rel_tol = tol;
  return o;
}

void check_class(int k) {
  if (k < 1 || k > 8) throw InvalidArgument("matrix class must be f1 ... f8");
}

double prefactor(int edges, int loops) { return std::pow(4.0, edges) / std::pow(4 * kPi, loops); }

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::closed_form:
      return "closed-form";
    case Provenance::parametric_mc:
      return "parametric-mc";
    case Provenance::position_cubature:
      return "position-cubature";
    case Provenance::sector_quadrature:
      return "sector-quadrature";
    case Provenance::internal_mc:
      return "internal-mc";
    case Provenance::internal_cubature:
      return "internal-cubature";
    case Provenance::external_constant:
      return "external-constant";
  }
  return "unknown";
}

std::string to_string(IntegralMethod m) {
  switch (m) {
    case IntegralMethod::closed:
      return "closed";
    case IntegralMethod::parametric:
      return "parametric";
    case IntegralMethod::position:
      return "position";
  }
  return "unknown";
}

IntegralMethod parse_integral_method(const std::string& name) {
  if (name == "closed") return IntegralMethod::closed;
  if (name == "parametric") return IntegralMethod::parametric;
  if (name == "position") return IntegralMethod::position;
  throw InvalidArgument("unknown integral method '" + name + "'");
}

// ---------------------------------------------------------------------------
// Constants file

std::optional<double> ConstantsTable::get(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

ConstantsTable parse_constants(std::istream& in) {
  ConstantsTable table;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string name;
    std::string text;
    if (!(tokens >> name)) continue;
    if (!(tokens >> text)) throw ParseError("missing value for '" + name + "'", number);
    if (std::string extra; tokens >> extra) throw ParseError("unexpected token '" + extra + "'", number);
    if (std::find(std::begin(kConstantNames), std::end(kConstantNames), name) == std::end(kConstantNames))
      throw ParseError("unknown constant '" + name + "'", number);
    double value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value))
      throw ParseError("malformed number '" + text + "'", number);
    if (!table.values.emplace(name, value).second) throw ParseError("duplicate entry '" + name + "'", number);
    if (name == "zeta_f" && std::abs(value - zeta_f()) > 1e-12) {
      std::ostringstream msg;
      msg << std::setprecision(17) << "zeta_f override " << value << " differs from the internal value "
          << zeta_f() << " by more than 1e-12";
      table.warnings.push_back(msg.str());
    }
  }
  return table;
}

ConstantsTable load_constants(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open constants file " + path.string());
  return parse_constants(in);
}

std::string format_constants(const std::map<std::string, double>& values, const std::string& header) {
  std::ostringstream out;
  if (!header.empty()) {
    std::istringstream lines(header);
    for (std::string l; std::getline(lines, l);) out << "# " << l << '\n';
  }
  out << std::setprecision(17);
  for (const auto& [name, value] : values) out << name << ' ' << value << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Graphs

MultiGraph class_graph(int k) {
  check_class(k);
  return graph_from_matrix(reference_matrix(k));
}

std::string to_string(VGraph v) {
  switch (v) {
    case VGraph::v5:
      return "V5";
    case VGraph::v7:
      return "V7";
    case VGraph::v8:
      return "V8";
  }
  return "unknown";
}

namespace {

// Deletes an edge with exactly `copies` parallel copies (itself included),
// after checking that those edges form one orbit.
MultiGraph delete_parallel_kind(const MultiGraph& g, int copies) {
  const auto& edges = g.edges();
  std::vector<int> selected;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (std::count(edges.begin(), edges.end(), edges[e]) == copies) selected.push_back(static_cast<int>(e));
  if (selected.empty()) throw InvalidArgument("graph has no edge of the requested multiplicity");
  for (const auto& orbit : edge_orbits(g)) {
    if (std::find(orbit.begin(), orbit.end(), selected.front()) == orbit.end()) continue;
    auto sorted = orbit;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != selected) throw Error("edges of equal multiplicity split into several orbits");
    return delete_edge(g, selected.front());
  }
  throw Error("edge missing from its own orbit");
}

}  // namespace

MultiGraph v_graph(VGraph v) {
  switch (v) {
    case VGraph::v8:
      return delete_parallel_kind(class_graph(5), 2);
    case VGraph::v7:
      return delete_parallel_kind(class_graph(6), 1);
    case VGraph::v5:
      return delete_parallel_kind(class_graph(6), 2);
  }
  throw InvalidArgument("unknown V graph");
}

MultiGraph t_d_graph() { return delete_parallel_kind(class_graph(4), 3); }

MultiGraph t_u_graph() { return delete_parallel_kind(class_graph(4), 1); }

// ---------------------------------------------------------------------------
// Kernels

double rho_k1(double rho) {
  if (rho < 0) throw DomainError("rho_k1 requires rho >= 0");
  if (rho < 1e-4) {
    if (rho == 0) return 1;
    return 1 + 0.5 * rho * rho * (std::log(0.5 * rho) + kEulerGamma - 0.5);
  }
  return x_bessel_k1(rho);
}

IntegralEstimate k0_cubed_moment(double tol) {
  auto f = [](double x) {
    const double k = bessel_k0(x);
    return x * k * k * k;
  };
  auto est = integrate(f, Axis{0, kInf, 1}, rel(tol));
  est.value *= 2 * kPi;
  est.error *= 2 * kPi;
  return est;
}

double k0_convolution_check(double x_norm, double tol) {
  if (!(x_norm > 0)) throw InvalidArgument("k0_convolution_check requires |x| > 0");
  const double x2 = x_norm * x_norm;
  auto f = [&](std::span<const double> p) {
    const double rho = p[0];
    const double d2 = rho * rho + x2 - 2 * rho * x_norm * std::cos(p[1]);
    const double d = std::sqrt(std::max(d2, 0.0));
    if (d == 0) return 0.0;
    return rho * bessel_k0(rho) * bessel_k0(d);
  };
  // split the radius where the logarithmic singularity at y = x sits
  const Axis inner[] = {{0, x_norm, 1}, {0, kPi, 1}};
  const Axis outer[] = {{x_norm, kInf, 1}, {0, kPi, 1}};
  const double lhs = 2 * (adaptive_cubature(f, inner, rel(tol)).value + adaptive_cubature(f, outer, rel(tol)).value);
  const double rhs = kPi * x_bessel_k1(x_norm);
  return std::abs(lhs - rhs) / rhs;
}

double k0_squared_transform(double p) {
  if (p < 0) throw DomainError("k0_squared_transform requires p >= 0");
  if (p < 1e-8) return 0.5 - p * p / 12;
  return 2 * std::asinh(0.5 * p) / (p * std::sqrt(p * p + 4));
}

// ---------------------------------------------------------------------------
// T_U, T_D

Quantity t_u() {
  const double z = zeta_f();
  return {4.5 * kPi * kPi * kPi * z * z, 0, Provenance::closed_form, "9*pi^3/2*zeta_f^2"};
}

Quantity t_u_position(double tol) {
  const auto m = k0_cubed_moment(tol);
  return {2 * kPi * m.value * m.value, 4 * kPi * m.value * m.error, Provenance::position_cubature, ""};
}

IntegralEstimate t_d(double tol) {
  if (!(tol >= 1e-6)) throw InvalidArgument("t_d requires tol >= 1e-6");
  auto f = [](std::span<const double> p) {
    const double r1 = p[0];
    const double r2 = p[1];
    const double k1 = bessel_k0(r1);
    const double k2 = bessel_k0(r2);
    const double rho2 = r1 * r1 + r2 * r2 - 2 * r1 * r2 * std::cos(p[2]);
    return r1 * k1 * k1 * k1 * r2 * k2 * k2 * kPi * rho_k1(std::sqrt(std::max(rho2, 0.0)));
  };
  const Axis axes[] = {{0, kInf, 1}, {0, kInf, 1}, {0, kPi, 1}};
  CubatureOptions o = rel(tol);
  o.max_evaluations = 200'000'000;
  auto est = adaptive_cubature(f, axes, o);
  // phi over (0, 2 pi) by symmetry, times the outer 2 pi
  est.value *= 4 * kPi;
  est.error *= 4 * kPi;
  return est;
}

namespace {

// K0(r) int_0^r rho K0^p I0 + I0(r) int_r^inf rho K0^(p+1), the angular
// average of int d^2y K0(|y|)^p K0(|x-y|) over |x| = r, divided by 2 pi.
double graf_average(int p, double r, double tol) {
  auto lower = [p](double rho) { return rho * std::pow(bessel_k0(rho), p) * bessel_i0(rho); };
  auto upper = [p](double rho) { return rho * std::pow(bessel_k0(rho), p + 1); };
  const double lo = r > 0 ? integrate(lower, Axis{0, r, 1}, rel(tol)).value : 0.0;
  const double hi = integrate(upper, Axis{r, kInf, 1}, rel(tol)).value;
  return bessel_k0(r) * lo + bessel_i0(r) * hi;
}

IntegralEstimate radial(const ScalarIntegrand& f, double tol, double scale) {
  auto est = integrate(f, Axis{0, kRadialCutoff, 1}, rel(tol));
  est.value *= scale;
  est.error = est.error * scale + tol * std::abs(est.value);
  return est;
}

// Power-law tails: [0, 1] directly, [1, inf) with p = 1/u.
IntegralEstimate momentum(const ScalarIntegrand& f, double tol, double scale) {
  auto head = integrate(f, Axis{0, 1, 1}, rel(tol));
  auto tail = integrate([&f](double u) { return f(1 / u) / (u * u); }, Axis{0, 1, 1}, rel(tol));
  head.value = scale * (head.value + tail.value);
  head.error = scale * (head.error + tail.error);
  head.evaluations += tail.evaluations;
  return head;
}

}  // namespace

IntegralEstimate t_d_graf(double tol) {
  const double inner = tol * 0.1;
  auto f = [inner](double r) { return r * graf_average(3, r, inner) * graf_average(2, r, inner); };
  return radial(f, tol, 8 * kPi * kPi * kPi);
}

IntegralEstimate t_d_parametric(std::int64_t samples, std::uint64_t seed, const McOptions& options) {
  auto est = gamma_value({t_d_graph(), 0, GammaMethod::sector_mc}, samples, seed, options);
  const double scale = kPi * kPi * kPi / 2;
  est.value *= scale;
  est.error *= scale;
  return est;
}

// ---------------------------------------------------------------------------
// Gamma_V

IntegralEstimate gamma_v(VGraph v, std::int64_t samples, std::uint64_t seed, const McOptions& options) {
  return gamma_value({v_graph(v), 0, GammaMethod::sector_mc}, samples, seed, options);
}

IntegralEstimate gamma_v_deterministic(VGraph v, double tol, int points, int threads) {
  switch (v) {
    case VGraph::v8:
      return momentum(
          [](double p) {
            const double b = k0_squared_transform(p);
            return p * b * b * b / (p * p + 1);
          },
          tol, 16);
    case VGraph::v7: {
      const double inner = tol * 0.1;
      auto f = [inner](double r) {
        const double c = graf_average(2, r, inner);
        return r * c * c * bessel_k0(r);
      };
      // (2 / pi^3) * 2 pi * (2 pi)^2
      return radial(f, tol, 16);
    }
    case VGraph::v5:
      return gamma_sector_quadrature(v_graph(v), 0, points, threads);
  }
  throw InvalidArgument("unknown V graph");
}

IntegralEstimate gamma_f1_position(double tol) {
  return momentum(
      [](double x) {
        const double k = bessel_k0(x);
        return x * k * k * k * k;
      },
      tol, 8);
}

IntegralEstimate gamma_f2_position(double tol) {
  return momentum(
      [](double p) {
        const double b = k0_squared_transform(p);
        return p * b * b * b;
      },
      tol, 16);
}

IntegralEstimate gamma_f2_minus_edge_position(double tol) {
  return momentum(
      [](double p) {
        const double b = k0_squared_transform(p);
        return p * b * b / (p * p + 1);
      },
      tol, 8);
}

IntegralEstimate gamma_f5_position(double tol) {
  return momentum(
      [](double p) {
        const double b = k0_squared_transform(p);
        return p * b * b * b * b;
      },
      tol, 32);
}

// ---------------------------------------------------------------------------
// I(F), script-I(F)

namespace {

Quantity from_estimate(const IntegralEstimate& e, Provenance p, double scale = 1) {
  return {scale * e.value, scale * e.error, p, ""};
}

Quantity linear(std::initializer_list<std::pair<double, Quantity>> terms, Provenance p, std::string expression) {
  Quantity q{0, 0, p, std::move(expression)};
  double var = 0;
  for (const auto& [c, t] : terms) {
    q.value += c * t.value;
    var += c * c * t.uncertainty * t.uncertainty;
  }
  q.uncertainty = std::sqrt(var);
  return q;
}

Quantity constant_or(const IntegralOptions& o, const char* name, const auto& compute) {
  if (o.constants) {
    if (auto v = o.constants->get(name)) return {*v, 0, Provenance::external_constant, ""};
  }
  return compute();
}

Quantity v_constant(VGraph v, const IntegralOptions& o) {
  const std::string name = "gamma_" + to_string(v);
  return constant_or(o, name.c_str(), [&] {
    const auto e = gamma_v_deterministic(v, std::max(o.tol, 1e-11), o.quadrature_points, o.mc.threads);
    return from_estimate(e, v == VGraph::v5 ? Provenance::sector_quadrature : Provenance::position_cubature);
  });
}

Quantity t_d_constant(const IntegralOptions& o) {
  return constant_or(o, "T_D", [&] {
    return from_estimate(t_d_graf(std::max(o.tol, 1e-11)), Provenance::position_cubature);
  });
}

Provenance weakest(std::initializer_list<Quantity> parts, Provenance fallback) {
  for (const auto& q : parts)
    if (q.provenance == Provenance::sector_quadrature) return q.provenance;
  for (const auto& q : parts)
    if (q.provenance != Provenance::external_constant) return fallback;
  return Provenance::external_constant;
}

Quantity script_I_composite(int k, const IntegralOptions& o, Provenance fallback) {
  const double pi4 = kPi * kPi * kPi * kPi;
  switch (k) {
    case 4: {
      const Quantity tu = o.method == IntegralMethod::position ? t_u_position(std::max(o.tol, 1e-12)) : t_u();
      const Quantity td = t_d_constant(o);
      const double c = std::pow(2 / kPi, 7);
      return linear({{2 * c, tu}, {6 * c, td}}, weakest({td}, fallback), "(2/pi)^7*(2*T_U+6*T_D)");
    }
    case 5:
    case 7: {
      const Quantity v8 = v_constant(VGraph::v8, o);
      return linear({{512 / pi4, v8}}, weakest({v8}, fallback), "64/pi^4*8*gamma_V8");
    }
    case 6:
    case 8: {
      const Quantity v5 = v_constant(VGraph::v5, o);
      const Quantity v7 = v_constant(VGraph::v7, o);
      return linear({{256 / pi4, v7}, {256 / pi4, v5}}, weakest({v5, v7}, fallback),
                    "64/pi^4*(4*gamma_V7+4*gamma_V5)");
    }
  }
  throw InvalidArgument("no composite form for this class");
}

Quantity I_parametric(int k, const IntegralOptions& o) {
  const auto g = class_graph(k);
  const auto est = gamma_value({g, 0, GammaMethod::sector_mc}, o.samples, o.seed, o.mc);
  return from_estimate(est, Provenance::parametric_mc, prefactor(g.edge_count(), loop_number(g)));
}

Quantity script_I_parametric(int k, const IntegralOptions& o) {
  const auto g = class_graph(k);
  const auto orbits = edge_orbits(g);
  double value = 0;
  double var = 0;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const auto h = delete_edge(g, orbits[i].front());
    const auto est = gamma_value({h, 0, GammaMethod::sector_mc}, o.samples, substream_seed(o.seed, i), o.mc);
    const auto size = static_cast<double>(orbits[i].size());
    value += size * est.value;
    var += size * size * est.error * est.error;
  }
  const double c = prefactor(g.edge_count() - 1, loop_number(g) - 1);
  return {c * value, c * std::sqrt(var), Provenance::parametric_mc, ""};
}

}  // namespace

Quantity I_of(int k, const IntegralOptions& o) {
  check_class(k);
  const double z3 = zeta3();
  const double pi3 = kPi * kPi * kPi;
  switch (o.method) {
    case IntegralMethod::closed:
      if (k == 1) return {28 * z3 / pi3, 0, Provenance::closed_form, "28/pi^3*zeta(3)"};
      if (k == 2 || k == 3) return {48 * z3 / (pi3 * kPi), 0, Provenance::closed_form, "48/pi^4*zeta(3)"};
      return I_parametric(k, o);
    case IntegralMethod::parametric:
      return I_parametric(k, o);
    case IntegralMethod::position: {
      const double tol = std::max(o.tol, 1e-12);
      if (k == 1) return from_estimate(gamma_f1_position(tol), Provenance::position_cubature, prefactor(4, 3));
      if (k == 2 || k == 3)
        return from_estimate(gamma_f2_position(tol), Provenance::position_cubature, prefactor(6, 4));
      if (k == 5 || k == 7)
        return from_estimate(gamma_f5_position(tol), Provenance::position_cubature, prefactor(8, 5));
      throw InvalidArgument("no position-space route for I(f" + std::to_string(k) + ")");
    }
  }
  throw InvalidArgument("unknown integral method");
}

Quantity script_I_of(int k, const IntegralOptions& o) {
  check_class(k);
  const double pi2 = kPi * kPi;
  switch (o.method) {
    case IntegralMethod::closed:
      if (k == 1) return {48 * zeta_f() / pi2, 0, Provenance::closed_form, "48/pi^2*zeta_f"};
      if (k == 2 || k == 3)
        return {352 * zeta3() / (3 * pi2 * kPi), 0, Provenance::closed_form, "352/(3*pi^3)*zeta(3)"};
      return script_I_composite(k, o, Provenance::position_cubature);
    case IntegralMethod::parametric:
      return script_I_parametric(k, o);
    case IntegralMethod::position: {
      const double tol = std::max(o.tol, 1e-12);
      if (k == 1) {
        // Gamma_{G(f1) minus e}(0) = (2 / pi) * 2 pi int x K0^3, four edges
        return from_estimate(k0_cubed_moment(tol), Provenance::position_cubature, prefactor(3, 2) * 4 * 2 / kPi);
      }
      if (k == 2 || k == 3)
        return from_estimate(gamma_f2_minus_edge_position(tol), Provenance::position_cubature, prefactor(5, 3) * 6);
      return script_I_composite(k, o, Provenance::position_cubature);
    }
  }
  throw InvalidArgument("unknown integral method");
}

IntegralRecord integral_record(int k, const IntegralOptions& options) {
  IntegralRecord record;
  record.matrix_class = k;
  try {
    record.I = I_of(k, options);
  } catch (const InvalidArgument&) {
    check_class(k);
  }
  record.script_I = script_I_of(k, options);
  return record;
}

}  // namespace iltm

#pragma once
// Temperature-dependent Sellmeier dispersion per crystal axis, loaded from a
// material file. All wavelengths vacuum micrometers, temperatures Celsius.
//
//   sellmeier2  : n0^2 = A + B1/(L2-C1) + B2/(L2-C2),        L2 = lambda^2
//   sellmeier2q : n0^2 = A + B1/(L2-C1) + B2/(L2-C2) + D*L2
//   n(lambda,T) = n0(lambda) + n1(lambda)*dT + n2(lambda)*dT^2,  dT = T - 25
//   n1, n2      : cubic in 1/lambda, coefficients [a0..a3, b0..b3]
//
// Evaluation outside the declared validity box is a hard RangeError; group
// quantities additionally require lambda strictly inside the interval.

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "core.hpp"
#include "toml_lite.hpp"

namespace dpp {

enum class SellmeierForm { sellmeier2, sellmeier2q };

struct AxisDispersion {
  SellmeierForm form = SellmeierForm::sellmeier2;
  std::vector<double> coef;      // 5 (sellmeier2) or 6 (sellmeier2q)
  std::vector<double> thermal;   // empty (no correction) or 8
  double lambda_min_um = 0.0, lambda_max_um = 0.0;
  double temp_min_c = 0.0, temp_max_c = 0.0;
};

struct DispersionModel {
  std::map<CrystalAxis, AxisDispersion> axes;
  std::string provenance;
  std::string origin;  // file name or synthetic label

  bool has_axis(CrystalAxis a) const { return axes.count(a) != 0; }
  const AxisDispersion& axis(CrystalAxis a) const {
    auto it = axes.find(a);
    if (it == axes.end())
      throw ConfigError("material '" + origin + "' does not define axis " +
                        std::string(to_string(a)));
    return it->second;
  }
};

namespace detail {

inline void check_range(const DispersionModel& m, const AxisDispersion& ax, CrystalAxis a,
                        double lam_um, double t_c, bool strict_interior) {
  const bool lam_ok = strict_interior
                          ? (lam_um > ax.lambda_min_um && lam_um < ax.lambda_max_um)
                          : (lam_um >= ax.lambda_min_um && lam_um <= ax.lambda_max_um);
  if (!std::isfinite(lam_um) || !lam_ok) {
    std::ostringstream os;
    os << "wavelength " << lam_um << " um outside validity [" << ax.lambda_min_um << ", "
       << ax.lambda_max_um << "] of axis " << to_string(a) << " in '" << m.origin << "'";
    throw RangeError(os.str());
  }
  if (!std::isfinite(t_c) || t_c < ax.temp_min_c || t_c > ax.temp_max_c) {
    std::ostringstream os;
    os << "temperature " << t_c << " C outside validity [" << ax.temp_min_c << ", "
       << ax.temp_max_c << "] of axis " << to_string(a) << " in '" << m.origin << "'";
    throw RangeError(os.str());
  }
}

// n0^2 and d(n0^2)/d(lambda^2)
inline std::pair<double, double> base_sq(const AxisDispersion& ax, double lam_um) {
  const double L2 = lam_um * lam_um;
  const auto& c = ax.coef;
  double v = c[0] + c[1] / (L2 - c[2]) + c[3] / (L2 - c[4]);
  double d = -c[1] / ((L2 - c[2]) * (L2 - c[2])) - c[3] / ((L2 - c[4]) * (L2 - c[4]));
  if (ax.form == SellmeierForm::sellmeier2q) {
    v += c[5] * L2;
    d += c[5];
  }
  return {v, d};
}

// cubic in 1/lambda and its lambda-derivative
inline std::pair<double, double> inv_cubic(const double* p, double lam_um) {
  const double u = 1.0 / lam_um;
  const double v = p[0] + u * (p[1] + u * (p[2] + u * p[3]));
  const double d = -u * u * (p[1] + u * (2.0 * p[2] + u * 3.0 * p[3]));
  return {v, d};
}

}  // namespace detail

inline double refractive_index(const DispersionModel& m, CrystalAxis a, double lam_um,
                               double t_c) {
  const AxisDispersion& ax = m.axis(a);
  detail::check_range(m, ax, a, lam_um, t_c, /*strict_interior=*/false);
  const auto [n2, dn2] = detail::base_sq(ax, lam_um);
  if (!(n2 > 1.0))
    throw NumericalError("n^2 <= 1 at lambda=" + std::to_string(lam_um) + " um on axis " +
                         std::string(to_string(a)) + " ('" + m.origin + "')");
  double n = std::sqrt(n2);
  if (!ax.thermal.empty()) {
    const double dT = t_c - 25.0;
    const auto [n1, d1] = detail::inv_cubic(ax.thermal.data(), lam_um);
    const auto [nn2, d2] = detail::inv_cubic(ax.thermal.data() + 4, lam_um);
    n += n1 * dT + nn2 * dT * dT;
  }
  return n;
}

// dn/dlambda in 1/um (thermal term included).
inline double dn_dlambda(const DispersionModel& m, CrystalAxis a, double lam_um, double t_c) {
  const AxisDispersion& ax = m.axis(a);
  detail::check_range(m, ax, a, lam_um, t_c, /*strict_interior=*/true);
  const auto [n2, dn2_dL2] = detail::base_sq(ax, lam_um);
  const double n0 = std::sqrt(n2);
  double d = dn2_dL2 * lam_um / n0;  // = 2*lam*dn2/dL2 / (2*n0)
  if (!ax.thermal.empty()) {
    const double dT = t_c - 25.0;
    const auto [n1, dn1] = detail::inv_cubic(ax.thermal.data(), lam_um);
    const auto [nn2, dnn2] = detail::inv_cubic(ax.thermal.data() + 4, lam_um);
    d += dn1 * dT + dnn2 * dT * dT;
  }
  return d;
}

inline double group_index(const DispersionModel& m, CrystalAxis a, double lam_um, double t_c) {
  const double ng =
      refractive_index(m, a, lam_um, t_c) - lam_um * dn_dlambda(m, a, lam_um, t_c);
  if (!(ng > 1.0))
    throw NumericalError("group index <= 1 at lambda=" + std::to_string(lam_um) +
                         " um on axis " + std::string(to_string(a)));
  return ng;
}

// Group velocity in m/s; requires lambda strictly inside the validity interval.
inline double group_velocity(const DispersionModel& m, CrystalAxis a, double lam_um,
                             double t_c) {
  return constants::c / group_index(m, a, lam_um, t_c);
}

// k = 2*pi*n/lambda in rad/um.
inline double wavenumber(const DispersionModel& m, CrystalAxis a, double lam_um, double t_c) {
  return 2.0 * constants::pi * refractive_index(m, a, lam_um, t_c) / lam_um;
}

// ---- loading ---------------------------------------------------------------

namespace detail {

inline AxisDispersion parse_axis_table(const toml::Document& doc, const toml::Table& tbl,
                                       const std::string& name) {
  AxisDispersion ax;
  const std::string form = toml::as_string(doc, toml::require_key(doc, tbl, name, "form"),
                                           "[" + name + "].form");
  if (form == "sellmeier2") ax.form = SellmeierForm::sellmeier2;
  else if (form == "sellmeier2q") ax.form = SellmeierForm::sellmeier2q;
  else throw ConfigError(doc.origin + ": [" + name + "].form '" + form +
                         "' (expected sellmeier2 or sellmeier2q)");

  ax.coef = toml::as_number_array(doc, toml::require_key(doc, tbl, name, "coefficients"),
                                  "[" + name + "].coefficients");
  const size_t want = ax.form == SellmeierForm::sellmeier2 ? 5 : 6;
  if (ax.coef.size() != want)
    throw ConfigError(doc.origin + ": [" + name + "].coefficients needs " +
                      std::to_string(want) + " entries for form '" + form + "', got " +
                      std::to_string(ax.coef.size()));

  ax.thermal =
      toml::as_number_array(doc, toml::require_key(doc, tbl, name, "thermal_coefficients"),
                            "[" + name + "].thermal_coefficients");
  if (!ax.thermal.empty() && ax.thermal.size() != 8)
    throw ConfigError(doc.origin + ": [" + name +
                      "].thermal_coefficients must hold 0 or 8 entries, got " +
                      std::to_string(ax.thermal.size()));

  const auto lam = toml::as_number_array(
      doc, toml::require_key(doc, tbl, name, "lambda_range_um"), "[" + name + "].lambda_range_um");
  const auto tem = toml::as_number_array(
      doc, toml::require_key(doc, tbl, name, "temp_range_c"), "[" + name + "].temp_range_c");
  if (lam.size() != 2 || !(lam[0] > 0.0) || !(lam[1] > lam[0]))
    throw ConfigError(doc.origin + ": [" + name + "].lambda_range_um must be [min, max], 0 < min < max");
  if (tem.size() != 2 || !(tem[1] > tem[0]))
    throw ConfigError(doc.origin + ": [" + name + "].temp_range_c must be [min, max], min < max");
  ax.lambda_min_um = lam[0]; ax.lambda_max_um = lam[1];
  ax.temp_min_c = tem[0]; ax.temp_max_c = tem[1];

  for (const auto& [key, _] : tbl) {
    if (key != "form" && key != "coefficients" && key != "thermal_coefficients" &&
        key != "lambda_range_um" && key != "temp_range_c")
      throw ConfigError(doc.origin + ": unknown key '" + key + "' in [" + name + "]");
  }

  // resonances must lie outside the declared window
  const double lo2 = ax.lambda_min_um * ax.lambda_min_um;
  const double hi2 = ax.lambda_max_um * ax.lambda_max_um;
  for (size_t ci : {size_t{2}, size_t{4}}) {
    if (ax.coef[ci] >= lo2 && ax.coef[ci] <= hi2)
      throw ConfigError(doc.origin + ": [" + name + "] pole at lambda^2=" +
                        std::to_string(ax.coef[ci]) + " lies inside the declared range");
  }
  return ax;
}

}  // namespace detail

inline DispersionModel load_dispersion_text(const std::string& text, const std::string& origin) {
  const toml::Document doc = toml::parse(text, origin);
  DispersionModel m;
  m.origin = origin;
  if (const toml::Table* root = doc.find("")) {
    if (const toml::Value* p = toml::find_key(*root, "provenance"))
      m.provenance = toml::as_string(doc, *p, "provenance");
    for (const auto& [key, _] : *root)
      if (key != "provenance")
        throw ConfigError(origin + ": unknown top-level key '" + key + "'");
  }
  for (const auto& [name, tbl] : doc.tables) {
    if (name.empty()) continue;
    const CrystalAxis a = parse_axis(name);  // rejects non-axis table names
    m.axes[a] = detail::parse_axis_table(doc, tbl, name);
  }
  if (m.axes.empty()) throw ConfigError(origin + ": material defines no axis tables");

  // sanity sample: n finite and > 1 across the whole declared box.  Failures
  // here mean the file describes an unusable material, so they surface as
  // configuration errors regardless of which evaluation guard fires.
  for (const auto& [a, ax] : m.axes) {
    for (int i = 0; i <= 24; ++i) {
      const double lam =
          ax.lambda_min_um + (ax.lambda_max_um - ax.lambda_min_um) * i / 24.0;
      for (int j = 0; j <= 8; ++j) {
        const double t = ax.temp_min_c + (ax.temp_max_c - ax.temp_min_c) * j / 8.0;
        double n = 0.0;
        try {
          n = refractive_index(m, a, lam, t);  // throws if n^2 <= 1
        } catch (const ConfigError&) {
          throw;
        } catch (const std::exception& e) {
          throw ConfigError(origin + ": material invalid inside its declared range: " +
                            e.what());
        }
        if (!std::isfinite(n))
          throw ConfigError(origin + ": non-finite index on axis " +
                            std::string(to_string(a)) + " at lambda=" + std::to_string(lam));
      }
    }
  }
  return m;
}

inline DispersionModel load_dispersion_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open material file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_dispersion_text(ss.str(), path);
}

}  // namespace dpp

#pragma once
// Quasi-phase-matching for counterpropagating type-II pair generation:
// signed residuals, required reciprocals, period inversion, the l-sweep
// temperature solver, and grating-fixed tuning curves.
//
// Geometry: pump (H) and signal travel forward, idler travels backward, so
// the residual is dk = k_p - k_s + k_i - G (plus sign on the idler).
// Process HV: signal H / idler V. Process VH: signal V / idler H.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "core.hpp"
#include "dispersion.hpp"
#include "grating.hpp"
#include "rootfind.hpp"

namespace dpp {

enum class ProcessId { hv, vh };

inline const char* to_string(ProcessId p) { return p == ProcessId::hv ? "HV" : "VH"; }

struct ProcessSpec {
  ProcessId id = ProcessId::hv;
  double pump_um = 0.0;
  double signal_um = 0.0;
  double idler_um = 0.0;

  void validate() const {
    if (!(pump_um > 0.0 && signal_um > pump_um && idler_um > pump_um))
      throw ConfigError("process requires 0 < pump < signal, idler");
    const double lhs = 1.0 / pump_um;
    const double rhs = 1.0 / signal_um + 1.0 / idler_um;
    if (std::abs(lhs - rhs) > 1e-9 * lhs)
      throw ConfigError("process wavelengths violate energy conservation");
  }
  CrystalAxis signal_axis(const PolarizationMapping& map) const {
    return id == ProcessId::hv ? map.axis_h() : map.axis_v();
  }
  CrystalAxis idler_axis(const PolarizationMapping& map) const {
    return id == ProcessId::hv ? map.axis_v() : map.axis_h();
  }
};

// Idler from vacuum-wavelength energy conservation.
inline ProcessSpec make_process(ProcessId id, double pump_um, double signal_um) {
  ProcessSpec p{id, pump_um, signal_um, 0.0};
  if (!(pump_um > 0.0 && signal_um > pump_um))
    throw ConfigError("process requires 0 < pump < signal");
  p.idler_um = 1.0 / (1.0 / pump_um - 1.0 / signal_um);
  p.validate();
  return p;
}

// Degenerate construction keeps signal and idler bit-identical; the exact
// symmetry downstream (equal slopes, delta_n = 1, C = 1) depends on it.
inline ProcessSpec make_degenerate_process(ProcessId id, double pump_um) {
  ProcessSpec p{id, pump_um, 2.0 * pump_um, 2.0 * pump_um};
  p.validate();
  return p;
}

// dk = k_p - k_s + k_i - G, rad/um. Zero at phase matching.
inline double delta_k(const DispersionModel& model, const PolarizationMapping& map,
                      const ProcessSpec& proc, double g_rad_um, double t_c) {
  const double k_p = wavenumber(model, map.axis_h(), proc.pump_um, t_c);
  const double k_s = wavenumber(model, proc.signal_axis(map), proc.signal_um, t_c);
  const double k_i = wavenumber(model, proc.idler_axis(map), proc.idler_um, t_c);
  return k_p - k_s + k_i - g_rad_um;
}

struct ReciprocalRequirement {
  double g_hv = 0.0, g_vh = 0.0;  // rad/um
  double k_p = 0.0, k_s_h = 0.0, k_s_v = 0.0, k_i_h = 0.0, k_i_v = 0.0;
  double lambda_s_um = 0.0, lambda_i_um = 0.0;
};

// Reciprocals that null both residuals at (lambda_p, lambda_s, T).
// Degenerate when signal_um is absent.
inline ReciprocalRequirement required_reciprocals(const DispersionModel& model,
                                                  const PolarizationMapping& map,
                                                  double pump_um,
                                                  std::optional<double> signal_um, double t_c) {
  const ProcessSpec ref = signal_um ? make_process(ProcessId::hv, pump_um, *signal_um)
                                    : make_degenerate_process(ProcessId::hv, pump_um);
  ReciprocalRequirement r;
  r.lambda_s_um = ref.signal_um;
  r.lambda_i_um = ref.idler_um;
  r.k_p = wavenumber(model, map.axis_h(), pump_um, t_c);
  r.k_s_h = wavenumber(model, map.axis_h(), r.lambda_s_um, t_c);
  r.k_s_v = wavenumber(model, map.axis_v(), r.lambda_s_um, t_c);
  r.k_i_h = wavenumber(model, map.axis_h(), r.lambda_i_um, t_c);
  r.k_i_v = wavenumber(model, map.axis_v(), r.lambda_i_um, t_c);
  r.g_hv = r.k_p - r.k_s_h + r.k_i_v;
  r.g_vh = r.k_p - r.k_s_v + r.k_i_h;
  return r;
}

// Invert G_high = 2*pi*m/L1 + 2*pi/L2, G_low = 2*pi*m/L1 - 2*pi/L2 for the
// order family ((m,+1), (m,-1)).
inline std::pair<double, double> periods_from_reciprocals(double g_low, double g_high, int m,
                                                          double lambda2_cap_um = 1e6) {
  if (m < 1) throw ConfigError("periods_from_reciprocals requires m >= 1");
  if (!(g_low > 0.0) || !(g_high > g_low))
    throw ConfigError("periods_from_reciprocals requires 0 < G_low < G_high");
  const double lambda1 = 4.0 * constants::pi * m / (g_low + g_high);
  const double lambda2 = 4.0 * constants::pi / (g_high - g_low);
  if (lambda2 > lambda2_cap_um)
    throw NoSolutionError("reciprocals too close: required long period exceeds cap");
  if (!(lambda1 < lambda2))
    throw NoSolutionError("inverted geometry: long period not larger than short period");
  return {lambda1, lambda2};
}

// ---- design solver ----------------------------------------------------------

struct DesignTargets {
  double pump_um = 0.0;
  std::optional<double> signal_um;  // absent => degenerate (lambda_s = 2*lambda_p)
  ReciprocalOrder order_hv{3, 1};
  ReciprocalOrder order_vh{3, -1};
  double t_min_c = 20.0, t_max_c = 120.0;
  int l_min = 3, l_max = 60;

  void validate() const {
    if (!(pump_um > 0.0)) throw ConfigError("targets: pump wavelength must be positive");
    if (signal_um && !(*signal_um > pump_um))
      throw ConfigError("targets: signal wavelength must exceed the pump wavelength");
    if (order_hv.m == 0 || order_hv.n == 0 || order_vh.m == 0 || order_vh.n == 0)
      throw ConfigError("targets: order components must be nonzero");
    const long long p1 = static_cast<long long>(order_hv.m) * order_hv.n;
    const long long p2 = static_cast<long long>(order_vh.m) * order_vh.n;
    if (p1 != p2 && p1 != -p2)
      throw ConfigError("targets: orders must satisfy m1*n1 = +/- m2*n2");
    if (static_cast<long long>(order_hv.m) * order_vh.n ==
        static_cast<long long>(order_vh.m) * order_hv.n)
      throw ConfigError("targets: orders are collinear; periods are not determined");
    if (!(t_min_c < t_max_c)) throw ConfigError("targets: empty temperature interval");
    if (l_min < 3) throw ConfigError("targets: l search must start at 3 or above");
    if (l_max < l_min) throw ConfigError("targets: empty l search range");
  }
};

namespace detail {

struct PeriodSolve {
  double lambda1_um = 0.0, lambda2_um = 0.0;
  bool swapped = false;  // true when order_vh pairs with process HV
  bool ok = false;
};

// Solve 2*pi*(m x + n y) = G for x = 1/L1, y = 1/L2 under both possible
// assignments of the two orders to the two processes; keep the physical one.
inline PeriodSolve solve_periods(double g_hv, double g_vh, ReciprocalOrder o1,
                                 ReciprocalOrder o2) {
  PeriodSolve out;
  for (const bool swapped : {false, true}) {
    const ReciprocalOrder a = swapped ? o2 : o1;  // paired with process HV
    const ReciprocalOrder b = swapped ? o1 : o2;  // paired with process VH
    const double det = static_cast<double>(a.m) * b.n - static_cast<double>(b.m) * a.n;
    if (det == 0.0) continue;
    const double two_pi = 2.0 * constants::pi;
    const double x = (g_hv * b.n - g_vh * a.n) / (two_pi * det);
    const double y = (g_vh * a.m - g_hv * b.m) / (two_pi * det);
    if (x > 0.0 && y > 0.0 && x > y) {
      out.lambda1_um = 1.0 / x;
      out.lambda2_um = 1.0 / y;
      out.swapped = swapped;
      out.ok = true;
      return out;
    }
  }
  return out;
}

}  // namespace detail

// Temperature at which the required periods satisfy Lambda2/Lambda1 = l/2.
// Scans the interval for brackets; several roots select the one nearest the
// interval center (warned).
inline double solve_temperature_for_ratio(const DispersionModel& model,
                                          const PolarizationMapping& map,
                                          const DesignTargets& targets, int l,
                                          WarningLog* log = nullptr) {
  targets.validate();
  const auto ratio_gap = [&](double t_c) -> double {
    const ReciprocalRequirement r =
        required_reciprocals(model, map, targets.pump_um, targets.signal_um, t_c);
    const detail::PeriodSolve ps =
        detail::solve_periods(r.g_hv, r.g_vh, targets.order_hv, targets.order_vh);
    if (!ps.ok) return std::numeric_limits<double>::quiet_NaN();  // no positive geometry here
    return ps.lambda2_um / ps.lambda1_um - 0.5 * l;
  };

  const auto brackets = scan_brackets(ratio_gap, targets.t_min_c, targets.t_max_c, 200);
  std::vector<double> roots;
  for (const auto& [a, b] : brackets) {
    double t;
    try {
      t = (a == b) ? a : brent(ratio_gap, a, b);
    } catch (const NumericalError&) {
      continue;
    }
    if (std::abs(ratio_gap(t)) > 1e-9) continue;  // pole of the ratio, not a root
    bool dup = false;
    for (const double r : roots) dup = dup || std::abs(r - t) < 1e-6;
    if (!dup) roots.push_back(t);
  }
  if (roots.empty())
    throw NoSolutionError("no temperature in [" + std::to_string(targets.t_min_c) + ", " +
                          std::to_string(targets.t_max_c) + "] C yields period ratio " +
                          std::to_string(l) + "/2");
  const double center = 0.5 * (targets.t_min_c + targets.t_max_c);
  std::sort(roots.begin(), roots.end(), [&](double a, double b) {
    return std::abs(a - center) < std::abs(b - center);
  });
  if (roots.size() > 1)
    warn(log, "multiple-temperatures",
         std::to_string(roots.size()) + " temperatures satisfy the l=" + std::to_string(l) +
             " ratio; keeping " + std::to_string(roots.front()) + " C (nearest center)");
  return roots.front();
}

struct ProcessSolution {
  ProcessId id = ProcessId::hv;
  ReciprocalOrder order;
  double g_rad_um = 0.0;
  double residual_rad_um = 0.0;
};

struct DesignSolution {
  double temperature_c = 0.0;
  DualGrating grating;
  double pump_um = 0.0, signal_um = 0.0, idler_um = 0.0;
  double omega_p_rad_s = 0.0, omega_s_rad_s = 0.0, omega_i_rad_s = 0.0;
  double k_p_h = 0.0, k_s_h = 0.0, k_s_v = 0.0, k_i_h = 0.0, k_i_v = 0.0;  // rad/um
  ProcessSolution hv, vh;
  WarningLog warnings;

  ProcessSpec process(ProcessId id) const {
    ProcessSpec p{id, pump_um, signal_um, idler_um};
    p.validate();
    return p;
  }
};

inline double vacuum_omega_rad_s(double lambda_um) {
  return 2.0 * constants::pi * constants::c / (lambda_um * 1e-6);
}

// Full design: sweep l, solve the temperature per l, keep the l whose
// solution lies nearest the preferred (interval-center) temperature, build
// the constrained grating, assign orders to processes by value, re-verify
// both residuals.
inline DesignSolution design_source(const DispersionModel& model, const PolarizationMapping& map,
                                    const DesignTargets& targets) {
  targets.validate();
  map.validate();
  {  // the search interval must sit inside the validity of both used axes
    const auto& ah = model.axis(map.axis_h());
    const auto& av = model.axis(map.axis_v());
    const double lo = std::max(ah.temp_min_c, av.temp_min_c);
    const double hi = std::min(ah.temp_max_c, av.temp_max_c);
    if (targets.t_min_c < lo || targets.t_max_c > hi)
      throw ConfigError("temperature search interval exceeds material validity [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "] C");
  }

  DesignSolution sol;
  struct Candidate {
    int l;
    double t_c;
  };
  std::vector<Candidate> found;
  for (int l = targets.l_min; l <= targets.l_max; ++l) {
    try {
      WarningLog local;
      const double t = solve_temperature_for_ratio(model, map, targets, l, &local);
      found.push_back({l, t});
      for (auto& w : local) sol.warnings.push_back(std::move(w));
    } catch (const NoSolutionError&) {
      continue;
    }
  }
  if (found.empty())
    throw NoSolutionError("no constraint integer in [" + std::to_string(targets.l_min) + ", " +
                          std::to_string(targets.l_max) +
                          "] admits a design inside the temperature interval");
  const double center = 0.5 * (targets.t_min_c + targets.t_max_c);
  std::sort(found.begin(), found.end(), [&](const Candidate& a, const Candidate& b) {
    const double da = std::abs(a.t_c - center), db = std::abs(b.t_c - center);
    if (da != db) return da < db;
    return a.l < b.l;
  });
  const Candidate pick = found.front();
  if (pick.l % 2 == 0)
    warn(&sol.warnings, "even-l",
         "selected l = " + std::to_string(pick.l) +
             " is even: D2 = 1/2 suppresses even-n orders; working orders verified by residual");

  const ReciprocalRequirement r =
      required_reciprocals(model, map, targets.pump_um, targets.signal_um, pick.t_c);
  const detail::PeriodSolve ps =
      detail::solve_periods(r.g_hv, r.g_vh, targets.order_hv, targets.order_vh);
  if (!ps.ok) throw NumericalError("period solve failed at the selected temperature");

  sol.temperature_c = pick.t_c;
  sol.grating = make_constrained_grating(ps.lambda1_um, pick.l);
  if (!close_rel(sol.grating.lambda2_um, ps.lambda2_um, 1e-8))
    throw NumericalError("constrained long period drifted from the solved ratio");
  sol.pump_um = targets.pump_um;
  sol.signal_um = r.lambda_s_um;
  sol.idler_um = r.lambda_i_um;
  sol.omega_p_rad_s = vacuum_omega_rad_s(sol.pump_um);
  sol.omega_s_rad_s = vacuum_omega_rad_s(sol.signal_um);
  sol.omega_i_rad_s = vacuum_omega_rad_s(sol.idler_um);
  sol.k_p_h = r.k_p;
  sol.k_s_h = r.k_s_h;
  sol.k_s_v = r.k_s_v;
  sol.k_i_h = r.k_i_h;
  sol.k_i_v = r.k_i_v;

  sol.hv = {ProcessId::hv, ps.swapped ? targets.order_vh : targets.order_hv, 0.0, 0.0};
  sol.vh = {ProcessId::vh, ps.swapped ? targets.order_hv : targets.order_vh, 0.0, 0.0};
  if (ps.swapped)
    warn(&sol.warnings, "order-assignment",
         "order labels swapped between processes so both periods come out positive");
  for (ProcessSolution* p : {&sol.hv, &sol.vh}) {
    p->g_rad_um = reciprocal(p->order, sol.grating);
    p->residual_rad_um = delta_k(model, map, sol.process(p->id), p->g_rad_um, pick.t_c);
    if (std::abs(p->residual_rad_um) > 1e-6)
      throw NumericalError("design residual " + std::to_string(p->residual_rad_um) +
                           " rad/um exceeds 1e-6 for process " + to_string(p->id));
  }
  return sol;
}

// ---- tuning curves ----------------------------------------------------------

struct TuningPoint {
  double t_c = 0.0;
  std::optional<double> signal_um;  // absent: no phase-matched wavelength found
  std::optional<double> idler_um;
};

struct TuningCurve {
  std::vector<TuningPoint> hv, vh;
};

// Signal wavelength solving dk = 0 for one process at fixed grating and
// temperature; searches a +/- window around the design signal wavelength.
inline std::optional<double> solve_signal_at_temperature(const DispersionModel& model,
                                                         const PolarizationMapping& map,
                                                         const DesignSolution& sol, ProcessId id,
                                                         double t_c, double window_um = 0.05,
                                                         int cells = 400) {
  const ProcessSolution& proc = (id == ProcessId::hv) ? sol.hv : sol.vh;
  const double g = proc.g_rad_um;
  // residual as a function of signal wavelength; NaN marks out-of-validity
  const auto f = [&](double lam_s) -> double {
    if (!(lam_s > sol.pump_um)) return std::numeric_limits<double>::quiet_NaN();
    const double lam_i = 1.0 / (1.0 / sol.pump_um - 1.0 / lam_s);
    if (!(lam_i > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    ProcessSpec p{id, sol.pump_um, lam_s, lam_i};
    try {
      return delta_k(model, map, p, g, t_c);
    } catch (const RangeError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  const double lo = sol.signal_um - window_um, hi = sol.signal_um + window_um;
  std::vector<double> roots;
  double x_prev = lo, f_prev = f(lo);
  for (int i = 1; i <= cells; ++i) {
    const double x = lo + (hi - lo) * i / cells;
    const double fx = f(x);
    if (std::isfinite(f_prev) && std::isfinite(fx) && f_prev != 0.0 &&
        std::signbit(f_prev) != std::signbit(fx)) {
      try {
        const double root = brent(f, x_prev, x);
        bool dup = false;
        for (const double rr : roots) dup = dup || std::abs(rr - root) < 1e-9;
        if (!dup && std::abs(f(root)) < 1e-6) roots.push_back(root);
      } catch (const NumericalError&) {
        // bracket dipped outside material validity between scan nodes
      }
    }
    x_prev = x;
    f_prev = fx;
  }
  if (roots.empty()) return std::nullopt;
  std::sort(roots.begin(), roots.end(), [&](double a, double b) {
    return std::abs(a - sol.signal_um) < std::abs(b - sol.signal_um);
  });
  return roots.front();
}

inline TuningCurve tuning_curve(const DispersionModel& model, const PolarizationMapping& map,
                                const DesignSolution& sol, const std::vector<double>& t_samples) {
  TuningCurve curve;
  for (const double t : t_samples) {
    for (const ProcessId id : {ProcessId::hv, ProcessId::vh}) {
      TuningPoint pt;
      pt.t_c = t;
      if (const auto lam_s = solve_signal_at_temperature(model, map, sol, id, t)) {
        pt.signal_um = *lam_s;
        pt.idler_um = 1.0 / (1.0 / sol.pump_um - 1.0 / *lam_s);
      }
      (id == ProcessId::hv ? curve.hv : curve.vh).push_back(pt);
    }
  }
  return curve;
}

}  // namespace dpp

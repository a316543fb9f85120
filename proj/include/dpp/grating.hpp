#pragma once
// Dual-periodic sign modulation g(x) = g1(x) * g2(x) of the nonlinear
// coefficient: reciprocals, Fourier coefficients, the small-domain-avoidance
// constraint, physical domain-pattern synthesis, exact pattern spectroscopy,
// and a poling-jitter Monte Carlo.
//
// Sign convention: each square wave is +1 on [0, D*Lambda) within its period.
// For constrained gratings (Lambda2/Lambda1 = l/2, D1 = 1/2, D2 = floor(l/2)/l)
// every transition of both waves lands on the half-Lambda1 lattice, so
// synthesis and min-domain queries are exact integer arithmetic.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "core.hpp"

namespace dpp {

struct ReciprocalOrder {
  int m = 0;
  int n = 0;
};

struct DualGrating {
  double lambda1_um = 0.0;
  double lambda2_um = 0.0;
  Rational duty1{1, 2};
  Rational duty2{1, 2};
  std::optional<int> l;  // set iff the small-domain-avoidance constraint holds

  void validate() const {
    if (!(lambda1_um > 0.0) || !(lambda2_um > lambda1_um))
      throw ConfigError("grating requires 0 < lambda1 < lambda2");
    const double d1 = duty1.value(), d2 = duty2.value();
    if (!(d1 > 0.0 && d1 < 1.0 && d2 > 0.0 && d2 < 1.0))
      throw ConfigError("grating duty cycles must lie strictly inside (0, 1)");
    if (l) {
      if (*l < 3) throw ConfigError("constraint integer l must be at least 3");
      const double ratio = lambda2_um / lambda1_um;
      if (!close_rel(ratio, 0.5 * (*l), 1e-9))
        throw ConfigError("constrained grating must satisfy lambda2/lambda1 = l/2");
      if (!(duty1 == Rational{1, 2} && duty2 == Rational{*l / 2, *l}))
        throw ConfigError("constrained grating must carry duties (1/2, floor(l/2)/l)");
    }
  }
};

// Duty pair that keeps every domain at least Lambda1/2 long.
inline std::pair<Rational, Rational> constrained_duty(int l) {
  if (l < 3) throw ConfigError("constraint integer l must be at least 3");
  return {Rational{1, 2}, Rational{l / 2, l}};
}

inline DualGrating make_constrained_grating(double lambda1_um, int l) {
  const auto [d1, d2] = constrained_duty(l);
  DualGrating g{lambda1_um, lambda1_um * (0.5 * l), d1, d2, l};
  g.validate();
  return g;
}

// G_{m,n} = 2*pi*m/Lambda1 + 2*pi*n/Lambda2, rad/um. Negative orders allowed.
inline double reciprocal(ReciprocalOrder o, const DualGrating& g) {
  if (o.m == 0 || o.n == 0) throw ConfigError("reciprocal order components must be nonzero");
  return 2.0 * constants::pi *
         (static_cast<double>(o.m) / g.lambda1_um + static_cast<double>(o.n) / g.lambda2_um);
}

// Separable coefficient of the order (m,n): [4/(m n pi^2)] sin(m D1 pi) sin(n D2 pi).
// This is the design value; it ignores reciprocal-space collisions (see
// fourier_coefficient_exact).
inline double fourier_coefficient(ReciprocalOrder o, const DualGrating& g) {
  if (o.m == 0 || o.n == 0) throw ConfigError("reciprocal order components must be nonzero");
  const double pi = constants::pi;
  return 4.0 / (o.m * o.n * pi * pi) * std::sin(o.m * g.duty1.value() * pi) *
         std::sin(o.n * g.duty2.value() * pi);
}

namespace detail {

// Complex Fourier coefficient of one +1/-1 square wave (period folded out):
// c_m = (2/(pi m)) sin(pi m D) e^{i pi m D},  c_0 = 2D - 1.
inline std::complex<double> square_wave_coefficient(long long m, double duty) {
  if (m == 0) return {2.0 * duty - 1.0, 0.0};
  const double a = constants::pi * static_cast<double>(m) * duty;
  const double mag = 2.0 / (constants::pi * static_cast<double>(m)) * std::sin(a);
  return {mag * std::cos(a), mag * std::sin(a)};
}

}  // namespace detail

// Exact complex Fourier coefficient of the product pattern at G(m,n).
// For constrained gratings the reciprocal lattice is degenerate: every
// (m', n') with m'l + 2n' = ml + 2n lands on the same G, and the pattern
// coefficient is the coherent sum over that family. Truncation at |m'| <=
// max_m leaves a tail O(1/max_m). Without the constraint integer the periods
// are treated as incommensurate and the single (phased) product term returns.
inline std::complex<double> fourier_coefficient_exact(ReciprocalOrder o, const DualGrating& g,
                                                      int max_m = 4001) {
  if (o.m == 0 || o.n == 0) throw ConfigError("reciprocal order components must be nonzero");
  const double d1 = g.duty1.value(), d2 = g.duty2.value();
  if (!g.l)
    return detail::square_wave_coefficient(o.m, d1) * detail::square_wave_coefficient(o.n, d2);
  const long long l = *g.l;
  const long long key = o.m * l + 2LL * o.n;
  std::complex<double> sum = 0.0;
  for (long long mp = -max_m; mp <= max_m; ++mp) {
    const long long r = key - mp * l;
    if (r % 2 != 0) continue;
    const long long np = r / 2;
    sum += detail::square_wave_coefficient(mp, d1) * detail::square_wave_coefficient(np, d2);
  }
  return sum;
}

// ---- effective nonlinearity -------------------------------------------------

struct NonlinearCoefficient {
  double d_pm_v = 0.0;         // bulk coefficient
  double d_eff_hv_pm_v = 0.0;  // d * G(order_hv)
  double d_eff_vh_pm_v = 0.0;  // d * G(order_vh)
};

// Scales the bulk coefficient by the design Fourier coefficients of the two
// working orders. Equal magnitudes are what balance the two decay amplitudes;
// violations are reported, not fatal.
inline NonlinearCoefficient effective_nonlinearity(double d_pm_v, ReciprocalOrder order_hv,
                                                   ReciprocalOrder order_vh,
                                                   const DualGrating& g,
                                                   WarningLog* log = nullptr) {
  NonlinearCoefficient out;
  out.d_pm_v = d_pm_v;
  out.d_eff_hv_pm_v = d_pm_v * fourier_coefficient(order_hv, g);
  out.d_eff_vh_pm_v = d_pm_v * fourier_coefficient(order_vh, g);
  const long long p1 = static_cast<long long>(order_hv.m) * order_hv.n;
  const long long p2 = static_cast<long long>(order_vh.m) * order_vh.n;
  if (p1 != p2 && p1 != -p2)
    warn(log, "order-pairing",
         "orders (" + std::to_string(order_hv.m) + "," + std::to_string(order_hv.n) + ") and (" +
             std::to_string(order_vh.m) + "," + std::to_string(order_vh.n) +
             ") violate m1*n1 = +/- m2*n2");
  if (!close_rel(std::abs(out.d_eff_hv_pm_v), std::abs(out.d_eff_vh_pm_v), 1e-9))
    warn(log, "deff-imbalance",
         "|d_eff| differs between the two processes; amplitude imbalance degrades entanglement");
  return out;
}

// ---- domain patterns --------------------------------------------------------

struct DomainPattern {
  double length_um = 0.0;
  int initial_sign = +1;                // sign of the domain starting at x = 0
  std::vector<double> boundaries_um;    // interior walls, strictly increasing
  // Populated by the constrained synthesis path: every wall sits at
  // tick * lattice_unit_um with lattice_unit_um = Lambda1/2 exactly.
  std::optional<double> lattice_unit_um;
  std::vector<long long> lattice_ticks;
};

// Single periodic square wave, +1 on [k*P, k*P + D*P). Test/reference helper.
inline DomainPattern synthesize_single_pattern(double period_um, double duty,
                                               double total_length_um) {
  if (!(period_um > 0.0) || !(duty > 0.0 && duty < 1.0) || !(total_length_um >= period_um))
    throw ConfigError("single pattern requires period > 0, duty in (0,1), length >= period");
  DomainPattern p;
  p.length_um = total_length_um;
  p.initial_sign = +1;
  for (long long k = 0;; ++k) {
    const double up = k * period_um + duty * period_um;
    const double down = (k + 1) * period_um;
    if (up < total_length_um) p.boundaries_um.push_back(up);
    if (down < total_length_um) p.boundaries_um.push_back(down);
    else break;
  }
  return p;
}

inline DomainPattern synthesize_pattern(const DualGrating& g, double total_length_um) {
  g.validate();
  if (!(total_length_um >= g.lambda2_um))
    throw ConfigError("pattern length must cover at least one long period");

  DomainPattern p;
  p.length_um = total_length_um;
  p.initial_sign = +1;  // g1(0+) = g2(0+) = +1

  if (g.l) {
    // Exact path: all transitions live on the lattice of unit Lambda1/2.
    // g1 flips at every tick; g2 flips at ticks == 0 or floor(l/2) (mod l);
    // a wall survives where exactly one wave flips.
    const long long l = *g.l;
    const long long h = l / 2;
    const double unit = 0.5 * g.lambda1_um;
    const double ticks_f = total_length_um / unit;
    long long full_ticks = static_cast<long long>(std::floor(ticks_f + 1e-9));
    const bool exact_end = std::abs(ticks_f - static_cast<double>(full_ticks)) < 1e-9;
    const long long last_tick = exact_end ? full_ticks - 1 : full_ticks;
    p.lattice_unit_um = unit;
    for (long long t = 1; t <= last_tick; ++t) {
      const long long r = t % l;
      if (r != 0 && r != h) {
        p.lattice_ticks.push_back(t);
        p.boundaries_um.push_back(static_cast<double>(t) * unit);
      }
    }
    return p;
  }

  // General path: merge both transition sets; coincident transitions cancel.
  std::vector<double> events;
  auto emit_wave = [&](double period, double duty) {
    for (long long k = 0;; ++k) {
      const double up = k * period + duty * period;
      const double down = (k + 1) * period;
      if (up < total_length_um) events.push_back(up);
      if (down < total_length_um) events.push_back(down);
      else break;
    }
  };
  emit_wave(g.lambda1_um, g.duty1.value());
  emit_wave(g.lambda2_um, g.duty2.value());
  std::sort(events.begin(), events.end());
  const double eps = 1e-9;
  size_t i = 0;
  while (i < events.size()) {
    size_t j = i + 1;
    while (j < events.size() && events[j] - events[i] < eps) ++j;
    if ((j - i) % 2 == 1 && events[i] > eps && events[i] < total_length_um - eps)
      p.boundaries_um.push_back(events[i]);
    i = j;
  }
  return p;
}

// Smallest gap between consecutive domain walls — the finest feature the
// poling mask must realize. The partial domains the crystal ends cut off are
// not features of the mask, so they do not count; with fewer than two walls
// the segment widths are the only available measure. Exact (integer gap *
// stored unit) for lattice-synthesized patterns.
inline double min_domain(const DomainPattern& p) {
  if (p.boundaries_um.empty()) return p.length_um;
  if (p.boundaries_um.size() < 2)
    return std::min(p.boundaries_um.front(), p.length_um - p.boundaries_um.back());
  if (p.lattice_unit_um && p.lattice_ticks.size() >= 2) {
    long long best = p.lattice_ticks[1] - p.lattice_ticks[0];
    for (size_t i = 2; i < p.lattice_ticks.size(); ++i)
      best = std::min(best, p.lattice_ticks[i] - p.lattice_ticks[i - 1]);
    return static_cast<double>(best) * *p.lattice_unit_um;
  }
  double best = p.boundaries_um[1] - p.boundaries_um[0];
  for (size_t i = 2; i < p.boundaries_um.size(); ++i)
    best = std::min(best, p.boundaries_um[i] - p.boundaries_um[i - 1]);
  return best;
}

// (1/L) * integral of g(x) e^{+iGx} dx, closed form per domain - no quadrature
// error. G = 0 returns the mean sign.
inline std::complex<double> pattern_fourier(const DomainPattern& p, double g_rad_um) {
  if (!(p.length_um > 0.0)) throw ConfigError("empty pattern");
  const size_t nb = p.boundaries_um.size();
  if (std::abs(g_rad_um) * p.length_um < 1e-12) {
    double acc = 0.0;
    double prev = 0.0;
    double s = p.initial_sign;
    for (size_t j = 0; j <= nb; ++j) {
      const double next = (j < nb) ? p.boundaries_um[j] : p.length_um;
      acc += s * (next - prev);
      prev = next;
      s = -s;
    }
    return {acc / p.length_um, 0.0};
  }
  const std::complex<double> iG(0.0, g_rad_um);
  std::complex<double> acc = 0.0;
  std::complex<double> e_prev(1.0, 0.0);  // exp(iG * 0)
  double s = p.initial_sign;
  for (size_t j = 0; j <= nb; ++j) {
    const double next = (j < nb) ? p.boundaries_um[j] : p.length_um;
    const std::complex<double> e_next = std::exp(iG * next);
    acc += s * (e_next - e_prev);
    e_prev = e_next;
    s = -s;
  }
  return acc / (iG * p.length_um);
}

// ---- poling-jitter Monte Carlo ---------------------------------------------

namespace detail {

// SplitMix64; per-trial streams derive deterministically from (seed, trial).
struct SplitMix64 {
  uint64_t state;
  uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() {  // [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double gaussian() {  // Box-Muller, cosine branch
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * constants::pi * u2);
  }
};

}  // namespace detail

struct PolingErrorStats {
  double sigma_um = 0.0;
  int trials = 0;
  double mean_abs_coeff = 0.0;  // mean of |pattern_fourier| over trials
  double std_abs_coeff = 0.0;   // sample standard deviation
  double crossing_fraction = 0.0;  // trials with at least one wall crossing
};

// Independent Gaussian displacement of every wall; displaced walls are
// re-sorted, walls pushed outside the crystal are dropped, and coincident
// walls annihilate pairwise. Deterministic for a fixed seed.
inline PolingErrorStats poling_error_mc(const DomainPattern& p, double sigma_um, int trials,
                                        double g_rad_um, uint64_t seed,
                                        WarningLog* log = nullptr) {
  if (sigma_um < 0.0) throw ConfigError("poling_error_mc requires sigma >= 0");
  if (trials < 1) throw ConfigError("poling_error_mc requires at least one trial");
  PolingErrorStats st;
  st.sigma_um = sigma_um;
  st.trials = trials;

  std::vector<double> walls;
  int crossed_trials = 0;
  double mean = 0.0, m2 = 0.0;  // Welford; exact for constant sequences
  for (int trial = 0; trial < trials; ++trial) {
    detail::SplitMix64 rng{seed + 0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(trial + 1)};
    walls.clear();
    walls.reserve(p.boundaries_um.size());
    bool crossed = false;
    double prev = -1.0;
    for (const double b : p.boundaries_um) {
      const double shifted = b + sigma_um * rng.gaussian();
      if (shifted < prev) crossed = true;
      prev = shifted;
      if (shifted > 0.0 && shifted < p.length_um) walls.push_back(shifted);
      else if (sigma_um > 0.0) crossed = true;  // wall left the crystal
    }
    if (crossed) {
      ++crossed_trials;
      std::sort(walls.begin(), walls.end());
    }
    // annihilate coincident wall pairs
    DomainPattern q;
    q.length_um = p.length_um;
    q.initial_sign = p.initial_sign;
    for (size_t i = 0; i < walls.size();) {
      if (i + 1 < walls.size() && walls[i + 1] - walls[i] < 1e-12) { i += 2; continue; }
      q.boundaries_um.push_back(walls[i]);
      ++i;
    }
    const double x = std::abs(pattern_fourier(q, g_rad_um));
    const double delta = x - mean;
    mean += delta / (trial + 1);
    m2 += delta * (x - mean);
  }
  st.mean_abs_coeff = mean;
  st.std_abs_coeff = trials > 1 ? std::sqrt(m2 / (trials - 1)) : 0.0;
  st.crossing_fraction = static_cast<double>(crossed_trials) / trials;
  if (st.crossing_fraction > 0.01)
    warn(log, "poling-crossings",
         "sigma = " + std::to_string(sigma_um) + " um makes " +
             std::to_string(100.0 * st.crossing_fraction) +
             "% of trials cross domain walls; jitter statistics enter the merge regime");
  return st;
}

}  // namespace dpp

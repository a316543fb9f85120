#pragma once
// Two-photon state analysis for the counterpropagating source: joint spectra,
// bandwidths, forward/backward comparison, concurrence (closed form plus a
// density-matrix oracle), pair rate, brightness, correlation times.
//
// Conventions: detuning nu in rad/s moves the signal up and the idler down;
// per-photon amplitudes are h(L*dk) with h(x) = exp(-ix/2) sinc(x/2); the
// linearized residual is dk = -nu*S with S the inverse-group-velocity SUM
// (backward geometry).

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <vector>

#include "core.hpp"
#include "dispersion.hpp"
#include "grating.hpp"
#include "phasematch.hpp"

namespace dpp {

// Root of sinc(u) = 1/sqrt(2): half-maximum of sinc^2. The closed-form FWHM
// constant 4*u0/pi is the "1.77" prefactor; tests re-derive u0 by bisection.
inline constexpr double kSincHalfMaxU = 1.3915573782515196;

struct CrystalDevice {
  DispersionModel model;
  PolarizationMapping mapping;
  DesignSolution design;
  NonlinearCoefficient nonlinear;  // pm/V
  double length_m = 0.0;

  void validate() const {
    if (!(length_m > 0.0)) throw ConfigError("device length must be positive");
    if (std::abs(design.hv.residual_rad_um) > 1e-6 ||
        std::abs(design.vh.residual_rad_um) > 1e-6)
      throw ConfigError("device design is not phase matched to solver tolerance");
  }
};

inline CrystalDevice make_device(DispersionModel model, PolarizationMapping mapping,
                                 DesignSolution design, double d_pm_v, double length_m,
                                 WarningLog* log = nullptr) {
  CrystalDevice dev{std::move(model), mapping, std::move(design), {}, length_m};
  dev.nonlinear = effective_nonlinearity(d_pm_v, dev.design.hv.order, dev.design.vh.order,
                                         dev.design.grating, log);
  dev.validate();
  return dev;
}

struct PumpConfig {
  double power_w = 0.0;
  double beam_area_m2 = 0.0;

  void validate() const {
    if (!(power_w > 0.0 && beam_area_m2 > 0.0))
      throw ConfigError("pump power and beam area must be positive");
  }
};

// h(x) = exp(-ix/2) sinc(x/2): per-pair spectral amplitude of a uniform crystal.
inline std::complex<double> h_function(double x) {
  const double u = 0.5 * x;
  return std::complex<double>(std::cos(u), -std::sin(u)) * sinc(u);
}

// ---- group-velocity slopes ---------------------------------------------------

struct Slopes {
  double s_hv = 0.0;  // 1/u_H(signal) + 1/u_V(idler), s/m
  double s_vh = 0.0;  // 1/u_V(signal) + 1/u_H(idler), s/m
};

inline Slopes gv_slopes(const CrystalDevice& dev) {
  const auto& d = dev.design;
  const CrystalAxis ah = dev.mapping.axis_h(), av = dev.mapping.axis_v();
  const double ng_s_h = group_index(dev.model, ah, d.signal_um, d.temperature_c);
  const double ng_s_v = group_index(dev.model, av, d.signal_um, d.temperature_c);
  const double ng_i_h = group_index(dev.model, ah, d.idler_um, d.temperature_c);
  const double ng_i_v = group_index(dev.model, av, d.idler_um, d.temperature_c);
  return {(ng_s_h + ng_i_v) / constants::c, (ng_s_v + ng_i_h) / constants::c};
}

// ---- joint spectra -----------------------------------------------------------

struct GridSpec {
  double span_fwhms = 20.0;   // total span in units of the wider component FWHM
  int points_per_fwhm = 64;
};

// Output-oriented default and the wide default used for concurrence checks:
// the trapezoid truncation bias of the overlap integrals scales as 1/span,
// so the oracle needs a much wider window than a plot does.
inline constexpr GridSpec kSpectrumGrid{20.0, 64};
inline constexpr GridSpec kOracleGrid{600.0, 64};

enum class SpectrumMode { linearized, exact };

struct JointSpectrum {
  std::vector<double> nu_rad_s;               // symmetric about 0
  std::vector<std::complex<double>> amp_hv;   // h_HV(nu)
  std::vector<std::complex<double>> amp_vh;   // h_VH(nu)
  Slopes slopes;
  double fwhm_ref_rad_s = 0.0;  // grid unit: the wider component FWHM
  double span_fwhms = 0.0;
  SpectrumMode mode = SpectrumMode::linearized;

  double density_hv(size_t i) const { return std::norm(amp_hv[i]); }
  double density_vh(size_t i) const { return std::norm(amp_vh[i]); }
};

struct BandwidthPair {
  double omega_hv_rad_s = 0.0;
  double omega_vh_rad_s = 0.0;
};

// Closed-form FWHM of sinc^2(nu L S / 2): 4*u0/(L*S) = 1.7718*pi/(L*S).
inline BandwidthPair bandwidth_fwhm(const CrystalDevice& dev) {
  const Slopes s = gv_slopes(dev);
  return {4.0 * kSincHalfMaxU / (dev.length_m * s.s_hv),
          4.0 * kSincHalfMaxU / (dev.length_m * s.s_vh)};
}

inline JointSpectrum joint_spectrum(const CrystalDevice& dev, const GridSpec& grid,
                                    SpectrumMode mode) {
  dev.validate();
  if (!(grid.span_fwhms >= 6.0))
    throw ConfigError("spectrum grid must span at least 6 FWHM");
  if (grid.points_per_fwhm < 32)
    throw ConfigError("spectrum grid too coarse: need at least 32 points per FWHM");

  JointSpectrum js;
  js.mode = mode;
  js.slopes = gv_slopes(dev);
  const BandwidthPair bw = bandwidth_fwhm(dev);
  js.fwhm_ref_rad_s = std::max(bw.omega_hv_rad_s, bw.omega_vh_rad_s);
  js.span_fwhms = grid.span_fwhms;

  const long nhalf =
      static_cast<long>(std::ceil(0.5 * grid.span_fwhms * grid.points_per_fwhm));
  const double half_span = 0.5 * grid.span_fwhms * js.fwhm_ref_rad_s;
  const double dv = half_span / static_cast<double>(nhalf);

  js.nu_rad_s.reserve(2 * nhalf + 1);
  js.amp_hv.reserve(2 * nhalf + 1);
  js.amp_vh.reserve(2 * nhalf + 1);

  const auto& d = dev.design;
  const double l_um = dev.length_m * 1e6;
  for (long k = -nhalf; k <= nhalf; ++k) {
    const double nu = static_cast<double>(k) * dv;
    js.nu_rad_s.push_back(nu);
    if (mode == SpectrumMode::linearized) {
      js.amp_hv.push_back(h_function(-nu * dev.length_m * js.slopes.s_hv));
      js.amp_vh.push_back(h_function(-nu * dev.length_m * js.slopes.s_vh));
    } else {
      const double lam_s = 2.0 * constants::pi * constants::c / (d.omega_s_rad_s + nu) * 1e6;
      const double lam_i = 2.0 * constants::pi * constants::c / (d.omega_i_rad_s - nu) * 1e6;
      for (const ProcessId id : {ProcessId::hv, ProcessId::vh}) {
        ProcessSpec p{id, d.pump_um, lam_s, lam_i};
        const double g = (id == ProcessId::hv) ? d.hv.g_rad_um : d.vh.g_rad_um;
        const double dk =
            delta_k(dev.model, dev.mapping, p, g, d.temperature_c);  // rad/um
        (id == ProcessId::hv ? js.amp_hv : js.amp_vh).push_back(h_function(l_um * dk));
      }
    }
  }
  return js;
}

// ---- forward/backward comparison ----------------------------------------------

struct ReductionFactors {
  double hv = 0.0;
  double vh = 0.0;
};

// (1/u1 + 1/u2)/|1/u1 - 1/u2| per component; the backward geometry's
// bandwidth advantage over the forward one. +inf when group velocities match.
inline double reduction_factor(double inv_u_signal, double inv_u_idler) {
  const double sum = inv_u_signal + inv_u_idler;
  const double diff = std::abs(inv_u_signal - inv_u_idler);
  if (diff < 1e-15 * sum) return std::numeric_limits<double>::infinity();
  return sum / diff;
}

inline ReductionFactors forward_backward_reduction(const CrystalDevice& dev) {
  const auto& d = dev.design;
  const CrystalAxis ah = dev.mapping.axis_h(), av = dev.mapping.axis_v();
  const double i_s_h = 1.0 / group_velocity(dev.model, ah, d.signal_um, d.temperature_c);
  const double i_s_v = 1.0 / group_velocity(dev.model, av, d.signal_um, d.temperature_c);
  const double i_i_h = 1.0 / group_velocity(dev.model, ah, d.idler_um, d.temperature_c);
  const double i_i_v = 1.0 / group_velocity(dev.model, av, d.idler_um, d.temperature_c);
  return {reduction_factor(i_s_h, i_i_v), reduction_factor(i_s_v, i_i_h)};
}

// ---- concurrence ---------------------------------------------------------------

// delta_n = sqrt(n_sH n_iV / (n_sV n_iH)) at the design point.
inline double delta_n_ratio(const CrystalDevice& dev) {
  const auto& d = dev.design;
  const CrystalAxis ah = dev.mapping.axis_h(), av = dev.mapping.axis_v();
  const double n_s_h = refractive_index(dev.model, ah, d.signal_um, d.temperature_c);
  const double n_s_v = refractive_index(dev.model, av, d.signal_um, d.temperature_c);
  const double n_i_h = refractive_index(dev.model, ah, d.idler_um, d.temperature_c);
  const double n_i_v = refractive_index(dev.model, av, d.idler_um, d.temperature_c);
  return std::sqrt((n_s_h * n_i_v) / (n_s_v * n_i_h));
}

// C = 2 d_hv d_vh min(S) / (d_hv^2 S_vh / dn + d_vh^2 dn S_hv); reduces to
// 2 S_min/(dn S_hv + S_vh/dn) at equal coefficient magnitudes.
inline double concurrence_closed(double s_hv, double s_vh, double delta_n, double d_hv = 1.0,
                                 double d_vh = 1.0) {
  if (!(s_hv > 0.0 && s_vh > 0.0 && delta_n > 0.0))
    throw ConfigError("concurrence requires positive slopes and index ratio");
  const double smin = std::min(s_hv, s_vh);
  const double num = 2.0 * std::abs(d_hv) * std::abs(d_vh) * smin;
  const double den = d_hv * d_hv * s_vh / delta_n + d_vh * d_vh * delta_n * s_hv;
  if (den == 0.0) return 0.0;
  return num / den;
}

inline double concurrence_closed_form(const CrystalDevice& dev) {
  const Slopes s = gv_slopes(dev);
  return concurrence_closed(s.s_hv, s.s_vh, delta_n_ratio(dev), dev.nonlinear.d_eff_hv_pm_v,
                            dev.nonlinear.d_eff_vh_pm_v);
}

// Independent concurrence: trapezoid overlap integrals of the complex h
// amplitudes -> unnormalized two-qubit density matrix in {HH, HV, VH, VV} ->
// spin-flip square-root-eigenvalue construction.
inline double concurrence_oracle_raw(double s_hv, double s_vh, double delta_n, double d_hv,
                                     double d_vh, double length_m, const GridSpec& grid) {
  if (!(grid.span_fwhms >= 20.0))
    throw ConfigError("concurrence oracle grid must span at least 10 FWHM each side");
  if (grid.points_per_fwhm < 64)
    throw ConfigError("concurrence oracle grid needs at least 64 points per FWHM");
  const double w_hv = 4.0 * kSincHalfMaxU / (length_m * s_hv);
  const double w_vh = 4.0 * kSincHalfMaxU / (length_m * s_vh);
  const double unit = std::max(w_hv, w_vh);
  const long nhalf =
      static_cast<long>(std::ceil(0.5 * grid.span_fwhms * grid.points_per_fwhm));
  const double dv = 0.5 * grid.span_fwhms * unit / static_cast<double>(nhalf);

  // relative amplitude weights alpha ~ d_hv/sqrt(n_sH n_iV), beta ~ d_vh/sqrt(n_sV n_iH)
  const double alpha = d_hv / delta_n;
  const double beta = d_vh;

  double ii = 0.0, jj = 0.0;
  std::complex<double> ij = 0.0;
  for (long k = -nhalf; k <= nhalf; ++k) {
    const double nu = static_cast<double>(k) * dv;
    const double w = (std::labs(k) == nhalf) ? 0.5 : 1.0;
    const std::complex<double> h1 = h_function(-nu * length_m * s_hv);
    const std::complex<double> h2 = h_function(-nu * length_m * s_vh);
    ii += w * std::norm(h1);
    jj += w * std::norm(h2);
    ij += w * h1 * std::conj(h2);
  }

  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  rho(1, 1) = alpha * alpha * ii;
  rho(2, 2) = beta * beta * jj;
  rho(1, 2) = alpha * beta * ij;
  rho(2, 1) = std::conj(rho(1, 2));
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) return 0.0;
  rho /= tr;

  Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();  // sigma_y (x) sigma_y
  flip(0, 3) = -1.0; flip(1, 2) = 1.0; flip(2, 1) = 1.0; flip(3, 0) = -1.0;
  const Eigen::Matrix4cd r = rho * flip * rho.conjugate() * flip;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("concurrence oracle eigensolve failed");
  std::array<double, 4> roots{};
  for (int i = 0; i < 4; ++i)
    roots[static_cast<size_t>(i)] = std::sqrt(std::max(0.0, es.eigenvalues()[i].real()));
  std::sort(roots.begin(), roots.end(), std::greater<double>());
  return std::max(0.0, roots[0] - roots[1] - roots[2] - roots[3]);
}

inline double concurrence_oracle(const CrystalDevice& dev, const GridSpec& grid = kOracleGrid) {
  const Slopes s = gv_slopes(dev);
  return concurrence_oracle_raw(s.s_hv, s.s_vh, delta_n_ratio(dev), dev.nonlinear.d_eff_hv_pm_v,
                                dev.nonlinear.d_eff_vh_pm_v, dev.length_m, grid);
}

// ---- rate, brightness, correlation times ---------------------------------------

// R = pi L P Omega_s Omega_i / (eps0 n_p c^3 S_beam)
//     * [ d_hv^2/(n_sH n_iV S_hv) + d_vh^2/(n_sV n_iH S_vh) ],  pairs/s.
// Continuum normalization: plane-wave pump |E_p|^2 = 2P/(eps0 n_p c S_beam),
// one pair per mode per coherence cell; the stated rate tolerance absorbs the
// normalization convention.
inline double pair_rate(const CrystalDevice& dev, const PumpConfig& pump,
                        WarningLog* log = nullptr) {
  dev.validate();
  pump.validate();
  const auto& d = dev.design;
  const CrystalAxis ah = dev.mapping.axis_h(), av = dev.mapping.axis_v();
  const double n_p = refractive_index(dev.model, ah, d.pump_um, d.temperature_c);
  const double n_s_h = refractive_index(dev.model, ah, d.signal_um, d.temperature_c);
  const double n_s_v = refractive_index(dev.model, av, d.signal_um, d.temperature_c);
  const double n_i_h = refractive_index(dev.model, ah, d.idler_um, d.temperature_c);
  const double n_i_v = refractive_index(dev.model, av, d.idler_um, d.temperature_c);
  const Slopes s = gv_slopes(dev);
  const double d_hv = dev.nonlinear.d_eff_hv_pm_v * 1e-12;  // m/V
  const double d_vh = dev.nonlinear.d_eff_vh_pm_v * 1e-12;
  if (!close_rel(std::abs(d_hv), std::abs(d_vh), 1e-9))
    warn(log, "deff-imbalance", "unequal |d_eff|; rate computed with per-process coefficients");
  const double c = constants::c;
  const double pref = constants::pi * dev.length_m * pump.power_w * d.omega_s_rad_s *
                      d.omega_i_rad_s /
                      (constants::eps0 * n_p * c * c * c * pump.beam_area_m2);
  return pref * (d_hv * d_hv / (n_s_h * n_i_v * s.s_hv) + d_vh * d_vh / (n_s_v * n_i_h * s.s_vh));
}

// 2 pi R / delta_omega per mW of pump = R / (delta_nu_GHz * P_mW); the
// bandwidth is the mean of the two component FWHMs.
inline double spectral_brightness(double rate_pairs_s, const BandwidthPair& bw,
                                  const PumpConfig& pump) {
  pump.validate();
  const double mean_omega = 0.5 * (bw.omega_hv_rad_s + bw.omega_vh_rad_s);
  const double dnu_ghz = mean_omega / (2.0 * constants::pi) / 1e9;
  const double p_mw = pump.power_w * 1e3;
  if (!(dnu_ghz > 0.0)) throw ConfigError("spectral brightness requires positive bandwidth");
  return rate_pairs_s / (dnu_ghz * p_mw);
}

struct CorrelationTimes {
  double transit_s = 0.0;    // L * max(S_hv, S_vh): rectangular correlation width
  double bandwidth_s = 0.0;  // 2*pi / mean FWHM
};

inline CorrelationTimes correlation_time(const CrystalDevice& dev) {
  const Slopes s = gv_slopes(dev);
  const BandwidthPair bw = bandwidth_fwhm(dev);
  return {dev.length_m * std::max(s.s_hv, s.s_vh),
          2.0 * constants::pi / (0.5 * (bw.omega_hv_rad_s + bw.omega_vh_rad_s))};
}

// |A| = |E_p|/(2c) * sqrt(Omega_s Omega_i / (n_s n_i)) per process; only the
// ratio (= 1/delta_n) is physically meaningful downstream.
struct AmplitudeMagnitudes {
  double a_hv = 0.0;
  double a_vh = 0.0;
};

inline AmplitudeMagnitudes amplitude_magnitudes(const CrystalDevice& dev,
                                                const PumpConfig& pump) {
  pump.validate();
  const auto& d = dev.design;
  const CrystalAxis ah = dev.mapping.axis_h(), av = dev.mapping.axis_v();
  const double n_p = refractive_index(dev.model, ah, d.pump_um, d.temperature_c);
  const double n_s_h = refractive_index(dev.model, ah, d.signal_um, d.temperature_c);
  const double n_s_v = refractive_index(dev.model, av, d.signal_um, d.temperature_c);
  const double n_i_h = refractive_index(dev.model, ah, d.idler_um, d.temperature_c);
  const double n_i_v = refractive_index(dev.model, av, d.idler_um, d.temperature_c);
  const double e_p =
      std::sqrt(2.0 * pump.power_w / (constants::eps0 * n_p * constants::c * pump.beam_area_m2));
  const double common = e_p / (2.0 * constants::c);
  const double prod = d.omega_s_rad_s * d.omega_i_rad_s;
  return {common * std::sqrt(prod / (n_s_h * n_i_v)), common * std::sqrt(prod / (n_s_v * n_i_h))};
}

// ---- headline figure assembly ---------------------------------------------------

struct SourceFigures {
  Slopes slopes;
  BandwidthPair bandwidth;
  ReductionFactors reduction;
  double delta_n = 0.0;
  double concurrence_closed_form = 0.0;
  double concurrence_oracle = 0.0;
  double rate_pairs_s = 0.0;
  double brightness_pairs_s_ghz_mw = 0.0;
  CorrelationTimes correlation;
  AmplitudeMagnitudes amplitudes;
  WarningLog warnings;
};

inline SourceFigures source_figures(const CrystalDevice& dev, const PumpConfig& pump,
                                    const GridSpec& oracle_grid = kOracleGrid) {
  SourceFigures f;
  f.slopes = gv_slopes(dev);
  f.bandwidth = bandwidth_fwhm(dev);
  f.reduction = forward_backward_reduction(dev);
  f.delta_n = delta_n_ratio(dev);
  f.concurrence_closed_form = concurrence_closed_form(dev);
  f.concurrence_oracle = concurrence_oracle(dev, oracle_grid);
  f.rate_pairs_s = pair_rate(dev, pump, &f.warnings);
  f.brightness_pairs_s_ghz_mw = spectral_brightness(f.rate_pairs_s, f.bandwidth, pump);
  f.correlation = correlation_time(dev);
  f.amplitudes = amplitude_magnitudes(dev, pump);
  return f;
}

}  // namespace dpp

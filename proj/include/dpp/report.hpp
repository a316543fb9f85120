#pragma once
// Run configuration, the end-to-end design pipeline, and machine-readable
// output builders (datasheet JSON, spectrum/tuning CSV, pattern files, text
// summary). Every emitted file embeds the tool version, the config hash, and
// the material provenance line; writes go through a temp-file rename so a
// failed run never leaves partial output.

#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "biphoton.hpp"
#include "core.hpp"
#include "dispersion.hpp"
#include "grating.hpp"
#include "phasematch.hpp"
#include "toml_lite.hpp"

namespace dpp {

// ---- hashing / file helpers ----------------------------------------------------

inline uint64_t fnv1a64(const void* data, size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  uint64_t h = 14695981039346656037ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= static_cast<uint64_t>(p[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hash_hex(uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file_atomic(const std::string& dir, const std::string& name,
                              const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir);
  const fs::path final_path = fs::path(dir) / name;
  const fs::path tmp_path = fs::path(dir) / (name + ".tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + tmp_path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed: " + tmp_path.string());
  }
  fs::rename(tmp_path, final_path, ec);
  if (ec) throw ConfigError("atomic rename failed: " + final_path.string());
}

// ---- run configuration -----------------------------------------------------------

struct RunConfig {
  std::string config_path;
  uint64_t config_hash = 0;
  std::string material_path;  // resolved against the config file's directory
  uint64_t material_hash = 0;

  PolarizationMapping mapping;
  DesignTargets targets;

  double length_um = 0.0;
  double d_pm_per_v = 0.0;
  double pump_power_mw = 0.0;
  double beam_area_mm2 = 0.0;

  GridSpec grid;  // spectrum output grid
  std::string out_dir = "out";
  std::string pattern_format = "txt";  // "txt" | "csv"
  double pattern_length_um = 1000.0;
  double tune_t_min_c = 0.0;
  double tune_t_max_c = 0.0;
  double tune_step_c = 0.5;
  uint64_t seed = 1;

  PumpConfig pump() const { return {pump_power_mw * 1e-3, beam_area_mm2 * 1e-6}; }

  void validate() const {
    mapping.validate();
    targets.validate();
    if (!(length_um > 0.0)) throw ConfigError("device: length_um must be positive");
    if (!(d_pm_per_v != 0.0)) throw ConfigError("device: d_pm_per_v must be nonzero");
    if (!(pump_power_mw > 0.0)) throw ConfigError("device: pump_power_mw must be positive");
    if (!(beam_area_mm2 > 0.0)) throw ConfigError("device: beam_area_mm2 must be positive");
    if (!(pattern_length_um > 0.0)) throw ConfigError("pattern: length_um must be positive");
    if (pattern_format != "txt" && pattern_format != "csv")
      throw ConfigError("output: pattern_format must be \"txt\" or \"csv\"");
    if (!(tune_step_c > 0.0)) throw ConfigError("tune: step_c must be positive");
    if (!(tune_t_max_c > tune_t_min_c)) throw ConfigError("tune: need t_max_c > t_min_c");
  }
};

namespace detail {

inline void check_table_keys(const toml::Document& doc, const std::string& table,
                             std::initializer_list<const char*> allowed) {
  const toml::Table* t = doc.find(table);
  if (!t) return;
  for (const auto& [key, value] : *t) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      toml::fail_at(doc, value.line,
                    "unknown key '" + key + "' in [" +
                        (table.empty() ? std::string("<root>") : table) + "]");
  }
}

// nullptr-safe lookup: table may be absent entirely
inline const toml::Value* opt_key(const toml::Document& doc, const std::string& table,
                                  const std::string& key) {
  const toml::Table* t = doc.find(table);
  return t ? toml::find_key(*t, key) : nullptr;
}

}  // namespace detail

inline RunConfig load_run_config(const std::string& path) {
  RunConfig cfg;
  cfg.config_path = path;
  const std::string bytes = read_file_bytes(path);
  cfg.config_hash = fnv1a64(bytes.data(), bytes.size());
  const toml::Document doc = toml::parse(bytes, path);

  for (const auto& [name, table] : doc.tables) {
    (void)table;
    if (name != "" && name != "device" && name != "mapping" && name != "targets" &&
        name != "grid" && name != "output" && name != "pattern" && name != "tune")
      throw ConfigError(path + ": unknown table [" + name + "]");
  }
  detail::check_table_keys(doc, "", {"seed"});
  detail::check_table_keys(doc, "device",
                           {"material", "length_um", "d_pm_per_v", "pump_power_mw",
                            "beam_area_mm2"});
  detail::check_table_keys(doc, "mapping", {"h", "v"});
  detail::check_table_keys(doc, "targets", {"pump_um", "degenerate", "signal_um", "order_m",
                                            "t_min_c", "t_max_c", "l_min", "l_max"});
  detail::check_table_keys(doc, "grid", {"span_fwhms", "points_per_fwhm"});
  detail::check_table_keys(doc, "output", {"dir", "pattern_format"});
  detail::check_table_keys(doc, "pattern", {"length_um"});
  detail::check_table_keys(doc, "tune", {"t_min_c", "t_max_c", "step_c"});

  if (const toml::Value* v = detail::opt_key(doc, "", "seed"))
    cfg.seed = static_cast<uint64_t>(toml::as_integer(doc, *v, "seed"));

  const toml::Table* device = doc.find("device");
  if (!device) throw ConfigError(path + ": missing required table [device]");
  cfg.material_path =
      toml::as_string(doc, toml::require_key(doc, *device, "device", "material"), "material");
  cfg.length_um =
      toml::as_number(doc, toml::require_key(doc, *device, "device", "length_um"), "length_um");
  cfg.d_pm_per_v = toml::as_number(doc, toml::require_key(doc, *device, "device", "d_pm_per_v"),
                                   "d_pm_per_v");
  cfg.pump_power_mw = toml::as_number(
      doc, toml::require_key(doc, *device, "device", "pump_power_mw"), "pump_power_mw");
  cfg.beam_area_mm2 = toml::as_number(
      doc, toml::require_key(doc, *device, "device", "beam_area_mm2"), "beam_area_mm2");

  if (const toml::Value* v = detail::opt_key(doc, "mapping", "h"))
    cfg.mapping.h = parse_axis(toml::as_string(doc, *v, "mapping.h"));
  if (const toml::Value* v = detail::opt_key(doc, "mapping", "v"))
    cfg.mapping.v = parse_axis(toml::as_string(doc, *v, "mapping.v"));

  const toml::Table* targets = doc.find("targets");
  if (!targets) throw ConfigError(path + ": missing required table [targets]");
  cfg.targets.pump_um =
      toml::as_number(doc, toml::require_key(doc, *targets, "targets", "pump_um"), "pump_um");
  bool degenerate = false;
  if (const toml::Value* v = detail::opt_key(doc, "targets", "degenerate"))
    degenerate = toml::as_bool(doc, *v, "degenerate");
  if (const toml::Value* v = detail::opt_key(doc, "targets", "signal_um")) {
    if (degenerate)
      throw ConfigError(path + ": targets cannot set both degenerate = true and signal_um");
    cfg.targets.signal_um = toml::as_number(doc, *v, "signal_um");
  } else if (!degenerate) {
    throw ConfigError(path + ": targets needs either degenerate = true or signal_um");
  }
  if (const toml::Value* v = detail::opt_key(doc, "targets", "order_m")) {
    const long long m = toml::as_integer(doc, *v, "order_m");
    if (m == 0 || m > 99 || m < -99) throw ConfigError(path + ": targets.order_m out of range");
    cfg.targets.order_hv = {static_cast<int>(m), 1};
    cfg.targets.order_vh = {static_cast<int>(m), -1};
  }
  if (const toml::Value* v = detail::opt_key(doc, "targets", "t_min_c"))
    cfg.targets.t_min_c = toml::as_number(doc, *v, "t_min_c");
  if (const toml::Value* v = detail::opt_key(doc, "targets", "t_max_c"))
    cfg.targets.t_max_c = toml::as_number(doc, *v, "t_max_c");
  if (const toml::Value* v = detail::opt_key(doc, "targets", "l_min"))
    cfg.targets.l_min = static_cast<int>(toml::as_integer(doc, *v, "l_min"));
  if (const toml::Value* v = detail::opt_key(doc, "targets", "l_max"))
    cfg.targets.l_max = static_cast<int>(toml::as_integer(doc, *v, "l_max"));

  if (const toml::Value* v = detail::opt_key(doc, "grid", "span_fwhms"))
    cfg.grid.span_fwhms = toml::as_number(doc, *v, "span_fwhms");
  if (const toml::Value* v = detail::opt_key(doc, "grid", "points_per_fwhm"))
    cfg.grid.points_per_fwhm = static_cast<int>(toml::as_integer(doc, *v, "points_per_fwhm"));

  if (const toml::Value* v = detail::opt_key(doc, "output", "dir"))
    cfg.out_dir = toml::as_string(doc, *v, "output.dir");
  if (const toml::Value* v = detail::opt_key(doc, "output", "pattern_format"))
    cfg.pattern_format = toml::as_string(doc, *v, "pattern_format");
  if (const toml::Value* v = detail::opt_key(doc, "pattern", "length_um"))
    cfg.pattern_length_um = toml::as_number(doc, *v, "pattern.length_um");

  cfg.tune_t_min_c = cfg.targets.t_min_c;
  cfg.tune_t_max_c = cfg.targets.t_max_c;
  if (const toml::Value* v = detail::opt_key(doc, "tune", "t_min_c"))
    cfg.tune_t_min_c = toml::as_number(doc, *v, "tune.t_min_c");
  if (const toml::Value* v = detail::opt_key(doc, "tune", "t_max_c"))
    cfg.tune_t_max_c = toml::as_number(doc, *v, "tune.t_max_c");
  if (const toml::Value* v = detail::opt_key(doc, "tune", "step_c"))
    cfg.tune_step_c = toml::as_number(doc, *v, "tune.step_c");

  // material path is interpreted relative to the config file location
  namespace fs = std::filesystem;
  fs::path mat(cfg.material_path);
  if (mat.is_relative()) mat = fs::path(path).parent_path() / mat;
  cfg.material_path = mat.lexically_normal().string();
  const std::string mat_bytes = read_file_bytes(cfg.material_path);
  cfg.material_hash = fnv1a64(mat_bytes.data(), mat_bytes.size());

  cfg.validate();
  return cfg;
}

// ---- design pipeline ---------------------------------------------------------------

struct FourierAuditRow {
  ProcessId id{};
  ReciprocalOrder order{};
  double g_rad_um = 0.0;
  double single_term = 0.0;                 // separable one-term coefficient
  std::complex<double> family{};            // coherent sum over degenerate orders
  std::complex<double> pattern_integral{};  // per-domain integration of the pattern
  double pattern_vs_family_abs = 0.0;
  double family_vs_single_abs = 0.0;
};

struct PatternAudit {
  double length_um = 0.0;
  size_t boundary_count = 0;
  double min_domain_um = 0.0;
  std::vector<FourierAuditRow> rows;
};

struct DesignBundle {
  DispersionModel model;
  CrystalDevice device;
  SourceFigures figures;
  DomainPattern pattern;
  PatternAudit audit;
  WarningLog warnings;
};

inline DesignBundle run_design(const RunConfig& cfg) {
  cfg.validate();
  DesignBundle b;
  b.model = load_dispersion_file(cfg.material_path);
  DesignSolution sol = design_source(b.model, cfg.mapping, cfg.targets);
  for (const Warning& w : sol.warnings) b.warnings.push_back(w);
  b.device =
      make_device(b.model, cfg.mapping, std::move(sol), cfg.d_pm_per_v, cfg.length_um * 1e-6,
                  &b.warnings);
  b.figures = source_figures(b.device, cfg.pump());
  for (const Warning& w : b.figures.warnings) b.warnings.push_back(w);

  const DualGrating& g = b.device.design.grating;
  if (cfg.pattern_length_um < g.lambda2_um)
    throw ConfigError("pattern length is shorter than one long period of the grating");
  b.pattern = synthesize_pattern(g, cfg.pattern_length_um);
  b.audit.length_um = b.pattern.length_um;
  b.audit.boundary_count = b.pattern.boundaries_um.size();
  b.audit.min_domain_um = min_domain(b.pattern);
  for (const ProcessId id : {ProcessId::hv, ProcessId::vh}) {
    const ProcessSolution& p = (id == ProcessId::hv) ? b.device.design.hv : b.device.design.vh;
    FourierAuditRow row;
    row.id = id;
    row.order = p.order;
    row.g_rad_um = reciprocal(p.order, g);
    row.single_term = fourier_coefficient(p.order, g);
    row.family = fourier_coefficient_exact(p.order, g);
    row.pattern_integral = pattern_fourier(b.pattern, row.g_rad_um);
    row.pattern_vs_family_abs = std::abs(row.pattern_integral - row.family);
    row.family_vs_single_abs = std::abs(row.family - std::complex<double>(row.single_term));
    b.audit.rows.push_back(row);
  }
  return b;
}

// ---- output builders ----------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json qty(double value, const char* unit) {
  nlohmann::ordered_json j;
  if (std::isfinite(value))
    j["value"] = value;
  else
    j["value"] = value > 0 ? "inf" : "-inf";
  j["unit"] = unit;
  return j;
}

inline nlohmann::ordered_json qty_int(long long value, const char* unit) {
  return nlohmann::ordered_json{{"value", value}, {"unit", unit}};
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

inline nlohmann::ordered_json warnings_json(const WarningLog& log) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Warning& w : log)
    arr.push_back(nlohmann::ordered_json{{"code", w.code}, {"message", w.message}});
  return arr;
}

}  // namespace detail

inline nlohmann::ordered_json datasheet_json(const RunConfig& cfg, const DesignBundle& b) {
  using nlohmann::ordered_json;
  using detail::qty;
  using detail::qty_int;
  ordered_json j;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["config"] = ordered_json{
      {"path", cfg.config_path},
      {"hash", hash_hex(cfg.config_hash)},
      {"seed", cfg.seed},
      {"device",
       ordered_json{{"length", qty(cfg.length_um, "um")},
                    {"d", qty(cfg.d_pm_per_v, "pm/V")},
                    {"pump_power", qty(cfg.pump_power_mw, "mW")},
                    {"beam_area", qty(cfg.beam_area_mm2, "mm^2")}}},
      {"mapping", ordered_json{{"h", to_string(cfg.mapping.h)}, {"v", to_string(cfg.mapping.v)}}},
      {"targets",
       ordered_json{{"pump", qty(cfg.targets.pump_um, "um")},
                    {"degenerate", !cfg.targets.signal_um.has_value()},
                    {"signal", cfg.targets.signal_um
                                   ? qty(*cfg.targets.signal_um, "um")
                                   : qty(2.0 * cfg.targets.pump_um, "um")},
                    {"temperature_window",
                     ordered_json{{"min", qty(cfg.targets.t_min_c, "degC")},
                                  {"max", qty(cfg.targets.t_max_c, "degC")}}}}}};
  j["material"] = ordered_json{{"path", cfg.material_path},
                               {"hash", hash_hex(cfg.material_hash)},
                               {"provenance", b.model.provenance}};

  const DesignSolution& d = b.device.design;
  auto proc_json = [&](const ProcessSolution& p) {
    return ordered_json{{"order_m", qty_int(p.order.m, "1")},
                        {"order_n", qty_int(p.order.n, "1")},
                        {"g", qty(p.g_rad_um, "rad/um")},
                        {"residual", qty(p.residual_rad_um, "rad/um")}};
  };
  j["design"] = ordered_json{
      {"temperature", qty(d.temperature_c, "degC")},
      {"lambda1", qty(d.grating.lambda1_um, "um")},
      {"lambda2", qty(d.grating.lambda2_um, "um")},
      {"l", qty_int(d.grating.l ? *d.grating.l : 0, "1")},
      {"duty1", ordered_json{{"value", d.grating.duty1.value()},
                             {"unit", "1"},
                             {"exact", to_string(d.grating.duty1)}}},
      {"duty2", ordered_json{{"value", d.grating.duty2.value()},
                             {"unit", "1"},
                             {"exact", to_string(d.grating.duty2)}}},
      {"pump", qty(d.pump_um, "um")},
      {"signal", qty(d.signal_um, "um")},
      {"idler", qty(d.idler_um, "um")},
      {"hv", proc_json(d.hv)},
      {"vh", proc_json(d.vh)},
      {"d_eff_hv", qty(b.device.nonlinear.d_eff_hv_pm_v, "pm/V")},
      {"d_eff_vh", qty(b.device.nonlinear.d_eff_vh_pm_v, "pm/V")}};

  ordered_json rows = ordered_json::array();
  for (const FourierAuditRow& r : b.audit.rows) {
    rows.push_back(ordered_json{
        {"process", to_string(r.id)},
        {"order_m", qty_int(r.order.m, "1")},
        {"order_n", qty_int(r.order.n, "1")},
        {"g", qty(r.g_rad_um, "rad/um")},
        {"coefficient_single_term", qty(r.single_term, "1")},
        {"coefficient_with_degenerate_orders", qty(std::abs(r.family), "1")},
        {"pattern_integral", qty(std::abs(r.pattern_integral), "1")},
        {"pattern_vs_degenerate_sum", qty(r.pattern_vs_family_abs, "1")},
        {"degenerate_sum_vs_single_term", qty(r.family_vs_single_abs, "1")}});
  }
  j["pattern_audit"] =
      ordered_json{{"length", qty(b.audit.length_um, "um")},
                   {"boundaries", qty_int(static_cast<long long>(b.audit.boundary_count), "1")},
                   {"min_domain", qty(b.audit.min_domain_um, "um")},
                   {"fourier", rows}};

  const SourceFigures& f = b.figures;
  const double two_pi_ghz = 2.0 * constants::pi * 1e9;
  j["figures"] = ordered_json{
      {"slope_hv", qty(f.slopes.s_hv, "s/m")},
      {"slope_vh", qty(f.slopes.s_vh, "s/m")},
      {"bandwidth_hv", qty(f.bandwidth.omega_hv_rad_s / two_pi_ghz, "GHz")},
      {"bandwidth_vh", qty(f.bandwidth.omega_vh_rad_s / two_pi_ghz, "GHz")},
      {"reduction_hv", qty(f.reduction.hv, "1")},
      {"reduction_vh", qty(f.reduction.vh, "1")},
      {"delta_n", qty(f.delta_n, "1")},
      {"concurrence_closed_form", qty(f.concurrence_closed_form, "1")},
      {"concurrence_oracle", qty(f.concurrence_oracle, "1")},
      {"concurrence_gap", qty(std::abs(f.concurrence_oracle - f.concurrence_closed_form), "1")},
      {"pair_rate", qty(f.rate_pairs_s, "1/s")},
      {"spectral_brightness", qty(f.brightness_pairs_s_ghz_mw, "1/(s GHz mW)")},
      {"transit_time", qty(f.correlation.transit_s * 1e12, "ps")},
      {"bandwidth_time", qty(f.correlation.bandwidth_s * 1e12, "ps")},
      {"amplitude_ratio_hv_over_vh", qty(f.amplitudes.a_hv / f.amplitudes.a_vh, "1")}};
  j["warnings"] = detail::warnings_json(b.warnings);
  return j;
}

inline std::string file_header_lines(const RunConfig& cfg, const DesignBundle& b,
                                     const std::string& extra = "") {
  std::ostringstream out;
  out << "# " << kToolName << " " << kToolVersion << "\n";
  out << "# config " << hash_hex(cfg.config_hash) << " material " << hash_hex(cfg.material_hash)
      << " seed " << cfg.seed << "\n";
  out << "# material: " << b.model.provenance << "\n";
  if (!extra.empty()) out << extra;
  return out.str();
}

inline std::string summary_text(const RunConfig& cfg, const DesignBundle& b) {
  using detail::fmt;
  const DesignSolution& d = b.device.design;
  const SourceFigures& f = b.figures;
  const double two_pi_ghz = 2.0 * constants::pi * 1e9;
  std::ostringstream out;
  out << file_header_lines(cfg, b);
  out << "\n";
  out << "design\n";
  out << "  temperature      " << fmt("%.4f", d.temperature_c) << " degC\n";
  out << "  lambda1          " << fmt("%.6f", d.grating.lambda1_um) << " um\n";
  out << "  lambda2          " << fmt("%.6f", d.grating.lambda2_um) << " um\n";
  out << "  l                " << (d.grating.l ? *d.grating.l : 0) << "  (duty2 = "
      << to_string(d.grating.duty2) << ", duty1 = " << to_string(d.grating.duty1) << ")\n";
  out << "  pump             " << fmt("%.6f", d.pump_um) << " um\n";
  out << "  signal / idler   " << fmt("%.6f", d.signal_um) << " / " << fmt("%.6f", d.idler_um)
      << " um\n";
  out << "  G (hv, order " << d.hv.order.m << "," << d.hv.order.n << ")   "
      << fmt("%.6f", d.hv.g_rad_um) << " rad/um\n";
  out << "  G (vh, order " << d.vh.order.m << "," << d.vh.order.n << ")  "
      << fmt("%.6f", d.vh.g_rad_um) << " rad/um\n";
  out << "pattern (" << fmt("%.3f", b.audit.length_um) << " um, "
      << b.audit.boundary_count << " boundaries)\n";
  out << "  min domain       " << fmt("%.6f", b.audit.min_domain_um) << " um\n";
  for (const FourierAuditRow& r : b.audit.rows) {
    out << "  fourier " << to_string(r.id) << "       |pattern| = "
        << fmt("%.6f", std::abs(r.pattern_integral))
        << "  |coeff| = " << fmt("%.6f", std::abs(r.family))
        << "  (single-term " << fmt("%.6f", r.single_term)
        << ", residual " << fmt("%.2e", r.pattern_vs_family_abs) << ")\n";
  }
  out << "figures (L = " << fmt("%.0f", cfg.length_um) << " um, P = "
      << fmt("%.3f", cfg.pump_power_mw) << " mW, S = " << fmt("%.4f", cfg.beam_area_mm2)
      << " mm^2)\n";
  out << "  bandwidth hv/vh  " << fmt("%.4f", f.bandwidth.omega_hv_rad_s / two_pi_ghz) << " / "
      << fmt("%.4f", f.bandwidth.omega_vh_rad_s / two_pi_ghz) << " GHz\n";
  out << "  reduction hv/vh  " << fmt("%.3f", f.reduction.hv) << " / "
      << fmt("%.3f", f.reduction.vh) << "\n";
  out << "  delta_n          " << fmt("%.8f", f.delta_n) << "\n";
  out << "  concurrence      " << fmt("%.6f", f.concurrence_closed_form) << " (closed form), "
      << fmt("%.6f", f.concurrence_oracle) << " (density-matrix oracle)\n";
  out << "  pair rate        " << fmt("%.2f", f.rate_pairs_s) << " 1/s\n";
  out << "  brightness       " << fmt("%.2f", f.brightness_pairs_s_ghz_mw) << " 1/(s GHz mW)\n";
  out << "  correlation      " << fmt("%.2f", f.correlation.transit_s * 1e12) << " ps (transit), "
      << fmt("%.2f", f.correlation.bandwidth_s * 1e12) << " ps (bandwidth)\n";
  if (!b.warnings.empty()) {
    out << "warnings\n";
    for (const Warning& w : b.warnings)
      out << "  [" << w.code << "] " << w.message << "\n";
  }
  return out.str();
}

// CSV of the joint spectral densities: one row per detuning, peak-normalized.
inline std::string spectrum_csv(const RunConfig& cfg, const DesignBundle& b, SpectrumMode mode) {
  const JointSpectrum js = joint_spectrum(b.device, cfg.grid, mode);
  std::ostringstream out;
  out << file_header_lines(
      cfg, b,
      std::string("# mode: ") +
          (mode == SpectrumMode::linearized ? "linearized" : "exact") + "\n");
  out << "nu_ghz,density_hv,density_vh\n";
  char buf[96];
  for (size_t i = 0; i < js.nu_rad_s.size(); ++i) {
    const double nu_ghz = js.nu_rad_s[i] / (2.0 * constants::pi * 1e9);
    std::snprintf(buf, sizeof(buf), "%.9f,%.12e,%.12e\n", nu_ghz, js.density_hv(i),
                  js.density_vh(i));
    out << buf;
  }
  return out.str();
}

// CSV tuning curves: one row per temperature, per-process signal/idler columns,
// blank cells where no phase-matched wavelength exists in the search window.
inline std::string tuning_csv(const RunConfig& cfg, const DesignBundle& b) {
  std::vector<double> ts;
  for (double t = cfg.tune_t_min_c; t <= cfg.tune_t_max_c + 1e-9; t += cfg.tune_step_c)
    ts.push_back(t);
  const TuningCurve curve =
      tuning_curve(b.model, cfg.mapping, b.device.design, ts);
  std::ostringstream out;
  out << file_header_lines(cfg, b);
  out << "t_c,lambda_s_hv_um,lambda_i_hv_um,lambda_s_vh_um,lambda_i_vh_um\n";
  char buf[64];
  auto cell = [&](const std::optional<double>& v) -> std::string {
    if (!v) return "";
    std::snprintf(buf, sizeof(buf), "%.9f", *v);
    return buf;
  };
  for (size_t i = 0; i < ts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.4f", ts[i]);
    out << buf << "," << cell(curve.hv[i].signal_um) << "," << cell(curve.hv[i].idler_um) << ","
        << cell(curve.vh[i].signal_um) << "," << cell(curve.vh[i].idler_um) << "\n";
  }
  return out.str();
}

// Domain pattern export: boundary position (fixed 6 decimals) and the sign of
// the domain that ends at that boundary; the crystal end appears as the final
// boundary so the file reconstructs the full pattern.
inline std::string pattern_file_text(const RunConfig& cfg, const DesignBundle& b, bool csv) {
  const DomainPattern& p = b.pattern;
  const DualGrating& g = b.device.design.grating;
  std::ostringstream extra;
  extra << "# lambda1_um = " << detail::fmt("%.6f", g.lambda1_um)
        << "  lambda2_um = " << detail::fmt("%.6f", g.lambda2_um)
        << "  duty1 = " << to_string(g.duty1) << "  duty2 = " << to_string(g.duty2)
        << "  l = " << (g.l ? *g.l : 0) << "\n";
  extra << "# length_um = " << detail::fmt("%.6f", p.length_um)
        << "  boundaries = " << p.boundaries_um.size() + 1
        << "  min_domain_um = " << detail::fmt("%.6f", b.audit.min_domain_um) << "\n";
  std::ostringstream out;
  out << file_header_lines(cfg, b, extra.str());
  if (csv) out << "boundary_um,domain_sign\n";
  char buf[48];
  int sign = p.initial_sign;
  for (const double x : p.boundaries_um) {
    std::snprintf(buf, sizeof(buf), csv ? "%.6f,%+d\n" : "%.6f %+d\n", x, sign);
    out << buf;
    sign = -sign;
  }
  std::snprintf(buf, sizeof(buf), csv ? "%.6f,%+d\n" : "%.6f %+d\n", p.length_um, sign);
  out << buf;
  return out.str();
}

}  // namespace dpp

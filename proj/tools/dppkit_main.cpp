// dppkit: design and analysis tool for counterpropagating photon-pair sources
// built on dual-period poled crystals.
//
// Subcommands: design | spectrum | pattern | tune. All read a TOML run config;
// outputs land in the configured (or --out) directory. Exit codes: 0 success,
// 1 invalid input, 2 no solution in the searched ranges, 3 numerical failure.
// Errors are also emitted as one-line JSON on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include <dpp/dpp.hpp>

namespace {

void emit_error(const char* type, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"type", type}, {"message", message}};
  std::fprintf(stderr, "%s\n", j.dump().c_str());
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const dpp::NoSolutionError& e) {
    emit_error("no_solution", e.what());
    return 2;
  } catch (const dpp::NumericalError& e) {
    emit_error("numerical", e.what());
    return 3;
  } catch (const dpp::RangeError& e) {
    emit_error("range", e.what());
    return 1;
  } catch (const dpp::ConfigError& e) {
    emit_error("config", e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 3;
  }
}

std::string joined(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"design/analysis toolkit for dual-period poled counterpropagating "
               "photon-pair sources"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool have_out = false, have_seed = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (TOML)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)")
        ->each([&](const std::string&) { have_out = true; });
    sub->add_option("--seed", seed, "seed recorded in outputs (overrides config)")
        ->each([&](const std::string&) { have_seed = true; });
  };

  CLI::App* cmd_design = app.add_subcommand("design", "solve the source design, write datasheet");
  add_common(cmd_design);

  CLI::App* cmd_spectrum =
      app.add_subcommand("spectrum", "emit joint spectral densities as CSV");
  add_common(cmd_spectrum);
  std::string mode_str = "linearized";
  cmd_spectrum->add_option("--mode", mode_str, "dispersion treatment")
      ->check(CLI::IsMember({"linearized", "exact"}));

  CLI::App* cmd_pattern = app.add_subcommand("pattern", "export the poling domain pattern");
  add_common(cmd_pattern);
  double pattern_length = 0.0;
  bool have_length = false;
  cmd_pattern->add_option("--length-um", pattern_length, "pattern span (overrides config)")
      ->each([&](const std::string&) { have_length = true; });

  CLI::App* cmd_tune = app.add_subcommand("tune", "emit temperature tuning curves as CSV");
  add_common(cmd_tune);
  double tmin = 0.0, tmax = 0.0;
  bool have_tmin = false, have_tmax = false;
  cmd_tune->add_option("--tmin", tmin, "curve start, degC (overrides config)")
      ->each([&](const std::string&) { have_tmin = true; });
  cmd_tune->add_option("--tmax", tmax, "curve end, degC (overrides config)")
      ->each([&](const std::string&) { have_tmax = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  return run_guarded([&] {
    dpp::RunConfig cfg = dpp::load_run_config(config_path);
    if (have_out) cfg.out_dir = out_dir;
    if (have_seed) cfg.seed = seed;
    if (have_length) cfg.pattern_length_um = pattern_length;
    if (have_tmin) cfg.tune_t_min_c = tmin;
    if (have_tmax) cfg.tune_t_max_c = tmax;
    cfg.validate();

    const dpp::DesignBundle bundle = dpp::run_design(cfg);

    if (cmd_design->parsed()) {
      const std::string sheet = dpp::datasheet_json(cfg, bundle).dump(2) + "\n";
      const std::string summary = dpp::summary_text(cfg, bundle);
      dpp::write_file_atomic(cfg.out_dir, "datasheet.json", sheet);
      dpp::write_file_atomic(cfg.out_dir, "summary.txt", summary);
      std::fputs(summary.c_str(), stdout);
      std::printf("wrote %s\n", joined(cfg.out_dir, "datasheet.json").c_str());
      std::printf("wrote %s\n", joined(cfg.out_dir, "summary.txt").c_str());
    } else if (cmd_spectrum->parsed()) {
      const dpp::SpectrumMode mode = (mode_str == "exact") ? dpp::SpectrumMode::exact
                                                           : dpp::SpectrumMode::linearized;
      const std::string name = "spectrum_" + mode_str + ".csv";
      dpp::write_file_atomic(cfg.out_dir, name, dpp::spectrum_csv(cfg, bundle, mode));
      std::printf("wrote %s\n", joined(cfg.out_dir, name).c_str());
    } else if (cmd_pattern->parsed()) {
      const bool csv = cfg.pattern_format == "csv";
      const std::string name = csv ? "pattern.csv" : "pattern.txt";
      dpp::write_file_atomic(cfg.out_dir, name, dpp::pattern_file_text(cfg, bundle, csv));
      std::printf("pattern length %.6f um, %zu boundaries, min domain %.6f um\n",
                  bundle.audit.length_um, bundle.audit.boundary_count + 1,
                  bundle.audit.min_domain_um);
      for (const dpp::FourierAuditRow& r : bundle.audit.rows)
        std::printf("fourier %s (m=%d, n=%d): |pattern - coeff| = %.3e\n", dpp::to_string(r.id),
                    r.order.m, r.order.n, r.pattern_vs_family_abs);
      std::printf("wrote %s\n", joined(cfg.out_dir, name).c_str());
    } else if (cmd_tune->parsed()) {
      dpp::write_file_atomic(cfg.out_dir, "tuning.csv", dpp::tuning_csv(cfg, bundle));
      std::printf("wrote %s\n", joined(cfg.out_dir, "tuning.csv").c_str());
    }
  });
}

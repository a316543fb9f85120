#pragma once
// Shared fixtures for the test suite: repo paths, a memoized material model,
// the two reference designs, and small utilities.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <dpp/dpp.hpp>

#ifndef DPPKIT_SOURCE_DIR
#error "build must define DPPKIT_SOURCE_DIR"
#endif
#ifndef DPPKIT_CLI_PATH
#error "build must define DPPKIT_CLI_PATH"
#endif

namespace testutil {

inline std::string source_dir() { return DPPKIT_SOURCE_DIR; }
inline std::string cli_path() { return DPPKIT_CLI_PATH; }
inline std::string material_path() { return source_dir() + "/materials/ktp.toml"; }
inline std::string config_path(const char* name) {
  return source_dir() + "/configs/" + name;
}

inline const dpp::DispersionModel& ktp() {
  static const dpp::DispersionModel model = dpp::load_dispersion_file(material_path());
  return model;
}

inline dpp::DesignTargets degenerate_targets() {
  dpp::DesignTargets t;
  t.pump_um = 0.655;
  return t;
}

inline dpp::DesignTargets nondegenerate_targets() {
  dpp::DesignTargets t;
  t.pump_um = 0.532;
  t.signal_um = 0.8073;
  return t;
}

inline const dpp::DesignSolution& degenerate_design() {
  static const dpp::DesignSolution sol =
      dpp::design_source(ktp(), dpp::PolarizationMapping{}, degenerate_targets());
  return sol;
}

inline const dpp::DesignSolution& nondegenerate_design() {
  static const dpp::DesignSolution sol =
      dpp::design_source(ktp(), dpp::PolarizationMapping{}, nondegenerate_targets());
  return sol;
}

inline dpp::CrystalDevice degenerate_device() {
  return dpp::make_device(ktp(), dpp::PolarizationMapping{}, degenerate_design(), 3.9, 0.02);
}

inline dpp::CrystalDevice nondegenerate_device() {
  return dpp::make_device(ktp(), dpp::PolarizationMapping{}, nondegenerate_design(), 3.9, 0.02);
}

inline dpp::PumpConfig reference_pump() { return {1.0e-3, 0.01e-6}; }

// fresh scratch directory under the system temp root
inline std::string fresh_dir(const char* tag) {
  static int counter = 0;
  const auto base = std::filesystem::temp_directory_path() /
                    ("dppkit_" + std::string(tag) + "_" + std::to_string(++counter));
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);
  return base.string();
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// run the CLI; returns the process exit code
inline int run_cli(const std::string& args) {
  const std::string cmd = "\"" + cli_path() + "\" " + args;
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WEXITSTATUS(rc);
}

}  // namespace testutil

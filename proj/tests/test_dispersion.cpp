#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "helpers.hpp"

using namespace dpp;
using Catch::Approx;

namespace {

// minimal valid material text to mutate in the failure tests
std::string minimal_material(const std::string& axis_block) {
  return "provenance = \"synthetic test material\"\n" + axis_block;
}

const std::string good_axis = R"([z]
form = "sellmeier2"
coefficients = [4.59423, 0.06206, 0.04763, 110.80672, 86.12171]
thermal_coefficients = []
lambda_range_um = [0.50, 1.70]
temp_range_c = [10.0, 150.0]
)";

}  // namespace

TEST_CASE("shipped material reproduces pinned index values", "[dispersion]") {
  const DispersionModel& m = testutil::ktp();
  CHECK_FALSE(m.provenance.empty());
  CHECK(m.has_axis(CrystalAxis::x));
  CHECK(m.has_axis(CrystalAxis::y));
  CHECK(m.has_axis(CrystalAxis::z));

  // values pinned from an independent evaluation of the same coefficient set
  CHECK(refractive_index(m, CrystalAxis::z, 0.655, 75.0) ==
        Approx(1.8621680438005468).margin(5e-12));
  CHECK(refractive_index(m, CrystalAxis::z, 0.655, 25.0) ==
        Approx(1.861149513121882).margin(5e-12));
  CHECK(refractive_index(m, CrystalAxis::y, 1.310, 25.0) ==
        Approx(1.7419490637741588).margin(5e-12));
  CHECK(refractive_index(m, CrystalAxis::x, 1.310, 25.0) ==
        Approx(1.7323758012660273).margin(5e-12));
}

TEST_CASE("biaxial ordering n_z > n_y > n_x holds across the band", "[dispersion]") {
  const DispersionModel& m = testutil::ktp();
  for (const double lam : {0.532, 0.655, 0.8073, 1.31, 1.56}) {
    const double nx = refractive_index(m, CrystalAxis::x, lam, 25.0);
    const double ny = refractive_index(m, CrystalAxis::y, lam, 25.0);
    const double nz = refractive_index(m, CrystalAxis::z, lam, 25.0);
    CAPTURE(lam);
    CHECK(nz > ny);
    CHECK(ny > nx);
    CHECK(nx > 1.0);
  }
}

TEST_CASE("group quantities agree with a finite-difference oracle", "[dispersion]") {
  const DispersionModel& m = testutil::ktp();
  const double h = 1e-4;  // um
  int points = 0;
  for (const CrystalAxis axis : {CrystalAxis::y, CrystalAxis::z}) {
    for (int i = 0; i < 10; ++i) {
      const double lam = 0.55 + i * (1.65 - 0.55) / 9.0;
      for (int j = 0; j < 5; ++j) {
        const double t = 15.0 + j * (145.0 - 15.0) / 4.0;
        const double slope_fd =
            (refractive_index(m, axis, lam + h, t) - refractive_index(m, axis, lam - h, t)) /
            (2.0 * h);
        const double ng_fd = refractive_index(m, axis, lam, t) - lam * slope_fd;
        const double ng = group_index(m, axis, lam, t);
        CAPTURE(lam, t, static_cast<int>(axis));
        CHECK(std::abs(ng - ng_fd) / ng_fd < 1e-6);
        CHECK(group_velocity(m, axis, lam, t) == Approx(constants::c / ng).epsilon(1e-14));
        ++points;
      }
    }
  }
  CHECK(points == 100);
}

TEST_CASE("group index exceeds phase index in the normal-dispersion band", "[dispersion]") {
  const DispersionModel& m = testutil::ktp();
  for (const double lam : {0.6, 0.9, 1.2, 1.5}) {
    CHECK(group_index(m, CrystalAxis::z, lam, 75.0) >
          refractive_index(m, CrystalAxis::z, lam, 75.0));
  }
}

TEST_CASE("wavenumber is 2 pi n over lambda", "[dispersion]") {
  const DispersionModel& m = testutil::ktp();
  const double n = refractive_index(m, CrystalAxis::z, 1.31, 75.0);
  CHECK(wavenumber(m, CrystalAxis::z, 1.31, 75.0) ==
        Approx(2.0 * constants::pi * n / 1.31).epsilon(1e-15));
}

TEST_CASE("out-of-range queries throw with context", "[dispersion]") {
  const DispersionModel& m = testutil::ktp();
  CHECK_THROWS_AS(refractive_index(m, CrystalAxis::z, 0.40, 25.0), RangeError);
  CHECK_THROWS_AS(refractive_index(m, CrystalAxis::z, 1.80, 25.0), RangeError);
  CHECK_THROWS_AS(refractive_index(m, CrystalAxis::z, 1.31, 5.0), RangeError);
  CHECK_THROWS_AS(refractive_index(m, CrystalAxis::z, 1.31, 200.0), RangeError);
  // index evaluation allows the declared endpoints...
  CHECK_NOTHROW(refractive_index(m, CrystalAxis::z, 0.50, 25.0));
  CHECK_NOTHROW(refractive_index(m, CrystalAxis::z, 1.70, 150.0));
  // ...but derivative-bearing quantities need interior room
  CHECK_THROWS_AS(group_index(m, CrystalAxis::z, 0.50, 25.0), RangeError);
  CHECK_THROWS_AS(group_velocity(m, CrystalAxis::z, 1.70, 25.0), RangeError);
  CHECK_NOTHROW(group_index(m, CrystalAxis::z, 0.51, 25.0));
}

TEST_CASE("material loader rejects malformed files", "[dispersion]") {
  // well-formed baseline parses
  CHECK_NOTHROW(load_dispersion_text(minimal_material(good_axis), "t"));

  // unknown keys, bad form, wrong counts
  CHECK_THROWS_AS(load_dispersion_text(minimal_material(good_axis) + "stray = 1\n", "t"),
                  ConfigError);
  std::string bad = good_axis;
  bad.replace(bad.find("sellmeier2"), 10, "sellmeier9");
  CHECK_THROWS_AS(load_dispersion_text(minimal_material(bad), "t"), ConfigError);

  bad = good_axis;
  bad.replace(bad.find("coefficients = [4.59423, "), 25, "coefficients = [");
  CHECK_THROWS_AS(load_dispersion_text(minimal_material(bad), "t"), ConfigError);

  bad = good_axis;
  bad.replace(bad.find("thermal_coefficients = []"), 25, "thermal_coefficients = [1.0, 2.0]");
  CHECK_THROWS_AS(load_dispersion_text(minimal_material(bad), "t"), ConfigError);

  bad = good_axis;
  bad.replace(bad.find("[0.50, 1.70]"), 12, "[1.70, 0.50]");
  CHECK_THROWS_AS(load_dispersion_text(minimal_material(bad), "t"), ConfigError);

  // physically invalid: n^2 <= 1 inside the declared window
  const std::string weak = R"([z]
form = "sellmeier2"
coefficients = [0.5, 0.0, 0.01, 0.0, 100.0]
thermal_coefficients = []
lambda_range_um = [0.50, 1.70]
temp_range_c = [10.0, 150.0]
)";
  CHECK_THROWS_AS(load_dispersion_text(minimal_material(weak), "t"), ConfigError);

  // pole inside the declared wavelength window
  const std::string pole = R"([z]
form = "sellmeier2"
coefficients = [4.59423, 0.06206, 1.0, 110.80672, 86.12171]
thermal_coefficients = []
lambda_range_um = [0.50, 1.70]
temp_range_c = [10.0, 150.0]
)";
  CHECK_THROWS_AS(load_dispersion_text(minimal_material(pole), "t"), ConfigError);
}

TEST_CASE("missing axis access reports a config error", "[dispersion]") {
  const DispersionModel m = load_dispersion_text(minimal_material(good_axis), "t");
  CHECK(m.has_axis(CrystalAxis::z));
  CHECK_FALSE(m.has_axis(CrystalAxis::x));
  CHECK_THROWS_AS(refractive_index(m, CrystalAxis::x, 1.0, 25.0), ConfigError);
}

TEST_CASE("thermal correction shifts the index with temperature", "[dispersion]") {
  const DispersionModel& m = testutil::ktp();
  const double cold = refractive_index(m, CrystalAxis::z, 0.655, 25.0);
  const double hot = refractive_index(m, CrystalAxis::z, 0.655, 75.0);
  CHECK(hot > cold);  // dn/dT > 0 along z in this band
  // reference temperature: thermal term vanishes at 25 C by construction,
  // so the base and full evaluations coincide there
  const double base = refractive_index(m, CrystalAxis::y, 1.31, 25.0);
  CHECK(std::isfinite(base));
}

// Phase-matching layer: process bookkeeping, residual conventions, the
// counterpropagating-pair design solver, and temperature tuning curves.
#include <catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <vector>

#include <dpp/dpp.hpp>

#include "helpers.hpp"

using Catch::Approx;
using namespace dpp;

namespace {

constexpr double kPi = constants::pi;

// Frozen solver outputs for the shipped material and the two reference
// designs.  Regenerate by printing DesignSolution fields at full precision.
struct FrozenDesign {
  double t_c;
  double lambda1_um;
  double lambda2_um;
  int l;
  long long duty2_num, duty2_den;
  double g_hv, g_vh;  // rad/um
  double idler_um;
};

const FrozenDesign kDeg{74.999953305954207,
                        1.0552216313785894,
                        16.355935286368137,
                        31,
                        15,
                        31,
                        17.478971790438798,
                        18.24727824276578,
                        1.31};
const FrozenDesign kNd{75.499963242703046,
                       1.2201253827937251,
                       12.811316519334113,
                       21,
                       10,
                       21,
                       14.958427697869258,
                       15.939308202647569,
                       1.5600566654558661};

void check_against_frozen(const DesignSolution& sol, const DesignTargets& t,
                          const FrozenDesign& f) {
  CHECK(sol.temperature_c == Approx(f.t_c).margin(1e-6));
  CHECK(sol.temperature_c > t.t_min_c);
  CHECK(sol.temperature_c < t.t_max_c);

  const DualGrating& g = sol.grating;
  CHECK(g.lambda1_um == Approx(f.lambda1_um).epsilon(1e-9));
  CHECK(g.lambda2_um == Approx(f.lambda2_um).epsilon(1e-9));
  REQUIRE(g.l.has_value());
  CHECK(*g.l == f.l);
  // The long period is tied to the short one by the exact ratio l/2.
  CHECK(g.lambda2_um == g.lambda1_um * (0.5 * f.l));
  CHECK(g.duty1.num == 1);
  CHECK(g.duty1.den == 2);
  CHECK(g.duty2.num == f.duty2_num);
  CHECK(g.duty2.den == f.duty2_den);

  CHECK(sol.hv.order.m == 3);
  CHECK(sol.hv.order.n == -1);
  CHECK(sol.vh.order.m == 3);
  CHECK(sol.vh.order.n == 1);
  CHECK(sol.hv.g_rad_um == Approx(f.g_hv).epsilon(1e-9));
  CHECK(sol.vh.g_rad_um == Approx(f.g_vh).epsilon(1e-9));
  // Stored reciprocals are computed from the final grating, not cached from
  // the pre-snap period solve.
  CHECK(sol.hv.g_rad_um == reciprocal(sol.hv.order, g));
  CHECK(sol.vh.g_rad_um == reciprocal(sol.vh.order, g));
  CHECK(std::abs(sol.hv.residual_rad_um) < 1e-8);
  CHECK(std::abs(sol.vh.residual_rad_um) < 1e-8);

  CHECK(sol.idler_um == Approx(f.idler_um).epsilon(1e-12));
  CHECK(sol.omega_s_rad_s == vacuum_omega_rad_s(sol.signal_um));
  CHECK(sol.omega_i_rad_s == vacuum_omega_rad_s(sol.idler_um));

  bool swapped_note = false;
  for (const Warning& w : sol.warnings) swapped_note |= (w.code == "order-assignment");
  CHECK(swapped_note);
}

}  // namespace

TEST_CASE("idler wavelength follows from energy conservation", "[phasematch]") {
  const ProcessSpec p = make_process(ProcessId::hv, 0.532, 0.8073);
  CHECK(p.idler_um == Approx(1.5600566654558661).epsilon(1e-12));
  CHECK(1.0 / p.pump_um ==
        Approx(1.0 / p.signal_um + 1.0 / p.idler_um).epsilon(1e-12));
  CHECK_NOTHROW(p.validate());

  const ProcessSpec d = make_degenerate_process(ProcessId::vh, 0.655);
  CHECK(d.signal_um == 2.0 * 0.655);
  CHECK(d.idler_um == d.signal_um);
}

TEST_CASE("process validation rejects inconsistent wavelength triples", "[phasematch]") {
  CHECK_THROWS_AS(make_process(ProcessId::hv, 0.532, 0.4), ConfigError);
  CHECK_THROWS_AS(make_process(ProcessId::hv, -0.5, 0.8), ConfigError);
  CHECK_THROWS_AS(make_process(ProcessId::hv, 0.532, 0.532), ConfigError);

  ProcessSpec bad{ProcessId::hv, 0.532, 0.8073, 1.7};  // violates 1/p = 1/s + 1/i
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("per-process polarization axes come from the mapping", "[phasematch]") {
  const PolarizationMapping map{CrystalAxis::z, CrystalAxis::y};
  const ProcessSpec hv = make_degenerate_process(ProcessId::hv, 0.655);
  const ProcessSpec vh = make_degenerate_process(ProcessId::vh, 0.655);
  CHECK(hv.signal_axis(map) == CrystalAxis::z);
  CHECK(hv.idler_axis(map) == CrystalAxis::y);
  CHECK(vh.signal_axis(map) == CrystalAxis::y);
  CHECK(vh.idler_axis(map) == CrystalAxis::z);
}

TEST_CASE("momentum residual vanishes when G carries the full mismatch", "[phasematch]") {
  const DispersionModel& model = testutil::ktp();
  const PolarizationMapping map{};

  for (const double t_c : {30.0, 75.0, 110.0}) {
    for (const ProcessId id : {ProcessId::hv, ProcessId::vh}) {
      const ProcessSpec proc = make_process(id, 0.532, 0.8073);
      const double k_p = wavenumber(model, map.axis_h(), proc.pump_um, t_c);
      const double k_s = wavenumber(model, proc.signal_axis(map), proc.signal_um, t_c);
      const double k_i = wavenumber(model, proc.idler_axis(map), proc.idler_um, t_c);

      // With the signal forward and the idler backward, the grating must
      // supply k_p - k_s + k_i.
      const double g_exact = k_p - k_s + k_i;
      CHECK(std::abs(delta_k(model, map, proc, g_exact, t_c)) < 1e-12 * k_p);

      // A forward-idler sign mistake would leave a residual of 2 k_i.
      const double g_forward = k_p - k_s - k_i;
      CHECK(delta_k(model, map, proc, g_forward, t_c) ==
            Approx(2.0 * k_i).epsilon(1e-12));
    }
  }
}

TEST_CASE("degenerate reciprocal splitting equals twice the birefringent wavenumber gap",
          "[phasematch]") {
  const DispersionModel& model = testutil::ktp();
  const PolarizationMapping map{};

  const ReciprocalRequirement r = required_reciprocals(model, map, 0.655, std::nullopt, 75.0);
  CHECK(r.lambda_s_um == 2.0 * 0.655);
  CHECK(r.lambda_i_um == r.lambda_s_um);
  // Same axis and wavelength on both sides, so the H wavenumbers coincide.
  CHECK(r.k_s_h == r.k_i_h);
  CHECK(r.k_s_v == r.k_i_v);
  CHECK(r.g_vh > r.g_hv);
  CHECK(r.g_vh - r.g_hv == Approx(2.0 * (r.k_s_h - r.k_s_v)).epsilon(1e-12));
}

TEST_CASE("required reciprocals at the design temperature reproduce the design", "[phasematch]") {
  const DispersionModel& model = testutil::ktp();
  const PolarizationMapping map{};

  const DesignSolution& deg = testutil::degenerate_design();
  const ReciprocalRequirement rd =
      required_reciprocals(model, map, 0.655, std::nullopt, deg.temperature_c);
  CHECK(rd.g_hv == Approx(deg.hv.g_rad_um).epsilon(1e-9));
  CHECK(rd.g_vh == Approx(deg.vh.g_rad_um).epsilon(1e-9));

  const DesignSolution& nd = testutil::nondegenerate_design();
  const ReciprocalRequirement rn =
      required_reciprocals(model, map, 0.532, 0.8073, nd.temperature_c);
  CHECK(rn.g_hv == Approx(nd.hv.g_rad_um).epsilon(1e-9));
  CHECK(rn.g_vh == Approx(nd.vh.g_rad_um).epsilon(1e-9));
}

TEST_CASE("period pair reconstructs both reciprocals exactly", "[phasematch]") {
  const auto [l1, l2] = periods_from_reciprocals(kDeg.g_hv, kDeg.g_vh, 3);
  CHECK(2.0 * kPi * (3.0 / l1 - 1.0 / l2) == Approx(kDeg.g_hv).epsilon(1e-12));
  CHECK(2.0 * kPi * (3.0 / l1 + 1.0 / l2) == Approx(kDeg.g_vh).epsilon(1e-12));
  CHECK(l2 / l1 == Approx(15.5).epsilon(1e-9));

  CHECK_THROWS_AS(periods_from_reciprocals(kDeg.g_hv, kDeg.g_vh, 0), ConfigError);
  CHECK_THROWS_AS(periods_from_reciprocals(kDeg.g_vh, kDeg.g_hv, 3), ConfigError);
  CHECK_THROWS_AS(periods_from_reciprocals(-1.0, 2.0, 3), ConfigError);
  // Nearly equal reciprocals push the long period past the fabrication cap.
  CHECK_THROWS_AS(periods_from_reciprocals(10.0, 10.0 + 1e-9, 3), NoSolutionError);
}

TEST_CASE("target validation rejects inconsistent order pairs and ranges", "[phasematch]") {
  const auto bad = [](auto&& mutate) {
    DesignTargets t;
    t.pump_um = 0.655;
    mutate(t);
    return t;
  };

  CHECK_NOTHROW(bad([](DesignTargets&) {}).validate());
  CHECK_THROWS_AS(bad([](DesignTargets& t) { t.pump_um = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DesignTargets& t) { t.signal_um = 0.4; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DesignTargets& t) { t.order_hv = {3, 0}; }).validate(), ConfigError);
  // |m1 n1| must equal |m2 n2| or the shared short period cannot serve both.
  CHECK_THROWS_AS(bad([](DesignTargets& t) {
                    t.order_hv = {3, 1};
                    t.order_vh = {1, 2};
                  }).validate(),
                  ConfigError);
  // Collinear orders leave the two periods underdetermined.
  CHECK_THROWS_AS(bad([](DesignTargets& t) {
                    t.order_hv = {3, 1};
                    t.order_vh = {6, 2};
                  }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(bad([](DesignTargets& t) { t.t_min_c = t.t_max_c; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DesignTargets& t) { t.l_min = 2; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DesignTargets& t) { t.l_max = t.l_min - 1; }).validate(), ConfigError);
}

TEST_CASE("degenerate design matches frozen solver output", "[phasematch]") {
  const DesignSolution& sol = testutil::degenerate_design();
  check_against_frozen(sol, testutil::degenerate_targets(), kDeg);
  CHECK(sol.signal_um == 2.0 * 0.655);
  CHECK(sol.idler_um == sol.signal_um);
}

TEST_CASE("nondegenerate design matches frozen solver output", "[phasematch]") {
  const DesignSolution& sol = testutil::nondegenerate_design();
  check_against_frozen(sol, testutil::nondegenerate_targets(), kNd);
  CHECK(sol.signal_um == 0.8073);
}

TEST_CASE("design search fails cleanly when no constraint integer fits", "[phasematch]") {
  DesignTargets t = testutil::degenerate_targets();
  t.l_min = 33;
  t.l_max = 40;
  CHECK_THROWS_AS(design_source(testutil::ktp(), PolarizationMapping{}, t), NoSolutionError);
}

TEST_CASE("temperature tuning pivots about the design point", "[phasematch]") {
  const DispersionModel& model = testutil::ktp();
  const PolarizationMapping map{};
  const DesignSolution& sol = testutil::degenerate_design();

  const double t0 = sol.temperature_c;
  const std::vector<double> ts{t0 - 2.0, t0 - 1.0, t0, t0 + 1.0, t0 + 2.0};
  const TuningCurve curve = tuning_curve(model, map, sol, ts);
  REQUIRE(curve.hv.size() == ts.size());
  REQUIRE(curve.vh.size() == ts.size());

  std::vector<double> split;  // signal - idler along the hv branch
  for (std::size_t i = 0; i < ts.size(); ++i) {
    REQUIRE(curve.hv[i].signal_um.has_value());
    REQUIRE(curve.vh[i].signal_um.has_value());
    const double ls = *curve.hv[i].signal_um;
    const double li = *curve.hv[i].idler_um;
    CHECK(1.0 / sol.pump_um == Approx(1.0 / ls + 1.0 / li).epsilon(1e-12));
    split.push_back(ls - li);
  }

  // At the design temperature the branch passes through the degenerate point.
  CHECK(*curve.hv[2].signal_um == Approx(1.31).margin(1e-6));
  CHECK(std::abs(split[2]) < 1e-5);
  // Away from it the pair splits, with opposite signs on the two sides.
  CHECK(std::abs(split[0]) > 1e-5);
  CHECK(std::abs(split[4]) > 1e-5);
  CHECK(split[0] * split[4] < 0.0);
  // The branch moves smoothly: one degree shifts the wavelength only slightly.
  for (std::size_t i = 1; i < ts.size(); ++i)
    CHECK(std::abs(*curve.hv[i].signal_um - *curve.hv[i - 1].signal_um) < 1e-4);
}

TEST_CASE("tuning solve reports a gap when the search window excludes the root",
          "[phasematch]") {
  const DispersionModel& model = testutil::ktp();
  const PolarizationMapping map{};
  const DesignSolution& sol = testutil::degenerate_design();

  const double t_off = sol.temperature_c - 2.0;
  const auto wide = solve_signal_at_temperature(model, map, sol, ProcessId::hv, t_off);
  REQUIRE(wide.has_value());
  CHECK(std::abs(*wide - 1.31) > 1e-6);

  // A window far narrower than the root displacement finds nothing.
  const auto narrow =
      solve_signal_at_temperature(model, map, sol, ProcessId::hv, t_off, 1e-6);
  CHECK_FALSE(narrow.has_value());
}

TEST_CASE("bracketing root finder converges and rejects bad brackets", "[phasematch]") {
  const auto f = [](double x) { return x * x - 2.0; };
  CHECK(brent(f, 0.0, 2.0) == Approx(std::sqrt(2.0)).margin(1e-9));
  // An exact zero at an endpoint is returned as-is.
  const auto g = [](double x) { return x * x - 4.0; };
  CHECK(brent(g, 2.0, 3.0) == 2.0);
  CHECK_THROWS_AS(brent(f, 2.0, 3.0), NumericalError);

  const RootOptions tight{1e-15, 1e-15, 300};
  const auto brackets =
      scan_brackets([](double x) { return std::sin(x); }, 0.1, 9.5, 200);
  REQUIRE(brackets.size() == 3);
  for (std::size_t i = 0; i < brackets.size(); ++i) {
    const double root = brent([](double x) { return std::sin(x); }, brackets[i].first,
                              brackets[i].second, tight);
    CHECK(root == Approx((i + 1) * kPi).epsilon(1e-12));
  }
}

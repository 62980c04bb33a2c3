#include <gtest/gtest.h>

#include <numbers>

#include "test_support.hpp"

using namespace gridspec;
using namespace gridspec::testing;

TEST(ControllerKind, StringsRoundTrip) {
  for (auto k : {ControllerKind::DroopOnly, ControllerKind::Proportional, ControllerKind::ProportionalDerivative})
    EXPECT_EQ(parse_controller_kind(to_string(k)), k);
  EXPECT_EQ(parse_controller_kind("pd"), ControllerKind::ProportionalDerivative);
  EXPECT_THROW(parse_controller_kind("pid"), Error);
}

TEST(EffectiveNetwork, ProportionalDoublesGamma) {
  const auto net = make_network({{1, 0.4}, {2, 0.8}, {3, 1.2}}, {{1, 2, 1}, {2, 3, 2}});
  ControllerSpec c;
  c.kind = ControllerKind::Proportional;
  c.kp = net.damping();
  const auto eff = effective_network(net, c);
  EXPECT_DOUBLE_EQ(uniform_gamma(eff), 2.0 * uniform_gamma(net));
  EXPECT_EQ(eff.inertia(), net.inertia());
}

TEST(EffectiveNetwork, PdKeepsGammaAndHalvesSpectrum) {
  std::mt19937_64 rng(91);
  const auto net = random_network(rng, {.n_min = 6, .n_max = 6, .gamma = 0.7});
  ControllerSpec c;
  c.kind = ControllerKind::ProportionalDerivative;
  c.kp = net.damping();
  c.kd = net.inertia();
  const auto eff = effective_network(net, c);
  EXPECT_NEAR(uniform_gamma(eff), 0.7, 1e-12);
  const auto before = analyze_spectrum(net), after = analyze_spectrum(eff);
  EXPECT_LT((after.eigenvalues - 0.5 * before.eigenvalues).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(EffectiveNetwork, ZeroGainsAreIdentity) {
  const auto net = path3();
  ControllerSpec c;
  c.kind = ControllerKind::ProportionalDerivative;
  c.kp = Eigen::VectorXd::Zero(3);
  c.kd = Eigen::VectorXd::Zero(3);
  const auto eff = effective_network(net, c);
  EXPECT_EQ(eff.inertia(), net.inertia());
  EXPECT_EQ(eff.damping(), net.damping());
  EXPECT_EQ(eff.susceptance(), net.susceptance());
  EXPECT_EQ(effective_network(net, droop_only()).damping(), net.damping());
}

TEST(GainsProportionalToDamping, Examples) {
  const auto unit = path3();
  const auto p = gains_proportional_to_damping(unit, 1.0, 0.0);
  EXPECT_EQ(p.kind, ControllerKind::Proportional);
  EXPECT_EQ(p.kp, Eigen::VectorXd::Ones(3));
  EXPECT_EQ(p.kd.size(), 0);

  const auto mixed = make_network({{1, 1}, {2, 2}}, {{1, 2, 1}});
  EXPECT_EQ(gains_proportional_to_damping(mixed, 0.5, 0.0).kp, Eigen::Vector2d(0.5, 1.0));

  const auto pd = gains_proportional_to_damping(mixed, 1.0, 0.25);
  EXPECT_EQ(pd.kind, ControllerKind::ProportionalDerivative);
  EXPECT_EQ(pd.kd, Eigen::Vector2d(0.25, 0.5));
  EXPECT_EQ(gains_proportional_to_damping(mixed, 0.0, 0.0).kind, ControllerKind::DroopOnly);
  EXPECT_THROW(gains_proportional_to_damping(mixed, -1.0, 0.0), Error);
}

TEST(ControllerSpec, Validation) {
  ControllerSpec c;
  c.kind = ControllerKind::Proportional;
  c.kp = Eigen::VectorXd::Ones(2);
  EXPECT_NO_THROW(c.validate(2));
  try {
    c.validate(3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  c.kd = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(c.validate(2), Error);  // kd only for PD
  c.kd.resize(0);
  c.kp[0] = -0.1;
  EXPECT_THROW(c.validate(2), Error);
  c.kp[0] = 0.1;
  c.derivative_filter_tc = -1.0;
  EXPECT_THROW(c.validate(2), Error);
}

TEST(WithoutDroop, UnratedNetworkLosesAllDamping) {
  const auto net = make_network({{1, 0.5}, {2, 1.0}}, {{1, 2, 3}});
  const auto bare = without_droop(net);
  EXPECT_EQ(bare.damping(), Eigen::VectorXd::Zero(2));
  EXPECT_EQ(bare.inertia(), net.inertia());
  EXPECT_EQ(bare.susceptance(), net.susceptance());
}

TEST(WithoutDroop, LoadBusDampingStays) {
  const auto net = build_network({{1, 0.2, 1.0, 1.0}, {2, 0.05, 0.25, std::nullopt}, {3, 0.1, 0.5, 0.5}},
                                 {{1, 2, 1.0}, {2, 3, 1.0}});
  EXPECT_EQ(without_droop(net).damping(), Eigen::Vector3d(0.0, 0.25, 0.0));
}

// The feedback law applied explicitly in the simulator against the closed
// form of the absorbed network.
TEST(Absorption, ClosedFormMatchesExplicitFeedback) {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 6; ++trial) {
    const auto net = random_network(rng, {.n_min = 3, .n_max = 6, .gamma = 0.6});
    const double kp_scale = 0.5 + 0.25 * trial, kd_scale = trial % 2 ? 0.3 : 0.0;
    const auto ctrl = gains_proportional_to_damping(net, kp_scale, kd_scale);
    const auto s = random_vector(rng, net.n());
    SimOptions opts;
    opts.derivative = DerivativeMode::Ideal;
    const auto sim = simulate(net, ctrl, {StepInput{s}}, 10.0, 1e-3, opts);
    const auto closed = step_response(modal_response(effective_network(net, ctrl), s), sim.times);
    EXPECT_LE(sup_diff(sim.omega, closed.omega), 1e-4) << "trial " << trial;
  }
}

TEST(Absorption, LoadSideOnlyMatchesDroop) {
  // droop D versus no droop plus K_p = D: identical physics
  std::mt19937_64 rng(99);
  const auto net = random_network(rng, {.n_min = 5, .n_max = 5, .gamma = 0.8});
  const auto s = random_vector(rng, 5);
  ControllerSpec p;
  p.kind = ControllerKind::Proportional;
  p.kp = net.damping();
  const auto a = simulate(net, droop_only(), {StepInput{s}}, 5.0, 1e-3);
  const auto b = simulate(without_droop(net), p, {StepInput{s}}, 5.0, 1e-3);
  EXPECT_LE(sup_diff(a.omega, b.omega), 1e-12);
}

namespace {

// γ' = γ(1 + κ) for K_p = κD; the grid stops before any mode of the
// effective network reaches critical damping.
std::vector<double> underdamped_kappa_grid(double gamma, double lambda2, double step) {
  std::vector<double> grid;
  for (double k = 0.0;; k += step) {
    const double g = gamma * (1.0 + k);
    if (g * g > 0.9 * 4.0 * lambda2) break;
    grid.push_back(k);
  }
  return grid;
}

}  // namespace

TEST(ProportionalGain, NadirNonIncreasingOverKappa) {
  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 4; ++trial) {
    const auto net = random_network(rng, {.n_min = 4, .n_max = 6, .gamma = 0.3});
    const auto n = net.n();
    std::vector<double> prev(n, std::numeric_limits<double>::infinity());
    for (double k = 0.0; k <= 6.0; k += 0.25) {
      const auto eff = effective_network(net, gains_proportional_to_damping(net, k, 0.0));
      const auto mr = modal_response(eff, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
      for (std::size_t i = 1; i < n; ++i) {
        const auto m = numeric_mode_metrics(mr, i);
        EXPECT_LE(m.nadir_numeric, prev[i] * (1 + 1e-12)) << "kappa " << k << " mode " << i;
        prev[i] = m.nadir_numeric;
      }
    }
  }
}

// Numeric settling time falls with κ as a trend. Between neighbouring grid
// points it can rise when a decaying lobe peak crosses the band, by at most
// the spacing between extrema 2π/√Δ'.
TEST(ProportionalGain, SettlingTrendsDownWhileUnderdamped) {
  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 4; ++trial) {
    const auto net = random_network(rng, {.n_min = 4, .n_max = 6, .gamma = 0.3});
    const auto sd = analyze_spectrum(net);
    const auto grid = underdamped_kappa_grid(0.3, sd.eigenvalues[1], 0.25);
    ASSERT_GE(grid.size(), 5u);
    for (std::size_t i = 1; i < sd.n(); ++i) {
      const double lambda = sd.eigenvalues[static_cast<Eigen::Index>(i)];
      double prev = std::numeric_limits<double>::infinity();
      for (double k : grid) {
        const double g = 0.3 * (1.0 + k);
        const double st = unit_mode_settling(g, lambda, kDefaultBand);
        const double lobe = 2.0 * std::numbers::pi / std::sqrt(4.0 * lambda - g * g);
        EXPECT_LE(st, prev + lobe) << "kappa " << k << " mode " << i;
        prev = st;
      }
      const double g_last = 0.3 * (1.0 + grid.back());
      EXPECT_LT(unit_mode_settling(g_last, lambda, kDefaultBand), unit_mode_settling(0.3, lambda, kDefaultBand));
    }
  }
}

TEST(ProportionalGain, SettlingIsNotPointwiseMonotone) {
  // λ = 0.5, γ' from 0.5 upward: a lobe jump makes a larger gain settle later
  bool found = false;
  double prev = unit_mode_settling(0.5, 0.5, kDefaultBand);
  for (double g = 0.51; g < 1.3 && !found; g += 0.01) {
    const double st = unit_mode_settling(g, 0.5, kDefaultBand);
    found = st > prev + 1e-6;
    prev = st;
  }
  EXPECT_TRUE(found);
}

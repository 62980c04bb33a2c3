#include <gtest/gtest.h>

#include <numbers>

#include "test_support.hpp"

using namespace gridspec;
using namespace gridspec::testing;

TEST(UnitModeResponse, OverdampedWorkedPoint) {
  // γ = 3, λ = 2: ω̂ = e^{−t} − e^{−2t}
  for (double t : {0.1, 0.5, 1.0, 3.0, 10.0})
    EXPECT_NEAR(unit_mode_response(3.0, 2.0, t), std::exp(-t) - std::exp(-2.0 * t), 1e-15);
  EXPECT_NEAR(unit_mode_response(3.0, 2.0, std::log(2.0)), 0.25, 1e-15);
}

TEST(UnitModeResponse, UnderdampedWorkedPoint) {
  // γ = 2, λ = 2: ω̂ = e^{−t} sin t
  for (double t : {0.1, 0.5, 1.0, 3.0, 10.0})
    EXPECT_NEAR(unit_mode_response(2.0, 2.0, t), std::exp(-t) * std::sin(t), 1e-15);
  EXPECT_NEAR(unit_mode_response(2.0, 2.0, std::numbers::pi / 2.0), 0.20787957635076193, 1e-14);
}

TEST(UnitModeResponse, ZeroAtOriginAndUnitSlope) {
  const double h = 1e-6;
  for (auto [g, l] : {std::pair{3.0, 2.0}, {2.0, 2.0}, {1.0, 0.25}, {0.2, 7.0}, {5.0, 0.0}, {0.0, 1.0}}) {
    EXPECT_EQ(unit_mode_response(g, l, 0.0), 0.0);
    EXPECT_NEAR(unit_mode_response_complex(g, l, 0.0), 0.0, 1e-15);
    // central difference; both forms are analytic through t = 0
    EXPECT_NEAR((unit_mode_response(g, l, h) - unit_mode_response(g, l, -h)) / (2 * h), 1.0, 1e-6);
    EXPECT_NEAR((unit_mode_response_complex(g, l, h) - unit_mode_response_complex(g, l, -h)) / (2 * h), 1.0, 1e-6);
    EXPECT_NEAR(unit_mode_rate(g, l, 0.0), 1.0, 1e-15);
  }
}

TEST(UnitModeResponse, ComplexFormMatchesRealForms) {
  for (double g : {0.0, 0.2, 1.0, 3.0, 5.0})
    for (double l : {0.0, 0.01, 0.5, 2.0, 9.0, 40.0}) {
      if (is_critically_damped(g, l)) continue;
      for (double t = 0.0; t <= 20.0; t += 0.37)
        EXPECT_NEAR(unit_mode_response_complex(g, l, t), unit_mode_response(g, l, t), 1e-12)
            << "g=" << g << " l=" << l << " t=" << t;
    }
}

TEST(UnitModeResponse, CriticalLimitIsContinuous) {
  const double g = 2.0, l = 1.0;  // γ² = 4λ
  EXPECT_EQ(classify_regime(g, l), Regime::Critical);
  for (double t : {0.3, 1.0, 4.0}) {
    EXPECT_NEAR(unit_mode_response(g, l, t), t * std::exp(-t), 1e-15);
    EXPECT_NEAR(unit_mode_response(g, l * (1 + 1e-6), t), t * std::exp(-t), 1e-6);
    EXPECT_NEAR(unit_mode_response(g, l * (1 - 1e-6), t), t * std::exp(-t), 1e-6);
  }
}

TEST(ModalResponse, RootIdentities) {
  std::mt19937_64 rng(41);
  const auto net = random_network(rng, {.n_min = 8, .n_max = 8, .gamma = 1.3});
  const auto mr = modal_response(net, random_vector(rng, 8));
  for (const auto& rec : mr.modes) {
    EXPECT_NEAR(std::abs(rec.phi_plus + rec.phi_minus + mr.gamma), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(rec.phi_plus * rec.phi_minus - rec.lambda), 0.0, 1e-10 * std::max(1.0, rec.lambda));
    EXPECT_NEAR(rec.delta, std::abs(mr.gamma * mr.gamma - 4 * rec.lambda), 1e-12);
    const Regime expected = mr.gamma * mr.gamma > 4 * rec.lambda ? Regime::Overdamped : Regime::Underdamped;
    EXPECT_EQ(rec.regime, expected);
  }
  EXPECT_EQ(mr.modes[0].lambda, 0.0);
}

TEST(ModalResponse, ZeroInputGivesZero) {
  const auto mr = modal_response(path3(), Eigen::VectorXd::Zero(3));
  for (double t : {0.0, 0.5, 5.0}) EXPECT_EQ(omega_at(mr, t), Eigen::VectorXd::Zero(3));
}

TEST(ModalResponse, SingleBus) {
  const auto net = build_network({{1, 2.0, 3.0, {}}}, {});
  const auto mr = modal_response(net, Eigen::VectorXd::Constant(1, 0.6));
  for (double t : {0.0, 0.2, 1.0, 6.0})
    EXPECT_NEAR(omega_at(mr, t)[0], 0.6 / 3.0 * (1.0 - std::exp(-1.5 * t)), 1e-15);
}

// Frozen from a matrix-exponential evaluation of x(t) = ∫ e^{A(t−τ)} B s dτ.
TEST(ModalResponse, TwoBusFrozenValues) {
  const auto mr = modal_response(two_bus(), Eigen::Vector2d(1.0, 0.0));
  const std::vector<std::tuple<double, double, double>> frozen{
      {0.5, 0.3775453182003841, 0.015924022086982487},
      {1.0, 0.5382980374809574, 0.09382252134760015},
      {2.0, 0.49848622447363505, 0.36617849228975186},
      {5.0, 0.5067195384692784, 0.4865425145316358}};
  for (auto [t, w1, w2] : frozen) {
    const auto w = omega_at(mr, t);
    EXPECT_NEAR(w[0], w1, 1e-13);
    EXPECT_NEAR(w[1], w2, 1e-13);
  }
}

TEST(ModalResponse, OmegaHatIndexChecked) {
  const auto mr = modal_response(path3(), Eigen::Vector3d(1, 0, 0));
  try {
    omega_hat(mr, 3, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
}

TEST(ModalResponse, NonUniformRatioRejected) {
  const auto net = make_network({{1, 1}, {1, 2}}, {{1, 2, 1}});
  EXPECT_THROW(modal_response(net, Eigen::Vector2d(1, 0)), Error);
}

TEST(StepResponse, StartsAtZeroAndConvergesToSteadyState) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const double gamma = std::vector<double>{0.2, 1.0, 5.0}[static_cast<std::size_t>(trial % 3)];
    const auto net = random_network(rng, {.gamma = gamma});
    const auto sd = analyze_spectrum(net);
    const auto s = random_vector(rng, net.n());
    const auto mr = modal_response(sd, gamma, s);
    // slowest non-constant decay rate: γ/2 for oscillatory modes, |φ₊| for overdamped ones
    double rate = gamma;
    for (std::size_t i = 1; i < mr.n(); ++i) rate = std::min(rate, -mr.modes[i].phi_plus.real());
    const double t_far = 40.0 / rate;
    const std::vector<double> times{0.0, t_far};
    const auto traj = step_response(mr, times);
    EXPECT_EQ(traj.omega.row(0).cwiseAbs().maxCoeff(), 0.0);
    const auto ss = steady_state(sd, gamma, s);
    EXPECT_LE((traj.omega.row(1).transpose() - ss.omega).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, s.norm()));
  }
}

TEST(StepResponse, BalancedInputDecaysToZero) {
  const auto mr = modal_response(path3(), Eigen::Vector3d(1.0, -0.5, -0.5));
  const std::vector<double> times{60.0, 80.0};
  EXPECT_LT(step_response(mr, times).omega.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(StepResponse, RejectsDescendingGrid) {
  const auto mr = modal_response(path3(), Eigen::Vector3d(1.0, 0, 0));
  const std::vector<double> bad{1.0, 0.5};
  EXPECT_THROW(step_response(mr, bad), Error);
}

TEST(StepResponse, MatchesRk4OracleOnRandomFiveBus) {
  std::mt19937_64 rng(47);
  const auto net = random_network(rng, {.n_min = 5, .n_max = 5, .gamma = 1.0});
  const auto s = random_vector(rng, 5);
  const auto sim = simulate(net, droop_only(), {StepInput{s}}, 10.0, 1e-3);
  const auto closed = step_response(modal_response(net, s), sim.times);
  EXPECT_LE(sup_diff(sim.omega, closed.omega), 1e-4);
}

// The total ω(t) does not depend on the basis chosen inside a repeated eigenspace.
TEST(StepResponse, RepeatedEigenvalueBasisIndependence) {
  const auto net = triangle();
  auto sd = analyze_spectrum(net);
  const Eigen::Vector3d s(0.7, -0.2, 0.4);
  const auto before = modal_response(sd, 1.0, s);
  const double th = 0.731;
  const Eigen::VectorXd a = sd.eigenvectors.col(1), b = sd.eigenvectors.col(2);
  sd.eigenvectors.col(1) = std::cos(th) * a + std::sin(th) * b;
  sd.eigenvectors.col(2) = -std::sin(th) * a + std::cos(th) * b;
  const auto after = modal_response(sd, 1.0, s);
  EXPECT_GT(std::abs(before.modes[1].s_hat - after.modes[1].s_hat), 1e-3);  // terms differ
  for (double t : {0.1, 1.0, 3.0, 7.5}) EXPECT_LT((omega_at(before, t) - omega_at(after, t)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SteadyState, Examples) {
  const auto sd = analyze_spectrum(two_bus());
  const auto a = steady_state(sd, 1.0, Eigen::Vector2d(1.0, 0.0));
  EXPECT_NEAR(a.omega_c, 0.5, 1e-15);
  EXPECT_LT((a.omega - Eigen::Vector2d::Constant(0.5)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(steady_state(sd, 1.0, Eigen::Vector2d(1.0, -1.0)).omega_c, 0.0, 1e-15);
  EXPECT_NEAR(steady_state(sd, 1.0, Eigen::Vector2d(3.0, 0.0)).omega_c, 1.5, 1e-15);
}

TEST(SteadyState, SynchronizedAndEqualToRatio) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const double gamma = 0.5 + trial * 0.2;
    const auto net = random_network(rng, {.n_min = 2, .n_max = 15, .gamma = gamma});
    const auto sd = analyze_spectrum(net);
    const auto s = random_vector(rng, net.n());
    const auto ss = steady_state(sd, gamma, s);
    EXPECT_LE(ss.omega.maxCoeff() - ss.omega.minCoeff(), 1e-10);
    EXPECT_NEAR(ss.omega.mean(), ss.omega_c, 1e-10);
    EXPECT_NEAR(ss.omega_c, s.sum() / net.damping().sum(), 1e-12);
  }
}

TEST(SteadyState, ZeroDampingRejected) {
  try {
    steady_state(analyze_spectrum(two_bus(1.0, 0.0)), 0.0, Eigen::Vector2d(1, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDamping);
  }
}

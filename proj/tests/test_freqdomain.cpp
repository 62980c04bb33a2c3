#include <gtest/gtest.h>

#include <numbers>

#include "test_support.hpp"

using namespace gridspec;
using namespace gridspec::testing;

TEST(SpectralTf, Examples) {
  EXPECT_EQ(spectral_tf(1.0, 2.0, 0.0), Complex(0.0));
  EXPECT_NEAR(std::abs(spectral_tf(0.7, 0.0, 1e-12) - 1.0 / 0.7), 0.0, 1e-11);
  EXPECT_NEAR(std::abs(spectral_tf(0.7, 0.0, 0.0) - 1.0 / 0.7), 0.0, 1e-15);
  const Complex h = spectral_tf(1.0, 2.0, Complex(0.0, 1.0));
  EXPECT_NEAR(h.real(), 0.5, 1e-15);
  EXPECT_NEAR(h.imag(), 0.5, 1e-15);
}

TEST(SpectralTf, PoleRejected) {
  const auto [plus, minus] = characteristic_roots(1.0, 2.0);
  for (Complex pole : {plus, minus}) {
    try {
      spectral_tf(1.0, 2.0, pole);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::PoleEvaluation);
    }
  }
  EXPECT_THROW(spectral_tf(2.0, 0.0, Complex(-2.0)), Error);
}

TEST(SpectralTf, RecomputableFromDefinition) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.0, 5.0);
  for (int k = 0; k < 200; ++k) {
    const double g = pos(rng), l = pos(rng) + 0.01;
    const Complex tau(u(rng), u(rng));
    const Complex direct = tau / (tau * tau + g * tau + l);
    EXPECT_LE(std::abs(spectral_tf(g, l, tau) - direct), 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST(BusGain, SubstitutionExamples) {
  EXPECT_TRUE(std::isinf(bus_gain(1.0, 0.0, 1.0, 1.0)));
  EXPECT_DOUBLE_EQ(bus_gain(1.0, 1.0, 1.0, 1.0), 1.0);
  EXPECT_EQ(bus_gain(2.0, 1.0, 3.0, 0.0), 0.0);
  EXPECT_GE(bus_gain(2.0, 1.0, 3.0, -1.5), 0.0);
}

TEST(BusGain, ConsistencyWithTransferFunction) {
  for (double m : {0.3, 1.0, 4.0})
    for (double g : {0.1, 1.0, 3.0})
      for (double l : {0.2, 2.0, 15.0})
        for (double s : {0.01, 0.3, 1.0, 7.0, 300.0})
          EXPECT_NEAR(std::abs(spectral_tf(g, l, Complex(0.0, s))), m * bus_gain(m, g * m, l * m, s), 1e-10);
}

TEST(BusGain, HighAndLowFrequencyAsymptotes) {
  for (double m : {0.5, 1.0, 3.0})
    for (double d : {0.1, 1.0, 5.0})
      for (double lbar : {0.05, 1.0, 20.0}) {
        const double sstar = std::sqrt(lbar / m);
        const double hi = 100.0 * std::max(d / m, sstar);
        for (double s : {hi, 3 * hi}) EXPECT_NEAR(bus_gain(m, d, lbar, s) * s * m, 1.0, 0.01);
        const double lo = 0.01 * sstar * std::min(1.0, lbar / (d * sstar));
        for (double s : {lo, lo / 3}) EXPECT_NEAR(bus_gain(m, d, lbar, s) / s * lbar, 1.0, 0.01);
      }
}

TEST(BusGain, NonIncreasingInDamping) {
  for (double m : {0.5, 2.0})
    for (double lbar : {0.3, 4.0}) {
      const auto sigmas = log_grid(1e-2, 1e2, 50);
      for (double s : sigmas) {
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 100; ++k) {
          const double d = 0.05 * k;
          const double g = bus_gain(m, d, lbar, s);
          EXPECT_LE(g, prev * (1 + 1e-14));
          prev = g;
        }
      }
    }
}

TEST(IntrinsicFrequency, Examples) {
  EXPECT_DOUBLE_EQ(intrinsic_frequency(1.0, 4.0), 2.0);
  EXPECT_DOUBLE_EQ(intrinsic_frequency(4.0, 1.0), 0.5);
  try {
    intrinsic_frequency(1.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroEigenvalue);
  }
}

TEST(IntrinsicFrequency, GridAndGoldenSectionArgmax) {
  for (double m : {0.2, 1.0, 5.0})
    for (double lbar : {0.1, 2.0, 30.0}) {
      const double d = 0.2 * m;  // γ = 0.2
      const double sstar = intrinsic_frequency(m, lbar);
      const auto grid = log_grid(1e-3, 1e3);
      std::size_t best = 0;
      for (std::size_t k = 0; k < grid.size(); ++k)
        if (bus_gain(m, d, lbar, grid[k]) > bus_gain(m, d, lbar, grid[best])) best = k;
      EXPECT_NEAR(grid[best] / sstar, 1.0, 0.005);
      const double refined = detail::golden_section_max([&](double s) { return bus_gain(m, d, lbar, s); },
                                                        grid[best - 1], grid[best + 1]);
      EXPECT_NEAR(refined / sstar, 1.0, 1e-6);
    }
}

TEST(IntrinsicFrequency, TradeoffInTopologicalEigenvalue) {
  const double m = 1.0, d = 0.5, s = 1e-3;
  double prev_gain = std::numeric_limits<double>::infinity(), prev_star = 0.0;
  for (double lbar = 0.5; lbar < 20.0; lbar *= 1.5) {
    EXPECT_LT(bus_gain(m, d, lbar, s), prev_gain);
    EXPECT_GT(intrinsic_frequency(m, lbar), prev_star);
    prev_gain = bus_gain(m, d, lbar, s);
    prev_star = intrinsic_frequency(m, lbar);
  }
}

TEST(LogGrid, Shape) {
  const auto g = log_grid(1e-3, 1e3);
  EXPECT_EQ(g.size(), 2401u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-3);
  EXPECT_NEAR(g.back(), 1e3, 1e-9);
  EXPECT_THROW(log_grid(0.0, 1.0), Error);
  EXPECT_THROW(log_grid(2.0, 1.0), Error);
}

TEST(GainCurve, ZeroAtOriginAndPeakMarker) {
  const auto net = make_network({{1, 0.2}, {2, 0.4}, {0.5, 0.1}}, {{1, 2, 1.5}, {2, 3, 0.7}});
  const auto sd = analyze_spectrum(net);
  std::vector<double> sigmas{0.0, 0.1, 1.0, 10.0};
  for (std::size_t i = 1; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const auto c = gain_curve(sd, i, j, sigmas);
      EXPECT_EQ(c.gain[0], 0.0);
      ASSERT_TRUE(c.sigma_star.has_value());
      EXPECT_NEAR(*c.sigma_star, std::sqrt(c.lambda_bar / net.buses()[j].inertia), 1e-15);
      for (double g : c.gain) EXPECT_GE(g, 0.0);
    }
  EXPECT_FALSE(gain_curve(sd, 0, 0, sigmas).sigma_star.has_value());
  EXPECT_THROW(gain_curve(sd, 3, 0, sigmas), Error);
}

TEST(GainCurve, HigherDampingLowersEverySample) {
  const auto sd = analyze_spectrum(path3());
  const auto grid = log_grid(1e-2, 1e2, 40);
  const auto base = gain_curve(sd, 1, 0, grid);
  const auto damped = gain_curve(sd, 1, 0, grid, 3.0);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_LT(damped.gain[k], base.gain[k]);
}

TEST(LambdaBar, SpreadReportedForHeterogeneousInertia) {
  const auto uniform = analyze_spectrum(path3());
  EXPECT_EQ(lambda_bar_spread(uniform, 1), 0.0);
  const auto mixed = analyze_spectrum(make_network({{1, 1}, {2, 2}, {4, 4}}, {{1, 2, 1}, {2, 3, 1}}));
  EXPECT_GT(lambda_bar_spread(mixed, 1), 1e-6);
}

TEST(Synthesize, ExponentialInputPassesThroughTransferFunction) {
  const auto net = make_network({{1, 0.5}, {2, 1.0}, {0.5, 0.25}}, {{1, 2, 1.5}, {2, 3, 0.7}, {1, 3, 0.4}});
  const auto sd = analyze_spectrum(net);
  const double gamma = 0.5, sigma = 1.3;
  const std::vector<ExponentialComponent> in{{2, Complex(1.0), Complex(0.0, sigma)}};
  const std::vector<double> times{0.0, 0.4, 2.0};
  const auto out = synthesize_response(sd, gamma, in, times);
  const Complex h = spectral_tf(gamma, sd.eigenvalues[2], Complex(0.0, sigma));
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Eigen::VectorXcd expected =
        h * std::exp(Complex(0.0, sigma * times[k])) * sd.scaled_mode_shape(2).cast<Complex>();
    EXPECT_LT((out.row(static_cast<Eigen::Index>(k)).transpose() - expected).cwiseAbs().maxCoeff(), 1e-14);
  }
  const std::vector<ExponentialComponent> zero{{1, Complex(0.0), Complex(0.0, sigma)}};
  EXPECT_EQ(synthesize_response(sd, gamma, zero, times).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Synthesize, SinusoidIsRealAndMatchesAmplitudeFormula) {
  const auto sd = analyze_spectrum(two_bus());
  const double sigma = 0.9, a = 0.3;
  const auto comps = sinusoid_components(1, a, sigma);
  std::vector<double> times;
  for (int k = 0; k < 2000; ++k) times.push_back(k * 2 * std::numbers::pi / sigma / 2000);
  const auto out = synthesize_response(sd, 1.0, comps, times);
  EXPECT_LT(out.imag().cwiseAbs().maxCoeff(), 1e-14);
  for (Eigen::Index j = 0; j < 2; ++j)
    EXPECT_NEAR(out.real().col(j).cwiseAbs().maxCoeff(),
                sinusoid_amplitude(sd, 1.0, 1, static_cast<std::size_t>(j), a, sigma), 1e-5);
}

TEST(Synthesize, SimulatedSinusoidAmplitudeWithinOnePercent) {
  const auto net = two_bus();
  const auto sd = analyze_spectrum(net);
  const double sigma = std::sqrt(2.0), a = 1.0;
  SimOptions opts;
  opts.dt = 1e-3;
  opts.t_end = 40.0;
  const auto traj = simulate(net, droop_only(), {SpectralSinusoidInput{1, a, sigma}},
                             Eigen::VectorXd::Zero(3), opts);
  const double period = 2 * std::numbers::pi / sigma;
  for (Eigen::Index j = 0; j < 2; ++j) {
    double peak = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k)
      if (traj.times[k] >= opts.t_end - period) peak = std::max(peak, std::abs(traj.omega(static_cast<Eigen::Index>(k), j)));
    const double expected = sinusoid_amplitude(sd, 1.0, 1, static_cast<std::size_t>(j), a, sigma);
    EXPECT_NEAR(peak / expected, 1.0, 0.01);
  }
}

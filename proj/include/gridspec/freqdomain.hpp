#pragma once

// Spectral transfer functions H_i(tau) = tau / (tau^2 + gamma tau + lambda_i),
// per-bus gain curves, and the intrinsic frequency where a bus's gain for a
// mode peaks.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridspec/error.hpp"
#include "gridspec/modes.hpp"
#include "gridspec/spectral.hpp"

namespace gridspec {

inline Complex spectral_tf(double gamma, double lambda, Complex tau) {
  // With lambda = 0 the common factor tau cancels: H = 1 / (tau + gamma).
  const Complex den = lambda == 0.0 ? tau + gamma : tau * tau + gamma * tau + lambda;
  if (std::abs(den) < 1e-14)
    throw Error(ErrorCode::PoleEvaluation, "tau coincides with a pole of H");
  return lambda == 0.0 ? 1.0 / den : tau / den;
}

/// |σ| / sqrt(M² σ⁴ + (D² − 2 λ̄ M) σ² + λ̄²). Returns +inf exactly at a pole
/// of the undamped response.
inline double bus_gain(double inertia, double damping, double lambda_bar, double sigma) {
  const double s2 = sigma * sigma;
  const double den2 = inertia * inertia * s2 * s2 + (damping * damping - 2.0 * lambda_bar * inertia) * s2 +
                      lambda_bar * lambda_bar;
  if (den2 <= 0.0) return sigma == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(sigma) / std::sqrt(den2);
}

/// σ* = sqrt(λ̄ / M)
inline double intrinsic_frequency(double inertia, double lambda_bar) {
  if (!(lambda_bar > 0.0)) throw Error(ErrorCode::ZeroEigenvalue, "intrinsic frequency needs lambda_bar > 0");
  return std::sqrt(lambda_bar / inertia);
}

/// Logarithmic grid of `points_per_decade` points per decade over [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int points_per_decade = 400) {
  if (!(lo > 0.0) || !(hi > lo) || points_per_decade < 1)
    throw Error(ErrorCode::InvalidArgument, "log grid needs 0 < lo < hi");
  const double decades = std::log10(hi / lo);
  const auto count = static_cast<std::size_t>(std::ceil(decades * points_per_decade)) + 1;
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k)
    g[k] = lo * std::pow(10.0, decades * static_cast<double>(k) / static_cast<double>(count - 1));
  return g;
}

struct GainCurve {
  std::size_t mode = 0;  // 0-based Laplacian index
  std::size_t bus = 0;   // bus position in canonical order
  double lambda_bar = 0.0;
  std::optional<double> sigma_star;
  std::vector<double> sigma;
  std::vector<double> gain;
};

/// Gain curve of bus `bus` for mode `mode` with λ̄ = λ_i M_j.
inline GainCurve gain_curve(const SpectralData& sd, std::size_t mode, std::size_t bus,
                            std::span<const double> sigmas, std::optional<double> damping_override = {}) {
  if (mode >= sd.n() || bus >= sd.n()) throw Error(ErrorCode::IndexOutOfRange, "mode or bus index");
  const auto& b = sd.network.buses()[bus];
  GainCurve c;
  c.mode = mode;
  c.bus = bus;
  const double lambda = mode == 0 ? 0.0 : sd.eigenvalues[static_cast<Eigen::Index>(mode)];
  c.lambda_bar = lambda * b.inertia;
  if (c.lambda_bar > 0.0) c.sigma_star = intrinsic_frequency(b.inertia, c.lambda_bar);
  const double damping = damping_override.value_or(b.damping);
  c.sigma.assign(sigmas.begin(), sigmas.end());
  c.gain.reserve(sigmas.size());
  for (double s : sigmas) c.gain.push_back(bus_gain(b.inertia, damping, c.lambda_bar, s));
  return c;
}

/// Spread of λ_i M_j across buses relative to its mean; zero when the
/// topological eigenvalue is bus-independent.
inline double lambda_bar_spread(const SpectralData& sd, std::size_t mode) {
  const Eigen::VectorXd bars = sd.eigenvalues[static_cast<Eigen::Index>(mode)] * sd.network.inertia();
  const double mean = bars.mean();
  if (mean == 0.0) return 0.0;
  return (bars.array() - mean).abs().maxCoeff() / std::abs(mean);
}

/// One exponential component a e^{tau t} of ŝ_i(t).
struct ExponentialComponent {
  std::size_t mode = 0;
  Complex amplitude;
  Complex tau;
};

/// a sin(σ t) along M^{1/2} v_i as two exponentials.
inline std::vector<ExponentialComponent> sinusoid_components(std::size_t mode, double amplitude, double sigma) {
  const Complex j(0.0, 1.0);
  return {{mode, amplitude / (2.0 * j), j * sigma}, {mode, -amplitude / (2.0 * j), -j * sigma}};
}

/// Steady-state frequency response to Σ_k a_k e^{tau_k t} M^{1/2} v_{i_k}:
/// rows are times, columns buses; complex in general.
inline Eigen::MatrixXcd synthesize_response(const SpectralData& sd, double gamma,
                                            std::span<const ExponentialComponent> inputs,
                                            std::span<const double> times) {
  const auto n = static_cast<Eigen::Index>(sd.n());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(times.size()), n);
  for (const auto& in : inputs) {
    if (in.mode >= sd.n()) throw Error(ErrorCode::IndexOutOfRange, "mode " + std::to_string(in.mode));
    if (in.amplitude == 0.0) continue;
    const double lambda = in.mode == 0 ? 0.0 : sd.eigenvalues[static_cast<Eigen::Index>(in.mode)];
    const Complex h = spectral_tf(gamma, lambda, in.tau);
    const Eigen::VectorXcd shape = sd.scaled_mode_shape(in.mode).cast<Complex>();
    for (std::size_t k = 0; k < times.size(); ++k)
      out.row(static_cast<Eigen::Index>(k)) += (in.amplitude * h * std::exp(in.tau * times[k])) * shape.transpose();
  }
  return out;
}

/// Amplitude of the steady-state sinusoid at bus j for input a sin(σt) M^{1/2} v_i:
/// a |H_i(jσ)| |v_{i,j}| / sqrt(M_j).
inline double sinusoid_amplitude(const SpectralData& sd, double gamma, std::size_t mode, std::size_t bus,
                                 double amplitude, double sigma) {
  const double lambda = mode == 0 ? 0.0 : sd.eigenvalues[static_cast<Eigen::Index>(mode)];
  const double h = std::abs(spectral_tf(gamma, lambda, Complex(0.0, sigma)));
  const auto j = static_cast<Eigen::Index>(bus);
  return std::abs(amplitude) * h * std::abs(sd.eigenvectors(j, static_cast<Eigen::Index>(mode))) /
         std::sqrt(sd.network.buses()[bus].inertia);
}

}  // namespace gridspec

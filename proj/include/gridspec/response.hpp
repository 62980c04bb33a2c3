#pragma once

// Closed-form step response from the nominal state under uniform
// damping-inertia ratio gamma: per-mode unit responses and their synthesis
// along M^{-1/2} v_i, plus the synchronized steady state.

#include <cmath>
#include <complex>
#include <numeric>
#include <tuple>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridspec/error.hpp"
#include "gridspec/modes.hpp"
#include "gridspec/spectral.hpp"
#include "gridspec/trajectory.hpp"

namespace gridspec {

enum class Regime { Overdamped, Underdamped, Critical };

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Overdamped: return "overdamped";
    case Regime::Underdamped: return "underdamped";
    case Regime::Critical: return "critical";
  }
  return "unknown";
}

inline Regime classify_regime(double gamma, double lambda) {
  if (is_critically_damped(gamma, lambda)) return Regime::Critical;
  return gamma * gamma > 4.0 * lambda ? Regime::Overdamped : Regime::Underdamped;
}

/// Unit step response along one eigen-direction in its real form:
///   overdamped  (e^{phi+ t} - e^{phi- t}) / sqrt(Delta)
///   underdamped (2 / sqrt(Delta)) e^{-gamma t / 2} sin(sqrt(Delta) t / 2)
///   critical    t e^{-gamma t / 2}
inline double unit_mode_response(double gamma, double lambda, double t) {
  const double disc = gamma * gamma - 4.0 * lambda;
  switch (classify_regime(gamma, lambda)) {
    case Regime::Critical:
      return t * std::exp(-gamma * t / 2.0);
    case Regime::Overdamped: {
      const double root = std::sqrt(disc);
      const double plus = (-gamma + root) / 2.0;
      const double minus = (-gamma - root) / 2.0;
      // e^{a} - e^{b} = e^{a} (1 - e^{b-a}); expm1 keeps small-t accuracy.
      return -std::exp(plus * t) * std::expm1((minus - plus) * t) / root;
    }
    case Regime::Underdamped: {
      const double root = std::sqrt(-disc);
      return 2.0 / root * std::exp(-gamma * t / 2.0) * std::sin(root * t / 2.0);
    }
  }
  return 0.0;
}

/// Time derivative of unit_mode_response.
inline double unit_mode_rate(double gamma, double lambda, double t) {
  const double disc = gamma * gamma - 4.0 * lambda;
  switch (classify_regime(gamma, lambda)) {
    case Regime::Critical:
      return std::exp(-gamma * t / 2.0) * (1.0 - gamma * t / 2.0);
    case Regime::Overdamped: {
      const double root = std::sqrt(disc);
      const double plus = (-gamma + root) / 2.0;
      const double minus = (-gamma - root) / 2.0;
      return (plus * std::exp(plus * t) - minus * std::exp(minus * t)) / root;
    }
    case Regime::Underdamped: {
      const double root = std::sqrt(-disc);
      const double decay = std::exp(-gamma * t / 2.0);
      return 2.0 / root * decay *
             (root / 2.0 * std::cos(root * t / 2.0) - gamma / 2.0 * std::sin(root * t / 2.0));
    }
  }
  return 0.0;
}

/// The same response evaluated with complex arithmetic exactly as it appears
/// in the modal sum (1/sqrt(gamma^2-4 lambda)) (e^{phi+ t} - e^{phi- t}).
inline double unit_mode_response_complex(double gamma, double lambda, double t) {
  if (is_critically_damped(gamma, lambda)) return t * std::exp(-gamma * t / 2.0);
  const Complex root = std::sqrt(Complex(gamma * gamma - 4.0 * lambda, 0.0));
  const auto [plus, minus] = characteristic_roots(gamma, lambda);
  return ((std::exp(plus * t) - std::exp(minus * t)) / root).real();
}

struct ModeRecord {
  double lambda = 0.0;
  double s_hat = 0.0;
  double delta = 0.0;  // |gamma^2 - 4 lambda|
  Complex phi_plus;
  Complex phi_minus;
  Regime regime = Regime::Overdamped;
};

struct ModalResponse {
  double gamma = 0.0;
  std::vector<ModeRecord> modes;
  Eigen::MatrixXd shapes;  // column i is M^{-1/2} v_i
  Eigen::VectorXd sqrt_inertia;

  /// v_{i,j}, entry j of the orthonormal eigenvector v_i
  double eigenvector_entry(std::size_t i, std::size_t j) const {
    return shapes(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) *
           sqrt_inertia[static_cast<Eigen::Index>(j)];
  }

  std::size_t n() const { return modes.size(); }
};

inline ModalResponse modal_response(const SpectralData& sd, double gamma, const Eigen::VectorXd& s) {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::DomainError, "gamma must be non-negative");
  const auto coeffs = decompose_input(sd, s);
  ModalResponse mr;
  mr.gamma = gamma;
  mr.sqrt_inertia = sd.sqrt_inertia();
  const auto n = sd.n();
  mr.shapes.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    ModeRecord rec;
    // lambda_1 is exactly zero for a connected graph; drop rounding residue.
    rec.lambda = i == 0 ? 0.0 : sd.eigenvalues[ii];
    rec.s_hat = coeffs.coefficients[ii];
    rec.delta = std::abs(gamma * gamma - 4.0 * rec.lambda);
    std::tie(rec.phi_plus, rec.phi_minus) = characteristic_roots(gamma, rec.lambda);
    rec.regime = classify_regime(gamma, rec.lambda);
    mr.modes.push_back(rec);
    mr.shapes.col(ii) = sd.scaled_mode_shape(i);
  }
  return mr;
}

/// Convenience: modal response of a network with uniform gamma.
inline ModalResponse modal_response(const PowerNetwork& net, const Eigen::VectorXd& s) {
  return modal_response(analyze_spectrum(net), uniform_gamma(net), s);
}

/// ω̂^i(t), real form.
inline double omega_hat(const ModalResponse& mr, std::size_t i, double t) {
  if (i >= mr.n()) throw Error(ErrorCode::IndexOutOfRange, "mode index " + std::to_string(i));
  return unit_mode_response(mr.gamma, mr.modes[i].lambda, t);
}

/// ω(t) = Σ_i ŝ_i ω̂^i(t) M^{-1/2} v_i, each term evaluated through the
/// complex-root form.
inline Eigen::VectorXd omega_at(const ModalResponse& mr, double t) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mr.shapes.rows());
  for (std::size_t i = 0; i < mr.n(); ++i) {
    const auto& rec = mr.modes[i];
    if (rec.s_hat == 0.0) continue;
    w += rec.s_hat * unit_mode_response_complex(mr.gamma, rec.lambda, t) *
         mr.shapes.col(static_cast<Eigen::Index>(i));
  }
  return w;
}

inline Trajectory step_response(const ModalResponse& mr, std::span<const double> times) {
  Trajectory traj;
  traj.times.assign(times.begin(), times.end());
  traj.omega.resize(static_cast<Eigen::Index>(times.size()), mr.shapes.rows());
  traj.flows.resize(static_cast<Eigen::Index>(times.size()), 0);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && times[k] < times[k - 1])
      throw Error(ErrorCode::InvalidArgument, "time grid must be ascending");
    if (times[k] < 0.0) throw Error(ErrorCode::InvalidArgument, "time grid must be non-negative");
    traj.omega.row(static_cast<Eigen::Index>(k)) = omega_at(mr, times[k]).transpose();
  }
  traj.set_meta("source", "closed-form");
  return traj;
}

struct SteadyState {
  Eigen::VectorXd omega;  // (ŝ_1 / gamma) M^{-1/2} v_1
  double omega_c = 0.0;   // Σ s_i / Σ D_j
};

inline SteadyState steady_state(const SpectralData& sd, double gamma, const Eigen::VectorXd& s) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::ZeroDamping, "steady state needs gamma > 0");
  const auto coeffs = decompose_input(sd, s);
  SteadyState ss;
  ss.omega = coeffs.coefficients[0] / gamma * sd.scaled_mode_shape(0);
  ss.omega_c = s.sum() / sd.network.damping().sum();
  return ss;
}

}  // namespace gridspec

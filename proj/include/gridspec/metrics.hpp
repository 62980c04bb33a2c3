#pragma once

// Settling time and nadir of the per-mode unit step responses: tabulated
// closed forms alongside numerically exact values, and the worst-case nadir
// over inputs of unit scaled energy.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gridspec/error.hpp"
#include "gridspec/response.hpp"

namespace gridspec {

inline constexpr double kDefaultBand = 0.01;

/// Tabulated settling time, returned verbatim (can be negative for wide bands).
///   overdamped  ln(1/(4 c² Δ)) / (γ − √Δ)
///   underdamped ln(4/(c² Δ)) / γ
inline double table1_settling(double gamma, double lambda, double band) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::ZeroDamping, "settling time needs gamma > 0");
  if (!(band > 0.0)) throw Error(ErrorCode::NonPositiveBand, "band c must be positive");
  const double delta = std::abs(gamma * gamma - 4.0 * lambda);
  switch (classify_regime(gamma, lambda)) {
    case Regime::Critical:
      throw Error(ErrorCode::CriticalDamping, "no tabulated settling time at critical damping");
    case Regime::Overdamped: {
      const double root = std::sqrt(delta);
      if (!(gamma > root)) throw Error(ErrorCode::DomainError, "overdamped formula needs gamma > sqrt(Delta)");
      return std::log(1.0 / (4.0 * band * band * delta)) / (gamma - root);
    }
    case Regime::Underdamped:
      return std::log(4.0 / (band * band * delta)) / gamma;
  }
  return 0.0;
}

/// Tabulated nadir, returned verbatim.
inline double table1_nadir(double gamma, double lambda) {
  const double delta = std::abs(gamma * gamma - 4.0 * lambda);
  const double root = std::sqrt(delta);
  switch (classify_regime(gamma, lambda)) {
    case Regime::Critical:
      throw Error(ErrorCode::CriticalDamping, "no tabulated nadir at critical damping");
    case Regime::Overdamped: {
      if (!(gamma > root)) throw Error(ErrorCode::DomainError, "overdamped formula needs gamma > sqrt(Delta)");
      const double ratio = (gamma + root) / (gamma - root);
      return (std::pow(ratio, (-gamma + root) / (2.0 * root)) - std::pow(ratio, (-gamma - root) / (2.0 * root))) /
             root;
    }
    case Regime::Underdamped:
      return 2.0 / root * std::exp(-2.0 * std::numbers::pi * gamma / root);
  }
  return 0.0;
}

namespace detail {

// Maximizer of a unimodal f on [lo, hi].
template <typename F>
double golden_section_max(F&& f, double lo, double hi, double tol = 1e-13) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  const double stop = tol * std::max(1.0, hi);
  while (b - a > stop) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return (a + b) / 2.0;
}

// Root of g on [lo, hi] with g(lo) >= 0 >= g(hi).
template <typename G>
double bisect(G&& g, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = (lo + hi) / 2.0;
    (g(mid) >= 0.0 ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0;
}

struct Extremum {
  double time = 0.0;
  double value = 0.0;  // |ω̂|
};

// First (largest) extremum of the unit mode response for lambda > 0.
inline Extremum first_extremum(double gamma, double lambda) {
  auto f = [&](double t) { return std::abs(unit_mode_response(gamma, lambda, t)); };
  double lo = 0.0, hi = 0.0;
  switch (classify_regime(gamma, lambda)) {
    case Regime::Overdamped: {
      const auto [plus, minus] = characteristic_roots(gamma, lambda);
      const double peak = std::log(minus.real() / plus.real()) / (plus.real() - minus.real());
      hi = 3.0 * peak;
      break;
    }
    case Regime::Critical:
      hi = 6.0 / gamma;
      break;
    case Regime::Underdamped:
      // ω̂ > 0 between its first two zeros.
      hi = 2.0 * std::numbers::pi / std::sqrt(4.0 * lambda - gamma * gamma);
      break;
  }
  const double t = golden_section_max(f, lo, hi);
  return {t, f(t)};
}

}  // namespace detail

struct ModeMetrics {
  std::size_t mode = 0;
  Regime regime = Regime::Overdamped;
  double band = kDefaultBand;
  std::optional<double> settling_time_table;
  double settling_time_numeric = 0.0;
  std::optional<double> nadir_table;
  double nadir_numeric = 0.0;
  double nadir_time = 0.0;

  std::optional<double> nadir_discrepancy() const {
    if (!nadir_table) return std::nullopt;
    return *nadir_table - nadir_numeric;
  }
  std::optional<double> settling_discrepancy() const {
    if (!settling_time_table) return std::nullopt;
    return *settling_time_table - settling_time_numeric;
  }
  bool table_settling_negative() const { return settling_time_table && *settling_time_table < 0.0; }
};

/// sup_t |ω̂^i(t)| and its time. For lambda = 0 the supremum 1/gamma is the
/// asymptote, reported with time = +inf.
inline detail::Extremum unit_mode_nadir(double gamma, double lambda) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::ZeroDamping, "nadir needs gamma > 0");
  if (lambda == 0.0) return {std::numeric_limits<double>::infinity(), 1.0 / gamma};
  return detail::first_extremum(gamma, lambda);
}

/// Last time |ω̂^i(t) − ω̂^i(∞)| equals the band half-width c.
inline double unit_mode_settling(double gamma, double lambda, double band) {
  if (!(band > 0.0)) throw Error(ErrorCode::NonPositiveBand, "band c must be positive");
  if (!(gamma > 0.0)) throw Error(ErrorCode::ZeroDamping, "settling time needs gamma > 0");
  if (lambda == 0.0) {
    // |ω̂ − 1/γ| = e^{−γt}/γ
    return 1.0 / gamma > band ? std::log(1.0 / (gamma * band)) / gamma : 0.0;
  }
  auto f = [&](double t) { return unit_mode_response(gamma, lambda, t); };
  const auto peak = detail::first_extremum(gamma, lambda);
  if (peak.value <= band) return 0.0;

  if (classify_regime(gamma, lambda) != Regime::Underdamped) {
    double hi = std::max(1.0, 2.0 * peak.time);
    while (std::abs(f(hi)) >= band) hi *= 2.0;
    return detail::bisect([&](double t) { return std::abs(f(t)) - band; }, peak.time, hi);
  }

  // Extrema repeat every half period 2π/√Δ, shrinking by e^{−γπ/√Δ}.
  const double root = std::sqrt(4.0 * lambda - gamma * gamma);
  const double half_period = 2.0 * std::numbers::pi / root;
  const double shrink = gamma * std::numbers::pi / root;
  auto k = static_cast<long long>(std::floor(std::log(peak.value / band) / shrink));
  auto extremum_at = [&](long long idx) { return peak.time + static_cast<double>(idx) * half_period; };
  while (k > 0 && std::abs(f(extremum_at(k))) < band) --k;
  while (std::abs(f(extremum_at(k + 1))) >= band) ++k;
  const double lo = extremum_at(k);
  const double hi = static_cast<double>(k + 1) * half_period;  // next zero
  return detail::bisect([&](double t) { return std::abs(f(t)) - band; }, lo, hi);
}

inline ModeMetrics numeric_mode_metrics(const ModalResponse& mr, std::size_t i, double band = kDefaultBand) {
  if (i >= mr.n()) throw Error(ErrorCode::IndexOutOfRange, "mode index " + std::to_string(i));
  if (!(band > 0.0)) throw Error(ErrorCode::NonPositiveBand, "band c must be positive");
  const double gamma = mr.gamma;
  const double lambda = mr.modes[i].lambda;
  ModeMetrics mm;
  mm.mode = i;
  mm.band = band;
  mm.regime = mr.modes[i].regime;
  const auto peak = unit_mode_nadir(gamma, lambda);
  mm.nadir_numeric = peak.value;
  mm.nadir_time = peak.time;
  mm.settling_time_numeric = unit_mode_settling(gamma, lambda, band);
  if (lambda > 0.0 && mm.regime != Regime::Critical) {
    mm.nadir_table = table1_nadir(gamma, lambda);
    mm.settling_time_table = table1_settling(gamma, lambda, band);
  }
  return mm;
}

struct WorstCaseNadir {
  std::size_t bus = 0;
  double value = 0.0;  // M_j^{-1/2} sqrt(Σ_i (|v_{i,j}| sup|ω̂^i|)²)
};

inline WorstCaseNadir worst_case_nadir(const ModalResponse& mr, std::size_t bus) {
  if (bus >= static_cast<std::size_t>(mr.sqrt_inertia.size()))
    throw Error(ErrorCode::IndexOutOfRange, "bus index " + std::to_string(bus));
  double sum = 0.0;
  for (std::size_t i = 0; i < mr.n(); ++i) {
    const double term = std::abs(mr.eigenvector_entry(i, bus)) * unit_mode_nadir(mr.gamma, mr.modes[i].lambda).value;
    sum += term * term;
  }
  return {bus, std::sqrt(sum) / mr.sqrt_inertia[static_cast<Eigen::Index>(bus)]};
}

}  // namespace gridspec

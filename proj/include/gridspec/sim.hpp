#pragma once

// Fixed-step RK4 integration of the swing/network dynamics
//   M ω̇ = −D ω − d + s(t) − C P,   Ṗ = B Cᵀ ω
// with load-side controllers in explicit feedback form. This is the
// time-domain oracle for every closed form in the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gridspec/control.hpp"
#include "gridspec/error.hpp"
#include "gridspec/netmodel.hpp"
#include "gridspec/spectral.hpp"
#include "gridspec/trajectory.hpp"

namespace gridspec {

// ---------------------------------------------------------------------------
// Input signals

struct StepInput {
  Eigen::VectorXd s;  // per bus, canonical order
};

struct SinusoidInput {
  BusId bus = 0;
  double amplitude = 0.0;  // p.u.
  double sigma = 0.0;      // rad/s
};

/// amplitude · sin(σ t) · M^{1/2} v_mode
struct SpectralSinusoidInput {
  std::size_t mode = 0;
  double amplitude = 0.0;
  double sigma = 0.0;
};

/// White Gaussian noise on the frequency sensor of one bus, held constant
/// between samples.
struct GaussianNoiseInput {
  BusId bus = 0;
  double power_dbw = -20.0;
  std::uint64_t seed = 0;
  double sample_rate = 100.0;  // Hz
};

enum class ProfileInterpolation { Hold, Linear };

struct ProfileInput {
  BusId bus = 0;
  std::vector<double> times;   // strictly increasing, seconds
  std::vector<double> values;  // p.u.
  ProfileInterpolation interpolation = ProfileInterpolation::Hold;

  double value_at(double t) const {
    if (times.empty()) return 0.0;
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto hi = static_cast<std::size_t>(it - times.begin());
    const auto lo = hi - 1;
    if (interpolation == ProfileInterpolation::Hold) return values[lo];
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
  }
};

using InputSignal =
    std::variant<StepInput, SinusoidInput, SpectralSinusoidInput, GaussianNoiseInput, ProfileInput>;

inline std::string describe(const InputSignal& in) {
  std::ostringstream os;
  os.precision(12);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, StepInput>) {
          os << "step(s=[";
          for (Eigen::Index k = 0; k < x.s.size(); ++k) os << (k ? "," : "") << x.s[k];
          os << "])";
        } else if constexpr (std::is_same_v<T, SinusoidInput>) {
          os << "sinusoid(bus=" << x.bus << ",amplitude=" << x.amplitude << ",sigma=" << x.sigma << ")";
        } else if constexpr (std::is_same_v<T, SpectralSinusoidInput>) {
          os << "spectral-sinusoid(mode=" << x.mode + 1 << ",amplitude=" << x.amplitude << ",sigma=" << x.sigma
             << ")";
        } else if constexpr (std::is_same_v<T, GaussianNoiseInput>) {
          os << "noise(bus=" << x.bus << ",power_dbw=" << x.power_dbw << ",seed=" << x.seed
             << ",rate=" << x.sample_rate << ")";
        } else {
          os << "profile(bus=" << x.bus << ",samples=" << x.times.size() << ","
             << (x.interpolation == ProfileInterpolation::Hold ? "hold" : "linear") << ")";
        }
      },
      in);
  return os.str();
}

/// Two-column CSV (time_s, power_pu); a non-numeric first row is a header.
inline ProfileInput parse_profile_csv(const std::string& text, BusId bus,
                                      ProfileInterpolation interp = ProfileInterpolation::Hold) {
  ProfileInput p;
  p.bus = bus;
  p.interpolation = interp;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::SyntaxError, "profile line " + std::to_string(lineno) + ": expected two columns");
    double t = 0.0, v = 0.0;
    try {
      std::size_t used = 0;
      t = std::stod(line.substr(0, comma), &used);
      v = std::stod(line.substr(comma + 1), &used);
    } catch (const std::exception&) {
      if (p.times.empty() && lineno == 1) continue;  // header
      throw Error(ErrorCode::SyntaxError, "profile line " + std::to_string(lineno) + ": not numeric");
    }
    if (!p.times.empty() && !(t > p.times.back()))
      throw Error(ErrorCode::SchemaViolation,
                  "profile line " + std::to_string(lineno) + ": timestamps must be strictly increasing");
    p.times.push_back(t);
    p.values.push_back(v);
  }
  if (p.times.empty()) throw Error(ErrorCode::SchemaViolation, "profile has no samples");
  return p;
}

inline ProfileInput load_profile_csv(const std::string& path, BusId bus,
                                     ProfileInterpolation interp = ProfileInterpolation::Hold) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open profile " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_profile_csv(ss.str(), bus, interp);
}

// ---------------------------------------------------------------------------
// Noise

struct NoiseSeries {
  double sample_rate = 100.0;
  std::vector<double> values;

  double value_at(double t) const {
    if (values.empty()) return 0.0;
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t * sample_rate + 1e-9)));
    return values[std::min(k, values.size() - 1)];
  }
};

/// Zero-mean Gaussian samples with variance 10^{power/10} (−20 dBW → 0.01)
/// at `sample_rate`. power = −inf gives an all-zero series.
inline NoiseSeries noise_series(double power_dbw, std::uint64_t seed, double sample_rate, double t_end) {
  if (!(sample_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sample rate must be > 0");
  NoiseSeries ns;
  ns.sample_rate = sample_rate;
  const auto count = static_cast<std::size_t>(std::ceil(t_end * sample_rate)) + 1;
  ns.values.assign(count, 0.0);
  if (std::isinf(power_dbw) && power_dbw < 0.0) return ns;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, std::sqrt(std::pow(10.0, power_dbw / 10.0)));
  for (auto& v : ns.values) v = dist(rng);
  return ns;
}

// ---------------------------------------------------------------------------
// Simulator

enum class DerivativeMode {
  Ideal,    // K_d acts on the true ω̇ (solved with the swing equation)
  Sampled,  // backward difference of the measured signal at the sensor rate
};

struct SimOptions {
  double dt = 1e-3;
  double t_end = 10.0;
  std::size_t record_stride = 1;
  DerivativeMode derivative = DerivativeMode::Sampled;
  double sensor_rate = 100.0;  // Hz, used by the sampled derivative path
};

namespace detail {

struct SimSystem {
  std::size_t n = 0, m = 0;
  std::vector<std::size_t> src, tgt;
  Eigen::VectorXd inertia, damping, susceptance;
  Eigen::VectorXd kp, kd;
  Eigen::VectorXd eff_inertia;  // M + K_d in ideal-derivative mode, else M
};

}  // namespace detail

/// Integrates from x0 = [ω; P] over [0, t_end] with step dt. Droop and the
/// load-side controllers act on the measured frequency ω + noise.
inline Trajectory simulate(const PowerNetwork& net, const ControllerSpec& ctrl,
                           const std::vector<InputSignal>& inputs, const Eigen::VectorXd& x0,
                           const SimOptions& opts) {
  const std::size_t n = net.n();
  const std::size_t m = net.m();
  const auto ni = static_cast<Eigen::Index>(n);
  const auto mi = static_cast<Eigen::Index>(m);
  if (!(opts.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  if (!(opts.t_end >= opts.dt)) throw Error(ErrorCode::InvalidArgument, "t_end must be >= dt");
  if (x0.size() != ni + mi) throw Error(ErrorCode::DimensionMismatch, "x0 must have length n + m");
  if (opts.record_stride == 0) throw Error(ErrorCode::InvalidArgument, "record stride must be >= 1");
  ctrl.validate(n);

  detail::SimSystem sys;
  sys.n = n;
  sys.m = m;
  for (std::size_t e = 0; e < m; ++e) {
    sys.src.push_back(net.source_index(e));
    sys.tgt.push_back(net.target_index(e));
  }
  sys.inertia = net.inertia();
  sys.damping = net.damping();
  sys.susceptance = net.susceptance();
  sys.kp = ctrl.has_feedback() ? ctrl.kp : Eigen::VectorXd::Zero(ni);
  sys.kd = ctrl.kind == ControllerKind::ProportionalDerivative ? ctrl.kd : Eigen::VectorXd::Zero(ni);
  const bool ideal = opts.derivative == DerivativeMode::Ideal;
  sys.eff_inertia = ideal ? Eigen::VectorXd(sys.inertia + sys.kd) : sys.inertia;

  // Resolve inputs.
  Eigen::VectorXd step_total = Eigen::VectorXd::Zero(ni);
  struct Sine { std::size_t bus; double a, sigma; };
  struct ModeSine { Eigen::VectorXd direction; double sigma; };
  struct Noise { std::size_t bus; NoiseSeries series; };
  struct Profile { std::size_t bus; ProfileInput p; };
  std::vector<Sine> sines;
  std::vector<ModeSine> mode_sines;
  std::vector<Noise> noises;
  std::vector<Profile> profiles;
  std::optional<SpectralData> spectrum;
  for (const auto& in : inputs) {
    if (const auto* st = std::get_if<StepInput>(&in)) {
      if (st->s.size() != ni) throw Error(ErrorCode::DimensionMismatch, "step input needs one entry per bus");
      step_total += st->s;
    } else if (const auto* si = std::get_if<SinusoidInput>(&in)) {
      sines.push_back({net.index_of(si->bus), si->amplitude, si->sigma});
    } else if (const auto* ss = std::get_if<SpectralSinusoidInput>(&in)) {
      if (!spectrum) spectrum = analyze_spectrum(net);
      if (ss->mode >= n) throw Error(ErrorCode::IndexOutOfRange, "spectral mode " + std::to_string(ss->mode));
      Eigen::VectorXd dir = spectrum->sqrt_inertia().cwiseProduct(
          spectrum->eigenvectors.col(static_cast<Eigen::Index>(ss->mode)));
      mode_sines.push_back({ss->amplitude * dir, ss->sigma});
    } else if (const auto* gn = std::get_if<GaussianNoiseInput>(&in)) {
      noises.push_back({net.index_of(gn->bus), noise_series(gn->power_dbw, gn->seed, gn->sample_rate, opts.t_end)});
    } else if (const auto* pr = std::get_if<ProfileInput>(&in)) {
      if (pr->times.size() != pr->values.size() || pr->times.empty())
        throw Error(ErrorCode::SchemaViolation, "profile needs matching non-empty time/value columns");
      for (std::size_t k = 1; k < pr->times.size(); ++k)
        if (!(pr->times[k] > pr->times[k - 1]))
          throw Error(ErrorCode::SchemaViolation, "profile timestamps must be strictly increasing");
      profiles.push_back({net.index_of(pr->bus), *pr});
    }
  }

  // Physical injection s(t); sampled signals use their value at step start.
  auto injection = [&](double t, double t_step) {
    Eigen::VectorXd u = step_total;
    for (const auto& s : sines) u[static_cast<Eigen::Index>(s.bus)] += s.a * std::sin(s.sigma * t);
    for (const auto& s : mode_sines) u += std::sin(s.sigma * t) * s.direction;
    for (const auto& p : profiles) {
      const double at = p.p.interpolation == ProfileInterpolation::Hold ? t_step : t;
      u[static_cast<Eigen::Index>(p.bus)] += p.p.value_at(at);
    }
    return u;
  };
  auto sensor_noise = [&](double t_step) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(ni);
    for (const auto& nz : noises) z[static_cast<Eigen::Index>(nz.bus)] += nz.series.value_at(t_step);
    return z;
  };

  // Sampled derivative state: last measurement and filtered derivative.
  Eigen::VectorXd held_derivative = Eigen::VectorXd::Zero(ni);
  Eigen::VectorXd last_measured = Eigen::VectorXd::Zero(ni);
  bool have_sample = false;
  const double sensor_period = 1.0 / opts.sensor_rate;
  double next_sample = 0.0;

  auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& noise) {
    Eigen::VectorXd dx(ni + mi);
    const auto omega = x.head(ni);
    const auto flows = x.tail(mi);
    Eigen::VectorXd net_out = Eigen::VectorXd::Zero(ni);
    for (std::size_t e = 0; e < m; ++e) {
      const auto ee = static_cast<Eigen::Index>(e);
      net_out[static_cast<Eigen::Index>(sys.src[e])] += flows[ee];
      net_out[static_cast<Eigen::Index>(sys.tgt[e])] -= flows[ee];
      dx[ni + ee] = sys.susceptance[ee] *
                    (omega[static_cast<Eigen::Index>(sys.src[e])] - omega[static_cast<Eigen::Index>(sys.tgt[e])]);
    }
    Eigen::VectorXd load = sys.kp.cwiseProduct(omega + noise);
    if (!ideal) load += sys.kd.cwiseProduct(held_derivative);
    // droop is frequency feedback too, so it reads the same sensor
    dx.head(ni) = (-sys.damping.cwiseProduct(omega + noise) - load + u - net_out).cwiseQuotient(sys.eff_inertia);
    return dx;
  };

  const auto steps = static_cast<std::size_t>(std::llround(opts.t_end / opts.dt));
  const std::size_t rows = steps / opts.record_stride + 1;
  Trajectory traj;
  traj.set_labels(net, true);
  traj.times.reserve(rows);
  traj.omega.resize(static_cast<Eigen::Index>(rows), ni);
  traj.flows.resize(static_cast<Eigen::Index>(rows), mi);

  Eigen::VectorXd x = x0;
  std::size_t row = 0;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.omega.row(static_cast<Eigen::Index>(row)) = x.head(ni).transpose();
    traj.flows.row(static_cast<Eigen::Index>(row)) = x.tail(mi).transpose();
    ++row;
  };
  record(0.0);

  const double h = opts.dt;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const Eigen::VectorXd noise = sensor_noise(t);
    if (!ideal && t + 1e-12 >= next_sample) {
      const Eigen::VectorXd measured = x.head(ni) + noise;
      if (have_sample) {
        const Eigen::VectorXd raw = (measured - last_measured) / sensor_period;
        const double tc = ctrl.derivative_filter_tc;
        held_derivative = tc > 0.0 ? Eigen::VectorXd(held_derivative + (sensor_period / (tc + sensor_period)) *
                                                                           (raw - held_derivative))
                                   : raw;
      }
      last_measured = measured;
      have_sample = true;
      next_sample += sensor_period;
    }
    const Eigen::VectorXd k1 = rhs(x, injection(t, t), noise);
    const Eigen::VectorXd u_mid = injection(t + h / 2.0, t);
    const Eigen::VectorXd k2 = rhs(x + h / 2.0 * k1, u_mid, noise);
    const Eigen::VectorXd k3 = rhs(x + h / 2.0 * k2, u_mid, noise);
    const Eigen::VectorXd k4 = rhs(x + h * k3, injection(t + h, t), noise);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) {
      std::ostringstream os;
      os << "state diverged; last valid time " << t;
      throw Error(ErrorCode::NonFiniteState, os.str());
    }
    if ((k + 1) % opts.record_stride == 0) record(static_cast<double>(k + 1) * h);
  }
  traj.omega.conservativeResize(static_cast<Eigen::Index>(row), ni);
  traj.flows.conservativeResize(static_cast<Eigen::Index>(row), mi);

  std::ostringstream dt_str;
  dt_str.precision(12);
  dt_str << opts.dt;
  traj.set_meta("source", "rk4");
  traj.set_meta("dt", dt_str.str());
  traj.set_meta("controller", std::string(to_string(ctrl.kind)));
  traj.set_meta("derivative", ideal ? "ideal" : "sampled");
  std::string desc, seeds;
  for (const auto& in : inputs) {
    desc += (desc.empty() ? "" : ";") + describe(in);
    if (const auto* gn = std::get_if<GaussianNoiseInput>(&in))
      seeds += (seeds.empty() ? "" : ",") + std::to_string(gn->seed);
  }
  traj.set_meta("input", desc.empty() ? "none" : desc);
  if (!seeds.empty()) traj.set_meta("seed", seeds);
  return traj;
}

inline Trajectory simulate(const PowerNetwork& net, const ControllerSpec& ctrl,
                           const std::vector<InputSignal>& inputs, double t_end, double dt,
                           SimOptions opts = {}) {
  opts.t_end = t_end;
  opts.dt = dt;
  return simulate(net, ctrl, inputs,
                  Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.n() + net.m())), opts);
}

/// RMS of ω at a bus (canonical position) over samples with t >= t_start.
inline double measure_rms_deviation(const Trajectory& traj, std::size_t bus, double t_start) {
  if (bus >= static_cast<std::size_t>(traj.omega.cols()))
    throw Error(ErrorCode::IndexOutOfRange, "bus index " + std::to_string(bus));
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.times[k] + 1e-12 < t_start) continue;
    const double w = traj.omega(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(bus));
    sum += w * w;
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::EmptyWindow, "no samples at or after t_start");
  return std::sqrt(sum / static_cast<double>(count));
}

/// ωᵀMω + PᵀB⁻¹P at every sample.
inline std::vector<double> swing_energy(const PowerNetwork& net, const Trajectory& traj) {
  const Eigen::VectorXd m = net.inertia();
  const Eigen::VectorXd inv_b = net.susceptance().cwiseInverse();
  std::vector<double> e(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Eigen::VectorXd w = traj.omega.row(kk).transpose();
    const Eigen::VectorXd p = traj.flows.row(kk).transpose();
    e[k] = w.dot(m.cwiseProduct(w)) + p.dot(inv_b.cwiseProduct(p));
  }
  return e;
}

}  // namespace gridspec

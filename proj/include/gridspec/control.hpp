#pragma once

#include <algorithm>

// Load-side controllers d_j = K_p ω_j (+ K_d ω̇_j) and the effective network
// obtained by absorbing them into damping and inertia.

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gridspec/error.hpp"
#include "gridspec/netmodel.hpp"

namespace gridspec {

enum class ControllerKind { DroopOnly, Proportional, ProportionalDerivative };

constexpr std::string_view to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::DroopOnly: return "droop";
    case ControllerKind::Proportional: return "proportional";
    case ControllerKind::ProportionalDerivative: return "pd";
  }
  return "droop";
}

inline ControllerKind parse_controller_kind(std::string_view s) {
  if (s == "droop" || s == "droop-only") return ControllerKind::DroopOnly;
  if (s == "proportional" || s == "p") return ControllerKind::Proportional;
  if (s == "pd" || s == "proportional-derivative") return ControllerKind::ProportionalDerivative;
  throw Error(ErrorCode::InvalidArgument, "unknown controller kind '" + std::string(s) + "'");
}

inline constexpr double kDefaultDerivativeFilter = 0.05;  // seconds

struct ControllerSpec {
  ControllerKind kind = ControllerKind::DroopOnly;
  Eigen::VectorXd kp;  // per bus, empty for droop-only
  Eigen::VectorXd kd;  // per bus, PD only
  double derivative_filter_tc = kDefaultDerivativeFilter;

  bool has_feedback() const { return kind != ControllerKind::DroopOnly; }

  void validate(std::size_t n) const {
    const auto ni = static_cast<Eigen::Index>(n);
    if (kind != ControllerKind::DroopOnly && kp.size() != ni)
      throw Error(ErrorCode::DimensionMismatch, "kp needs one gain per bus");
    if (kind == ControllerKind::ProportionalDerivative && kd.size() != ni)
      throw Error(ErrorCode::DimensionMismatch, "kd needs one gain per bus");
    if (kind != ControllerKind::ProportionalDerivative && kd.size() > 0 && kd.cwiseAbs().maxCoeff() > 0.0)
      throw Error(ErrorCode::InvalidArgument, "kd must be zero unless the controller is PD");
    if ((kp.size() > 0 && kp.minCoeff() < 0.0) || (kd.size() > 0 && kd.minCoeff() < 0.0))
      throw Error(ErrorCode::InvalidArgument, "controller gains must be non-negative");
    if (!(derivative_filter_tc >= 0.0))
      throw Error(ErrorCode::InvalidArgument, "derivative filter time constant must be >= 0");
  }
};

inline ControllerSpec droop_only() { return {}; }

/// K_{p,j} = kp_scale D_j and K_{d,j} = kd_scale D_j. The kind follows the
/// non-zero scales.
inline ControllerSpec gains_proportional_to_damping(const PowerNetwork& net, double kp_scale, double kd_scale) {
  if (!(kp_scale >= 0.0) || !(kd_scale >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "gain scales must be non-negative");
  ControllerSpec c;
  const Eigen::VectorXd d = net.damping();
  if (kd_scale > 0.0) {
    c.kind = ControllerKind::ProportionalDerivative;
    c.kp = kp_scale * d;
    c.kd = kd_scale * d;
  } else if (kp_scale > 0.0) {
    c.kind = ControllerKind::Proportional;
    c.kp = kp_scale * d;
  }
  return c;
}

/// D'_j = D_j + K_{p,j}; for PD also M'_j = M_j + K_{d,j}.
inline PowerNetwork effective_network(const PowerNetwork& net, const ControllerSpec& ctrl) {
  ctrl.validate(net.n());
  std::vector<Bus> buses = net.buses();
  for (std::size_t j = 0; j < buses.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    if (ctrl.kind != ControllerKind::DroopOnly) buses[j].damping += ctrl.kp[jj];
    if (ctrl.kind == ControllerKind::ProportionalDerivative) buses[j].inertia += ctrl.kd[jj];
  }
  return build_network(std::move(buses), net.lines(), {net.connected()});
}

/// Removes generator droop: D_j = 0 on generator buses (those with a
/// rating), or on every bus when the network carries no ratings. Load-bus
/// damping is frequency-sensitive load and stays.
inline PowerNetwork without_droop(const PowerNetwork& net) {
  std::vector<Bus> buses = net.buses();
  const bool any_rating = std::any_of(buses.begin(), buses.end(), [](const Bus& b) { return b.rating.has_value(); });
  for (auto& b : buses)
    if (!any_rating || b.rating) b.damping = 0.0;
  return build_network(std::move(buses), net.lines(), {net.connected()});
}

}  // namespace gridspec

#pragma once

// Transmission network model: buses with inertia/damping, oriented lines
// weighted by susceptance, the incidence matrix and the graph partial order.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gridspec/error.hpp"

namespace gridspec {

using BusId = std::int64_t;

struct Bus {
  BusId id = 0;
  double inertia = 1.0;  // M_j, p.u. s^2
  double damping = 0.0;  // D_j, p.u. s
  std::optional<double> rating;  // f_j, p.u.

  friend bool operator==(const Bus&, const Bus&) = default;
};

struct Line {
  BusId source = 0;
  BusId target = 0;
  double susceptance = 1.0;  // B_ij, p.u.

  std::pair<BusId, BusId> key() const {
    return {std::min(source, target), std::max(source, target)};
  }
  friend bool operator==(const Line&, const Line&) = default;
};

struct BuildOptions {
  // Only the partial-order/eigenvalue comparison path may disable this.
  bool require_connected = true;
};

class PowerNetwork;
PowerNetwork build_network(std::vector<Bus> buses, std::vector<Line> lines,
                           BuildOptions options = {});

/// Immutable, validated network with canonical ordering: buses by ascending
/// id, lines by (min endpoint, max endpoint). Line orientation is preserved.
class PowerNetwork {
 public:
  PowerNetwork() = default;

  std::size_t n() const noexcept { return buses_.size(); }
  std::size_t m() const noexcept { return lines_.size(); }
  const std::vector<Bus>& buses() const noexcept { return buses_; }
  const std::vector<Line>& lines() const noexcept { return lines_; }
  bool connected() const noexcept { return connected_; }

  std::optional<std::size_t> find_index(BusId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t index_of(BusId id) const {
    auto idx = find_index(id);
    if (!idx) throw Error(ErrorCode::UnknownBus, "bus " + std::to_string(id) + " not in network");
    return *idx;
  }
  std::size_t source_index(std::size_t e) const { return index_of(lines_.at(e).source); }
  std::size_t target_index(std::size_t e) const { return index_of(lines_.at(e).target); }

  Eigen::VectorXd inertia() const {
    Eigen::VectorXd v(n());
    for (std::size_t j = 0; j < n(); ++j) v[j] = buses_[j].inertia;
    return v;
  }
  Eigen::VectorXd damping() const {
    Eigen::VectorXd v(n());
    for (std::size_t j = 0; j < n(); ++j) v[j] = buses_[j].damping;
    return v;
  }
  Eigen::VectorXd susceptance() const {
    Eigen::VectorXd v(m());
    for (std::size_t e = 0; e < m(); ++e) v[e] = lines_[e].susceptance;
    return v;
  }

  friend bool operator==(const PowerNetwork& a, const PowerNetwork& b) {
    return a.buses_ == b.buses_ && a.lines_ == b.lines_;
  }

 private:
  friend PowerNetwork build_network(std::vector<Bus>, std::vector<Line>, BuildOptions);

  std::vector<Bus> buses_;
  std::vector<Line> lines_;
  std::map<BusId, std::size_t> index_;
  bool connected_ = false;
};

namespace detail {

inline bool is_connected(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  if (n == 0) return false;
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!frontier.empty()) {
    auto u = frontier.front();
    frontier.pop();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        frontier.push(v);
      }
    }
  }
  return count == n;
}

}  // namespace detail

inline PowerNetwork build_network(std::vector<Bus> buses, std::vector<Line> lines,
                                  BuildOptions options) {
  if (buses.empty()) throw Error(ErrorCode::InvalidArgument, "network has no buses");

  std::sort(buses.begin(), buses.end(), [](const Bus& a, const Bus& b) { return a.id < b.id; });
  PowerNetwork net;
  for (std::size_t j = 0; j < buses.size(); ++j) {
    const auto& b = buses[j];
    if (!(b.inertia > 0.0))
      throw Error(ErrorCode::NonPositiveInertia, "bus " + std::to_string(b.id) + " has inertia <= 0");
    if (!(b.damping >= 0.0))
      throw Error(ErrorCode::NegativeDamping, "bus " + std::to_string(b.id) + " has damping < 0");
    if (b.rating && !(*b.rating > 0.0))
      throw Error(ErrorCode::NonPositiveRating, "bus " + std::to_string(b.id) + " has rating <= 0");
    if (!net.index_.emplace(b.id, j).second)
      throw Error(ErrorCode::DuplicateBus, "bus id " + std::to_string(b.id) + " appears twice");
  }

  std::sort(lines.begin(), lines.end(),
            [](const Line& a, const Line& b) { return a.key() < b.key(); });
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(lines.size());
  for (std::size_t e = 0; e < lines.size(); ++e) {
    const auto& l = lines[e];
    const auto where = "line (" + std::to_string(l.source) + "," + std::to_string(l.target) + ")";
    if (l.source == l.target) throw Error(ErrorCode::SelfLoop, where + " is a self loop");
    auto s = net.find_index(l.source);
    auto t = net.find_index(l.target);
    if (!s || !t) throw Error(ErrorCode::UnknownBus, where + " references a bus not in the bus list");
    if (!(l.susceptance > 0.0)) throw Error(ErrorCode::NegativeSusceptance, where + " has susceptance <= 0");
    if (e > 0 && lines[e - 1].key() == l.key())
      throw Error(ErrorCode::DuplicateLine, where + " duplicates another line on the same bus pair");
    edges.emplace_back(*s, *t);
  }

  net.connected_ = detail::is_connected(buses.size(), edges);
  if (options.require_connected && !net.connected_)
    throw Error(ErrorCode::DisconnectedGraph, "network is not connected");

  net.buses_ = std::move(buses);
  net.lines_ = std::move(lines);
  return net;
}

/// n x m matrix with +1 at the source bus and -1 at the target bus of each line.
inline Eigen::MatrixXd incidence_matrix(const PowerNetwork& net) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(net.n()),
                                            static_cast<Eigen::Index>(net.m()));
  for (std::size_t e = 0; e < net.m(); ++e) {
    c(static_cast<Eigen::Index>(net.source_index(e)), static_cast<Eigen::Index>(e)) = 1.0;
    c(static_cast<Eigen::Index>(net.target_index(e)), static_cast<Eigen::Index>(e)) = -1.0;
  }
  return c;
}

enum class PartialOrder {
  Leq,          // g1 ⪯ g2 (includes equality)
  GeqOnly,      // g2 ⪯ g1 and not g1 ⪯ g2
  Incomparable,
};

constexpr std::string_view to_string(PartialOrder o) {
  switch (o) {
    case PartialOrder::Leq: return "leq";
    case PartialOrder::GeqOnly: return "geq-only";
    case PartialOrder::Incomparable: return "incomparable";
  }
  return "incomparable";
}

namespace detail {

// Edge-set containment with weight dominance on unordered bus pairs.
inline bool dominated_by(const PowerNetwork& small, const PowerNetwork& big) {
  std::map<std::pair<BusId, BusId>, double> weights;
  for (const auto& l : big.lines()) weights[l.key()] = l.susceptance;
  for (const auto& l : small.lines()) {
    auto it = weights.find(l.key());
    if (it == weights.end() || l.susceptance > it->second) return false;
  }
  return true;
}

}  // namespace detail

inline PartialOrder partial_order_leq(const PowerNetwork& g1, const PowerNetwork& g2) {
  bool same_buses = g1.n() == g2.n();
  for (std::size_t j = 0; same_buses && j < g1.n(); ++j)
    same_buses = g1.buses()[j].id == g2.buses()[j].id;
  if (!same_buses) throw Error(ErrorCode::BusSetMismatch, "networks are defined on different bus sets");

  if (detail::dominated_by(g1, g2)) return PartialOrder::Leq;
  if (detail::dominated_by(g2, g1)) return PartialOrder::GeqOnly;
  return PartialOrder::Incomparable;
}

}  // namespace gridspec

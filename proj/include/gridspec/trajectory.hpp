#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gridspec/netmodel.hpp"

namespace gridspec {

/// Sampled trajectory: one row per time sample, omega columns per bus and
/// (optionally) flow columns per line. Metadata keeps insertion order.
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd omega;  // rows = times, cols = buses
  Eigen::MatrixXd flows;  // rows = times, cols = lines (0 cols when absent)
  std::vector<BusId> bus_ids;
  std::vector<std::pair<BusId, BusId>> line_ids;  // (source, target)
  std::vector<std::pair<std::string, std::string>> metadata;

  std::size_t size() const { return times.size(); }

  void set_labels(const PowerNetwork& net, bool with_flows) {
    bus_ids.clear();
    line_ids.clear();
    for (const auto& b : net.buses()) bus_ids.push_back(b.id);
    if (with_flows)
      for (const auto& l : net.lines()) line_ids.emplace_back(l.source, l.target);
  }

  void set_meta(const std::string& key, const std::string& value) {
    for (auto& [k, v] : metadata) {
      if (k == key) {
        v = value;
        return;
      }
    }
    metadata.emplace_back(key, value);
  }

  const std::string* meta(const std::string& key) const {
    for (const auto& [k, v] : metadata)
      if (k == key) return &v;
    return nullptr;
  }
};

}  // namespace gridspec

#pragma once

// System matrix of the linearized swing dynamics and its analytic
// eigenstructure in terms of the scaled Laplacian spectrum.

#include <cmath>
#include <complex>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridspec/error.hpp"
#include "gridspec/netmodel.hpp"
#include "gridspec/spectral.hpp"

namespace gridspec {

using Complex = std::complex<double>;

/// A = [[-M^{-1}D, -M^{-1}C], [B C^T, 0]] acting on x = [omega; P].
inline Eigen::MatrixXd system_matrix(const PowerNetwork& net) {
  const auto n = static_cast<Eigen::Index>(net.n());
  const auto m = static_cast<Eigen::Index>(net.m());
  const Eigen::MatrixXd c = incidence_matrix(net);
  const Eigen::VectorXd inv_m = net.inertia().cwiseInverse();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + m, n + m);
  a.topLeftCorner(n, n) = (-inv_m.cwiseProduct(net.damping())).asDiagonal();
  a.topRightCorner(n, m) = -(inv_m.asDiagonal() * c);
  a.bottomLeftCorner(m, n) = net.susceptance().asDiagonal() * c.transpose();
  return a;
}

/// Common damping-inertia ratio D_j/M_j; throws if the ratios spread by more
/// than `relative_tolerance` of their mean.
inline double uniform_gamma(const PowerNetwork& net, double relative_tolerance = 1e-9) {
  const Eigen::VectorXd ratio = net.damping().cwiseQuotient(net.inertia());
  const double mean = ratio.mean();
  Eigen::Index worst = 0;
  const double spread = (ratio.array() - mean).abs().maxCoeff(&worst);
  if (spread > relative_tolerance * mean)
    throw Error(ErrorCode::NonUniformDampingRatio,
                "bus " + std::to_string(net.buses()[static_cast<std::size_t>(worst)].id) +
                    " has D/M = " + std::to_string(ratio[worst]) + " vs mean " + std::to_string(mean) +
                    " (spread " + std::to_string(mean > 0 ? spread / mean : spread) + ")");
  return mean;
}

struct CycleBasis {
  std::vector<Eigen::VectorXd> vectors;  // each in kernel(C), length m
};

/// Fundamental cycles of a breadth-first spanning tree rooted at the first
/// bus. Each vector carries +1 on its chord and ±1 on the tree path back,
/// signed by line orientation.
inline CycleBasis cycle_basis(const PowerNetwork& net) {
  const std::size_t n = net.n();
  const std::size_t m = net.m();
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t e = 0; e < m; ++e) {
    incident[net.source_index(e)].push_back(e);
    incident[net.target_index(e)].push_back(e);
  }

  constexpr auto none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent_edge(n, none);
  std::vector<std::size_t> depth(n, 0);
  std::vector<bool> seen(n, false);
  std::vector<bool> tree_edge(m, false);
  std::queue<std::size_t> frontier;
  seen[0] = true;
  frontier.push(0);
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (auto e : incident[u]) {
      const auto s = net.source_index(e);
      const auto w = s == u ? net.target_index(e) : s;
      if (seen[w]) continue;
      seen[w] = true;
      parent_edge[w] = e;
      depth[w] = depth[u] + 1;
      tree_edge[e] = true;
      frontier.push(w);
    }
  }

  auto other_end = [&](std::size_t e, std::size_t j) {
    const auto s = net.source_index(e);
    return s == j ? net.target_index(e) : s;
  };
  // Flow travelling from bus `from` across line e.
  auto signed_along = [&](std::size_t e, std::size_t from) {
    return net.source_index(e) == from ? 1.0 : -1.0;
  };

  CycleBasis basis;
  for (std::size_t e = 0; e < m; ++e) {
    if (tree_edge[e]) continue;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    w[static_cast<Eigen::Index>(e)] = 1.0;
    // Close the loop: walk from the target back to the source through the tree.
    std::size_t a = net.target_index(e);
    std::size_t b = net.source_index(e);
    while (a != b) {
      if (depth[a] >= depth[b]) {
        const auto pe = parent_edge[a];
        w[static_cast<Eigen::Index>(pe)] += signed_along(pe, a);
        a = other_end(pe, a);
      } else {
        const auto pe = parent_edge[b];
        const auto up = other_end(pe, b);
        w[static_cast<Eigen::Index>(pe)] += signed_along(pe, up);
        b = up;
      }
    }
    basis.vectors.push_back(std::move(w));
  }
  return basis;
}

enum class ModeKind { ZeroCycle, Damping, OverdampedPair, OscillatoryPair, CriticalPair };

constexpr std::string_view to_string(ModeKind k) {
  switch (k) {
    case ModeKind::ZeroCycle: return "zero-cycle";
    case ModeKind::Damping: return "damping";
    case ModeKind::OverdampedPair: return "overdamped-pair-member";
    case ModeKind::OscillatoryPair: return "oscillatory-pair-member";
    case ModeKind::CriticalPair: return "critical-pair-member";
  }
  return "unknown";
}

struct SystemMode {
  Complex eigenvalue;
  Eigen::VectorXcd eigenvector;  // [omega-part; P-part], analytic (unnormalized) form
  ModeKind kind = ModeKind::ZeroCycle;
  std::optional<std::size_t> origin;  // Laplacian eigen-index (0-based)

  Eigen::VectorXcd normalized() const { return eigenvector.normalized(); }
};

struct ModeCatalog {
  std::vector<SystemMode> modes;
  CycleBasis cycles;
  double gamma = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
};

struct ModeOptions {
  // Emit the defective double root -gamma/2 (with its single eigenvector)
  // instead of throwing CriticalDamping.
  bool allow_critical = false;
};

inline bool is_critically_damped(double gamma, double lambda) {
  return std::abs(gamma * gamma - 4.0 * lambda) < 1e-9 * std::max(1.0, gamma * gamma);
}

/// phi_{i,±} = (-gamma ± sqrt(gamma^2 - 4 lambda_i)) / 2
inline std::pair<Complex, Complex> characteristic_roots(double gamma, double lambda) {
  const Complex root = std::sqrt(Complex(gamma * gamma - 4.0 * lambda, 0.0));
  return {(-gamma + root) / 2.0, (-gamma - root) / 2.0};
}

inline ModeCatalog theorem1_modes(const SpectralData& sd, double gamma, ModeOptions opts = {}) {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::DomainError, "gamma must be non-negative");
  const auto& net = sd.network;
  const std::size_t n = net.n();
  const std::size_t m = net.m();
  const auto ni = static_cast<Eigen::Index>(n);
  const auto mi = static_cast<Eigen::Index>(m);

  for (std::size_t i = 1; i < n; ++i)
    if (!opts.allow_critical && is_critically_damped(gamma, sd.eigenvalues[static_cast<Eigen::Index>(i)]))
      throw Error(ErrorCode::CriticalDamping, "gamma^2 = 4 lambda_" + std::to_string(i + 1));

  ModeCatalog cat;
  cat.gamma = gamma;
  cat.n = n;
  cat.m = m;
  cat.cycles = cycle_basis(net);

  for (const auto& w : cat.cycles.vectors) {
    SystemMode mode;
    mode.eigenvalue = 0.0;
    mode.eigenvector = Eigen::VectorXcd::Zero(ni + mi);
    mode.eigenvector.tail(mi) = w.cast<Complex>();
    mode.kind = ModeKind::ZeroCycle;
    cat.modes.push_back(std::move(mode));
  }

  const Eigen::MatrixXd flow_map = net.susceptance().asDiagonal() * incidence_matrix(net).transpose();
  {
    SystemMode mode;
    mode.eigenvalue = -gamma;
    mode.eigenvector = Eigen::VectorXcd::Zero(ni + mi);
    mode.eigenvector.head(ni) = sd.scaled_mode_shape(0).cast<Complex>();
    mode.kind = ModeKind::Damping;
    mode.origin = 0;
    cat.modes.push_back(std::move(mode));
  }

  for (std::size_t i = 1; i < n; ++i) {
    const double lambda = sd.eigenvalues[static_cast<Eigen::Index>(i)];
    const Eigen::VectorXd shape = sd.scaled_mode_shape(i);
    const Eigen::VectorXd flows = flow_map * shape;
    const bool critical = is_critically_damped(gamma, lambda);
    auto [plus, minus] = critical ? std::pair<Complex, Complex>{-gamma / 2.0, -gamma / 2.0}
                                  : characteristic_roots(gamma, lambda);
    const ModeKind kind = critical ? ModeKind::CriticalPair
                          : gamma * gamma > 4.0 * lambda ? ModeKind::OverdampedPair
                                                         : ModeKind::OscillatoryPair;
    for (Complex phi : {plus, minus}) {
      SystemMode mode;
      mode.eigenvalue = phi;
      mode.eigenvector.resize(ni + mi);
      mode.eigenvector.head(ni) = shape.cast<Complex>();
      mode.eigenvector.tail(mi) = flows.cast<Complex>() / phi;
      mode.kind = kind;
      mode.origin = i;
      cat.modes.push_back(std::move(mode));
    }
  }
  return cat;
}

/// ||A z - phi z||_2
inline double mode_residual(const Eigen::MatrixXd& a, const SystemMode& mode) {
  return (a.cast<Complex>() * mode.eigenvector - mode.eigenvalue * mode.eigenvector).norm();
}

struct StabilityReport {
  bool asymptotically_stable = false;
  std::string verdict;
  std::size_t persistent_dimension = 0;
  std::vector<Eigen::VectorXd> persistent_flows;
};

inline StabilityReport classify_stability(const ModeCatalog& cat) {
  StabilityReport r;
  r.persistent_dimension = cat.cycles.vectors.size();
  r.persistent_flows = cat.cycles.vectors;
  // Undamped systems keep their oscillatory modes on the imaginary axis.
  r.asymptotically_stable = cat.m + 1 == cat.n && cat.gamma > 0.0;
  r.verdict = r.asymptotically_stable ? "asymptotically stable" : "marginally stable";
  return r;
}

}  // namespace gridspec

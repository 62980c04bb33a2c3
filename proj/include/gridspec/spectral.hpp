#pragma once

// Scaled Laplacian L = M^{-1/2} C B C^T M^{-1/2}, its eigendecomposition by
// cyclic Jacobi rotations, eigenvalue monotonicity under the graph partial
// order, and input decomposition along M^{1/2} v_i.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridspec/error.hpp"
#include "gridspec/netmodel.hpp"

namespace gridspec {

inline Eigen::MatrixXd scaled_laplacian(const PowerNetwork& net) {
  const auto n = static_cast<Eigen::Index>(net.n());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  const Eigen::VectorXd m = net.inertia();
  for (std::size_t e = 0; e < net.m(); ++e) {
    const auto i = static_cast<Eigen::Index>(net.source_index(e));
    const auto j = static_cast<Eigen::Index>(net.target_index(e));
    const double b = net.lines()[e].susceptance;
    const double off = -b / std::sqrt(m[i] * m[j]);
    lap(i, j) += off;
    lap(j, i) += off;
    lap(i, i) += b / m[i];
    lap(j, j) += b / m[j];
  }
  return lap;
}

struct JacobiOptions {
  double relative_tolerance = 1e-13;  // on off-diagonal Frobenius norm vs ||L||_F
  int max_sweeps = 100;
  double cluster_gap = 1e-8;          // relative, for repeated-eigenvalue detection
};

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
  int sweeps = 0;
};

namespace detail {

inline double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

inline void jacobi_rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& v, Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = a(p, k) = c * akp - s * akq;
    a(k, q) = a(q, k) = s * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < v.rows(); ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

// Modified Gram-Schmidt on columns [first, last) in index order.
inline void reorthonormalize(Eigen::MatrixXd& v, Eigen::Index first, Eigen::Index last) {
  for (Eigen::Index k = first; k < last; ++k) {
    for (Eigen::Index prev = first; prev < k; ++prev)
      v.col(k) -= v.col(prev).dot(v.col(k)) * v.col(prev);
    v.col(k).normalize();
  }
}

inline void fix_sign(Eigen::Ref<Eigen::VectorXd> col) {
  for (Eigen::Index k = 0; k < col.size(); ++k) {
    if (std::abs(col[k]) > 1e-12) {
      if (col[k] < 0.0) col = -col;
      return;
    }
  }
}

}  // namespace detail

/// Full eigendecomposition of a dense symmetric matrix. Eigenvalues come out
/// ascending; each eigenvector has its first entry above 1e-12 in magnitude
/// made positive; bases of repeated eigenspaces are re-orthonormalized in
/// index order.
inline SymmetricEigen eigendecompose(const Eigen::MatrixXd& lap, const JacobiOptions& opts = {}) {
  if (lap.rows() != lap.cols())
    throw Error(ErrorCode::DimensionMismatch, "eigendecompose needs a square matrix");
  const Eigen::Index n = lap.rows();
  const double fro = lap.norm();
  if ((lap - lap.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, fro))
    throw Error(ErrorCode::DomainError, "eigendecompose needs a symmetric matrix");

  Eigen::MatrixXd a = lap;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double target = opts.relative_tolerance * fro;
  int sweep = 0;
  while (detail::off_diagonal_norm(a) > target) {
    if (sweep == opts.max_sweeps)
      throw Error(ErrorCode::ConvergenceFailure,
                  "Jacobi iteration did not converge in " + std::to_string(opts.max_sweeps) + " sweeps");
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
    ++sweep;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return a(x, x) < a(y, y); });

  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }

  const double scale = n > 0 ? std::max(1.0, std::abs(out.values[n - 1])) : 1.0;
  Eigen::Index start = 0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (k == n || out.values[k] - out.values[k - 1] > opts.cluster_gap * scale) {
      if (k - start > 1) detail::reorthonormalize(out.vectors, start, k);
      start = k;
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) detail::fix_sign(out.vectors.col(k));
  return out;
}

/// Spectrum of a network's scaled Laplacian together with the data needed to
/// map between bus coordinates and eigen-coordinates.
struct SpectralData {
  PowerNetwork network;
  Eigen::MatrixXd laplacian;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  std::size_t n() const { return network.n(); }
  double lambda_max() const { return eigenvalues.size() ? eigenvalues[eigenvalues.size() - 1] : 0.0; }
  double tolerance_scale() const { return std::max(1.0, lambda_max()); }

  Eigen::VectorXd sqrt_inertia() const { return network.inertia().cwiseSqrt(); }
  /// M^{-1/2} v_i
  Eigen::VectorXd scaled_mode_shape(std::size_t i) const {
    return eigenvectors.col(static_cast<Eigen::Index>(i)).cwiseQuotient(sqrt_inertia());
  }
};

inline SpectralData analyze_spectrum(const PowerNetwork& net, const JacobiOptions& opts = {}) {
  SpectralData sd;
  sd.network = net;
  sd.laplacian = scaled_laplacian(net);
  auto eig = eigendecompose(sd.laplacian, opts);
  sd.eigenvalues = std::move(eig.values);
  sd.eigenvectors = std::move(eig.vectors);
  return sd;
}

struct Lemma1Report {
  Eigen::VectorXd smaller;  // spectrum of g1
  Eigen::VectorXd larger;   // spectrum of g2
  bool holds = false;
  double max_violation = 0.0;  // max_i (lambda_i^1 - lambda_i^2)
};

/// Checks per-index eigenvalue dominance for g1 ⪯ g2 with shared inertia.
inline Lemma1Report verify_lemma1(const PowerNetwork& g1, const PowerNetwork& g2,
                                  double tolerance = 1e-9) {
  if (partial_order_leq(g1, g2) != PartialOrder::Leq)
    throw Error(ErrorCode::NotComparable, "first network is not ⪯ the second");
  for (std::size_t j = 0; j < g1.n(); ++j)
    if (g1.buses()[j].inertia != g2.buses()[j].inertia)
      throw Error(ErrorCode::NotComparable,
                  "inertia differs at bus " + std::to_string(g1.buses()[j].id));

  Lemma1Report r;
  r.smaller = eigendecompose(scaled_laplacian(g1)).values;
  r.larger = eigendecompose(scaled_laplacian(g2)).values;
  r.max_violation = (r.smaller - r.larger).maxCoeff();
  r.holds = r.max_violation <= tolerance;
  return r;
}

struct SpectralCoefficients {
  Eigen::VectorXd coefficients;  // ŝ_i
};

/// ŝ_i = v_i^T M^{-1/2} s, so that s = Σ ŝ_i M^{1/2} v_i.
inline SpectralCoefficients decompose_input(const SpectralData& sd, const Eigen::VectorXd& s) {
  if (static_cast<std::size_t>(s.size()) != sd.n())
    throw Error(ErrorCode::DimensionMismatch, "input has length " + std::to_string(s.size()) +
                                                  ", network has " + std::to_string(sd.n()) + " buses");
  return {sd.eigenvectors.transpose() * s.cwiseQuotient(sd.sqrt_inertia())};
}

inline Eigen::VectorXd reconstruct_input(const SpectralData& sd, const SpectralCoefficients& c) {
  return sd.sqrt_inertia().cwiseProduct(sd.eigenvectors * c.coefficients);
}

}  // namespace gridspec

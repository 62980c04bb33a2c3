#pragma once

// JSON reports with stable key order. Every report carries the tool version
// and the resolved configuration it was produced from.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridspec/control.hpp"
#include "gridspec/metrics.hpp"
#include "gridspec/modes.hpp"
#include "gridspec/sim.hpp"
#include "gridspec/spectral.hpp"

namespace gridspec {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "gridspec";
inline constexpr const char* kToolVersion = "1.0.0";

namespace detail {

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? number_or_null(*v) : Json(nullptr);
}

inline Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

inline Json bus_ids_json(const PowerNetwork& net) {
  Json a = Json::array();
  for (const auto& b : net.buses()) a.push_back(b.id);
  return a;
}

inline Json header(const std::string& report, Json config) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["report"] = report;
  j["config"] = std::move(config);
  return j;
}

}  // namespace detail

inline std::optional<double> try_uniform_gamma(const PowerNetwork& net) {
  try {
    return uniform_gamma(net);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonUniformDampingRatio) throw;
    return std::nullopt;
  }
}

/// eigenvalues ascending; eigenvectors[i] is v_i in bus order.
inline Json spectrum_report(const SpectralData& sd, Json config) {
  Json j = detail::header("spectrum", std::move(config));
  j["n"] = sd.n();
  j["m"] = sd.network.m();
  j["buses"] = detail::bus_ids_json(sd.network);
  j["gamma"] = detail::optional_json(try_uniform_gamma(sd.network));
  j["eigenvalues"] = detail::vector_json(sd.eigenvalues);
  Json vecs = Json::array();
  for (Eigen::Index i = 0; i < sd.eigenvectors.cols(); ++i) vecs.push_back(detail::vector_json(sd.eigenvectors.col(i)));
  j["eigenvectors"] = std::move(vecs);
  return j;
}

inline Json modes_report(const ModeCatalog& cat, const PowerNetwork& net, Json config) {
  Json j = detail::header("modes", std::move(config));
  j["n"] = cat.n;
  j["m"] = cat.m;
  j["gamma"] = cat.gamma;
  j["mode_count"] = cat.modes.size();
  j["zero_mode_count"] = cat.cycles.vectors.size();
  const auto st = classify_stability(cat);
  j["stability"] = {{"verdict", st.verdict},
                    {"asymptotically_stable", st.asymptotically_stable},
                    {"persistent_dimension", st.persistent_dimension}};
  Json lines = Json::array();
  for (const auto& l : net.lines()) lines.push_back(Json::array({l.source, l.target}));
  j["lines"] = std::move(lines);
  Json modes = Json::array();
  for (const auto& mode : cat.modes) {
    Json e;
    e["kind"] = to_string(mode.kind);
    e["eigenvalue"] = detail::complex_json(mode.eigenvalue);
    e["laplacian_index"] = mode.origin ? Json(*mode.origin) : Json(nullptr);
    Json vec = Json::array();
    for (Eigen::Index k = 0; k < mode.eigenvector.size(); ++k) vec.push_back(detail::complex_json(mode.eigenvector[k]));
    e["eigenvector"] = std::move(vec);
    modes.push_back(std::move(e));
  }
  j["modes"] = std::move(modes);
  return j;
}

inline Json metrics_report(const ModalResponse& mr, const PowerNetwork& net, double band, Json config) {
  Json j = detail::header("metrics", std::move(config));
  j["gamma"] = mr.gamma;
  j["band"] = band;
  Json modes = Json::array();
  for (std::size_t i = 0; i < mr.n(); ++i) {
    const auto mm = numeric_mode_metrics(mr, i, band);
    Json e;
    e["mode"] = i + 1;  // 1-based; mode 1 is the λ = 0 mode
    e["lambda"] = mr.modes[i].lambda;
    e["regime"] = to_string(mm.regime);
    e["nadir_table"] = detail::optional_json(mm.nadir_table);
    e["nadir_numeric"] = detail::number_or_null(mm.nadir_numeric);
    e["nadir_time"] = detail::number_or_null(mm.nadir_time);
    e["nadir_discrepancy"] = detail::optional_json(mm.nadir_discrepancy());
    e["settling_table"] = detail::optional_json(mm.settling_time_table);
    e["settling_numeric"] = detail::number_or_null(mm.settling_time_numeric);
    e["settling_discrepancy"] = detail::optional_json(mm.settling_discrepancy());
    e["settling_table_negative"] = mm.table_settling_negative();
    modes.push_back(std::move(e));
  }
  j["modes"] = std::move(modes);
  Json worst = Json::array();
  for (std::size_t b = 0; b < net.n(); ++b)
    worst.push_back({{"bus", net.buses()[b].id}, {"worst_case_nadir", worst_case_nadir(mr, b).value}});
  j["worst_case_nadir"] = std::move(worst);
  return j;
}

/// Scalar summary of one simulated run.
struct RunSummary {
  std::string label;
  double rms = 0.0;        // RMS of ω over buses and samples with t >= t_start
  double nadir = 0.0;      // max |ω_j(t)|
  BusId nadir_bus = 0;
  std::optional<double> settling_time;  // last time max_j |ω_j − ω_j(t_end)| > band; empty without samples
  std::vector<double> bus_rms;
};

inline RunSummary summarize_run(std::string label, const Trajectory& traj, double t_start, double band) {
  RunSummary s;
  s.label = std::move(label);
  const auto nb = static_cast<std::size_t>(traj.omega.cols());
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < nb; ++j) {
    s.bus_rms.push_back(measure_rms_deviation(traj, j, t_start));
    sum += s.bus_rms.back() * s.bus_rms.back();
    ++count;
  }
  s.rms = count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
  Eigen::Index row = 0, col = 0;
  s.nadir = traj.omega.size() ? traj.omega.cwiseAbs().maxCoeff(&row, &col) : 0.0;
  if (!traj.bus_ids.empty()) s.nadir_bus = traj.bus_ids[static_cast<std::size_t>(col)];
  if (traj.size() > 0) {
    s.settling_time = 0.0;  // never outside the band
    const Eigen::RowVectorXd last = traj.omega.row(traj.omega.rows() - 1);
    for (Eigen::Index k = traj.omega.rows() - 1; k >= 0; --k) {
      if ((traj.omega.row(k) - last).cwiseAbs().maxCoeff() > band) {
        s.settling_time = traj.times[static_cast<std::size_t>(k)];
        break;
      }
    }
  }
  return s;
}

inline Json compare_report(const std::vector<RunSummary>& runs, Json config) {
  Json j = detail::header("compare", std::move(config));
  Json rows = Json::array();
  for (const auto& r : runs) {
    Json e;
    e["controller"] = r.label;
    e["rms"] = r.rms;
    e["nadir"] = r.nadir;
    e["nadir_bus"] = r.nadir_bus;
    e["settling_time"] = detail::optional_json(r.settling_time);
    Json b = Json::array();
    for (double v : r.bus_rms) b.push_back(v);
    e["bus_rms"] = std::move(b);
    rows.push_back(std::move(e));
  }
  j["runs"] = std::move(rows);
  return j;
}

}  // namespace gridspec

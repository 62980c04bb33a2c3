// gridspec: command-line front end. JSON goes to stdout, CSV to --output
// (stdout when omitted). Exit codes: 0 success, 2 input or usage error,
// 3 numeric failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "gridspec/gridspec.hpp"

namespace fs = std::filesystem;
using namespace gridspec;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

// ---------------------------------------------------------------------------
// Case loading

struct CaseOptions {
  std::string path;
  std::string sidecar;
  std::optional<double> mu, delta, load_inertia, load_damping;
};

std::string resolve_case_path(const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::InvalidArgument, "--case is required");
  if (fs::exists(path) || fs::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv("GRIDSPEC_CASE_DIR")) {
    const auto candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

struct LoadedCase {
  std::string resolved_path;
  CaseDocument doc;
  PowerNetwork net;
};

LoadedCase load_case(const CaseOptions& o) {
  const auto path = resolve_case_path(o.path);
  const auto text = read_text_file(path);
  CaseDocument doc;
  if (fs::path(path).extension() == ".m") {
    DynamicsSpec dyn;
    if (!o.sidecar.empty()) dyn = parse_dynamics_sidecar(read_text_file(resolve_case_path(o.sidecar)));
    DynamicsSpec flags;
    if (o.mu || o.delta) {
      if (!(o.mu && o.delta)) throw Error(ErrorCode::InvalidArgument, "--mu and --delta go together");
      flags.proportional = BusDynamics{*o.mu, *o.delta};
    }
    if (o.load_inertia || o.load_damping) {
      if (!(o.load_inertia && o.load_damping))
        throw Error(ErrorCode::InvalidArgument, "--load-inertia and --load-damping go together");
      flags.load = BusDynamics{*o.load_inertia, *o.load_damping};
    }
    doc = parse_matpower_subset(text, dyn.merged_with(flags));
  } else {
    doc = parse_native_case(text);
  }
  auto net = to_network(doc);
  return {path, std::move(doc), std::move(net)};
}

Json case_config(const CaseOptions& o, const LoadedCase& lc) {
  Json j;
  j["case"] = o.path;
  j["sidecar"] = o.sidecar.empty() ? Json(nullptr) : Json(o.sidecar);
  j["mu"] = detail::optional_json(o.mu);
  j["delta"] = detail::optional_json(o.delta);
  j["load_inertia"] = detail::optional_json(o.load_inertia);
  j["load_damping"] = detail::optional_json(o.load_damping);
  j["n"] = lc.net.n();
  j["m"] = lc.net.m();
  return j;
}

void add_case_options(CLI::App* cmd, CaseOptions& o) {
  cmd->add_option("--case", o.path, "case file (.case native or .m MATPOWER); relative paths also "
                                    "searched in $GRIDSPEC_CASE_DIR")
      ->required();
  cmd->add_option("--sidecar", o.sidecar, "dynamics sidecar for MATPOWER cases");
  cmd->add_option("--mu", o.mu, "inertia per unit rating for generator buses (MATPOWER)");
  cmd->add_option("--delta", o.delta, "damping per unit rating for generator buses (MATPOWER)");
  cmd->add_option("--load-inertia", o.load_inertia, "inertia of non-generator buses (MATPOWER)");
  cmd->add_option("--load-damping", o.load_damping, "damping of non-generator buses (MATPOWER)");
}

// ---------------------------------------------------------------------------
// Small parsers

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, what + ": not a number '" + s + "'");
  }
}

Eigen::VectorXd parse_vector(const std::string& s, std::size_t n, const std::string& what) {
  const auto parts = split(s, ',');
  if (parts.size() != n)
    throw Error(ErrorCode::InvalidArgument,
                what + " needs " + std::to_string(n) + " comma-separated values (ascending bus id order)");
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) v[static_cast<Eigen::Index>(k)] = to_number(parts[k], what);
  return v;
}

BusId parse_bus(const std::string& s, const PowerNetwork& net) {
  const double v = to_number(s, "bus");
  const auto id = static_cast<BusId>(v);
  if (static_cast<double>(id) != v) throw Error(ErrorCode::InvalidArgument, "bus id must be an integer");
  net.index_of(id);  // throws UnknownBus
  return id;
}

/// "kind:key=value,key=value"
struct InputSpec {
  std::string kind;
  std::map<std::string, std::string> fields;
  std::string text;

  const std::string& need(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end()) throw Error(ErrorCode::InvalidArgument, "input '" + text + "' is missing " + key);
    return it->second;
  }
  std::optional<std::string> get(const std::string& key) const {
    auto it = fields.find(key);
    return it == fields.end() ? std::nullopt : std::optional(it->second);
  }
};

InputSpec parse_input_spec(const std::string& text) {
  InputSpec spec;
  spec.text = text;
  const auto colon = text.find(':');
  spec.kind = text.substr(0, colon);
  if (colon == std::string::npos) return spec;
  for (const auto& kv : split(text.substr(colon + 1), ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::InvalidArgument, "input '" + text + "': expected key=value, got '" + kv + "'");
    spec.fields[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return spec;
}

void check_keys(const InputSpec& spec, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : spec.fields) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw Error(ErrorCode::InvalidArgument, "input '" + spec.text + "': unknown key '" + k + "'");
  }
}

double angular_frequency(const InputSpec& spec) {
  const auto sigma = spec.get("sigma"), hz = spec.get("hz");
  if (sigma && hz) throw Error(ErrorCode::InvalidArgument, "input '" + spec.text + "': give sigma or hz, not both");
  if (hz) return 2.0 * std::numbers::pi * to_number(*hz, "hz");
  return to_number(spec.need("sigma"), "sigma");
}

std::vector<InputSignal> build_inputs(const std::vector<std::string>& specs, const PowerNetwork& net,
                                      std::uint64_t seed) {
  std::vector<InputSignal> out;
  std::uint64_t noise_index = 0;
  for (const auto& text : specs) {
    const auto spec = parse_input_spec(text);
    if (spec.kind == "step") {
      check_keys(spec, {"bus", "value"});
      Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.n()));
      s[static_cast<Eigen::Index>(net.index_of(parse_bus(spec.need("bus"), net)))] = to_number(spec.need("value"), "value");
      out.emplace_back(StepInput{s});
    } else if (spec.kind == "sine") {
      check_keys(spec, {"bus", "amplitude", "sigma", "hz"});
      out.emplace_back(SinusoidInput{parse_bus(spec.need("bus"), net), to_number(spec.need("amplitude"), "amplitude"),
                                     angular_frequency(spec)});
    } else if (spec.kind == "spectral-sine") {
      check_keys(spec, {"mode", "amplitude", "sigma", "hz"});
      const double mode = to_number(spec.need("mode"), "mode");
      if (mode < 1 || mode != std::floor(mode) || mode > static_cast<double>(net.n()))
        throw Error(ErrorCode::InvalidArgument, "mode must be an integer in 1..n");
      out.emplace_back(SpectralSinusoidInput{static_cast<std::size_t>(mode) - 1,
                                             to_number(spec.need("amplitude"), "amplitude"), angular_frequency(spec)});
    } else if (spec.kind == "noise") {
      check_keys(spec, {"bus", "power", "seed", "rate"});
      GaussianNoiseInput g;
      g.bus = parse_bus(spec.need("bus"), net);
      if (auto p = spec.get("power")) g.power_dbw = *p == "-inf" ? -std::numeric_limits<double>::infinity() : to_number(*p, "power");
      if (auto r = spec.get("rate")) g.sample_rate = to_number(*r, "rate");
      g.seed = spec.get("seed") ? static_cast<std::uint64_t>(to_number(*spec.get("seed"), "seed")) : seed + noise_index;
      ++noise_index;
      out.emplace_back(g);
    } else if (spec.kind == "profile") {
      check_keys(spec, {"bus", "file", "interp"});
      ProfileInterpolation interp = ProfileInterpolation::Hold;
      if (auto i = spec.get("interp")) {
        if (*i == "linear") interp = ProfileInterpolation::Linear;
        else if (*i != "hold") throw Error(ErrorCode::InvalidArgument, "interp must be hold or linear");
      }
      out.emplace_back(load_profile_csv(resolve_case_path(spec.need("file")), parse_bus(spec.need("bus"), net), interp));
    } else {
      throw Error(ErrorCode::InvalidArgument,
                  "unknown input kind '" + spec.kind + "' (step, sine, spectral-sine, noise, profile)");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Controllers

struct ControlOptions {
  std::optional<double> kp_scale, kd_scale, filter_tc;
  bool replace_droop = false;
  std::string derivative = "sampled";
};

void add_control_options(CLI::App* cmd, ControlOptions& o) {
  cmd->add_option("--kp-scale", o.kp_scale, "K_p = kp_scale * D (default: case file, else 1)");
  cmd->add_option("--kd-scale", o.kd_scale, "K_d = kd_scale * D for pd (default: case file, else 0.5)");
  cmd->add_option("--filter-tc", o.filter_tc, "derivative filter time constant in seconds (default: case, else 0.05)");
  cmd->add_flag("--replace-droop", o.replace_droop,
                "for proportional/pd: remove droop (D = 0) and let the load-side controller supply it");
  cmd->add_option("--derivative", o.derivative, "pd derivative path: sampled or ideal")
      ->check(CLI::IsMember({"sampled", "ideal"}));
}

struct Scenario {
  std::string label;
  PowerNetwork physics;
  ControllerSpec ctrl;
};

Scenario make_scenario(const std::string& kind_text, const LoadedCase& lc, const ControlOptions& o) {
  const auto kind = parse_controller_kind(kind_text);
  const auto& defaults = lc.doc.controller;
  const double kp = o.kp_scale.value_or(defaults && defaults->kp_scale > 0 ? defaults->kp_scale : 1.0);
  const double kd = o.kd_scale.value_or(defaults && defaults->kd_scale > 0 ? defaults->kd_scale : 0.5);
  const double tc = o.filter_tc.value_or(defaults ? defaults->filter_tc : kDefaultDerivativeFilter);
  Scenario sc{std::string(to_string(kind)), lc.net, droop_only()};
  if (kind == ControllerKind::DroopOnly) return sc;
  if (!(kp >= 0.0) || !(kd >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gain scales must be >= 0");
  if (kind == ControllerKind::ProportionalDerivative && !(kd > 0.0))
    throw Error(ErrorCode::InvalidArgument, "pd needs --kd-scale > 0");
  sc.ctrl = gains_proportional_to_damping(lc.net, kp, kind == ControllerKind::ProportionalDerivative ? kd : 0.0);
  sc.ctrl.kind = kind;
  if (kind == ControllerKind::Proportional && sc.ctrl.kp.size() == 0)
    sc.ctrl.kp = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lc.net.n()));
  sc.ctrl.derivative_filter_tc = tc;
  if (o.replace_droop) sc.physics = without_droop(lc.net);
  return sc;
}

Json control_config(const ControlOptions& o) {
  Json j;
  j["kp_scale"] = detail::optional_json(o.kp_scale);
  j["kd_scale"] = detail::optional_json(o.kd_scale);
  j["filter_tc"] = detail::optional_json(o.filter_tc);
  j["replace_droop"] = o.replace_droop;
  j["derivative"] = o.derivative;
  return j;
}

// ---------------------------------------------------------------------------
// Output

struct OutputOptions {
  std::string path;
};

void emit_text(const std::string& text, const OutputOptions& out) {
  if (out.path.empty() || out.path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + out.path);
  f << text;
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + out.path);
}

void emit_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

void check_time_grid(double t_end, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "--dt must be > 0");
  if (!(t_end >= dt)) throw Error(ErrorCode::InvalidArgument, "--t-end must be >= --dt");
}

std::vector<std::size_t> parse_modes(const std::string& s, std::size_t n) {
  std::vector<std::size_t> out;
  if (s.empty()) {
    for (std::size_t i = 1; i < n; ++i) out.push_back(i);
    return out;
  }
  for (const auto& part : split(s, ',')) {
    const double v = to_number(part, "mode");
    if (v < 1 || v > static_cast<double>(n) || v != std::floor(v))
      throw Error(ErrorCode::InvalidArgument, "mode must be an integer in 1.." + std::to_string(n));
    out.push_back(static_cast<std::size_t>(v) - 1);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis and simulation of linearized swing dynamics"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1, 1);

  CaseOptions co;
  ControlOptions ctl;
  OutputOptions out;
  double t_end = 10.0, dt = 1e-3, band = kDefaultBand;
  std::uint64_t seed = 0;
  bool allow_critical = false, oracle = false;
  std::string step_values, modes_arg, controller = "droop", controllers_arg;
  std::vector<std::string> inputs;
  std::optional<BusId> bode_bus;
  double sigma_min = 1e-2, sigma_max = 1e2;
  int ppd = 400;
  std::optional<double> damping_override, t_start;
  std::size_t stride = 1;

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and eigenvectors of the scaled Laplacian (JSON)");
  add_case_options(spectrum, co);

  auto* modes = app.add_subcommand("modes", "system modes and stability verdict (JSON)");
  add_case_options(modes, co);
  modes->add_flag("--allow-critical", allow_critical, "report critically damped pairs instead of failing");

  auto* step = app.add_subcommand("step", "closed-form step response (CSV)");
  add_case_options(step, co);
  step->add_option("--s", step_values, "step input per bus, comma separated in ascending bus id order")->required();
  step->add_option("--t-end", t_end, "final time in seconds");
  step->add_option("--dt", dt, "time step in seconds");
  step->add_flag("--oracle", oracle, "also simulate and append closed-form minus simulation columns");
  step->add_option("-o,--output", out.path, "CSV path (default stdout)");

  auto* bode = app.add_subcommand("bode", "bus gain curves and intrinsic frequencies (CSV)");
  add_case_options(bode, co);
  bode->add_option("--bus", bode_bus, "bus id")->required();
  bode->add_option("--modes", modes_arg, "1-based mode numbers, comma separated (default 2..n)");
  bode->add_option("--sigma-min", sigma_min, "lowest angular frequency, rad/s");
  bode->add_option("--sigma-max", sigma_max, "highest angular frequency, rad/s");
  bode->add_option("--points-per-decade", ppd, "logarithmic grid density");
  bode->add_option("--damping", damping_override, "override the bus damping D_j");
  bode->add_option("-o,--output", out.path, "CSV path (default stdout)");

  auto* metrics = app.add_subcommand("metrics", "tabulated and numeric per-mode nadir and settling, worst-case nadir (JSON)");
  add_case_options(metrics, co);
  metrics->add_option("--band", band, "settling band half-width c");

  auto* simulate_cmd = app.add_subcommand("simulate", "time-domain simulation (CSV)");
  add_case_options(simulate_cmd, co);
  add_control_options(simulate_cmd, ctl);
  simulate_cmd->add_option("--controller", controller, "droop, proportional or pd")
      ->check(CLI::IsMember({"droop", "proportional", "pd"}));
  simulate_cmd->add_option("--input", inputs,
                           "repeatable: step:bus=,value= | sine:bus=,amplitude=,sigma=|hz= | "
                           "spectral-sine:mode=,amplitude=,sigma= | noise:bus=,power=,seed=,rate= | "
                           "profile:bus=,file=,interp=hold|linear");
  simulate_cmd->add_option("--seed", seed, "seed for noise inputs without their own");
  simulate_cmd->add_option("--t-end", t_end, "final time in seconds");
  simulate_cmd->add_option("--dt", dt, "RK4 step in seconds");
  simulate_cmd->add_option("--stride", stride, "record every k-th step");
  simulate_cmd->add_option("-o,--output", out.path, "CSV path (default stdout)");

  auto* compare = app.add_subcommand("compare", "run several controllers on one scenario (JSON)");
  add_case_options(compare, co);
  add_control_options(compare, ctl);
  compare->add_option("--controllers", controllers_arg, "comma separated list, e.g. droop,proportional,pd")
      ->required();
  compare->add_option("--input", inputs, "as for simulate");
  compare->add_option("--seed", seed, "seed for noise inputs without their own");
  compare->add_option("--t-end", t_end, "final time in seconds");
  compare->add_option("--dt", dt, "RK4 step in seconds");
  compare->add_option("--t-start", t_start, "start of the RMS window (default t_end / 2)");
  compare->add_option("--band", band, "settling band half-width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    const auto lc = load_case(co);
    Json config = case_config(co, lc);

    if (spectrum->parsed()) {
      emit_json(spectrum_report(analyze_spectrum(lc.net), config));
    } else if (modes->parsed()) {
      config["allow_critical"] = allow_critical;
      const auto sd = analyze_spectrum(lc.net);
      emit_json(modes_report(theorem1_modes(sd, uniform_gamma(lc.net), {.allow_critical = allow_critical}), lc.net,
                             config));
    } else if (step->parsed()) {
      check_time_grid(t_end, dt);
      const auto s = parse_vector(step_values, lc.net.n(), "--s");
      const auto mr = modal_response(lc.net, s);
      const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
      std::vector<double> times(steps + 1);
      for (std::size_t k = 0; k <= steps; ++k) times[k] = static_cast<double>(k) * dt;
      auto traj = step_response(mr, times);
      traj.set_labels(lc.net, false);
      std::vector<ExtraColumn> extra;
      if (oracle) {
        SimOptions opts;
        opts.dt = dt;
        opts.t_end = t_end;
        const auto sim = simulate(lc.net, droop_only(), {StepInput{s}},
                                  Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lc.net.n() + lc.net.m())), opts);
        const Eigen::MatrixXd diff = traj.omega - sim.omega;
        for (std::size_t j = 0; j < lc.net.n(); ++j)
          extra.push_back({"diff_omega_" + std::to_string(lc.net.buses()[j].id), diff.col(static_cast<Eigen::Index>(j))});
        std::ostringstream os;
        os << format_g12(diff.cwiseAbs().maxCoeff());
        traj.set_meta("oracle_max_abs_diff", os.str());
      }
      traj.set_meta("case", co.path);
      traj.set_meta("input", describe(StepInput{s}));
      emit_text(format_trajectory_csv(traj, extra), out);
    } else if (bode->parsed()) {
      if (!(sigma_min > 0.0) || !(sigma_max > sigma_min) || ppd < 1)
        throw Error(ErrorCode::InvalidArgument, "need 0 < --sigma-min < --sigma-max and --points-per-decade >= 1");
      const auto sd = analyze_spectrum(lc.net);
      const auto bus = lc.net.index_of(*bode_bus);
      const auto grid = log_grid(sigma_min, sigma_max, ppd);
      std::vector<GainCurve> curves;
      for (auto i : parse_modes(modes_arg, lc.net.n())) curves.push_back(gain_curve(sd, i, bus, grid, damping_override));
      std::ostringstream os;
      os << "# case: " << co.path << "\n# bus: " << *bode_bus << "\n";
      os << "# damping: " << format_g12(damping_override.value_or(lc.net.buses()[bus].damping)) << "\n";
      for (const auto& c : curves) {
        const auto label = "mode_" + std::to_string(c.mode + 1);
        const auto peak = std::max_element(c.gain.begin(), c.gain.end()) - c.gain.begin();
        os << "# lambda_bar_" << label << ": " << format_g12(c.lambda_bar) << "\n";
        os << "# sigma_star_" << label << ": " << (c.sigma_star ? format_g12(*c.sigma_star) : "none") << "\n";
        os << "# grid_peak_" << label << ": " << format_g12(c.sigma[static_cast<std::size_t>(peak)]) << "\n";
      }
      os << "sigma";
      for (const auto& c : curves) os << ",gain_mode_" << c.mode + 1;
      os << "\n";
      for (std::size_t k = 0; k < grid.size(); ++k) {
        os << format_g12(grid[k]);
        for (const auto& c : curves) os << "," << format_g12(c.gain[k]);
        os << "\n";
      }
      emit_text(os.str(), out);
    } else if (metrics->parsed()) {
      config["band"] = band;
      if (!(band > 0.0)) throw Error(ErrorCode::NonPositiveBand, "--band must be > 0");
      const auto mr = modal_response(lc.net, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lc.net.n())));
      emit_json(metrics_report(mr, lc.net, band, config));
    } else if (simulate_cmd->parsed()) {
      check_time_grid(t_end, dt);
      const auto sc = make_scenario(controller, lc, ctl);
      SimOptions opts;
      opts.dt = dt;
      opts.t_end = t_end;
      opts.record_stride = stride;
      opts.derivative = ctl.derivative == "ideal" ? DerivativeMode::Ideal : DerivativeMode::Sampled;
      auto traj = simulate(sc.physics, sc.ctrl, build_inputs(inputs, lc.net, seed),
                           Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lc.net.n() + lc.net.m())), opts);
      traj.set_meta("case", co.path);
      if (ctl.replace_droop && sc.ctrl.has_feedback()) traj.set_meta("droop", "replaced");
      emit_text(format_trajectory_csv(traj), out);
    } else if (compare->parsed()) {
      check_time_grid(t_end, dt);
      std::vector<std::string> kinds;
      for (const auto& k : split(controllers_arg, ','))
        if (!k.empty()) kinds.push_back(k);
      if (kinds.empty()) throw Error(ErrorCode::InvalidArgument, "--controllers needs at least one controller");
      const double window = t_start.value_or(t_end / 2.0);
      const auto signals = build_inputs(inputs, lc.net, seed);
      std::vector<Scenario> scenarios;
      for (const auto& k : kinds) scenarios.push_back(make_scenario(k, lc, ctl));
      SimOptions opts;
      opts.dt = dt;
      opts.t_end = t_end;
      opts.derivative = ctl.derivative == "ideal" ? DerivativeMode::Ideal : DerivativeMode::Sampled;
      std::vector<std::future<RunSummary>> cells;
      for (const auto& sc : scenarios)
        cells.push_back(std::async(std::launch::async, [&, sc] {
          const auto traj = simulate(sc.physics, sc.ctrl, signals,
                                     Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lc.net.n() + lc.net.m())), opts);
          return summarize_run(sc.label, traj, window, band);
        }));
      std::vector<RunSummary> runs;
      for (auto& f : cells) runs.push_back(f.get());
      config["controllers"] = kinds;
      config["control"] = control_config(ctl);
      config["inputs"] = inputs;
      config["seed"] = seed;
      config["t_end"] = t_end;
      config["dt"] = dt;
      config["t_start"] = window;
      config["band"] = band;
      emit_json(compare_report(runs, config));
    }
  } catch (const Error& e) {
    std::cerr << "gridspec: " << e.what() << "\n";
    return e.category() == ErrorCategory::Input ? kExitInput : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "gridspec: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}

#pragma once

// Case files and trajectory output.
//
// Native case format (line oriented, '#' starts a comment):
//
//   gridspec-case 1
//   base_mva 100
//   bus 1 inertia=0.2 damping=1 rating=1
//   line 1 2 susceptance=10
//   controller kind=pd kp_scale=1 kd_scale=0.5 filter_tc=0.05
//
// Dynamics sidecar (fills M, D for cases that carry none):
//
//   gridspec-dynamics 1
//   bus 30 inertia=0.1 damping=1
//   proportional mu=0.1 delta=1     # generator buses: M = f mu, D = f delta
//   load inertia=0.01 damping=0.1   # all non-generator buses
//
// MATPOWER subset: the numeric matrices mpc.bus, mpc.branch, mpc.gen and the
// scalar mpc.baseMVA; everything else in the script is ignored.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gridspec/control.hpp"
#include "gridspec/error.hpp"
#include "gridspec/netmodel.hpp"
#include "gridspec/trajectory.hpp"

namespace gridspec {

inline constexpr int kNativeCaseVersion = 1;
inline constexpr int kDynamicsVersion = 1;

struct ControllerDefaults {
  ControllerKind kind = ControllerKind::DroopOnly;
  double kp_scale = 0.0;
  double kd_scale = 0.0;
  double filter_tc = kDefaultDerivativeFilter;

  friend bool operator==(const ControllerDefaults&, const ControllerDefaults&) = default;
};

struct CaseDocument {
  int version = kNativeCaseVersion;
  std::optional<double> base_mva;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::optional<ControllerDefaults> controller;

  friend bool operator==(const CaseDocument&, const CaseDocument&) = default;
};

inline PowerNetwork to_network(const CaseDocument& doc, BuildOptions opts = {}) {
  return build_network(doc.buses, doc.lines, opts);
}

inline CaseDocument to_document(const PowerNetwork& net) {
  CaseDocument doc;
  doc.buses = net.buses();
  doc.lines = net.lines();
  return doc;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

struct Token {
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;  // 1-based
};

inline std::string at(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

inline std::vector<std::vector<Token>> tokenize_lines(std::string_view text) {
  std::vector<std::vector<Token>> out;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i >= line.size()) break;
      const auto start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
      toks.push_back({std::string(line.substr(start, i - start)), lineno, start + 1});
    }
    if (!toks.empty()) out.push_back(std::move(toks));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

inline double parse_number(const std::string& s, std::size_t line, std::size_t column) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
    throw Error(ErrorCode::SyntaxError, at(line, column) + ": expected a number, got '" + s + "'");
  return v;
}

inline long long parse_integer(const Token& t) {
  long long v = 0;
  auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
    throw Error(ErrorCode::SyntaxError, at(t.line, t.column) + ": expected an integer, got '" + t.text + "'");
  return v;
}

// key=value attributes following the positional tokens of a directive.
class Attributes {
 public:
  Attributes(const std::vector<Token>& toks, std::size_t first, std::set<std::string> allowed)
      : allowed_(std::move(allowed)) {
    for (std::size_t k = first; k < toks.size(); ++k) {
      const auto& t = toks[k];
      const auto eq = t.text.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == t.text.size())
        throw Error(ErrorCode::SyntaxError, at(t.line, t.column) + ": expected key=value, got '" + t.text + "'");
      auto key = t.text.substr(0, eq);
      if (!allowed_.count(key))
        throw Error(ErrorCode::SchemaViolation, at(t.line, t.column) + ": unknown key '" + key + "'");
      if (values_.count(key))
        throw Error(ErrorCode::SchemaViolation, at(t.line, t.column) + ": key '" + key + "' given twice");
      values_[key] = {t.text.substr(eq + 1), t.line, t.column + eq + 1};
    }
    if (!toks.empty()) where_ = {toks[0].text, toks[0].line, toks[0].column};
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double number(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
      throw Error(ErrorCode::SchemaViolation,
                  at(where_.line, where_.column) + ": '" + where_.text + "' is missing '" + key + "'");
    return parse_number(it->second.text, it->second.line, it->second.column);
  }
  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }
  const Token* raw(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

 private:
  std::set<std::string> allowed_;
  std::map<std::string, Token> values_;
  Token where_;
};

inline void expect_header(const std::vector<std::vector<Token>>& lines, std::string_view keyword, int version) {
  if (lines.empty() || lines[0][0].text != keyword)
    throw Error(ErrorCode::SyntaxError,
                (lines.empty() ? std::string("line 1, column 1") : at(lines[0][0].line, lines[0][0].column)) +
                    ": expected header '" + std::string(keyword) + " <version>'");
  const auto& h = lines[0];
  if (h.size() != 2)
    throw Error(ErrorCode::SyntaxError, at(h[0].line, h[0].column) + ": header takes exactly one version number");
  const auto v = parse_integer(h[1]);
  if (v != version)
    throw Error(ErrorCode::VersionUnsupported,
                at(h[1].line, h[1].column) + ": version " + h[1].text + " (supported: " + std::to_string(version) + ")");
}

}  // namespace detail

inline CaseDocument parse_native_case(std::string_view text) {
  using namespace detail;
  const auto lines = tokenize_lines(text);
  expect_header(lines, "gridspec-case", kNativeCaseVersion);

  CaseDocument doc;
  std::set<BusId> bus_ids;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& toks = lines[k];
    const auto& head = toks[0];
    if (head.text == "base_mva") {
      if (toks.size() != 2) throw Error(ErrorCode::SyntaxError, at(head.line, head.column) + ": base_mva takes one value");
      if (doc.base_mva) throw Error(ErrorCode::SchemaViolation, at(head.line, head.column) + ": base_mva given twice");
      doc.base_mva = parse_number(toks[1].text, toks[1].line, toks[1].column);
    } else if (head.text == "bus") {
      if (toks.size() < 2) throw Error(ErrorCode::SyntaxError, at(head.line, head.column) + ": bus needs an id");
      Bus b;
      b.id = parse_integer(toks[1]);
      if (!bus_ids.insert(b.id).second)
        throw Error(ErrorCode::SchemaViolation,
                    at(toks[1].line, toks[1].column) + ": duplicate bus id " + std::to_string(b.id));
      Attributes attrs(toks, 2, {"inertia", "damping", "rating"});
      b.inertia = attrs.number("inertia");
      b.damping = attrs.number("damping");
      b.rating = attrs.optional_number("rating");
      doc.buses.push_back(b);
    } else if (head.text == "line") {
      if (toks.size() < 3) throw Error(ErrorCode::SyntaxError, at(head.line, head.column) + ": line needs two bus ids");
      Line l;
      l.source = parse_integer(toks[1]);
      l.target = parse_integer(toks[2]);
      for (std::size_t e : {std::size_t{1}, std::size_t{2}})
        if (!bus_ids.count(parse_integer(toks[e])))
          throw Error(ErrorCode::SchemaViolation,
                      at(toks[e].line, toks[e].column) + ": line references undeclared bus " + toks[e].text);
      Attributes attrs(toks, 3, {"susceptance"});
      l.susceptance = attrs.number("susceptance");
      doc.lines.push_back(l);
    } else if (head.text == "controller") {
      if (doc.controller)
        throw Error(ErrorCode::SchemaViolation, at(head.line, head.column) + ": controller given twice");
      Attributes attrs(toks, 1, {"kind", "kp_scale", "kd_scale", "filter_tc"});
      ControllerDefaults c;
      if (const auto* kind = attrs.raw("kind")) {
        try {
          c.kind = parse_controller_kind(kind->text);
        } catch (const Error&) {
          throw Error(ErrorCode::SchemaViolation, at(kind->line, kind->column) + ": unknown controller kind '" +
                                                      kind->text + "'");
        }
      }
      c.kp_scale = attrs.optional_number("kp_scale").value_or(0.0);
      c.kd_scale = attrs.optional_number("kd_scale").value_or(0.0);
      c.filter_tc = attrs.optional_number("filter_tc").value_or(kDefaultDerivativeFilter);
      doc.controller = c;
    } else {
      throw Error(ErrorCode::SchemaViolation, at(head.line, head.column) + ": unknown directive '" + head.text + "'");
    }
  }
  if (doc.buses.empty()) throw Error(ErrorCode::SchemaViolation, "case declares no buses");
  return doc;
}

inline std::string serialize_native_case(const CaseDocument& doc) {
  std::ostringstream os;
  os << "gridspec-case " << doc.version << "\n";
  if (doc.base_mva) os << "base_mva " << format_double(*doc.base_mva) << "\n";
  for (const auto& b : doc.buses) {
    os << "bus " << b.id << " inertia=" << format_double(b.inertia) << " damping=" << format_double(b.damping);
    if (b.rating) os << " rating=" << format_double(*b.rating);
    os << "\n";
  }
  for (const auto& l : doc.lines)
    os << "line " << l.source << " " << l.target << " susceptance=" << format_double(l.susceptance) << "\n";
  if (doc.controller) {
    const auto& c = *doc.controller;
    os << "controller kind=" << to_string(c.kind) << " kp_scale=" << format_double(c.kp_scale)
       << " kd_scale=" << format_double(c.kd_scale) << " filter_tc=" << format_double(c.filter_tc) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Dynamics sidecar

struct BusDynamics {
  double inertia = 0.0;
  double damping = 0.0;
};

struct DynamicsSpec {
  std::map<BusId, BusDynamics> per_bus;
  std::optional<BusDynamics> proportional;  // (mu, delta) per unit rating
  std::optional<BusDynamics> load;          // non-generator default

  /// Fields set in `over` win.
  DynamicsSpec merged_with(const DynamicsSpec& over) const {
    DynamicsSpec out = *this;
    for (const auto& [id, d] : over.per_bus) out.per_bus[id] = d;
    if (over.proportional) out.proportional = over.proportional;
    if (over.load) out.load = over.load;
    return out;
  }
};

inline DynamicsSpec parse_dynamics_sidecar(std::string_view text) {
  using namespace detail;
  const auto lines = tokenize_lines(text);
  expect_header(lines, "gridspec-dynamics", kDynamicsVersion);
  DynamicsSpec spec;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& toks = lines[k];
    const auto& head = toks[0];
    if (head.text == "bus") {
      if (toks.size() < 2) throw Error(ErrorCode::SyntaxError, at(head.line, head.column) + ": bus needs an id");
      const auto id = parse_integer(toks[1]);
      if (spec.per_bus.count(id))
        throw Error(ErrorCode::SchemaViolation, at(toks[1].line, toks[1].column) + ": duplicate bus id " + toks[1].text);
      Attributes attrs(toks, 2, {"inertia", "damping"});
      spec.per_bus[id] = {attrs.number("inertia"), attrs.number("damping")};
    } else if (head.text == "proportional") {
      Attributes attrs(toks, 1, {"mu", "delta"});
      spec.proportional = BusDynamics{attrs.number("mu"), attrs.number("delta")};
    } else if (head.text == "load") {
      Attributes attrs(toks, 1, {"inertia", "damping"});
      spec.load = BusDynamics{attrs.number("inertia"), attrs.number("damping")};
    } else {
      throw Error(ErrorCode::SchemaViolation, at(head.line, head.column) + ": unknown directive '" + head.text + "'");
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// MATPOWER subset

struct MatpowerBus {
  BusId id = 0;
  int type = 1;
};
struct MatpowerBranch {
  BusId from = 0, to = 0;
  double reactance = 0.0;
  bool in_service = true;
  std::size_t line = 0;  // source line of the row
};
struct MatpowerGen {
  BusId bus = 0;
  double mva_base = 0.0;
  bool in_service = true;
};

struct MatpowerSubset {
  double base_mva = 100.0;
  std::vector<MatpowerBus> buses;
  std::vector<MatpowerBranch> branches;
  std::vector<MatpowerGen> gens;
};

namespace detail {

struct MatrixRow {
  std::vector<double> values;
  std::size_t line = 0;
  std::size_t column = 0;
};

class MatlabScanner {
 public:
  explicit MatlabScanner(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  std::size_t line() const { return line_; }
  std::size_t column() const { return pos_ - line_start_ + 1; }
  char peek() const { return done() ? '\0' : text_[pos_]; }

  void advance() {
    if (done()) return;
    if (text_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void skip_comment() {
    while (!done() && peek() != '\n') advance();
  }

  // Skips blanks and comments; newlines too unless `stop_at_newline`.
  void skip_space(bool stop_at_newline) {
    while (!done()) {
      const char c = peek();
      if (c == '%') {
        skip_comment();
      } else if (c == '.' && text_.substr(pos_, 3) == "...") {
        // continuation: ignore the rest of the line and the newline
        skip_comment();
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || (c == '\n' && !stop_at_newline)) {
        advance();
      } else {
        break;
      }
    }
  }

  void skip_string() {
    advance();  // opening quote
    while (!done() && peek() != '\'' && peek() != '\n') advance();
    advance();
  }

  std::string identifier() {
    std::string id;
    while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
      id += peek();
      advance();
    }
    return id;
  }

  std::string number_token() {
    std::string tok;
    while (!done()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ',' || c == ';' || c == ']' || c == '%') break;
      tok += c;
      advance();
    }
    return tok;
  }

  std::string where() const { return at(line_, column()); }

  std::vector<MatrixRow> matrix(const std::string& name) {
    const auto open_line = line_;
    const auto open_col = column();
    if (peek() != '[') throw Error(ErrorCode::MalformedMatrix, where() + ": mpc." + name + " expected '['");
    advance();
    std::vector<MatrixRow> rows;
    MatrixRow row;
    auto flush = [&] {
      if (row.values.empty()) return;
      if (!rows.empty() && rows.front().values.size() != row.values.size())
        throw Error(ErrorCode::MalformedMatrix, at(row.line, row.column) + ": mpc." + name + " row has " +
                                                    std::to_string(row.values.size()) + " columns, expected " +
                                                    std::to_string(rows.front().values.size()));
      rows.push_back(std::move(row));
      row = {};
    };
    while (true) {
      skip_space(true);
      if (done())
        throw Error(ErrorCode::MalformedMatrix, at(open_line, open_col) + ": mpc." + name + " has no closing ']'");
      const char c = peek();
      if (c == ']') {
        advance();
        flush();
        return rows;
      }
      if (c == ';' || c == '\n') {
        advance();
        flush();
        continue;
      }
      if (c == ',') {
        advance();
        continue;
      }
      const auto l = line_;
      const auto col = column();
      const auto tok = number_token();
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (tok.empty() || end != tok.c_str() + tok.size())
        throw Error(ErrorCode::MalformedMatrix, at(l, col) + ": mpc." + name + " non-numeric entry '" + tok + "'");
      if (row.values.empty()) {
        row.line = l;
        row.column = col;
      }
      row.values.push_back(v);
    }
  }

  double scalar(const std::string& name) {
    skip_space(true);
    const auto l = line_;
    const auto col = column();
    const auto tok = number_token();
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size())
      throw Error(ErrorCode::MalformedMatrix, at(l, col) + ": mpc." + name + " expected a number, got '" + tok + "'");
    return v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

inline const MatrixRow& check_columns(const MatrixRow& row, std::size_t needed, const std::string& name) {
  if (row.values.size() < needed)
    throw Error(ErrorCode::MalformedMatrix, at(row.line, row.column) + ": mpc." + name + " needs at least " +
                                                std::to_string(needed) + " columns");
  return row;
}

inline BusId as_bus_id(double v, const MatrixRow& row) {
  if (v != std::floor(v) || v < 0)
    throw Error(ErrorCode::MalformedMatrix, at(row.line, row.column) + ": bus number must be a non-negative integer");
  return static_cast<BusId>(v);
}

}  // namespace detail

/// Extracts the mpc.bus / mpc.branch / mpc.gen matrices and mpc.baseMVA.
inline MatpowerSubset parse_matpower_tables(std::string_view text) {
  detail::MatlabScanner sc(text);
  std::map<std::string, std::vector<detail::MatrixRow>> matrices;
  std::optional<double> base;
  while (!sc.done()) {
    const char c = sc.peek();
    if (c == '%') {
      sc.skip_comment();
      continue;
    }
    if (c == '\'') {
      sc.skip_string();
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const auto id = sc.identifier();
      if (id != "mpc" || sc.peek() != '.') continue;
      sc.advance();
      const auto field = sc.identifier();
      if (field != "bus" && field != "branch" && field != "gen" && field != "baseMVA") continue;
      sc.skip_space(true);
      if (sc.peek() != '=') continue;  // e.g. a use rather than an assignment
      sc.advance();
      sc.skip_space(false);
      if (field == "baseMVA") base = sc.scalar(field);
      else matrices[field] = sc.matrix(field);
      continue;
    }
    sc.advance();
  }
  for (const char* required : {"bus", "branch"})
    if (!matrices.count(required))
      throw Error(ErrorCode::MalformedMatrix, std::string("case has no mpc.") + required + " matrix");

  MatpowerSubset out;
  if (base) out.base_mva = *base;
  std::set<BusId> ids;
  for (const auto& row : matrices["bus"]) {
    detail::check_columns(row, 2, "bus");
    MatpowerBus b{detail::as_bus_id(row.values[0], row), static_cast<int>(row.values[1])};
    if (!ids.insert(b.id).second)
      throw Error(ErrorCode::SchemaViolation,
                  detail::at(row.line, row.column) + ": duplicate bus id " + std::to_string(b.id));
    out.buses.push_back(b);
  }
  for (const auto& row : matrices["branch"]) {
    detail::check_columns(row, 4, "branch");
    MatpowerBranch br;
    br.from = detail::as_bus_id(row.values[0], row);
    br.to = detail::as_bus_id(row.values[1], row);
    br.reactance = row.values[3];
    br.in_service = row.values.size() < 11 || row.values[10] != 0.0;
    br.line = row.line;
    if (!ids.count(br.from) || !ids.count(br.to))
      throw Error(ErrorCode::SchemaViolation, detail::at(row.line, row.column) + ": branch references unknown bus");
    if (br.in_service && !(br.reactance > 0.0))
      throw Error(ErrorCode::SchemaViolation,
                  detail::at(row.line, row.column) + ": in-service branch needs reactance x > 0");
    out.branches.push_back(br);
  }
  for (const auto& row : matrices["gen"]) {
    detail::check_columns(row, 1, "gen");
    MatpowerGen g;
    g.bus = detail::as_bus_id(row.values[0], row);
    g.mva_base = row.values.size() >= 7 ? row.values[6] : out.base_mva;
    g.in_service = row.values.size() < 8 || row.values[7] > 0.0;
    if (!ids.count(g.bus))
      throw Error(ErrorCode::SchemaViolation, detail::at(row.line, row.column) + ": gen references unknown bus");
    out.gens.push_back(g);
  }
  return out;
}

/// Builds a case: B = 1/x per in-service branch with parallel branches
/// merged by adding susceptances; M and D from the dynamics spec.
inline CaseDocument matpower_to_case(const MatpowerSubset& mp, const DynamicsSpec& dyn) {
  CaseDocument doc;
  doc.base_mva = mp.base_mva;

  std::map<BusId, double> rating;
  for (const auto& g : mp.gens)
    if (g.in_service) rating[g.bus] += g.mva_base / mp.base_mva;

  for (const auto& b : mp.buses) {
    Bus bus;
    bus.id = b.id;
    const auto gen = rating.find(b.id);
    if (gen != rating.end() && gen->second > 0.0) bus.rating = gen->second;
    if (auto it = dyn.per_bus.find(b.id); it != dyn.per_bus.end()) {
      bus.inertia = it->second.inertia;
      bus.damping = it->second.damping;
    } else if (bus.rating && dyn.proportional) {
      bus.inertia = *bus.rating * dyn.proportional->inertia;
      bus.damping = *bus.rating * dyn.proportional->damping;
    } else if (!bus.rating && dyn.load) {
      bus.inertia = dyn.load->inertia;
      bus.damping = dyn.load->damping;
    } else {
      throw Error(ErrorCode::MissingDynamics, "no inertia/damping for " +
                                                  std::string(bus.rating ? "generator" : "load") + " bus " +
                                                  std::to_string(b.id));
    }
    doc.buses.push_back(bus);
  }

  std::map<std::pair<BusId, BusId>, std::size_t> slot;
  for (const auto& br : mp.branches) {
    if (!br.in_service) continue;
    if (br.from == br.to)
      throw Error(ErrorCode::SchemaViolation, "line " + std::to_string(br.line) + ": branch is a self loop");
    Line l{br.from, br.to, 1.0 / br.reactance};
    auto [it, inserted] = slot.emplace(l.key(), doc.lines.size());
    if (inserted) doc.lines.push_back(l);
    else doc.lines[it->second].susceptance += l.susceptance;
  }
  return doc;
}

inline CaseDocument parse_matpower_subset(std::string_view text, const DynamicsSpec& dyn) {
  return matpower_to_case(parse_matpower_tables(text), dyn);
}

// ---------------------------------------------------------------------------
// Trajectory CSV

struct ExtraColumn {
  std::string name;
  Eigen::VectorXd values;  // one per trajectory row
};

inline std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_trajectory_csv(const Trajectory& traj, const std::vector<ExtraColumn>& extra = {}) {
  if (traj.bus_ids.size() != static_cast<std::size_t>(traj.omega.cols()))
    throw Error(ErrorCode::DimensionMismatch, "trajectory has " + std::to_string(traj.omega.cols()) +
                                                  " frequency columns but " + std::to_string(traj.bus_ids.size()) +
                                                  " bus labels");
  for (const auto& c : extra)
    if (c.values.size() != static_cast<Eigen::Index>(traj.size()))
      throw Error(ErrorCode::DimensionMismatch, "column " + c.name + " does not match the trajectory length");
  std::ostringstream os;
  for (const auto& [k, v] : traj.metadata) os << "# " << k << ": " << v << "\n";
  os << "t";
  for (auto id : traj.bus_ids) os << ",omega_" << id;
  const bool flows = traj.flows.cols() > 0 && !traj.line_ids.empty();
  if (flows)
    for (auto [s, t] : traj.line_ids) os << ",flow_" << s << "_" << t;
  for (const auto& c : extra) os << "," << c.name;
  os << "\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    os << format_g12(traj.times[k]);
    for (Eigen::Index j = 0; j < traj.omega.cols(); ++j) os << "," << format_g12(traj.omega(kk, j));
    if (flows)
      for (Eigen::Index e = 0; e < traj.flows.cols(); ++e) os << "," << format_g12(traj.flows(kk, e));
    for (const auto& c : extra) os << "," << format_g12(c.values[kk]);
    os << "\n";
  }
  return os.str();
}

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                                 const std::vector<ExtraColumn>& extra = {}) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
  f << format_trajectory_csv(traj, extra);
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path);
}

/// Parses the layout produced by format_trajectory_csv (omega and flow
/// columns; any other columns are ignored).
inline Trajectory parse_trajectory_csv(std::string_view text) {
  Trajectory traj;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon != std::string::npos) traj.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      if (header.empty() || header[0] != "t")
        throw Error(ErrorCode::SyntaxError, "line " + std::to_string(lineno) + ": expected header starting with 't'");
      continue;
    }
    if (cells.size() != header.size())
      throw Error(ErrorCode::SyntaxError, "line " + std::to_string(lineno) + ": wrong column count");
    std::vector<double> row;
    for (std::size_t c = 0; c < cells.size(); ++c) row.push_back(detail::parse_number(cells[c], lineno, c + 1));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> omega_cols, flow_cols;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].rfind("omega_", 0) == 0) {
      omega_cols.push_back(c);
      traj.bus_ids.push_back(std::stoll(header[c].substr(6)));
    } else if (header[c].rfind("flow_", 0) == 0) {
      flow_cols.push_back(c);
      const auto rest = header[c].substr(5);
      const auto us = rest.find('_');
      traj.line_ids.emplace_back(std::stoll(rest.substr(0, us)), std::stoll(rest.substr(us + 1)));
    }
  }
  const auto r = static_cast<Eigen::Index>(rows.size());
  traj.omega.resize(r, static_cast<Eigen::Index>(omega_cols.size()));
  traj.flows.resize(r, static_cast<Eigen::Index>(flow_cols.size()));
  for (Eigen::Index k = 0; k < r; ++k) {
    const auto& row = rows[static_cast<std::size_t>(k)];
    traj.times.push_back(row[0]);
    for (std::size_t j = 0; j < omega_cols.size(); ++j) traj.omega(k, static_cast<Eigen::Index>(j)) = row[omega_cols[j]];
    for (std::size_t e = 0; e < flow_cols.size(); ++e) traj.flows(k, static_cast<Eigen::Index>(e)) = row[flow_cols[e]];
  }
  return traj;
}

}  // namespace gridspec

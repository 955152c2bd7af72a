#include "mshjb/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mshjb/errors.hpp"

namespace mshjb {

namespace {

using nlohmann::json;

std::vector<int> int_vector(const json& j, const std::string& what,
                            std::vector<std::string>& violations) {
  std::vector<int> out;
  if (!j.is_array()) {
    violations.push_back(what + " must be an integer array");
    return out;
  }
  for (const auto& e : j) {
    if (!e.is_number_integer()) {
      violations.push_back(what + " must contain integers only");
      return {};
    }
    out.push_back(e.get<int>());
  }
  return out;
}

RateFunction rate_from_json(const json& j, const std::string& what,
                            std::vector<std::string>& violations,
                            bool require_nonneg) {
  RateFunction rf;
  if (!j.is_object() || !j.contains("monomials") ||
      !j["monomials"].is_array()) {
    violations.push_back(what + " must be {\"monomials\": [...]}");
    return rf;
  }
  for (const auto& mj : j["monomials"]) {
    Monomial m;
    if (!mj.is_object() || !mj.contains("k") || !mj["k"].is_number()) {
      violations.push_back(what + " monomial needs a numeric k");
      continue;
    }
    m.k = mj["k"].get<double>();
    if (require_nonneg && m.k < 0.0)
      violations.push_back(what + " has a negative coefficient");
    if (mj.contains("x_exp"))
      m.x_exp = int_vector(mj["x_exp"], what + ".x_exp", violations);
    if (mj.contains("y_exp"))
      m.y_exp = int_vector(mj["y_exp"], what + ".y_exp", violations);
    rf.monomials.push_back(std::move(m));
  }
  return rf;
}

}  // namespace

MultiScaleNetwork parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError({std::string("invalid JSON: ") + e.what()});
  }

  std::vector<std::string> violations;
  MultiScaleNetwork net;
  auto require_int = [&](const char* field, auto setter) {
    if (!doc.contains(field) || !doc[field].is_number_integer())
      violations.push_back(std::string(field) + " missing or not an integer");
    else
      setter(doc[field]);
  };
  require_int("slow_dim", [&](const json& j) { net.slow_dim = j.get<int>(); });
  require_int("fast_dim", [&](const json& j) { net.fast_dim = j.get<int>(); });
  require_int("conservation_M",
              [&](const json& j) { net.conservation = j.get<long>(); });

  if (!doc.contains("reactions") || !doc["reactions"].is_array()) {
    violations.push_back("reactions missing or not an array");
  } else {
    int r = 0;
    for (const auto& rj : doc["reactions"]) {
      const std::string tag = "reaction " + std::to_string(r);
      Reaction rx;
      if (!rj.is_object()) {
        violations.push_back(tag + " must be an object");
      } else {
        if (rj.contains("gamma_x"))
          rx.gamma_x = int_vector(rj["gamma_x"], tag + ".gamma_x", violations);
        else
          violations.push_back(tag + ".gamma_x missing");
        if (rj.contains("gamma_y"))
          rx.gamma_y = int_vector(rj["gamma_y"], tag + ".gamma_y", violations);
        else
          violations.push_back(tag + ".gamma_y missing");
        if (rj.contains("rate"))
          rx.rate = rate_from_json(rj["rate"], tag + ".rate", violations, true);
        else
          violations.push_back(tag + ".rate missing");
      }
      rx.cls = classify_reaction(rx.gamma_x, rx.gamma_y);
      net.reactions.push_back(std::move(rx));
      ++r;
    }
  }

  if (violations.empty()) {
    auto structural = validate_network(net);
    violations.insert(violations.end(), structural.begin(), structural.end());
  }
  if (!violations.empty()) throw ParseError(std::move(violations));
  return net;
}

std::string serialize_model(const MultiScaleNetwork& net) {
  JsonWriter w;
  w.begin_object();
  w.key("slow_dim").value(net.slow_dim);
  w.key("fast_dim").value(net.fast_dim);
  w.key("conservation_M").value(net.conservation);
  w.key("reactions").begin_array();
  for (const auto& rx : net.reactions) {
    w.begin_object();
    w.key("gamma_x").begin_array();
    for (int g : rx.gamma_x) w.value(g);
    w.end_array();
    w.key("gamma_y").begin_array();
    for (int g : rx.gamma_y) w.value(g);
    w.end_array();
    w.key("rate").begin_object();
    w.key("monomials").begin_array();
    for (const auto& m : rx.rate.monomials) {
      w.begin_object();
      w.key("k").value(m.k);
      w.key("x_exp").begin_array();
      for (int e : m.x_exp) w.value(e);
      w.end_array();
      w.key("y_exp").begin_array();
      for (int e : m.y_exp) w.value(e);
      w.end_array();
      w.end_object();
    }
    w.end_array();
    w.end_object();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

ControlHamiltonian parse_control(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError({std::string("invalid JSON: ") + e.what()});
  }
  std::vector<std::string> violations;
  ControlHamiltonian ch;
  if (!doc.contains("controls") || !doc["controls"].is_array() ||
      doc["controls"].empty()) {
    violations.push_back("controls missing, not an array, or empty");
    throw ParseError(std::move(violations));
  }
  int c = 0;
  for (const auto& cj : doc["controls"]) {
    const std::string tag = "control " + std::to_string(c);
    Control ctl;
    if (cj.contains("label") && cj["label"].is_string())
      ctl.label = cj["label"].get<std::string>();
    else
      ctl.label = "a" + std::to_string(c);
    if (!cj.contains("drift") || !cj["drift"].is_array()) {
      violations.push_back(tag + ".drift missing or not an array");
    } else {
      for (const auto& dj : cj["drift"])
        ctl.drift.push_back(
            rate_from_json(dj, tag + ".drift component", violations, false));
    }
    if (!cj.contains("cost")) {
      violations.push_back(tag + ".cost missing");
    } else {
      ctl.cost = rate_from_json(cj["cost"], tag + ".cost", violations, true);
    }
    ch.controls.push_back(std::move(ctl));
    ++c;
  }
  if (!ch.controls.empty())
    ch.slow_dim = static_cast<int>(ch.controls[0].drift.size());
  if (violations.empty()) {
    auto structural = validate_control_hamiltonian(ch);
    violations.insert(violations.end(), structural.begin(), structural.end());
  }
  if (!violations.empty()) throw ParseError(std::move(violations));
  return ch;
}

std::string serialize_control(const ControlHamiltonian& ch) {
  auto write_rate = [](JsonWriter& w, const RateFunction& rf) {
    w.begin_object();
    w.key("monomials").begin_array();
    for (const auto& m : rf.monomials) {
      w.begin_object();
      w.key("k").value(m.k);
      w.key("x_exp").begin_array();
      for (int e : m.x_exp) w.value(e);
      w.end_array();
      w.end_object();
    }
    w.end_array();
    w.end_object();
  };
  JsonWriter w;
  w.begin_object();
  w.key("controls").begin_array();
  for (const auto& ctl : ch.controls) {
    w.begin_object();
    w.key("label").value(ctl.label);
    w.key("drift").begin_array();
    for (const auto& d : ctl.drift) write_rate(w, d);
    w.end_array();
    w.key("cost");
    write_rate(w, ctl.cost);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void JsonWriter::separator() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!needs_comma_.empty()) {
    if (needs_comma_.back()) out_ += ',';
    needs_comma_.back() = true;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ += '{';
  needs_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  needs_comma_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separator();
  out_ += '[';
  needs_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  needs_comma_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
  if (needs_comma_.back()) out_ += ',';
  needs_comma_.back() = true;
  out_ += '"';
  out_ += k;
  out_ += "\":";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separator();
  out_ += format_double(v);
  return *this;
}

JsonWriter& JsonWriter::value(long v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separator();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  separator();
  out_ += '"';
  for (char c : v) {
    switch (c) {
      case '"':
        out_ += "\\\"";
        break;
      case '\\':
        out_ += "\\\\";
        break;
      case '\n':
        out_ += "\\n";
        break;
      case '\t':
        out_ += "\\t";
        break;
      default:
        out_ += c;
    }
  }
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::value(const std::vector<double>& v) {
  begin_array();
  for (double x : v) value(x);
  return end_array();
}

JsonWriter& JsonWriter::value(const std::vector<std::string>& v) {
  begin_array();
  for (const auto& s : v) value(s);
  return end_array();
}

JsonWriter& JsonWriter::null_value() {
  separator();
  out_ += "null";
  return *this;
}

std::string write_grid_function_csv(const GridFunction& gf) {
  const int l = gf.grid.axes();
  std::string out;
  for (int i = 0; i < l; ++i) out += "x_" + std::to_string(i + 1) + ",";
  out += "value\n";
  std::vector<double> x(static_cast<std::size_t>(l));
  for (long id = 0; id < gf.grid.node_count(); ++id) {
    gf.grid.node(id, x);
    for (int i = 0; i < l; ++i)
      out += format_double(x[static_cast<std::size_t>(i)]) + ",";
    out += format_double(gf.values[static_cast<std::size_t>(id)]) + "\n";
  }
  return out;
}

namespace {

std::vector<std::vector<double>> parse_csv_rows(const std::string& text,
                                                std::size_t* n_cols,
                                                std::string* header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("CSV has no data rows");
  *n_cols = rows[0].size();
  for (const auto& r : rows)
    if (r.size() != *n_cols) throw ConfigError("ragged CSV");
  return rows;
}

}  // namespace

GridFunction read_grid_function_csv(const std::string& text) {
  std::size_t n_cols = 0;
  auto rows = parse_csv_rows(text, &n_cols, nullptr);
  if (n_cols < 2) throw ConfigError("grid CSV needs x columns plus value");
  const int l = static_cast<int>(n_cols) - 1;

  // Recover the axes from the coordinate columns.
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) {
    std::vector<double> vals;
    for (const auto& r : rows) vals.push_back(r[static_cast<std::size_t>(i)]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end(),
                           [](double a, double b) {
                             return std::abs(a - b) <=
                                    1e-12 * (1.0 + std::abs(a));
                           }),
               vals.end());
    axes[static_cast<std::size_t>(i)] = std::move(vals);
  }
  Grid g;
  g.lower.assign(static_cast<std::size_t>(l), 0.0);
  for (int i = 0; i < l; ++i) {
    const auto& a = axes[static_cast<std::size_t>(i)];
    if (a.size() < 4) throw ConfigError("grid CSV needs >= 4 nodes per axis");
    if (std::abs(a.front()) > 1e-9)
      throw ConfigError("grid CSV must start at x = 0");
    g.upper.push_back(a.back());
    g.cells.push_back(static_cast<int>(a.size()) - 1);
  }
  if (static_cast<long>(rows.size()) != g.node_count())
    throw ConfigError("grid CSV row count does not match the node lattice");
  GridFunction gf;
  gf.grid = g;
  gf.values.resize(rows.size());
  std::vector<double> x(static_cast<std::size_t>(l));
  for (long id = 0; id < g.node_count(); ++id) {
    g.node(id, x);
    const auto& r = rows[static_cast<std::size_t>(id)];
    for (int i = 0; i < l; ++i)
      if (std::abs(r[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]) >
          1e-9 * (1.0 + std::abs(x[static_cast<std::size_t>(i)])))
        throw ConfigError("grid CSV rows are not in row-major node order");
    gf.values[static_cast<std::size_t>(id)] = r[static_cast<std::size_t>(l)];
  }
  return gf;
}

std::string write_path_csv(const PathSample& path) {
  const std::size_t l = path.points.empty() ? 0 : path.points[0].size();
  std::string out = "t";
  for (std::size_t i = 0; i < l; ++i) out += ",x_" + std::to_string(i + 1);
  out += "\n";
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    out += format_double(path.times[k]);
    for (std::size_t i = 0; i < l; ++i)
      out += "," + format_double(path.points[k][i]);
    out += "\n";
  }
  return out;
}

PathSample read_path_csv(const std::string& text) {
  std::size_t n_cols = 0;
  auto rows = parse_csv_rows(text, &n_cols, nullptr);
  if (n_cols < 2) throw ConfigError("path CSV needs t plus x columns");
  PathSample p;
  for (const auto& r : rows) {
    p.times.push_back(r[0]);
    p.points.emplace_back(r.begin() + 1, r.end());
  }
  return p;
}

std::string write_doubling_csv(const std::vector<DoublingRow>& rows,
                               int slow_dim) {
  std::string out = "eps,alpha";
  for (int i = 0; i < slow_dim; ++i) out += ",x_" + std::to_string(i + 1);
  for (int i = 0; i < slow_dim; ++i) out += ",y_" + std::to_string(i + 1);
  out += ",penalty,H_diff\n";
  for (const auto& r : rows) {
    out += format_double(r.eps) + "," + format_double(r.alpha);
    for (double v : r.x) out += "," + format_double(v);
    for (double v : r.y) out += "," + format_double(v);
    out += "," + format_double(r.penalty) + "," + format_double(r.h_diff) + "\n";
  }
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

}  // namespace mshjb

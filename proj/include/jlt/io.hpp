#pragma once

// JSON spec parsing and report emission (JSON / CSV, 17 significant digits).

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "jlt/bounds.hpp"
#include "jlt/core.hpp"
#include "jlt/eigensolve.hpp"
#include "jlt/operator_model.hpp"

namespace jlt {

using Json = nlohmann::ordered_json;

using AnySpec = std::variant<Perturbation, LatticeSpec>;

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::pair<long, long> line_column(const std::string& text, std::size_t byte) {
  long line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] inline void field_error(const std::string& field, const std::string& what) {
  throw InputError("field '" + field + "': " + what);
}

inline long parse_index(const std::string& field, const std::string& key) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(key, &used);
  } catch (const std::exception&) {
    field_error(field, "key \"" + key + "\" is not an integer");
  }
  if (used != key.size()) field_error(field, "key \"" + key + "\" is not an integer");
  return v;
}

inline double number(const Json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

inline std::map<long, double> parse_sequence(const Json& root, const char* name) {
  std::map<long, double> out;
  if (!root.contains(name)) return out;
  const Json& obj = root.at(name);
  if (!obj.is_object()) field_error(name, "expected an object keyed by site index");
  for (const auto& [k, v] : obj.items()) out[parse_index(name, k)] = number(v, std::string(name) + "." + k);
  return out;
}

inline Site parse_site(const Json& j, const std::string& field, int nu) {
  if (!j.is_array() || static_cast<int>(j.size()) != nu) field_error(field, "site must be an array of " + std::to_string(nu) + " integers");
  Site x;
  for (const auto& c : j) {
    if (!c.is_number_integer()) field_error(field, "site coordinates must be integers");
    x.push_back(c.get<long>());
  }
  return x;
}

inline Json parse_key(const std::string& field, const std::string& key) {
  try {
    return Json::parse(key);
  } catch (const Json::parse_error&) {
    field_error(field, "key \"" + key + "\" is not a JSON array");
  }
}

inline Eigen::MatrixXd parse_block(const Json& v, const std::string& field) {
  if (v.is_number()) return Eigen::MatrixXd::Constant(1, 1, v.get<double>());
  if (!v.is_array() || v.empty()) field_error(field, "expected a number or a square matrix");
  const auto d = static_cast<Eigen::Index>(v.size());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const Json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) field_error(field, "matrix must be square");
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], field);
  }
  return m;
}

inline LatticeSpec parse_lattice(const Json& root) {
  if (!root.contains("nu") || !root["nu"].is_number_integer()) field_error("nu", "expected an integer");
  const int nu = root["nu"].get<int>();
  if (nu < 1) field_error("nu", "must be >= 1");
  if (!root.contains("box") || !root["box"].is_array() || static_cast<int>(root["box"].size()) != nu)
    field_error("box", "expected one [lo, hi] range per axis");
  std::vector<SiteRange> box;
  for (const auto& r : root["box"]) {
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
      field_error("box", "each range must be [lo, hi] with integer ends");
    box.push_back({r[0].get<long>(), r[1].get<long>()});
    if (box.back().empty()) field_error("box", "range has hi < lo");
  }
  int fiber = 1;
  if (root.contains("V")) {
    if (!root["V"].is_object()) field_error("V", "expected an object keyed by site");
    for (const auto& [k, v] : root["V"].items()) {
      if (v.is_array()) {
        fiber = static_cast<int>(v.size());
        break;
      }
    }
  }
  LatticeSpec spec(nu, box, fiber);
  if (root.contains("buffer")) {
    if (!root["buffer"].is_number_integer()) field_error("buffer", "expected an integer");
    spec.set_required_buffer(root["buffer"].get<long>());
  }
  if (root.contains("V")) {
    for (const auto& [k, v] : root["V"].items()) {
      const std::string field = "V." + k;
      const Site x = parse_site(parse_key("V", k), field, nu);
      if (!spec.contains(x)) field_error(field, "site outside the box");
      const Eigen::MatrixXd block = parse_block(v, field);
      if (block.rows() != fiber) field_error(field, "all potential blocks must share one fiber dimension");
      try {
        spec.set_potential_block(x, block);
      } catch (const InvalidParameters& e) {
        field_error(field, e.what());
      }
    }
  }
  if (root.contains("bonds")) {
    if (!root["bonds"].is_object()) field_error("bonds", "expected an object keyed by [[site],[site]]");
    for (const auto& [k, v] : root["bonds"].items()) {
      const std::string field = "bonds." + k;
      const Json key = parse_key("bonds", k);
      if (!key.is_array() || key.size() != 2) field_error(field, "bond key must be a pair of sites");
      const Site x = parse_site(key[0], field, nu);
      const Site y = parse_site(key[1], field, nu);
      try {
        spec.set_bond(x, y, number(v, field));
      } catch (const InvalidParameters& e) {
        field_error(field, e.what());
      }
    }
  }
  return spec;
}

}  // namespace detail

inline AnySpec spec_from_json(const Json& root) {
  if (!root.is_object()) throw InputError("spec must be a JSON object");
  if (!root.contains("kind") || !root["kind"].is_string()) detail::field_error("kind", "expected a string");
  const std::string kind = root["kind"].get<std::string>();
  if (kind == "lattice") return detail::parse_lattice(root);
  LineKind lk;
  if (kind == "half_line")
    lk = LineKind::half_line;
  else if (kind == "whole_line")
    lk = LineKind::whole_line;
  else
    detail::field_error("kind", "unknown kind \"" + kind + "\"");
  const auto a = detail::parse_sequence(root, "a");
  const auto b = detail::parse_sequence(root, "b");
  try {
    return Perturbation(lk, a, b);
  } catch (const InvalidParameters& e) {
    throw InputError(std::string("invalid spec: ") + e.what());
  }
}

inline AnySpec parse_spec(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw InputError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  return spec_from_json(root);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Json to_json(const Perturbation& spec) {
  Json j;
  j["kind"] = to_string(spec.kind());
  Json a = Json::object(), b = Json::object();
  for (const auto& [n, v] : spec.a_entries()) a[std::to_string(n)] = v;
  for (const auto& [n, v] : spec.b_entries()) b[std::to_string(n)] = v;
  j["a"] = a;
  j["b"] = b;
  return j;
}

inline Json site_json(const Site& x) {
  Json j = Json::array();
  for (long c : x) j.push_back(c);
  return j;
}

inline Json to_json(const LatticeSpec& spec) {
  Json j;
  j["kind"] = "lattice";
  j["nu"] = spec.nu();
  Json box = Json::array();
  for (const auto& r : spec.box()) box.push_back({r.lo, r.hi});
  j["box"] = box;
  Json v = Json::object();
  for (const auto& [x, block] : spec.potential()) {
    const std::string key = site_json(x).dump();
    if (spec.fiber_dim() == 1) {
      v[key] = block(0, 0);
    } else {
      Json m = Json::array();
      for (Eigen::Index r = 0; r < block.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < block.cols(); ++c) row.push_back(block(r, c));
        m.push_back(row);
      }
      v[key] = m;
    }
  }
  j["V"] = v;
  Json bonds = Json::object();
  for (const auto& [b, w] : spec.bonds()) bonds[Json::array({site_json(b.first), site_json(b.second)}).dump()] = w;
  j["bonds"] = bonds;
  return j;
}

inline Json to_json(const BoundReport& r) {
  Json j;
  j["theorem"] = r.id.label();
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["ratio"] = r.ratio;
  j["verdict"] = to_string(r.verdict);
  j["tolerance"] = r.tolerance;
  return j;
}

inline Json to_json(const EigenvalueReport& r) {
  Json j;
  j["plus"] = r.plus;
  j["minus"] = r.minus;
  j["plus_error"] = r.plus_error;
  j["minus_error"] = r.minus_error;
  j["window"] = {r.window.lo, r.window.hi};
  j["converged"] = r.converged;
  j["monotone"] = r.monotone;
  j["flagged_near_edge"] = r.flagged_near_edge;
  j["band_half_width"] = r.band_half_width;
  j["edge_margin"] = r.edge_margin;
  j["rounds"] = r.rounds;
  return j;
}

namespace detail {

inline void write_json(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << Json(k).dump() << (indent > 0 ? ": " : ":");
        write_json(os, v, indent, depth + 1);
      }
      os << nl << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << '[' << nl;
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad;
        write_json(os, v, indent, depth + 1);
      }
      os << nl << close_pad << ']';
      return;
    }
    case Json::value_t::number_float:
      os << format_number(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

// Serializes with floats at 17 significant digits and NaN/inf as null.
inline std::string dump_json(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_json(os, j, indent, 0);
  os << '\n';
  return os.str();
}

enum class Format { json, csv };

inline std::string emit_report(const std::vector<BoundReport>& reports, Format format) {
  if (format == Format::json) {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return dump_json(arr);
  }
  std::string out = "theorem,lhs,rhs,slack,ratio,verdict,tolerance\n";
  for (const auto& r : reports) {
    out += r.id.label();
    for (double x : {r.lhs, r.rhs, r.slack, r.ratio}) out += ',' + (std::isfinite(x) ? format_number(x) : std::string());
    out += ',';
    out += to_string(r.verdict);
    out += ',' + format_number(r.tolerance) + '\n';
  }
  return out;
}

}  // namespace jlt

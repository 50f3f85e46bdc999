#pragma once

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "circle.hpp"
#include "errors.hpp"
#include "measures.hpp"
#include "rational_map.hpp"

namespace holoscope::io {

using nlohmann::json;

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Write through a temporary file in the same directory and rename over the target.
inline void write_atomic(const std::string& path, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path() && !fs::exists(target.parent_path()))
    throw ConfigError("output directory '" + target.parent_path().string() + "' does not exist");
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

inline json cx_json(Cx z) { return json::array({z.real(), z.imag()}); }

/// [re, im] for finite points, null at infinity.
inline json point_json(const SpherePoint& p) { return p.is_infinity() ? json(nullptr) : cx_json(p.finite()); }

// ---------------------------------------------------------------------------
// Structured config text: `key = value` lines, `#` comments. Values are JSON
// literals; complex numbers are written as numbers or [re, im] pairs.

using ConfigText = std::vector<std::pair<std::string, json>>;

inline ConfigText parse_config_text(const std::string& text, const std::string& origin) {
  ConfigText out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected `key = value`");
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    const std::string value = line.substr(eq + 1);
    try {
      out.emplace_back(key, json::parse(value));
    } catch (const json::parse_error&) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key + "': value is not a valid literal");
    }
  }
  return out;
}

inline Cx parse_complex(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError("key '" + key + "': expected a number or an [re, im] pair");
}

inline std::vector<Cx> parse_complex_list(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) throw ConfigError("key '" + key + "': expected a non-empty list");
  std::vector<Cx> out;
  for (const auto& e : v) out.push_back(parse_complex(e, key));
  return out;
}

inline const json* find_key(const ConfigText& cfg, const std::string& key) {
  const json* found = nullptr;
  for (const auto& [k, v] : cfg)
    if (k == key) found = &v;
  return found;
}

inline void reject_unknown(const ConfigText& cfg, std::initializer_list<std::string_view> allowed, const std::string& origin) {
  for (const auto& [k, v] : cfg)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError(origin + ": unknown key '" + k + "'");
}

/// Map file: num = [...], den = [...] (den defaults to [1]).
inline RationalMap parse_map(const std::string& text, const std::string& origin = "map") {
  const auto cfg = parse_config_text(text, origin);
  reject_unknown(cfg, {"num", "den"}, origin);
  const json* num = find_key(cfg, "num");
  if (!num) throw ConfigError(origin + ": missing key 'num'");
  const json* den = find_key(cfg, "den");
  Poly n(parse_complex_list(*num, "num"));
  Poly d = den ? Poly(parse_complex_list(*den, "den")) : Poly::constant(1.0);
  try {
    return RationalMap(std::move(n), std::move(d));
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": keys 'num'/'den': " + e.what());
  }
}

inline RationalMap load_map(const std::string& path) { return parse_map(read_file(path), path); }

/// Canonical text of a map, the input of map hashes.
inline std::string canonical_map_text(const RationalMap& f) {
  json j;
  j["num"] = json::array();
  j["den"] = json::array();
  for (const Cx& a : f.num().coeffs()) j["num"].push_back(cx_json(a));
  for (const Cx& a : f.den().coeffs()) j["den"].push_back(cx_json(a));
  return j.dump();
}

inline std::string map_hash(const RationalMap& f) { return hex64(fnv1a(canonical_map_text(f))); }

/// Zeros file: zeros = [...], rotation = phi (radians, default 0).
inline BlaschkeProduct parse_blaschke(const std::string& text, const std::string& origin = "zeros") {
  const auto cfg = parse_config_text(text, origin);
  reject_unknown(cfg, {"zeros", "rotation"}, origin);
  const json* zeros = find_key(cfg, "zeros");
  if (!zeros) throw ConfigError(origin + ": missing key 'zeros'");
  double rot = 0.0;
  if (const json* r = find_key(cfg, "rotation")) {
    if (!r->is_number()) throw ConfigError(origin + ": key 'rotation': expected a number");
    rot = r->get<double>();
  }
  try {
    return BlaschkeProduct(parse_complex_list(*zeros, "zeros"), rot);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": key 'zeros': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Measures as CSV `re,im,weight` with a JSON sidecar

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string measure_csv(const EmpiricalMeasure& mu) {
  std::string out = "re,im,weight\n";
  out.reserve(mu.size() * 64);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    out += format_double(mu.points[i].real());
    out += ',';
    out += format_double(mu.points[i].imag());
    out += ',';
    out += format_double(mu.weights[i]);
    out += '\n';
  }
  return out;
}

inline json measure_sidecar(const EmpiricalMeasure& mu, const std::string& map_hash_hex) {
  return json{{"seed", mu.seed},
              {"provenance", to_string(mu.provenance)},
              {"map-hash", map_hash_hex},
              {"samples", mu.size()},
              {"dropped", mu.dropped}};
}

/// Reads `re,im[,weight]` rows (header optional). Missing weights are uniform.
inline EmpiricalMeasure parse_measure_csv(const std::string& text, const std::string& origin) {
  EmpiricalMeasure mu;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool weighted = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.rfind("re", 0) == 0) continue;
    std::istringstream row(line);
    std::string a, b, c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    const bool has_w = static_cast<bool>(std::getline(row, c, ','));
    try {
      mu.points.emplace_back(std::stod(a), std::stod(b));
      mu.weights.push_back(has_w ? std::stod(c) : 1.0);
      weighted = weighted || has_w;
    } catch (const std::exception&) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed measure row");
    }
  }
  if (mu.points.empty()) throw ConfigError(origin + ": no samples");
  mu.normalize();
  mu.validate();
  (void)weighted;
  const auto dot = origin.rfind(".csv");
  if (dot != std::string::npos) {
    std::ifstream side(origin + ".json");
    if (side) {
      try {
        const json j = json::parse(side);
        mu.seed = j.value("seed", std::uint64_t{0});
        const std::string prov = j.value("provenance", std::string("external"));
        for (auto p : {Provenance::inverse_iteration, Provenance::brownian_exit, Provenance::pushforward})
          if (prov == to_string(p)) mu.provenance = p;
      } catch (const json::exception&) {
        throw ConfigError(origin + ".json: malformed sidecar");
      }
    }
  }
  return mu;
}

inline EmpiricalMeasure load_measure(const std::string& path) { return parse_measure_csv(read_file(path), path); }

/// Query points: one `re,im` per line.
inline std::vector<Cx> load_points(const std::string& path) {
  auto mu = load_measure(path);
  return mu.points;
}

}  // namespace holoscope::io

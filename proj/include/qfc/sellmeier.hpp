// Copyright 2026 The qfcsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dispersion data for one crystal axis and its on-disk key/value format.
//
// Formula, with λ in micrometers:
//
//   n²(λ) = A + Σ_k B_k λ²/(λ² − C_k) + Σ_k D_k/(λ² − E_k) + F λ²
//
// File layout (INI-style, one section per coefficient set):
//
//   format_version = 1
//   [ktp_nz]
//   source = <literature reference>
//   A = 4.59423
//   D1 = 0.06206
//   E1 = 0.04763
//   lambda_min_um = 0.4
//   lambda_max_um = 4
//
// Term keys are numbered from 1 without gaps (B1/C1, B2/C2, ...; D1/E1, ...).
// Absent A or F means zero.

#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qfc/error.hpp"
#include "qfc/text.hpp"

namespace qfc {

inline constexpr int kSellmeierFormatVersion = 1;

struct SellmeierCoefficients {
  struct Term {
    double strength;
    double resonance;  // μm²
    friend bool operator==(const Term&, const Term&) = default;
  };

  std::string name;
  std::string source;
  double a = 0.0;
  std::vector<Term> resonant;  // B λ²/(λ² − C)
  std::vector<Term> poles;     // D/(λ² − E)
  double f = 0.0;              // F λ²
  double lambda_min_um = 0.0;
  double lambda_max_um = 0.0;

  friend bool operator==(const SellmeierCoefficients&, const SellmeierCoefficients&) = default;

  double index_squared_um(double lambda_um) const {
    const double l2 = lambda_um * lambda_um;
    double n2 = a + f * l2;
    for (const auto& t : resonant) n2 += t.strength * l2 / (l2 - t.resonance);
    for (const auto& t : poles) n2 += t.strength / (l2 - t.resonance);
    return n2;
  }
};

/// n(λ) for λ in nanometers. Throws RangeError outside the validity window.
inline double refractive_index(const SellmeierCoefficients& c, double lambda_nm) {
  const double um = lambda_nm * 1e-3;
  if (!(um >= c.lambda_min_um && um <= c.lambda_max_um)) {
    throw RangeError(c.name + ": wavelength " + format_double(lambda_nm) +
                     " nm outside validity window [" + format_double(c.lambda_min_um * 1e3) +
                     ", " + format_double(c.lambda_max_um * 1e3) + "] nm");
  }
  const double n2 = c.index_squared_um(um);
  if (!(n2 > 1.0)) throw RangeError(c.name + ": index not above 1 at " + format_double(lambda_nm));
  return std::sqrt(n2);
}

using SellmeierLibrary = std::map<std::string, SellmeierCoefficients>;

namespace detail {

inline std::vector<SellmeierCoefficients::Term> read_terms(
    const boost::property_tree::ptree& section, const std::string& set, char strength_key,
    char resonance_key) {
  std::vector<SellmeierCoefficients::Term> terms;
  for (int k = 1;; ++k) {
    const std::string s = std::string(1, strength_key) + std::to_string(k);
    const std::string r = std::string(1, resonance_key) + std::to_string(k);
    auto sv = section.get_optional<std::string>(s);
    auto rv = section.get_optional<std::string>(r);
    if (!sv && !rv) break;
    if (!sv || !rv) throw FormatError(set + ": " + s + " and " + r + " must appear together");
    terms.push_back({parse_double(*sv, set + "." + s), parse_double(*rv, set + "." + r)});
  }
  return terms;
}

inline bool is_known_key(const std::string& key) {
  if (key == "source" || key == "A" || key == "F" || key == "lambda_min_um" ||
      key == "lambda_max_um") {
    return true;
  }
  if (key.size() < 2) return false;
  if (std::string("BCDE").find(key[0]) == std::string::npos) return false;
  return key.find_first_not_of("0123456789", 1) == std::string::npos;
}

}  // namespace detail

inline SellmeierLibrary parse_sellmeier(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw FormatError(std::string("dispersion file: ") + e.what());
  }
  SellmeierLibrary lib;
  bool saw_version = false;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      if (key != "format_version") throw FormatError("dispersion file: unknown top-level key " + key);
      if (parse_int(node.data(), "format_version") != kSellmeierFormatVersion) {
        throw FormatError("dispersion file: unsupported format_version " + node.data());
      }
      saw_version = true;
      continue;
    }
    for (const auto& [k, _] : node) {
      if (!detail::is_known_key(k)) throw FormatError("dispersion file: " + key + ": unknown key " + k);
    }
    SellmeierCoefficients c;
    c.name = key;
    c.source = node.get<std::string>("source", "");
    if (auto v = node.get_optional<std::string>("A")) c.a = parse_double(*v, key + ".A");
    if (auto v = node.get_optional<std::string>("F")) c.f = parse_double(*v, key + ".F");
    c.resonant = detail::read_terms(node, key, 'B', 'C');
    c.poles = detail::read_terms(node, key, 'D', 'E');
    auto lo = node.get_optional<std::string>("lambda_min_um");
    auto hi = node.get_optional<std::string>("lambda_max_um");
    if (!lo || !hi) throw FormatError("dispersion file: " + key + ": validity window missing");
    c.lambda_min_um = parse_double(*lo, key + ".lambda_min_um");
    c.lambda_max_um = parse_double(*hi, key + ".lambda_max_um");
    if (!(c.lambda_min_um > 0.0 && c.lambda_max_um > c.lambda_min_um)) {
      throw FormatError("dispersion file: " + key + ": empty validity window");
    }
    lib.emplace(key, std::move(c));
  }
  if (!saw_version) throw FormatError("dispersion file: format_version missing");
  return lib;
}

inline SellmeierLibrary load_sellmeier_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dispersion file '" + path.string() + "'");
  try {
    return parse_sellmeier(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void serialize_sellmeier(std::ostream& out, const SellmeierLibrary& lib) {
  out << "format_version = " << kSellmeierFormatVersion << "\n";
  for (const auto& [name, c] : lib) {
    out << "\n[" << name << "]\n";
    if (!c.source.empty()) out << "source = " << c.source << "\n";
    out << "A = " << format_double(c.a) << "\n";
    for (std::size_t k = 0; k < c.resonant.size(); ++k) {
      out << "B" << k + 1 << " = " << format_double(c.resonant[k].strength) << "\n";
      out << "C" << k + 1 << " = " << format_double(c.resonant[k].resonance) << "\n";
    }
    for (std::size_t k = 0; k < c.poles.size(); ++k) {
      out << "D" << k + 1 << " = " << format_double(c.poles[k].strength) << "\n";
      out << "E" << k + 1 << " = " << format_double(c.poles[k].resonance) << "\n";
    }
    if (c.f != 0.0) out << "F = " << format_double(c.f) << "\n";
    out << "lambda_min_um = " << format_double(c.lambda_min_um) << "\n";
    out << "lambda_max_um = " << format_double(c.lambda_max_um) << "\n";
  }
}

inline std::string serialize_sellmeier(const SellmeierLibrary& lib) {
  std::ostringstream out;
  serialize_sellmeier(out, lib);
  return out.str();
}

inline const SellmeierCoefficients& lookup(const SellmeierLibrary& lib, const std::string& name) {
  auto it = lib.find(name);
  if (it == lib.end()) throw FormatError("no dispersion set named '" + name + "'");
  return it->second;
}

}  // namespace qfc

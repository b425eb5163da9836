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

// Text formats:
//
//   spectrum CSV   wavelength_nm,density
//   scan CSV       param,expected,counts,sigma
//   summaries      key = value, one per line
//
// Numbers are written in shortest round-trip form, so a file read back with
// the readers below reproduces the written doubles exactly.

#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qfc/error.hpp"
#include "qfc/experiments.hpp"
#include "qfc/spectral.hpp"
#include "qfc/text.hpp"

namespace qfc {

inline constexpr std::string_view kSpectrumHeader = "wavelength_nm,density";
inline constexpr std::string_view kScanHeader = "param,expected,counts,sigma";

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::vector<std::vector<std::string_view>> read_rows(std::istream& in, std::string_view header,
                                                            std::vector<std::string>& storage) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) {
    throw FormatError("expected CSV header '" + std::string(header) + "'");
  }
  while (std::getline(in, line)) {
    if (!trim(line).empty()) storage.push_back(line);
  }
  const std::size_t columns = split_csv(header).size();
  std::vector<std::vector<std::string_view>> rows;
  for (const auto& l : storage) {
    auto cells = split_csv(l);
    if (cells.size() != columns) throw FormatError("CSV row has wrong column count: " + l);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace detail

inline void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << kSpectrumHeader << "\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_double(s.wavelength_nm[i]) << "," << format_double(s.density[i]) << "\n";
  }
}

/// Reads a spectrum CSV. The center wavelength is not stored; it defaults to
/// the middle grid point, matching wavelength_grid().
inline Spectrum read_spectrum_csv(std::istream& in) {
  std::vector<std::string> storage;
  const auto rows = detail::read_rows(in, kSpectrumHeader, storage);
  Spectrum s;
  for (const auto& r : rows) {
    s.wavelength_nm.push_back(parse_double(r[0], "wavelength_nm"));
    s.density.push_back(parse_double(r[1], "density"));
  }
  s.validate();
  s.center_nm = s.wavelength_nm[s.size() / 2];
  return s;
}

inline void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  scan.validate();
  out << kScanHeader << "\n";
  for (std::size_t i = 0; i < scan.size(); ++i) {
    out << format_double(scan.params[i]) << "," << format_double(scan.expected[i]) << ","
        << scan.counts[i] << "," << format_double(scan.sigma(i)) << "\n";
  }
}

/// Reads a scan CSV back. Metadata (seed, rates, noiseless flag) is not part
/// of the file and is left at defaults.
inline ScanResult read_scan_csv(std::istream& in) {
  std::vector<std::string> storage;
  const auto rows = detail::read_rows(in, kScanHeader, storage);
  ScanResult s;
  for (const auto& r : rows) {
    s.params.push_back(parse_double(r[0], "param"));
    s.expected.push_back(parse_double(r[1], "expected"));
    s.counts.push_back(parse_int(r[2], "counts"));
    parse_double(r[3], "sigma");
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// key = value blocks

using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

inline KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw FormatError("expected 'key = value': " + line);
    kv.emplace_back(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
  }
  return kv;
}

inline KeyValues to_key_values(const FitReport& r, std::string_view prefix = "") {
  const std::string p(prefix);
  return {{p + "visibility", format_double(r.visibility)},
          {p + "visibility_sigma", format_double(r.visibility_sigma)},
          {p + "frequency", format_double(r.frequency)},
          {p + "frequency_sigma", format_double(r.frequency_sigma)},
          {p + "phase_offset", format_double(r.phase_offset)},
          {p + "offset", format_double(r.offset)},
          {p + "residual_norm", format_double(r.residual_norm)},
          {p + "clamped", r.clamped ? "true" : "false"}};
}

inline FitReport fit_report_from(const KeyValues& kv, std::string_view prefix = "") {
  FitReport r;
  auto get = [&](std::string_view key) -> const std::string& {
    const std::string full = std::string(prefix) + std::string(key);
    for (const auto& [k, v] : kv) {
      if (k == full) return v;
    }
    throw FormatError("missing key " + full);
  };
  r.visibility = parse_double(get("visibility"), "visibility");
  r.visibility_sigma = parse_double(get("visibility_sigma"), "visibility_sigma");
  r.frequency = parse_double(get("frequency"), "frequency");
  r.frequency_sigma = parse_double(get("frequency_sigma"), "frequency_sigma");
  r.phase_offset = parse_double(get("phase_offset"), "phase_offset");
  r.offset = parse_double(get("offset"), "offset");
  r.residual_norm = parse_double(get("residual_norm"), "residual_norm");
  r.clamped = get("clamped") == "true";
  return r;
}

/// Human-readable one-paragraph fit summary.
inline std::string to_text(const FitReport& r) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "V = " << r.visibility << " +/- " << r.visibility_sigma << ", frequency = " << r.frequency
      << " +/- " << r.frequency_sigma << ", phase offset = " << r.phase_offset
      << " rad, C0 = " << r.offset;
  if (r.clamped) out << " (visibility clamped to 1)";
  return out.str();
}

// ---------------------------------------------------------------------------
// File helpers

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  writer(out);
  if (!out) throw FormatError("error while writing '" + path.string() + "'");
}

}  // namespace qfc

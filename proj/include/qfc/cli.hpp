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

// Configuration-driven front end: reads a RunConfig, runs one experiment
// family and writes CSV files plus a `key = value` summary into the output
// directory. The qfcsim executable is a thin CLI11 wrapper around this file.
//
// Config grammar: INI-style. `[section]` headers, `key = value` lines, `#` or
// `;` comment lines, no nesting. Unknown sections or keys are errors. Relative
// paths resolve against the config file's directory. See configs/default.ini.

#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qfc/error.hpp"
#include "qfc/experiments.hpp"
#include "qfc/io.hpp"
#include "qfc/sellmeier.hpp"
#include "qfc/spectral.hpp"
#include "qfc/text.hpp"

namespace qfc::cli {

struct CrystalConfig {
  double length_mm = 20.0;
  double pump_nm = 0.0;
  double signal_nm = 0.0;
  std::string pump_set;
  std::string signal_set;
  std::string third_set;
  std::optional<double> poling_um;  // solved when absent
};

struct RunConfig {
  std::filesystem::path sellmeier_file = "data/ktp_sellmeier.ini";
  std::filesystem::path output_dir = "out";

  ScanSettings scan{400.0, 1.0, 20171113, false};

  std::size_t grid_points = 4096;
  double half_span_nm = 8.0;

  CrystalConfig source{20.0, 773.5, 1547.0, "ktp_ny", "ktp_ny", "ktp_nz", std::nullopt};
  CrystalConfig converter{20.0, 795.0, 1547.0, "ktp_nz", "ktp_nz", "ktp_nz", std::nullopt};
  bool unity_acceptance = false;

  double delay_min_mm = -10.0;
  double delay_max_mm = 10.0;
  std::size_t delay_points = 401;
  double overlap_source = 0.979;
  double overlap_upconverted = 0.9672;
  double bunching_overlap_source = 0.979;
  double bunching_overlap_upconverted = 0.9672;

  double visibility_1 = 0.9751;
  double visibility_2 = 0.8493;
  double phase_periods = 2.0;  // scan length in units of 2π
  std::size_t phase_points = 81;
  bool plate_axis = false;
  double plate_thickness_mm = 1.0;
  double plate_index = 1.46;
  double plate_wavelength_nm = 525.0;
  double plate_max_angle_rad = 0.6;

  ChainMode budget_mode = ChainMode::verbatim;
  std::optional<EfficiencyChain> budget_stages;
  double budget_quote = kQuotedOverallEfficiency;

  void validate() const {
    scan.validate();
    if (grid_points < 16 || !(half_span_nm > 0.0)) throw FormatError("[grid]: need points >= 16 and half_span_nm > 0");
    for (const auto* c : {&source, &converter}) {
      if (!(c->length_mm > 0.0) || !(c->pump_nm > 0.0) || !(c->signal_nm > 0.0)) {
        throw FormatError("crystal lengths and wavelengths must be positive");
      }
      if (c->poling_um && !(*c->poling_um > 0.0)) throw FormatError("poling_um must be positive");
    }
    if (!(delay_max_mm > delay_min_mm) || delay_points < 8) {
      throw FormatError("[hom]: need delay_max_mm > delay_min_mm and points >= 8");
    }
    for (double g : {overlap_source, overlap_upconverted, bunching_overlap_source,
                     bunching_overlap_upconverted, visibility_1, visibility_2}) {
      if (!(g >= 0.0 && g <= 1.0)) throw FormatError("overlaps and visibilities must lie in [0,1]");
    }
    if (!(phase_periods >= 1.0) || phase_points < 8) {
      throw FormatError("[fringe]: need periods >= 1 and points >= 8");
    }
    if (plate_axis && !(plate_max_angle_rad > 0.0 && plate_max_angle_rad < std::numbers::pi / 3)) {
      throw FormatError("[fringe]: plate_max_angle_rad must lie in (0, pi/3)");
    }
  }
};

namespace detail {

using Tree = boost::property_tree::ptree;

class SectionReader {
 public:
  SectionReader(const Tree& root, std::string name, const std::set<std::string>& allowed)
      : name_(std::move(name)) {
    if (auto child = root.get_child_optional(name_)) node_ = &*child;
    if (!node_) return;
    for (const auto& [k, _] : *node_) {
      if (!allowed.contains(k)) throw FormatError("config [" + name_ + "]: unknown key '" + k + "'");
    }
  }

  std::optional<std::string> text(const std::string& key) const {
    if (!node_) return std::nullopt;
    auto v = node_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return std::string(trim(*v));
  }

  void number(const std::string& key, double& out) const {
    if (auto v = text(key)) out = parse_double(*v, "[" + name_ + "] " + key);
  }
  void count(const std::string& key, std::size_t& out) const {
    if (auto v = text(key)) {
      const auto n = parse_int(*v, "[" + name_ + "] " + key);
      if (n < 0) throw FormatError("config [" + name_ + "] " + key + " must be >= 0");
      out = static_cast<std::size_t>(n);
    }
  }
  void flag(const std::string& key, bool& out) const {
    if (auto v = text(key)) {
      if (*v == "true" || *v == "1" || *v == "yes") {
        out = true;
      } else if (*v == "false" || *v == "0" || *v == "no") {
        out = false;
      } else {
        throw FormatError("config [" + name_ + "] " + key + ": expected true/false, got '" + *v + "'");
      }
    }
  }

 private:
  std::string name_;
  const Tree* node_ = nullptr;
};

inline void read_crystal(const Tree& root, const std::string& section, const std::string& third_key,
                         CrystalConfig& c, std::set<std::string> extra = {}) {
  extra.insert({"length_mm", "pump_nm", "signal_nm", "pump_set", "signal_set", third_key, "poling_um"});
  SectionReader r(root, section, extra);
  r.number("length_mm", c.length_mm);
  r.number("pump_nm", c.pump_nm);
  r.number("signal_nm", c.signal_nm);
  if (auto v = r.text("pump_set")) c.pump_set = *v;
  if (auto v = r.text("signal_set")) c.signal_set = *v;
  if (auto v = r.text(third_key)) c.third_set = *v;
  if (auto v = r.text("poling_um"); v && *v != "auto") {
    c.poling_um = parse_double(*v, "[" + section + "] poling_um");
  }
}

inline EfficiencyChain parse_stages(const std::string& text) {
  EfficiencyChain chain;
  std::string_view rest = text;
  while (!trim(rest).empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    const auto colon = item.rfind(':');
    if (colon == std::string_view::npos) throw FormatError("[budget] stages: expected name:value, got '" + std::string(item) + "'");
    chain.push_back({std::string(trim(item.substr(0, colon))),
                     parse_double(item.substr(colon + 1), "[budget] stages")});
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return chain;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  detail::Tree root;
  try {
    boost::property_tree::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  static const std::set<std::string> sections{"paths", "run",      "grid",  "source", "converter",
                                              "hom",   "bunching", "fringe", "budget"};
  for (const auto& [k, node] : root) {
    if (!sections.contains(k) || node.empty()) throw FormatError("config: unknown section or top-level key '" + k + "'");
  }

  RunConfig c;
  {
    detail::SectionReader r(root, "paths", {"sellmeier", "output"});
    if (auto v = r.text("sellmeier")) c.sellmeier_file = base_dir / *v;
    if (auto v = r.text("output")) c.output_dir = base_dir / *v;
  }
  {
    detail::SectionReader r(root, "run", {"seed", "noiseless", "rate_hz", "t_bin_s"});
    if (auto v = r.text("seed")) c.scan.seed = static_cast<std::uint64_t>(parse_int(*v, "[run] seed"));
    r.flag("noiseless", c.scan.noiseless);
    r.number("rate_hz", c.scan.rate_hz);
    r.number("t_bin_s", c.scan.t_bin_s);
  }
  {
    detail::SectionReader r(root, "grid", {"points", "half_span_nm"});
    r.count("points", c.grid_points);
    r.number("half_span_nm", c.half_span_nm);
  }
  detail::read_crystal(root, "source", "idler_set", c.source);
  detail::read_crystal(root, "converter", "sum_set", c.converter, {"unity_acceptance"});
  {
    detail::SectionReader r(root, "converter",
                            {"length_mm", "pump_nm", "signal_nm", "pump_set", "signal_set",
                             "sum_set", "poling_um", "unity_acceptance"});
    r.flag("unity_acceptance", c.unity_acceptance);
  }
  {
    detail::SectionReader r(root, "hom", {"delay_min_mm", "delay_max_mm", "points",
                                          "overlap_source", "overlap_upconverted"});
    r.number("delay_min_mm", c.delay_min_mm);
    r.number("delay_max_mm", c.delay_max_mm);
    r.count("points", c.delay_points);
    r.number("overlap_source", c.overlap_source);
    r.number("overlap_upconverted", c.overlap_upconverted);
  }
  {
    detail::SectionReader r(root, "bunching", {"overlap_source", "overlap_upconverted"});
    r.number("overlap_source", c.bunching_overlap_source);
    r.number("overlap_upconverted", c.bunching_overlap_upconverted);
  }
  {
    detail::SectionReader r(root, "fringe",
                            {"visibility_1", "visibility_2", "periods", "points", "axis",
                             "plate_thickness_mm", "plate_index", "plate_wavelength_nm",
                             "plate_max_angle_rad"});
    r.number("visibility_1", c.visibility_1);
    r.number("visibility_2", c.visibility_2);
    r.number("periods", c.phase_periods);
    r.count("points", c.phase_points);
    if (auto v = r.text("axis")) {
      if (*v == "plate") {
        c.plate_axis = true;
      } else if (*v != "phase") {
        throw FormatError("[fringe] axis: expected 'phase' or 'plate', got '" + *v + "'");
      }
    }
    r.number("plate_thickness_mm", c.plate_thickness_mm);
    r.number("plate_index", c.plate_index);
    r.number("plate_wavelength_nm", c.plate_wavelength_nm);
    r.number("plate_max_angle_rad", c.plate_max_angle_rad);
  }
  {
    detail::SectionReader r(root, "budget", {"mode", "stages", "quoted_overall"});
    if (auto v = r.text("mode")) {
      if (*v == "decomposed") {
        c.budget_mode = ChainMode::decomposed;
      } else if (*v != "verbatim") {
        throw FormatError("[budget] mode: expected 'verbatim' or 'decomposed', got '" + *v + "'");
      }
    }
    if (auto v = r.text("stages")) c.budget_stages = detail::parse_stages(*v);
    r.number("quoted_overall", c.budget_quote);
  }
  c.validate();
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file '" + path.string() + "'");
  try {
    return parse_config(in, path.parent_path());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Shared setup

struct SpectraBundle {
  CrystalSpec source;
  CrystalSpec converter;
  Spectrum emission;
  Spectrum acceptance;
  Spectrum filtered;
};

inline CrystalSpec make_crystal(const CrystalConfig& cc, Process p, const SellmeierLibrary& lib) {
  CrystalSpec c;
  c.process = p;
  c.type = p == Process::spdc ? PhaseMatching::type_II : PhaseMatching::type_I;
  c.length_mm = cc.length_mm;
  c.pump = lookup(lib, cc.pump_set);
  c.signal = lookup(lib, cc.signal_set);
  c.third = lookup(lib, cc.third_set);
  c.poling_um = cc.poling_um ? *cc.poling_um : solve_poling_period(c, cc.pump_nm, cc.signal_nm);
  return c;
}

inline SpectraBundle build_spectra(const RunConfig& cfg) {
  if (!std::filesystem::exists(cfg.sellmeier_file)) {
    throw FormatError("dispersion file not found: '" + cfg.sellmeier_file.string() + "'");
  }
  const SellmeierLibrary lib = load_sellmeier_file(cfg.sellmeier_file);
  SpectraBundle b;
  b.source = make_crystal(cfg.source, Process::spdc, lib);
  b.converter = make_crystal(cfg.converter, Process::sfg, lib);
  const double degenerate = 2.0 * cfg.source.pump_nm;
  const auto grid = wavelength_grid(degenerate, cfg.half_span_nm, cfg.grid_points);
  b.emission = emission_spectrum(b.source, cfg.source.pump_nm, grid);
  if (cfg.unity_acceptance) {
    b.acceptance = b.emission;
    std::fill(b.acceptance.density.begin(), b.acceptance.density.end(), 1.0);
    b.acceptance.truncated = false;
  } else {
    b.acceptance = acceptance_spectrum(b.converter, cfg.converter.pump_nm, grid);
  }
  b.filtered = filtered_spectrum(b.emission, b.acceptance);
  return b;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

inline void prepare_output(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw FormatError("cannot create output directory '" + cfg.output_dir.string() + "': " + ec.message());
}

inline void finish(const RunConfig& cfg, const std::string& command, const KeyValues& summary) {
  write_file(cfg.output_dir / (command + "_summary.txt"),
             [&](std::ostream& o) { write_key_values(o, summary); });
}

inline std::string fwhm_or_note(const Spectrum& s) {
  try {
    return format_double(fwhm(s));
  } catch (const DomainError& e) {
    return std::string("n/a (") + e.what() + ")";
  }
}

// ---------------------------------------------------------------------------
// Commands

inline KeyValues cmd_spectra(const RunConfig& cfg) {
  const SpectraBundle b = build_spectra(cfg);
  prepare_output(cfg);
  write_file(cfg.output_dir / "emission.csv", [&](std::ostream& o) { write_spectrum_csv(o, b.emission); });
  write_file(cfg.output_dir / "acceptance.csv", [&](std::ostream& o) { write_spectrum_csv(o, b.acceptance); });
  write_file(cfg.output_dir / "filtered.csv", [&](std::ostream& o) { write_spectrum_csv(o, b.filtered); });
  KeyValues s{{"source_poling_um", format_double(b.source.poling_um)},
              {"converter_poling_um", format_double(b.converter.poling_um)},
              {"emission_fwhm_nm", fwhm_or_note(b.emission)},
              {"acceptance_fwhm_nm", fwhm_or_note(b.acceptance)},
              {"filtered_fwhm_nm", fwhm_or_note(b.filtered)},
              {"emission_truncated", b.emission.truncated ? "true" : "false"},
              {"acceptance_truncated", b.acceptance.truncated ? "true" : "false"}};
  finish(cfg, "spectra", s);
  return s;
}

inline KeyValues cmd_hom(const RunConfig& cfg) {
  const SpectraBundle b = build_spectra(cfg);
  prepare_output(cfg);
  const auto delays = linspace(cfg.delay_min_mm, cfg.delay_max_mm, cfg.delay_points);
  ScanSettings src = cfg.scan;
  ScanSettings up = cfg.scan;
  up.seed = cfg.scan.seed + 1;
  const ScanResult source = hom_scan(b.emission, cfg.overlap_source, delays, src);
  const ScanResult upconv = hom_scan(b.filtered, cfg.overlap_upconverted, delays, up);
  write_file(cfg.output_dir / "hom_source.csv", [&](std::ostream& o) { write_scan_csv(o, source); });
  write_file(cfg.output_dir / "hom_upconverted.csv", [&](std::ostream& o) { write_scan_csv(o, upconv); });

  KeyValues s{{"source_visibility", format_double(hom_visibility(source))},
              {"upconverted_visibility", format_double(hom_visibility(upconv))}};
  for (const auto& [name, scan] : {std::pair{"source", &source}, std::pair{"upconverted", &upconv}}) {
    std::vector<double> y(scan->size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = scan->observed(i);
    const DipFit g = fit_dip(DipShape::gaussian, scan->params, y);
    const DipFit t = fit_dip(DipShape::triangle, scan->params, y);
    s.emplace_back(std::string(name) + "_gaussian_residual", format_double(g.residual));
    s.emplace_back(std::string(name) + "_triangle_residual", format_double(t.residual));
    s.emplace_back(std::string(name) + "_best_shape", g.residual < t.residual ? "gaussian" : "triangle");
  }
  finish(cfg, "hom", s);
  return s;
}

inline KeyValues cmd_bunching(const RunConfig& cfg) {
  const SpectraBundle b = build_spectra(cfg);
  prepare_output(cfg);
  const auto delays = linspace(cfg.delay_min_mm, cfg.delay_max_mm, cfg.delay_points);
  ScanSettings up = cfg.scan;
  up.seed = cfg.scan.seed + 1;
  const ScanResult source = bunching_scan(b.emission, cfg.bunching_overlap_source, delays, cfg.scan);
  const ScanResult upconv = bunching_scan(b.filtered, cfg.bunching_overlap_upconverted, delays, up);
  write_file(cfg.output_dir / "bunching_source.csv", [&](std::ostream& o) { write_scan_csv(o, source); });
  write_file(cfg.output_dir / "bunching_upconverted.csv", [&](std::ostream& o) { write_scan_csv(o, upconv); });
  KeyValues s{{"source_ratio", format_double(bunching_ratio(source))},
              {"upconverted_ratio", format_double(bunching_ratio(upconv))},
              {"source_ratio_model", format_double(1.0 + cfg.bunching_overlap_source)},
              {"upconverted_ratio_model", format_double(1.0 + cfg.bunching_overlap_upconverted)}};
  finish(cfg, "bunching", s);
  return s;
}

inline std::string verdict_line(const SqlVerdict& v) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(4);
  o << (v.beats_sql ? "beats SQL" : "does not beat SQL") << " (threshold " << v.threshold << ")";
  return o.str();
}

inline KeyValues cmd_fringe(const RunConfig& cfg) {
  prepare_output(cfg);
  const double span = cfg.phase_periods * 2.0 * std::numbers::pi;
  std::vector<double> axis, phases;
  if (cfg.plate_axis) {
    axis = linspace(0.0, cfg.plate_max_angle_rad, cfg.phase_points);
    for (double th : axis) {
      phases.push_back(plate_phase(th, cfg.plate_thickness_mm * 1e-3, cfg.plate_index,
                                   cfg.plate_wavelength_nm * 1e-9));
    }
  } else {
    axis = linspace(0.0, span, cfg.phase_points);
    phases = axis;
  }

  KeyValues s;
  std::vector<FitReport> fits;
  for (int n : {1, 2}) {
    ScanSettings st = cfg.scan;
    st.seed = cfg.scan.seed + static_cast<std::uint64_t>(n);
    const ScanResult phase_scan = noon_fringe(n, n == 1 ? cfg.visibility_1 : cfg.visibility_2, phases, st);
    ScanResult written = phase_scan;
    written.params = axis;
    const std::string tag = "n" + std::to_string(n);
    write_file(cfg.output_dir / ("fringe_" + tag + ".csv"), [&](std::ostream& o) { write_scan_csv(o, written); });
    const FitReport fit = fit_visibility(phase_scan, n);
    write_file(cfg.output_dir / ("fit_" + tag + ".txt"),
               [&](std::ostream& o) { write_key_values(o, to_key_values(fit)); });
    for (auto& kv : to_key_values(fit, tag + "_")) s.push_back(kv);
    fits.push_back(fit);
  }
  const double ratio = fits[1].frequency / fits[0].frequency;
  const double ratio_sigma =
      ratio * std::hypot(fits[0].frequency_sigma / fits[0].frequency, fits[1].frequency_sigma / fits[1].frequency);
  s.emplace_back("period_ratio", format_double(ratio));
  s.emplace_back("period_ratio_sigma", format_double(ratio_sigma));
  const SqlVerdict v = sql_verdict(fits[1].visibility, fits[1].visibility_sigma, 2);
  s.emplace_back("sql_threshold", format_double(v.threshold));
  s.emplace_back("sql_margin_sigma", format_double(v.margin_sigma));
  s.emplace_back("verdict", verdict_line(v));
  finish(cfg, "fringe", s);
  return s;
}

inline KeyValues cmd_budget(const RunConfig& cfg) {
  prepare_output(cfg);
  const EfficiencyChain chain = cfg.budget_stages ? *cfg.budget_stages : default_detection_chain(cfg.budget_mode);
  const EfficiencyBudget b = efficiency_budget(chain, cfg.budget_quote);
  KeyValues s;
  for (std::size_t i = 0; i < b.stages.size(); ++i) {
    s.emplace_back("stage_" + std::to_string(i + 1), b.stages[i].name + " : " + format_double(b.stages[i].efficiency));
  }
  s.emplace_back("single_arm", format_double(b.single_arm));
  s.emplace_back("pair", format_double(b.pair));
  s.emplace_back("quoted_overall", format_double(b.quoted_overall));
  s.emplace_back("single_arm_matches_quote", b.single_arm_matches_quote ? "true" : "false");
  s.emplace_back("pair_matches_quote", b.pair_matches_quote ? "true" : "false");
  if (b.wording_discrepancy) {
    s.emplace_back("discrepancy",
                   "quoted overall efficiency is attributed to a single photon, but the single-arm "
                   "product is " + format_double(b.single_arm) + "; the pair product " +
                       format_double(b.pair) + (b.pair_matches_quote ? " matches it" : " does not match it either"));
  }
  finish(cfg, "budget", s);
  return s;
}

}  // namespace qfc::cli

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

#include "qfc/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace qfc;
namespace fs = std::filesystem;

namespace {

const fs::path kDefaultConfig = fs::path(QFC_CONFIG_DIR) / "default.ini";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qfcsim_test_" + name);
  fs::remove_all(p);
  return p;
}

cli::RunConfig config_in(const std::string& name) {
  auto c = cli::load_config(kDefaultConfig);
  c.output_dir = scratch(name);
  return c;
}

cli::RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return cli::parse_config(in, "/base");
}

std::string value(const KeyValues& kv, const std::string& key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return v;
  }
  ADD_FAILURE() << "missing key " << key;
  return {};
}

double number(const KeyValues& kv, const std::string& key) { return parse_double(value(kv, key), key); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Config, DefaultsAndPaths) {
  const auto c = cli::load_config(kDefaultConfig);
  EXPECT_EQ(c.scan.seed, 20171113u);
  EXPECT_EQ(c.grid_points, 4096u);
  EXPECT_EQ(c.source.pump_nm, 773.5);
  EXPECT_EQ(c.converter.third_set, "ktp_nz");
  EXPECT_FALSE(c.source.poling_um.has_value());
  EXPECT_TRUE(fs::exists(c.sellmeier_file));
  EXPECT_EQ(c.sellmeier_file.lexically_normal(), (fs::path(QFC_DATA_DIR) / "ktp_sellmeier.ini").lexically_normal());
}

TEST(Config, EmptyTextGivesDefaults) {
  const auto c = parse("");
  EXPECT_EQ(c.overlap_source, 0.979);
  EXPECT_EQ(c.visibility_2, 0.8493);
  EXPECT_EQ(c.budget_mode, ChainMode::verbatim);
}

TEST(Config, Overrides) {
  const auto c = parse("[paths]\nsellmeier = k.ini\n[run]\nseed = 5\nnoiseless = true\n"
                       "[source]\npoling_um = 46.5\n[budget]\nstages = a:0.5, b : 0.25\n");
  EXPECT_EQ(c.sellmeier_file, fs::path("/base/k.ini"));
  EXPECT_EQ(c.scan.seed, 5u);
  EXPECT_TRUE(c.scan.noiseless);
  EXPECT_EQ(c.source.poling_um.value(), 46.5);
  ASSERT_TRUE(c.budget_stages.has_value());
  ASSERT_EQ(c.budget_stages->size(), 2u);
  EXPECT_EQ((*c.budget_stages)[1].name, "b");
  EXPECT_EQ((*c.budget_stages)[1].efficiency, 0.25);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse("[run]\nsed = 5\n"), FormatError);
  EXPECT_THROW(parse("[nosuch]\na = 1\n"), FormatError);
  EXPECT_THROW(parse("stray = 1\n"), FormatError);
  EXPECT_THROW(parse("[run]\nrate_hz = fast\n"), FormatError);
  EXPECT_THROW(parse("[run]\nnoiseless = maybe\n"), FormatError);
  EXPECT_THROW(parse("[fringe]\naxis = wedge\n"), FormatError);
  EXPECT_THROW(parse("[budget]\nmode = other\n"), FormatError);
  EXPECT_THROW(parse("[budget]\nstages = a\n"), FormatError);
  EXPECT_THROW(cli::load_config("/nonexistent/config.ini"), FormatError);
}

TEST(Commands, Spectra) {
  const auto c = config_in("spectra");
  const auto s = cli::cmd_spectra(c);
  EXPECT_NEAR(number(s, "emission_fwhm_nm"), 1.3, 0.15 * 1.3);
  EXPECT_NEAR(number(s, "acceptance_fwhm_nm"), 0.5, 0.15 * 0.5);
  EXPECT_LT(number(s, "filtered_fwhm_nm"), number(s, "acceptance_fwhm_nm"));
  EXPECT_EQ(value(s, "emission_truncated"), "false");
  for (const char* f : {"emission.csv", "acceptance.csv", "filtered.csv", "spectra_summary.txt"}) {
    EXPECT_TRUE(fs::exists(c.output_dir / f)) << f;
  }
  std::ifstream in(c.output_dir / "emission.csv");
  const auto back = read_spectrum_csv(in);
  const auto fresh = cli::build_spectra(c).emission;
  EXPECT_EQ(back.wavelength_nm, fresh.wavelength_nm);
  EXPECT_EQ(back.density, fresh.density);
}

TEST(Commands, UnityAcceptancePassesEmissionThrough) {
  auto c = config_in("unity");
  c.unity_acceptance = true;
  cli::cmd_spectra(c);
  EXPECT_EQ(slurp(c.output_dir / "filtered.csv"), slurp(c.output_dir / "emission.csv"));
}

TEST(Commands, MissingDispersionFileNamesPath) {
  auto c = config_in("missing");
  c.sellmeier_file = "/nonexistent/ktp.ini";
  try {
    cli::cmd_spectra(c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/ktp.ini"), std::string::npos);
  }
}

TEST(Commands, HomNoiseless) {
  auto c = config_in("hom");
  c.scan.noiseless = true;
  const auto s = cli::cmd_hom(c);
  EXPECT_NEAR(number(s, "source_visibility"), 0.979, 1e-3);
  EXPECT_NEAR(number(s, "upconverted_visibility"), 0.9672, 1e-3);
  EXPECT_EQ(value(s, "upconverted_best_shape"), "gaussian");
  std::ifstream in(c.output_dir / "hom_source.csv");
  const auto scan = read_scan_csv(in);
  EXPECT_EQ(scan.size(), c.delay_points);
}

TEST(Commands, BunchingNoiseless) {
  auto c = config_in("bunching");
  c.scan.noiseless = true;
  c.bunching_overlap_source = 1.0;
  const auto s = cli::cmd_bunching(c);
  EXPECT_NEAR(number(s, "source_ratio"), 2.0, 1e-3);
  EXPECT_NEAR(number(s, "upconverted_ratio"), 1.9672, 1e-3);
}

TEST(Commands, FringeVerdicts) {
  auto c = config_in("fringe");
  const auto s = cli::cmd_fringe(c);
  EXPECT_NEAR(number(s, "period_ratio"), 2.0, 3.0 * number(s, "period_ratio_sigma"));
  EXPECT_EQ(value(s, "verdict").rfind("beats SQL", 0), 0u);
  std::ifstream in(c.output_dir / "fit_n2.txt");
  const auto fit = fit_report_from(read_key_values(in));
  EXPECT_EQ(format_double(fit.visibility), value(s, "n2_visibility"));

  c.visibility_2 = 0.5;
  c.scan.noiseless = true;
  const auto low = cli::cmd_fringe(c);
  EXPECT_EQ(value(low, "verdict").rfind("does not beat SQL", 0), 0u);
}

TEST(Commands, FringePlateAxis) {
  auto c = config_in("plate");
  c.scan.noiseless = true;
  c.plate_axis = true;
  c.plate_max_angle_rad = 0.5;
  const auto s = cli::cmd_fringe(c);
  EXPECT_NEAR(number(s, "n1_visibility"), c.visibility_1, 1e-6);
  std::ifstream in(c.output_dir / "fringe_n1.csv");
  EXPECT_NEAR(read_scan_csv(in).params.back(), 0.5, 1e-15);
}

TEST(Commands, Budget) {
  auto c = config_in("budget");
  const auto s = cli::cmd_budget(c);
  EXPECT_NEAR(number(s, "single_arm"), 1.29e-3, 1e-5);
  EXPECT_EQ(value(s, "pair_matches_quote"), "true");
  EXPECT_FALSE(value(s, "discrepancy").empty());
  c.budget_stages = EfficiencyChain{};
  EXPECT_THROW(cli::cmd_budget(c), DomainError);
}

TEST(Commands, RerunsAreByteIdentical) {
  auto a = config_in("rerun_a");
  auto b = config_in("rerun_b");
  for (auto* c : {&a, &b}) {
    cli::cmd_hom(*c);
    cli::cmd_bunching(*c);
    cli::cmd_fringe(*c);
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a.output_dir)) {
    EXPECT_EQ(slurp(e.path()), slurp(b.output_dir / e.path().filename())) << e.path();
    ++files;
  }
  EXPECT_GE(files, 9u);
}

TEST(Io, ScanCsvRoundTrip) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1e3);
  for (int trial = 0; trial < 50; ++trial) {
    ScanResult r;
    for (int i = 0; i < 30; ++i) {
      r.params.push_back(u(rng) - 500.0);
      r.expected.push_back(u(rng));
      r.counts.push_back(static_cast<std::int64_t>(u(rng)));
    }
    std::stringstream io;
    write_scan_csv(io, r);
    const auto back = read_scan_csv(io);
    EXPECT_EQ(back.params, r.params);
    EXPECT_EQ(back.expected, r.expected);
    EXPECT_EQ(back.counts, r.counts);
  }
}

TEST(Io, MalformedCsv) {
  std::istringstream bad_header("a,b\n1,2\n");
  EXPECT_THROW(read_spectrum_csv(bad_header), FormatError);
  std::istringstream bad_cells("wavelength_nm,density\n1547,x\n");
  EXPECT_THROW(read_spectrum_csv(bad_cells), FormatError);
  std::istringstream short_row("param,expected,counts,sigma\n1,2,3\n");
  EXPECT_THROW(read_scan_csv(short_row), FormatError);
}

TEST(Io, FitReportRoundTrip) {
  FitReport r;
  r.visibility = 0.8493;
  r.visibility_sigma = 1.0 / 3.0;
  r.frequency = 2.000001;
  r.phase_offset = -0.1;
  r.clamped = true;
  std::stringstream io;
  write_key_values(io, to_key_values(r, "x_"));
  const auto back = fit_report_from(read_key_values(io), "x_");
  EXPECT_EQ(back.visibility, r.visibility);
  EXPECT_EQ(back.visibility_sigma, r.visibility_sigma);
  EXPECT_EQ(back.frequency, r.frequency);
  EXPECT_EQ(back.phase_offset, r.phase_offset);
  EXPECT_EQ(back.clamped, r.clamped);
}

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

#include "qfc/sellmeier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace qfc;

namespace {

const std::string kDataFile = std::string(QFC_DATA_DIR) + "/ktp_sellmeier.ini";

SellmeierLibrary parse(const std::string& text) {
  std::istringstream in(text);
  return parse_sellmeier(in);
}

void expect_bit_equal(const SellmeierCoefficients& a, const SellmeierCoefficients& b) {
  EXPECT_EQ(a.name, b.name);
  EXPECT_EQ(a.source, b.source);
  EXPECT_EQ(a.a, b.a);
  EXPECT_EQ(a.f, b.f);
  EXPECT_EQ(a.resonant, b.resonant);
  EXPECT_EQ(a.poles, b.poles);
  EXPECT_EQ(a.lambda_min_um, b.lambda_min_um);
  EXPECT_EQ(a.lambda_max_um, b.lambda_max_um);
}

}  // namespace

TEST(Sellmeier, LoadsKtpData) {
  const auto lib = load_sellmeier_file(kDataFile);
  ASSERT_EQ(lib.size(), 2u);
  const auto& ny = lookup(lib, "ktp_ny");
  EXPECT_EQ(ny.a, 2.0993);
  ASSERT_EQ(ny.resonant.size(), 1u);
  EXPECT_EQ(ny.resonant[0].strength, 0.922683);
  EXPECT_EQ(ny.resonant[0].resonance, 0.0467695);
  EXPECT_EQ(ny.f, -0.0138408);
  const auto& nz = lookup(lib, "ktp_nz");
  ASSERT_EQ(nz.poles.size(), 2u);
  EXPECT_EQ(nz.poles[1].strength, 110.80672);
  EXPECT_THROW(lookup(lib, "ktp_nx"), FormatError);
}

TEST(Sellmeier, IndexAgainstDirectEvaluation) {
  const auto lib = load_sellmeier_file(kDataFile);
  const double l = 1.547;
  const double l2 = l * l;
  const double nz = std::sqrt(4.59423 + 0.06206 / (l2 - 0.04763) + 110.80672 / (l2 - 86.12171));
  const double ny = std::sqrt(2.0993 + 0.922683 * l2 / (l2 - 0.0467695) - 0.0138408 * l2);
  EXPECT_NEAR(refractive_index(lookup(lib, "ktp_nz"), 1547.0), nz, 1e-14);
  EXPECT_NEAR(refractive_index(lookup(lib, "ktp_ny"), 1547.0), ny, 1e-14);
  EXPECT_GT(nz, 1.7);
  EXPECT_LT(nz, 1.9);
}

TEST(Sellmeier, NormalDispersionInTelecomBand) {
  const auto lib = load_sellmeier_file(kDataFile);
  for (const auto* name : {"ktp_ny", "ktp_nz"}) {
    const auto& c = lookup(lib, name);
    double prev = refractive_index(c, 900.0);
    for (double l = 910.0; l <= 1600.0; l += 10.0) {
      const double n = refractive_index(c, l);
      EXPECT_LT(n, prev) << name << " at " << l;
      prev = n;
    }
  }
}

TEST(Sellmeier, OutsideWindowIsRangeError) {
  const auto lib = load_sellmeier_file(kDataFile);
  EXPECT_THROW(refractive_index(lookup(lib, "ktp_ny"), 5000.0), RangeError);
  EXPECT_THROW(refractive_index(lookup(lib, "ktp_nz"), 200.0), RangeError);
  EXPECT_THROW(refractive_index(lookup(lib, "ktp_nz"), NAN), RangeError);
}

TEST(Sellmeier, MalformedFiles) {
  const std::string ok = "format_version = 1\n[x]\nA = 2\nlambda_min_um = 0.5\nlambda_max_um = 1\n";
  EXPECT_NO_THROW(parse(ok));
  EXPECT_THROW(parse("[x]\nA = 2\nlambda_min_um = 0.5\nlambda_max_um = 1\n"), FormatError);
  EXPECT_THROW(parse("format_version = 2\n[x]\nA = 2\nlambda_min_um = 0.5\nlambda_max_um = 1\n"), FormatError);
  EXPECT_THROW(parse(ok + "G = 1\n"), FormatError);
  EXPECT_THROW(parse("format_version = 1\n[x]\nA = 2\n"), FormatError);
  EXPECT_THROW(parse("format_version = 1\n[x]\nA = 2x\nlambda_min_um = 0.5\nlambda_max_um = 1\n"), FormatError);
  EXPECT_THROW(parse(ok + "B1 = 1\n"), FormatError);
  EXPECT_THROW(parse("format_version = 1\n[x]\nlambda_min_um = 1\nlambda_max_um = 0.5\n"), FormatError);
  EXPECT_THROW(load_sellmeier_file("/nonexistent/k.ini"), FormatError);
}

TEST(Sellmeier, RoundTripIsBitExact) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_int_distribution<int> count(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    SellmeierLibrary lib;
    for (int s = 0; s < 3; ++s) {
      SellmeierCoefficients c;
      c.name = "set" + std::to_string(s);
      c.source = trial % 2 ? "ref " + std::to_string(trial) : "";
      c.a = u(rng);
      c.f = trial % 3 ? u(rng) * 1e-3 : 0.0;
      for (int k = count(rng); k > 0; --k) c.resonant.push_back({u(rng), std::abs(u(rng)) * 1e-2});
      for (int k = count(rng); k > 0; --k) c.poles.push_back({u(rng) * 1e3, std::abs(u(rng)) * 17.0});
      c.lambda_min_um = 0.1 + std::abs(u(rng)) / 30.0;
      c.lambda_max_um = c.lambda_min_um + 1.0 / 3.0;
      lib.emplace(c.name, c);
    }
    const std::string text = serialize_sellmeier(lib);
    const auto back = parse(text);
    ASSERT_EQ(back.size(), lib.size());
    for (const auto& [name, c] : lib) expect_bit_equal(back.at(name), c);
    EXPECT_EQ(serialize_sellmeier(back), text);
  }
}

TEST(Sellmeier, DataFileRoundTrips) {
  const auto lib = load_sellmeier_file(kDataFile);
  const auto back = parse(serialize_sellmeier(lib));
  for (const auto& [name, c] : lib) expect_bit_equal(back.at(name), c);
}

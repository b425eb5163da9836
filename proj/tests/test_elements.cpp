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

#include "qfc/elements.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qfc;

namespace {

constexpr double kPi = std::numbers::pi;

// Born rule by direct basis summation.
double brute_force_probability(const StateVector& s, std::size_t mode) {
  double p = 0.0;
  for (const auto& [b, a] : s.amplitudes()) {
    if (b[mode] == 1) p += std::norm(a);
  }
  return p;
}

}  // namespace

TEST(Beamsplitter, BalancedNullsCoincidences) {
  const auto out = apply_two_mode_mixer(StateVector::basis({"A", "B"}, {1, 1}), beamsplitter(kPi / 4), "A", "B");
  EXPECT_LE(detect(out, {click("A"), click("B")}), 1e-12);
}

TEST(Beamsplitter, ZeroAngleTransmits) {
  const auto u = beamsplitter(0.0);
  EXPECT_TRUE(u.is_unitary());
  EXPECT_EQ(std::abs(u(0, 0)), 1.0);
  EXPECT_EQ(std::abs(u(1, 1)), 1.0);
  EXPECT_EQ(u(0, 1), Complex{});
  EXPECT_EQ(u(1, 0), Complex{});
}

TEST(Beamsplitter, BalancedSinglePhoton) {
  const auto out = apply_two_mode_mixer(StateVector::basis({"A", "B"}, {1, 0}), beamsplitter(kPi / 4), "A", "B");
  EXPECT_NEAR(detect(out, {click("A")}), 0.5, 1e-15);
  EXPECT_NEAR(detect(out, {click("B")}), 0.5, 1e-15);
}

TEST(Beamsplitter, BalancedIsInvolution) {
  const auto u = balanced_beamsplitter();
  EXPECT_LT(max_abs_diff(u * u, TwoModeUnitary::identity()), 1e-15);
}

TEST(FrequencyConverter, FullConversion) {
  const auto out = apply_two_mode_mixer(StateVector::basis({"s@1547", "u@525"}, {1, 0}),
                                        frequency_converter(kPi / 2), "s@1547", "u@525");
  EXPECT_NEAR(probability(out, FockState{{0, 1}}), 1.0, 1e-12);
}

TEST(FrequencyConverter, IdentityAndHalfConversion) {
  EXPECT_LT(max_abs_diff(frequency_converter(0.0), TwoModeUnitary::identity()), 1e-15);
  const auto out = apply_two_mode_mixer(StateVector::basis({"s", "u"}, {1, 0}), frequency_converter(kPi / 4), "s", "u");
  EXPECT_NEAR(probability(out, FockState{{0, 1}}), 0.5, 1e-15);
}

TEST(FrequencyConverter, ConversionProbabilityIsSinSquared) {
  for (double x = -3.0; x <= 3.0; x += 0.37) {
    const auto out = apply_two_mode_mixer(StateVector::basis({"s", "u"}, {1, 0}), frequency_converter(x), "s", "u");
    EXPECT_NEAR(probability(out, FockState{{0, 1}}), std::sin(x) * std::sin(x), 1e-14);
  }
}

TEST(FrequencyConverter, RotationGroupProperties) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const double a = d(rng), b = d(rng);
    EXPECT_LT(max_abs_diff(frequency_converter(a) * frequency_converter(-a), TwoModeUnitary::identity()), 1e-14);
    EXPECT_LT(max_abs_diff(frequency_converter(b) * frequency_converter(a), frequency_converter(a + b)), 1e-14);
  }
}

TEST(ConversionEfficiency, Model) {
  EXPECT_EQ(internal_conversion_efficiency(0.0, 0.8), 0.0);
  const double a = calibrate_conversion(0.660, 0.37);
  EXPECT_NEAR(a, 0.805, 5e-4);
  EXPECT_NEAR(internal_conversion_efficiency(0.660, a), 0.37, 1e-12);
  EXPECT_NEAR(internal_conversion_efficiency(full_conversion_power(a), a), 1.0, 1e-15);
  EXPECT_THROW(internal_conversion_efficiency(-1e-3, a), DomainError);
  double prev = -1.0;
  for (double p = 0.0; p <= full_conversion_power(a); p += full_conversion_power(a) / 200) {
    const double e = internal_conversion_efficiency(p, a);
    EXPECT_GE(e, prev);
    prev = e;
  }
}

TEST(Circuit, EmptyIsIdentity) {
  const auto s = noon_state(2, "A", "B");
  const auto out = apply_circuit(s, {});
  EXPECT_EQ(out.amplitudes(), s.amplitudes());
}

TEST(Circuit, TwoBalancedSplittersRestoreCoincidence) {
  const Circuit c{CircuitElement::splitter("A", "B", kPi / 4), CircuitElement::splitter("A", "B", kPi / 4)};
  const auto out = apply_circuit(StateVector::basis({"A", "B"}, {1, 1}), c);
  EXPECT_NEAR(detect(out, {click("A"), click("B")}), 1.0, 1e-12);
}

TEST(Circuit, PhaseOnNoonAccruesTwice) {
  const double phi = 0.377;
  const auto out = apply_circuit(noon_state(2, "A", "B"), {CircuitElement::phase("B", phi)});
  const Complex ratio = out.amplitude(FockState{{0, 2}}) / out.amplitude(FockState{{2, 0}});
  EXPECT_NEAR(std::abs(ratio - std::polar(1.0, 2.0 * phi)), 0.0, 1e-14);
}

TEST(Circuit, ConverterThenRelabel) {
  const Circuit c{CircuitElement::converter("s", "u", kPi / 2), CircuitElement::relabel("u", "A@525")};
  const auto out = apply_circuit(StateVector::basis({"s", "u"}, {1, 0}), c);
  EXPECT_NEAR(detect(out, {click("A@525")}), 1.0, 1e-12);
  EXPECT_THROW(apply_circuit(out, {CircuitElement::splitter("s", "s", 0.1)}), DomainError);
  EXPECT_THROW(apply_circuit(out, {CircuitElement::phase("s", NAN)}), DomainError);
}

TEST(Detect, Examples) {
  StateVector split({"A", "B"});
  split.add(FockState{{2, 0}}, 1.0 / std::sqrt(2.0));
  split.add(FockState{{0, 2}}, -1.0 / std::sqrt(2.0));
  EXPECT_EQ(detect(split, {click("A"), click("B")}), 0.0);
  EXPECT_NEAR(detect(StateVector::basis({"A", "B"}, {1, 1}), {click("A", 0.5), click("B", 0.5)}), 0.25, 1e-15);
  EXPECT_NEAR(detect(StateVector::basis({"A", "B"}, {2, 0}), {click("A", 0.5)}), 0.75, 1e-15);
  EXPECT_THROW(detect(split, {click("A", 1.1)}), DomainError);
  EXPECT_THROW(detect(split, {click("A", -0.1)}), DomainError);
  EXPECT_THROW(detect(split, {click("Z")}), DomainError);
}

TEST(Detect, ProbabilityBoundsAndMonotonicity) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<ModeId> m{"A", "B", "C"};
  for (int trial = 0; trial < 50; ++trial) {
    StateVector s(m);
    for (const auto& b : enumerate_basis(1 + trial % 3, m)) s.add(b, Complex{g(rng), g(rng)});
    s = s.normalized();
    const double ea = u(rng), eb = u(rng);
    const double p = detect(s, {click("A", ea), click("B", eb)});
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    EXPECT_GE(detect(s, {click("A", std::min(1.0, ea + 0.1)), click("B", eb)}), p - 1e-15);
    EXPECT_GE(detect(s, {click("A", ea), click("B", std::min(1.0, eb + 0.1))}), p - 1e-15);
    const double q = detect(s, {no_click("C", u(rng))});
    EXPECT_GE(q, 0.0);
    EXPECT_LE(q, 1.0);
  }
}

TEST(Detect, IdealSinglePhotonMatchesBornRule) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  const std::vector<ModeId> m{"A", "B", "C"};
  for (int trial = 0; trial < 20; ++trial) {
    StateVector s(m);
    for (const auto& b : enumerate_basis(1, m)) s.add(b, Complex{g(rng), g(rng)});
    s = s.normalized();
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_NEAR(detect(s, {click(m[i])}), brute_force_probability(s, i), 1e-14);
    }
  }
}

TEST(Detect, MultiModeDetectorSumsPhotons) {
  const auto s = StateVector::basis({"A1", "A2"}, {1, 1});
  EXPECT_NEAR(detect(s, {{{"A1", "A2"}, Outcome::click, 0.5}}), 0.75, 1e-15);
  EXPECT_NEAR(detect(s, {{{"A1", "A2"}, Outcome::no_click, 0.5}}), 0.25, 1e-15);
}

TEST(Distinguishability, LinearMix) {
  EXPECT_EQ(mix_distinguishability(1.0, 0.0, 0.5), 0.0);
  EXPECT_EQ(mix_distinguishability(0.0, 0.0, 0.5), 0.5);
  EXPECT_NEAR(mix_distinguishability(0.979, 0.0, 0.5), 0.0105, 1e-15);
  EXPECT_THROW(mix_distinguishability(1.5, 0.0, 0.5), DomainError);
}

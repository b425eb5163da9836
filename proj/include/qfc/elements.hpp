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

// Optical elements as two-mode unitaries, circuits built from them, and
// lossy threshold detection.
//
// Conventions:
//   splitter(θ)   = [[cosθ,  sinθ], [sinθ, −cosθ]]   (real, involutive; 50:50 at θ = π/4)
//   converter(ξt) = [[cosξt, −sinξt], [sinξt, cosξt]] (mode 1 = signal, mode 2 = sum frequency)
//   phase(φ)      multiplies |n> on the target mode by e^{inφ}

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qfc/error.hpp"
#include "qfc/fock.hpp"
#include "qfc/unitary.hpp"

namespace qfc {

inline TwoModeUnitary beamsplitter(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c, s, s, -c};
}

inline TwoModeUnitary balanced_beamsplitter() { return beamsplitter(std::numbers::pi / 4); }

/// Heisenberg evolution of the sum-frequency interaction over a crystal:
/// a1 -> a1 cos(ξt) − a2 sin(ξt), a2 -> a2 cos(ξt) + a1 sin(ξt). A single
/// signal photon converts with probability sin²(ξt).
inline TwoModeUnitary frequency_converter(double xi_t) {
  const double c = std::cos(xi_t);
  const double s = std::sin(xi_t);
  return {c, -s, s, c};
}

/// Internal conversion efficiency sin²(a·√P) of a pumped converter, with P the
/// circulating pump power in watts and `a` in W^-1/2. The coupling scales with
/// the pump field amplitude, i.e. with √P.
inline double internal_conversion_efficiency(double power_w, double a) {
  if (!(power_w >= 0.0)) throw DomainError("circulating power must be nonnegative");
  const double s = std::sin(a * std::sqrt(power_w));
  return s * s;
}

/// The calibration constant for which the model passes through
/// (power_w, efficiency) on its first rising branch.
inline double calibrate_conversion(double power_w, double efficiency) {
  if (!(power_w > 0.0)) throw DomainError("calibration power must be positive");
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw DomainError("calibration efficiency must lie in [0,1]");
  }
  return std::asin(std::sqrt(efficiency)) / std::sqrt(power_w);
}

/// Circulating power at which the model reaches full conversion.
inline double full_conversion_power(double a) {
  const double x = std::numbers::pi / (2.0 * a);
  return x * x;
}

inline StateVector apply_phase(const StateVector& state, const ModeId& mode, double phi) {
  const std::size_t i = state.mode_index(mode);
  StateVector out(state.modes());
  for (const auto& [s, a] : state.amplitudes()) {
    out.add(s, a * std::polar(1.0, phi * s[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Circuits

struct CircuitElement {
  enum class Kind { splitter, phase, converter, relabel };

  Kind kind;
  ModeId first;
  ModeId second;  // unused for phase; relabel target for relabel
  double parameter = 0.0;

  static CircuitElement splitter(ModeId a, ModeId b, double theta) {
    return {Kind::splitter, std::move(a), std::move(b), theta};
  }
  static CircuitElement phase(ModeId m, double phi) { return {Kind::phase, std::move(m), {}, phi}; }
  static CircuitElement converter(ModeId signal, ModeId sum, double xi_t) {
    return {Kind::converter, std::move(signal), std::move(sum), xi_t};
  }
  static CircuitElement relabel(ModeId from, ModeId to) {
    return {Kind::relabel, std::move(from), std::move(to), 0.0};
  }

  void validate() const {
    if (!std::isfinite(parameter)) throw DomainError("circuit element parameter is not finite");
    if (kind != Kind::phase && first == second) {
      throw DomainError("circuit element targets the same mode twice");
    }
  }
};

using Circuit = std::vector<CircuitElement>;

inline StateVector apply_element(const StateVector& state, const CircuitElement& e) {
  e.validate();
  switch (e.kind) {
    case CircuitElement::Kind::splitter:
      return apply_two_mode_mixer(state, beamsplitter(e.parameter), e.first, e.second);
    case CircuitElement::Kind::converter:
      return apply_two_mode_mixer(state, frequency_converter(e.parameter), e.first, e.second);
    case CircuitElement::Kind::phase:
      return apply_phase(state, e.first, e.parameter);
    case CircuitElement::Kind::relabel:
      return state.relabeled(e.first, e.second);
  }
  throw DomainError("unknown circuit element kind");
}

inline StateVector apply_circuit(StateVector state, const Circuit& circuit) {
  for (const auto& e : circuit) state = apply_element(state, e);
  return state;
}

// ---------------------------------------------------------------------------
// Detection

enum class Outcome { click, no_click };

/// A threshold (non-number-resolving) detector. It may watch several modes,
/// e.g. the two internal families used to model distinguishable photons; it
/// then sees their summed photon number.
struct Detector {
  std::vector<ModeId> modes;
  Outcome outcome = Outcome::click;
  double efficiency = 1.0;
};

using DetectorPattern = std::vector<Detector>;

inline Detector click(ModeId m, double efficiency = 1.0) {
  return {{std::move(m)}, Outcome::click, efficiency};
}
inline Detector no_click(ModeId m, double efficiency = 1.0) {
  return {{std::move(m)}, Outcome::no_click, efficiency};
}

/// Probability of a single detector's outcome given n incident photons.
inline double outcome_probability(Outcome o, int n, double efficiency) {
  const double miss = std::pow(1.0 - efficiency, n);
  return o == Outcome::click ? 1.0 - miss : miss;
}

/// Probability that every detector in `pattern` reports its required outcome.
/// Modes not watched by any detector are traced out.
inline double detect(const StateVector& state, const DetectorPattern& pattern) {
  std::vector<std::vector<std::size_t>> indices;
  indices.reserve(pattern.size());
  for (const auto& d : pattern) {
    if (!(d.efficiency >= 0.0 && d.efficiency <= 1.0)) {
      throw DomainError("detector efficiency must lie in [0,1]");
    }
    if (d.modes.empty()) throw DomainError("detector watches no modes");
    auto& idx = indices.emplace_back();
    for (const auto& m : d.modes) idx.push_back(state.mode_index(m));
  }
  double p = 0.0;
  for (const auto& [s, a] : state.amplitudes()) {
    double f = std::norm(a);
    for (std::size_t k = 0; k < pattern.size() && f != 0.0; ++k) {
      int n = 0;
      for (std::size_t i : indices[k]) n += s[i];
      f *= outcome_probability(pattern[k].outcome, n, pattern[k].efficiency);
    }
    p += f;
  }
  return p;
}

/// Coincidence rate for partially distinguishable photons with mode overlap
/// γ: γ·(indistinguishable prediction) + (1 − γ)·(distinguishable prediction).
inline double mix_distinguishability(double overlap, double indistinguishable,
                                     double distinguishable) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw DomainError("overlap must lie in [0,1]");
  return overlap * indistinguishable + (1.0 - overlap) * distinguishable;
}

}  // namespace qfc

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

// Truncated Fock-space states over labeled optical modes.
//
// A StateVector owns an ordered list of ModeIds and a sparse map from
// occupation patterns (FockState, aligned with that list) to complex
// amplitudes. Entries with |amplitude| below kZeroAmplitude are dropped.

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qfc/error.hpp"
#include "qfc/unitary.hpp"

namespace qfc {

inline constexpr double kZeroAmplitude = 1e-12;

/// Opaque mode label such as "A@1547nm". Two photons interfere only when an
/// element maps them onto the same ModeId.
class ModeId {
 public:
  ModeId() = default;
  explicit ModeId(std::string label) : label_(std::move(label)) {}
  ModeId(const char* label) : label_(label) {}  // NOLINT(google-explicit-constructor)

  const std::string& label() const { return label_; }

  friend auto operator<=>(const ModeId&, const ModeId&) = default;
  friend bool operator==(const ModeId&, const ModeId&) = default;

 private:
  std::string label_;
};

struct FockLimits {
  int max_photons = 6;
  std::size_t max_basis = 1u << 20;
};

/// Occupation numbers, positionally aligned with a mode list.
struct FockState {
  std::vector<int> occupations;

  int total() const {
    int n = 0;
    for (int k : occupations) n += k;
    return n;
  }
  std::size_t size() const { return occupations.size(); }
  int operator[](std::size_t i) const { return occupations[i]; }

  friend auto operator<=>(const FockState&, const FockState&) = default;
  friend bool operator==(const FockState&, const FockState&) = default;
};

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

inline Complex ipow(Complex base, int e) {
  Complex r{1.0};
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

inline void check_unique(std::span<const ModeId> modes) {
  std::vector<ModeId> sorted(modes.begin(), modes.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("duplicate mode label in mode set");
  }
}

}  // namespace detail

class StateVector {
 public:
  using Amplitudes = std::map<FockState, Complex>;

  StateVector() = default;
  explicit StateVector(std::vector<ModeId> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw DomainError("state needs at least one mode");
    detail::check_unique(modes_);
  }

  /// The single basis state |occupations> with amplitude 1.
  static StateVector basis(std::vector<ModeId> modes, std::vector<int> occupations) {
    StateVector s(std::move(modes));
    if (occupations.size() != s.modes_.size()) {
      throw DomainError("occupation pattern length does not match mode count");
    }
    for (int n : occupations) {
      if (n < 0) throw DomainError("negative photon count");
    }
    s.add(FockState{std::move(occupations)}, Complex{1.0});
    return s;
  }

  const std::vector<ModeId>& modes() const { return modes_; }
  const Amplitudes& amplitudes() const { return amps_; }
  std::size_t size() const { return amps_.size(); }

  bool has_mode(const ModeId& m) const {
    return std::find(modes_.begin(), modes_.end(), m) != modes_.end();
  }

  std::size_t mode_index(const ModeId& m) const {
    auto it = std::find(modes_.begin(), modes_.end(), m);
    if (it == modes_.end()) throw DomainError("unknown mode '" + m.label() + "'");
    return static_cast<std::size_t>(it - modes_.begin());
  }

  Complex amplitude(const FockState& s) const {
    auto it = amps_.find(s);
    return it == amps_.end() ? Complex{} : it->second;
  }

  /// Accumulates `amp` onto basis state `s`.
  void add(const FockState& s, Complex amp) {
    if (s.size() != modes_.size()) throw DomainError("basis state does not match mode count");
    Complex& slot = amps_[s];
    slot += amp;
    if (std::abs(slot) < kZeroAmplitude) amps_.erase(s);
  }

  double norm_squared() const {
    double n = 0.0;
    for (const auto& [_, a] : amps_) n += std::norm(a);
    return n;
  }

  StateVector normalized() const {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) throw DomainError("cannot normalize the zero vector");
    StateVector out(modes_);
    for (const auto& [s, a] : amps_) out.amps_.emplace(s, a / n);
    return out;
  }

  /// Common photon number of all basis terms, or -1 if they differ (or empty).
  int photon_number() const {
    int n = -1;
    for (const auto& [s, _] : amps_) {
      const int t = s.total();
      if (n == -1) {
        n = t;
      } else if (n != t) {
        return -1;
      }
    }
    return n;
  }

  /// Renames one mode; `to` must not already be present.
  StateVector relabeled(const ModeId& from, const ModeId& to) const {
    const std::size_t i = mode_index(from);
    if (from != to && has_mode(to)) {
      throw DomainError("relabel target '" + to.label() + "' already in mode set");
    }
    StateVector out = *this;
    out.modes_[i] = to;
    return out;
  }

 private:
  friend StateVector apply_two_mode_mixer(const StateVector&, const TwoModeUnitary&,
                                          const ModeId&, const ModeId&);

  std::vector<ModeId> modes_;
  Amplitudes amps_;
};

/// All occupation patterns with `n_photons` in total over `modes`, in
/// descending lexicographic order (|20>, |11>, |02> for two modes).
inline std::vector<FockState> enumerate_basis(int n_photons, std::span<const ModeId> modes,
                                              const FockLimits& limits = {}) {
  if (n_photons < 0) throw DomainError("photon number must be nonnegative");
  if (modes.empty()) throw DomainError("mode list must be nonempty");
  if (n_photons > limits.max_photons) {
    throw CapacityError("photon number " + std::to_string(n_photons) +
                        " exceeds truncation " + std::to_string(limits.max_photons));
  }
  const int m = static_cast<int>(modes.size());
  const double count = detail::binomial(n_photons + m - 1, n_photons);
  if (count > static_cast<double>(limits.max_basis)) {
    throw CapacityError("basis size " + std::to_string(static_cast<long double>(count)) +
                        " exceeds limit " + std::to_string(limits.max_basis));
  }

  std::vector<FockState> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<int> occ(modes.size(), 0);
  // Place as many photons as possible in the leftmost free mode first.
  auto recurse = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos + 1 == occ.size()) {
      occ[pos] = remaining;
      out.push_back(FockState{occ});
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      occ[pos] = k;
      self(self, pos + 1, remaining - k);
    }
    occ[pos] = 0;
  };
  recurse(recurse, 0, n_photons);
  return out;
}

/// (|N,0> + |0,N>)/√2 over the two modes.
inline StateVector noon_state(int n, const ModeId& a, const ModeId& b,
                              const FockLimits& limits = {}) {
  if (n < 1) throw DomainError("NOON state needs N >= 1");
  if (n > limits.max_photons) {
    throw CapacityError("NOON N=" + std::to_string(n) + " exceeds truncation " +
                        std::to_string(limits.max_photons));
  }
  StateVector s({a, b});
  const double h = 1.0 / std::sqrt(2.0);
  s.add(FockState{{n, 0}}, Complex{h});
  s.add(FockState{{0, n}}, Complex{h});
  return s;
}

/// <a|b>. Both states must carry the same ordered mode list.
inline Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.modes() != b.modes()) throw DomainError("inner product of states over different modes");
  Complex sum{};
  const auto& small = a.size() <= b.size() ? a.amplitudes() : b.amplitudes();
  for (const auto& [s, _] : small) sum += std::conj(a.amplitude(s)) * b.amplitude(s);
  return sum;
}

/// Born-rule probability of the exact occupation pattern `s`.
inline double probability(const StateVector& state, const FockState& s) {
  return std::norm(state.amplitude(s));
}

/// Applies a two-mode linear-optical transformation by substituting
/// a†_A -> U11 a†_A + U21 a†_B and a†_B -> U12 a†_A + U22 a†_B in every basis
/// term and re-expanding with the √(n!) normalization of Fock states.
inline StateVector apply_two_mode_mixer(const StateVector& state, const TwoModeUnitary& u,
                                        const ModeId& mode_a, const ModeId& mode_b) {
  if (!u.is_unitary(1e-12)) {
    throw DomainError("two-mode matrix is not unitary (defect " +
                      std::to_string(u.unitarity_defect()) + ")");
  }
  if (mode_a == mode_b) throw DomainError("mixer needs two distinct modes");
  const std::size_t ia = state.mode_index(mode_a);
  const std::size_t ib = state.mode_index(mode_b);

  StateVector out(state.modes());
  for (const auto& [basis, amp] : state.amplitudes()) {
    const int na = basis[ia];
    const int nb = basis[ib];
    const double in_norm = std::sqrt(detail::factorial(na) * detail::factorial(nb));
    FockState target = basis;
    for (int j = 0; j <= na; ++j) {
      // j of the A-photons stay in A, na - j move to B.
      const Complex from_a = detail::binomial(na, j) * detail::ipow(u(0, 0), j) *
                             detail::ipow(u(1, 0), na - j);
      for (int k = 0; k <= nb; ++k) {
        const Complex from_b = detail::binomial(nb, k) * detail::ipow(u(0, 1), k) *
                               detail::ipow(u(1, 1), nb - k);
        const int pa = j + k;
        const int pb = na + nb - pa;
        const double out_norm = std::sqrt(detail::factorial(pa) * detail::factorial(pb));
        target.occupations[ia] = pa;
        target.occupations[ib] = pb;
        const Complex c = amp * from_a * from_b * (out_norm / in_norm);
        if (c != Complex{}) out.amps_[target] += c;
      }
    }
  }
  std::erase_if(out.amps_, [](const auto& kv) { return std::abs(kv.second) < kZeroAmplitude; });
  return out;
}

}  // namespace qfc

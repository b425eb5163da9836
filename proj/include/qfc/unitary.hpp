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

#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace qfc {

using Complex = std::complex<double>;

/// 2x2 complex matrix acting on a pair of optical modes. Entry (r, c) maps
/// input mode c to output mode r in the Heisenberg picture, so the creation
/// operators transform as a†_c -> sum_r U(r, c) a†_r.
class TwoModeUnitary {
 public:
  constexpr TwoModeUnitary() : m_{Complex{1}, Complex{0}, Complex{0}, Complex{1}} {}
  constexpr TwoModeUnitary(Complex u11, Complex u12, Complex u21, Complex u22)
      : m_{u11, u12, u21, u22} {}

  static constexpr TwoModeUnitary identity() { return {}; }

  constexpr Complex operator()(int row, int col) const { return m_[2 * row + col]; }

  TwoModeUnitary adjoint() const {
    return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
  }

  friend TwoModeUnitary operator*(const TwoModeUnitary& a, const TwoModeUnitary& b) {
    return {a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0), a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1),
            a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0), a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1)};
  }

  /// Largest absolute entry of U†U − I.
  double unitarity_defect() const {
    const TwoModeUnitary p = adjoint() * (*this);
    double worst = 0.0;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        worst = std::max(worst, std::abs(p(r, c) - Complex{r == c ? 1.0 : 0.0}));
      }
    }
    return worst;
  }

  bool is_unitary(double tol = 1e-12) const { return unitarity_defect() <= tol; }

  /// Largest absolute entry of the difference.
  friend double max_abs_diff(const TwoModeUnitary& a, const TwoModeUnitary& b) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a.m_[i] - b.m_[i]));
    return worst;
  }

 private:
  std::array<Complex, 4> m_;
};

}  // namespace qfc

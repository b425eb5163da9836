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

// Quasi-phase-matching spectra of the pair source and the up-conversion
// crystal, bandwidth extraction, and HOM dip profiles.
//
// Wavevectors are k = 2πn/λ. The mismatch for each process is
//
//   SPDC (pump → signal + idler): Δk = k_p − k_s − k_i + 2π/Λ
//   SFG  (pump + signal → sum):   Δk = k_sum − k_p − k_s − 2π/Λ
//
// The grating term enters with opposite sign for the two processes so that a
// positive poling period cancels the material mismatch in each case.

#pragma once

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qfc/error.hpp"
#include "qfc/sellmeier.hpp"
#include "qfc/text.hpp"

namespace qfc {

enum class Process { spdc, sfg };
enum class PhaseMatching { type_I, type_II };

/// A periodically poled crystal. The three dispersion sets follow the
/// process's wave order: SPDC (pump, signal, idler), SFG (pump, signal, sum).
struct CrystalSpec {
  Process process = Process::spdc;
  PhaseMatching type = PhaseMatching::type_II;
  double length_mm = 20.0;
  double poling_um = 0.0;
  SellmeierCoefficients pump;
  SellmeierCoefficients signal;
  SellmeierCoefficients third;

  void validate() const {
    if (!(length_mm > 0.0)) throw DomainError("crystal length must be positive");
    if (!(poling_um > 0.0)) throw DomainError("poling period must be positive");
  }
};

inline double wavevector_per_m(double index, double lambda_nm) {
  return 2.0 * std::numbers::pi * index / (lambda_nm * 1e-9);
}

/// Wavelength fixed by energy conservation from the other two: the idler for
/// SPDC (pump, signal) or the sum wave for SFG (pump, signal).
inline double conjugate_wavelength(Process p, double pump_nm, double signal_nm) {
  const double inv = p == Process::spdc ? 1.0 / pump_nm - 1.0 / signal_nm
                                        : 1.0 / pump_nm + 1.0 / signal_nm;
  if (!(inv > 0.0)) throw DomainError("no energy-conserving partner wavelength");
  return 1.0 / inv;
}

namespace detail {

inline void check_energy(Process p, double a, double b, double c) {
  // SPDC: 1/a = 1/b + 1/c. SFG: 1/c = 1/a + 1/b.
  const double lhs = p == Process::spdc ? 1.0 / a : 1.0 / c;
  const double rhs = p == Process::spdc ? 1.0 / b + 1.0 / c : 1.0 / a + 1.0 / b;
  if (!(std::abs(lhs - rhs) <= 1e-6 * std::abs(lhs))) {
    throw DomainError("wavelengths " + format_double(a) + ", " + format_double(b) + ", " +
                      format_double(c) + " nm violate energy conservation");
  }
}

inline double grating_sign(Process p) { return p == Process::spdc ? 1.0 : -1.0; }

}  // namespace detail

/// Δk without the grating term, rad/m.
inline double material_mismatch(const CrystalSpec& c, double pump_nm, double signal_nm,
                                double third_nm) {
  detail::check_energy(c.process, pump_nm, signal_nm, third_nm);
  const double kp = wavevector_per_m(refractive_index(c.pump, pump_nm), pump_nm);
  const double ks = wavevector_per_m(refractive_index(c.signal, signal_nm), signal_nm);
  const double k3 = wavevector_per_m(refractive_index(c.third, third_nm), third_nm);
  return c.process == Process::spdc ? kp - ks - k3 : k3 - kp - ks;
}

inline double grating_vector_per_m(double poling_um) {
  return 2.0 * std::numbers::pi / (poling_um * 1e-6);
}

/// Phase mismatch in rad/m. Argument order follows the process: SPDC
/// (pump, signal, idler), SFG (pump, signal, sum).
inline double phase_mismatch(const CrystalSpec& c, double pump_nm, double signal_nm,
                             double third_nm) {
  if (!(c.poling_um > 0.0)) throw DomainError("poling period must be positive");
  return material_mismatch(c, pump_nm, signal_nm, third_nm) +
         detail::grating_sign(c.process) * grating_vector_per_m(c.poling_um);
}

/// Poling period (μm) that zeroes Δk at the given pump and signal wavelengths.
/// Searches [min_um, max_um] and requires |Δk·L| ≤ 1e-9 at the root.
inline double solve_poling_period(const CrystalSpec& templ, double pump_nm, double signal_nm,
                                  double min_um = 0.5, double max_um = 2000.0) {
  if (!(templ.length_mm > 0.0)) throw DomainError("crystal length must be positive");
  const double third = conjugate_wavelength(templ.process, pump_nm, signal_nm);
  const double material = material_mismatch(templ, pump_nm, signal_nm, third);
  const double length_m = templ.length_mm * 1e-3;
  const double sign = detail::grating_sign(templ.process);
  auto residual = [&](double poling_um) {
    return (material + sign * grating_vector_per_m(poling_um)) * length_m;
  };
  const double f_lo = residual(min_um);
  const double f_hi = residual(max_um);
  if (f_lo == 0.0) return min_um;
  if (f_hi == 0.0) return max_um;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw ConvergenceError("no poling period in [" + format_double(min_um) + ", " +
                           format_double(max_um) + "] um zeroes the phase mismatch");
  }
  std::uintmax_t iters = 200;
  auto [lo, hi] = boost::math::tools::toms748_solve(
      residual, min_um, max_um, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
  const double root = std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
  if (!(std::abs(residual(root)) <= 1e-9)) {
    throw ConvergenceError("poling period search stalled at |dk L| = " +
                           format_double(std::abs(residual(root))));
  }
  return root;
}

// ---------------------------------------------------------------------------
// Spectra

/// Nonnegative density sampled on a uniform wavelength grid. `center_nm` is
/// the reference wavelength for frequency detuning (degeneracy for pair
/// sources, the phase-matched signal for converters). `truncated` is set when
/// the main lobe is not contained in the grid.
struct Spectrum {
  std::vector<double> wavelength_nm;
  std::vector<double> density;
  double center_nm = 0.0;
  bool truncated = false;

  std::size_t size() const { return density.size(); }

  double peak() const {
    return density.empty() ? 0.0 : *std::max_element(density.begin(), density.end());
  }

  bool is_uniform(double rel_tol = 1e-6) const {
    if (wavelength_nm.size() < 2) return false;
    const double step = wavelength_nm[1] - wavelength_nm[0];
    if (!(step > 0.0)) return false;
    for (std::size_t i = 1; i < wavelength_nm.size(); ++i) {
      const double d = wavelength_nm[i] - wavelength_nm[i - 1];
      if (std::abs(d - step) > rel_tol * step) return false;
    }
    return true;
  }

  void validate() const {
    if (wavelength_nm.size() != density.size() || density.size() < 2) {
      throw DomainError("spectrum grid and density must have equal length >= 2");
    }
    for (std::size_t i = 0; i < density.size(); ++i) {
      if (!(density[i] >= 0.0)) throw DomainError("spectrum density must be nonnegative");
      if (i > 0 && !(wavelength_nm[i] > wavelength_nm[i - 1])) {
        throw DomainError("spectrum grid must be strictly increasing");
      }
    }
  }

  /// Copy rescaled to unit peak. Idempotent.
  Spectrum normalized() const {
    const double p = peak();
    if (!(p > 0.0)) throw DomainError("cannot normalize an all-zero spectrum");
    Spectrum out = *this;
    for (double& v : out.density) v /= p;
    return out;
  }
};

/// `points` uniformly spaced wavelengths, center + (i − points/2)·step with
/// step = 2·half_span/points, so the center itself is a grid point.
inline std::vector<double> wavelength_grid(double center_nm, double half_span_nm,
                                           std::size_t points = 4096) {
  if (points < 2 || !(half_span_nm > 0.0)) throw DomainError("grid needs >= 2 points and a span");
  const double step = 2.0 * half_span_nm / static_cast<double>(points);
  std::vector<double> g(points);
  const auto half = static_cast<std::ptrdiff_t>(points / 2);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = center_nm + static_cast<double>(static_cast<std::ptrdiff_t>(i) - half) * step;
  }
  return g;
}

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

namespace detail {

inline void flag_truncation(Spectrum& s) {
  const double p = s.peak();
  s.truncated = p > 0.0 && (s.density.front() >= 0.5 * p || s.density.back() >= 0.5 * p);
}

inline Spectrum phase_matching_spectrum(const CrystalSpec& c, double pump_nm,
                                        std::span<const double> grid, double center_nm) {
  c.validate();
  Spectrum s;
  s.center_nm = center_nm;
  s.wavelength_nm.assign(grid.begin(), grid.end());
  s.density.resize(grid.size());
  const double half_len = 0.5 * c.length_mm * 1e-3;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double third = conjugate_wavelength(c.process, pump_nm, grid[i]);
    const double x = phase_mismatch(c, pump_nm, grid[i], third) * half_len;
    const double v = sinc(x);
    s.density[i] = v * v;
  }
  s.validate();
  flag_truncation(s);
  return s;
}

}  // namespace detail

/// Degenerate pair emission sinc²(Δk L/2) versus signal wavelength, with the
/// idler slaved by energy conservation. Equals 1 where Δk = 0.
inline Spectrum emission_spectrum(const CrystalSpec& c, double pump_nm,
                                  std::span<const double> grid) {
  if (c.process != Process::spdc) throw DomainError("emission spectrum needs an SPDC crystal");
  return detail::phase_matching_spectrum(c, pump_nm, grid, 2.0 * pump_nm);
}

/// Signal acceptance sinc²(Δk L/2) of a sum-frequency crystal under a fixed
/// narrow-band pump. The reference wavelength is the grid center.
inline Spectrum acceptance_spectrum(const CrystalSpec& c, double pump_nm,
                                    std::span<const double> grid) {
  if (c.process != Process::sfg) throw DomainError("acceptance spectrum needs an SFG crystal");
  if (grid.empty()) throw DomainError("empty grid");
  return detail::phase_matching_spectrum(c, pump_nm, grid, grid[grid.size() / 2]);
}

/// Pair spectrum after both photons pass the converter: F·G², peak 1.
inline Spectrum filtered_spectrum(const Spectrum& emission, const Spectrum& acceptance) {
  if (emission.wavelength_nm != acceptance.wavelength_nm) {
    throw DomainError("filtered spectrum needs identical wavelength grids");
  }
  Spectrum out = emission;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.density[i] *= acceptance.density[i] * acceptance.density[i];
  }
  out = out.normalized();
  detail::flag_truncation(out);
  return out;
}

/// Full width at half maximum with linear interpolation. Throws if the half
/// level is not crossed on both sides or if a second region reaches it.
inline double fwhm(const Spectrum& s) {
  s.validate();
  const auto& y = s.density;
  const auto& x = s.wavelength_nm;
  const auto ipk = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[ipk];
  if (!(half > 0.0)) throw DomainError("fwhm of an all-zero spectrum");

  std::size_t l = ipk;
  while (l > 0 && y[l - 1] >= half) --l;
  std::size_t r = ipk;
  while (r + 1 < y.size() && y[r + 1] >= half) ++r;
  if (l == 0 || r + 1 == y.size()) throw DomainError("half maximum not crossed within the grid");

  for (std::size_t i = 0; i < y.size(); ++i) {
    if ((i < l - 1 || i > r + 1) && y[i] >= half) {
      throw DomainError("fwhm is ambiguous: a second peak reaches half maximum");
    }
  }
  auto cross = [&](std::size_t below, std::size_t above) {
    return x[below] + (half - y[below]) * (x[above] - x[below]) / (y[above] - y[below]);
  };
  return cross(r + 1, r) - cross(l - 1, l);
}

/// Normalized two-photon overlap g(δ) for path-length differences δ (mm):
///
///   g(τ) = ∫ S(Ω) cos(2Ωτ) dΩ / ∫ S(Ω) dΩ,  τ = δ/c,
///
/// where Ω = 2πc(1/λ − 1/λ_center) is the signal detuning from degeneracy and
/// the idler sits at −Ω. Only the symmetric part of S contributes. g(0) = 1.
inline std::vector<double> two_photon_overlap(const Spectrum& s, std::span<const double> delays_mm) {
  s.validate();
  if (!s.is_uniform()) throw DomainError("two-photon overlap needs a uniform wavelength grid");
  if (!(s.center_nm > 0.0)) throw DomainError("spectrum has no center wavelength");

  // Integrate over the uniform λ grid with Jacobian |dΩ/dλ| ∝ 1/λ².
  std::vector<double> weight(s.size());
  std::vector<double> phase_per_mm(s.size());
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lam = s.wavelength_nm[i];
    weight[i] = s.density[i] / (lam * lam);
    total += weight[i];
    // 2Ωτ = 4πδ(1/λ − 1/λ_c); δ in mm, λ in nm.
    phase_per_mm[i] = 4.0 * std::numbers::pi * 1e6 * (1.0 / lam - 1.0 / s.center_nm);
  }
  if (!(total > 0.0)) throw DomainError("two-photon overlap of an all-zero spectrum");

  std::vector<double> g(delays_mm.size());
  for (std::size_t j = 0; j < delays_mm.size(); ++j) {
    if (delays_mm[j] == 0.0) {
      g[j] = 1.0;
      continue;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (weight[i] != 0.0) acc += weight[i] * std::cos(phase_per_mm[i] * delays_mm[j]);
    }
    g[j] = acc / total;
  }
  return g;
}

/// Coincidence probability C(δ) = ½(1 − V·g(δ)) behind a balanced splitter.
inline std::vector<double> hom_profile(const Spectrum& s, std::span<const double> delays_mm,
                                       double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw DomainError("visibility must lie in [0,1]");
  std::vector<double> c = two_photon_overlap(s, delays_mm);
  for (double& v : c) v = 0.5 * (1.0 - visibility * v);
  return c;
}

/// Two-photon coherence length (mm) for a Gaussian envelope of FWHM Δλ:
/// L_c = (2 ln2/π)·λ0²/Δλ, which is the HOM dip FWHM of such a spectrum.
inline double coherence_length(double center_nm, double bandwidth_nm) {
  if (!(bandwidth_nm > 0.0)) throw DomainError("bandwidth must be positive");
  return 2.0 * std::numbers::ln2 / std::numbers::pi * center_nm * center_nm / bandwidth_nm * 1e-6;
}

}  // namespace qfc

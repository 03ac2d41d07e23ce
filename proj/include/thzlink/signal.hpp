// SPDX-License-Identifier: Apache-2.0
//
// thzlink - fiber-THz-fiber 2x2 MIMO link simulator
// Copyright (c) 2026 thzlink contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "thzlink/fft.hpp"
#include "thzlink/util.hpp"

namespace thzlink {

// ---------------------------------------------------------------------------
// Deterministic RNG
// ---------------------------------------------------------------------------

/// Seeded random source. A given (seed, stream) pair reproduces the same
/// sequence regardless of threading or evaluation order, which is what makes
/// sweep CSVs byte-identical across runs and worker counts. Gaussians come
/// from an explicit Box-Muller transform because the std:: distributions are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_id_(stream), engine_(mix(seed, stream)) {}

  /// Derive an independent child stream. Same (seed, id) -> same child.
  Rng stream(std::uint64_t id) const { return Rng(seed_, splitmix64(stream_id_) ^ id); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  int bit() { return static_cast<int>(engine_() & 1u); }

  /// Standard normal.
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  cpx gauss_cpx() {
    const double re = gauss();
    const double im = gauss();
    return cpx(re, im);
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream ^ 0xd1b54a32d192ed03ULL));
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Signal
// ---------------------------------------------------------------------------

/// Uniformly sampled complex envelope, 1 or 2 polarizations. Amplitudes are
/// in sqrt(watt): |a|^2 is instantaneous power in watts and powers add across
/// polarizations. center_freq_hz is the absolute frequency the envelope is
/// referenced to (0 for electrical baseband/IF signals).
///
/// Signals are treated as immutable values: every operation returns a new
/// Signal, so independent chain evaluations can run in parallel.
struct Signal {
  std::vector<std::vector<cpx>> pol;
  double sample_rate_hz = 0.0;
  double center_freq_hz = 0.0;
  /// Tracked amplified-spontaneous-emission PSD (W/Hz, summed over both
  /// polarizations) riding along with the waveform; feeds ledger-mode OSNR.
  double ase_psd_w_per_hz = 0.0;

  std::size_t size() const { return pol.empty() ? 0 : pol[0].size(); }
  int n_pol() const { return static_cast<int>(pol.size()); }
};

inline Signal make_signal(int n_pol, std::size_t n, double sample_rate_hz,
                          double center_freq_hz = 0.0) {
  if (n_pol != 1 && n_pol != 2) throw std::invalid_argument("signal: n_pol must be 1 or 2");
  if (sample_rate_hz <= 0.0) throw std::invalid_argument("signal: sample rate must be > 0");
  Signal s;
  s.pol.assign(static_cast<std::size_t>(n_pol), std::vector<cpx>(n, cpx(0.0, 0.0)));
  s.sample_rate_hz = sample_rate_hz;
  s.center_freq_hz = center_freq_hz;
  return s;
}

inline void check_signal(const Signal& s) {
  if (s.pol.empty() || s.pol.size() > 2) throw std::invalid_argument("signal: n_pol must be 1 or 2");
  if (s.sample_rate_hz <= 0.0) throw std::invalid_argument("signal: sample rate must be > 0");
  if (s.center_freq_hz < 0.0) throw std::invalid_argument("signal: center frequency must be >= 0");
  for (const auto& p : s.pol)
    if (p.size() != s.pol[0].size())
      throw std::invalid_argument("signal: polarizations must have equal length");
}

/// Continuous-wave tone: constant amplitude, total power split evenly over
/// polarizations.
inline Signal make_cw(double power_w, int n_pol, std::size_t n, double sample_rate_hz,
                      double center_freq_hz = 0.0) {
  Signal s = make_signal(n_pol, n, sample_rate_hz, center_freq_hz);
  const double amp = std::sqrt(power_w / static_cast<double>(n_pol));
  for (auto& p : s.pol) std::fill(p.begin(), p.end(), cpx(amp, 0.0));
  return s;
}

inline double mean_power_w(const Signal& s) {
  check_signal(s);
  if (s.size() == 0) throw std::invalid_argument("signal: empty");
  double acc = 0.0;
  for (const auto& p : s.pol)
    for (const auto& x : p) acc += std::norm(x);
  return acc / static_cast<double>(s.size());
}

/// Mean total power in dBm. Errors on an empty signal.
inline double power_dbm(const Signal& s) { return watt_to_dbm(mean_power_w(s)); }

inline Signal scale_amplitude(const Signal& s, double factor) {
  Signal out = s;
  for (auto& p : out.pol)
    for (auto& x : p) x *= factor;
  out.ase_psd_w_per_hz = s.ase_psd_w_per_hz * factor * factor;
  return out;
}

/// Rescale so the mean total power equals the target exactly.
inline Signal set_power_dbm(const Signal& s, double target_dbm) {
  const double p = mean_power_w(s);
  if (p <= 0.0) throw std::invalid_argument("set_power_dbm: zero-power signal");
  return scale_amplitude(s, std::sqrt(dbm_to_watt(target_dbm) / p));
}

// ---------------------------------------------------------------------------
// Spectral helpers
// ---------------------------------------------------------------------------

namespace detail {

/// Power spectrum summed over polarizations (unnormalized |X|^2 per bin).
inline std::vector<double> power_spectrum(const Signal& s) {
  std::vector<double> ps(next_pow2(s.size()), 0.0);
  for (const auto& p : s.pol) {
    std::vector<cpx> a(p.begin(), p.end());
    a.resize(ps.size(), cpx(0.0, 0.0));
    fft_inplace(a, false);
    for (std::size_t k = 0; k < a.size(); ++k) ps[k] += std::norm(a[k]);
  }
  return ps;
}

/// Occupied band [f_lo, f_hi] relative to the envelope: smallest frequency
/// interval outside of which each spectral tail holds less than `tail_frac`
/// of the total power. Returns nullopt for an all-zero signal.
inline std::optional<std::pair<double, double>> occupied_band(const Signal& s,
                                                              double tail_frac = 1e-9) {
  const auto ps = power_spectrum(s);
  const std::size_t n = ps.size();
  double total = 0.0;
  for (double v : ps) total += v;
  if (total <= 0.0) return std::nullopt;

  // Walk bins in frequency order: k = n/2 (most negative) ... n-1, 0 ... n/2-1.
  std::vector<std::size_t> order(n);
  std::size_t idx = 0;
  for (std::size_t k = n / 2; k < n; ++k) order[idx++] = k;
  for (std::size_t k = 0; k < n / 2; ++k) order[idx++] = k;

  const double limit = tail_frac * total;
  double acc = 0.0;
  std::size_t lo = 0;
  for (; lo < n; ++lo) {
    acc += ps[order[lo]];
    if (acc > limit) break;
  }
  acc = 0.0;
  std::size_t hi = n - 1;
  for (;; --hi) {
    acc += ps[order[hi]];
    if (acc > limit || hi == 0) break;
  }
  const double sr = s.sample_rate_hz;
  return std::make_pair(bin_freq(order[lo], n, sr), bin_freq(order[hi], n, sr));
}

/// Multiply every polarization by exp(j*2*pi*df*t) without any bandwidth
/// checking. Internal stages use this where spectral wrap is intended and
/// harmless; the public frequency_shift enforces the band contract.
inline Signal rotate_unchecked(const Signal& s, double df_hz) {
  Signal out = s;
  const double cycles_per_sample = df_hz / s.sample_rate_hz;
  for (auto& p : out.pol) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double frac = cycles_per_sample * static_cast<double>(i);
      const double theta = 2.0 * kPi * (frac - std::floor(frac));
      p[i] *= cpx(std::cos(theta), std::sin(theta));
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

/// Multiply by a unit-magnitude rotating phasor at df_hz. Power is preserved
/// exactly; errors if the shifted occupied band would cross the representable
/// edge at +-sample_rate/2. The occupied band uses a 1e-3 tail criterion:
/// non-bin-aligned content carries unavoidable Dirichlet sidelobe tails, so a
/// stricter threshold would flag every previously shifted signal.
inline Signal frequency_shift(const Signal& s, double df_hz) {
  check_signal(s);
  const auto band = detail::occupied_band(s, 1e-3);
  if (band) {
    const double nyq = s.sample_rate_hz / 2.0;
    const double lo = band->first + df_hz;
    const double hi = band->second + df_hz;
    if (hi > nyq || lo < -nyq) {
      const double edge = (hi > nyq) ? hi : lo;
      std::ostringstream msg;
      msg << "frequency_shift: shifted band edge " << edge * 1e-9
          << " GHz exceeds representable half-bandwidth " << nyq * 1e-9 << " GHz";
      throw std::invalid_argument(msg.str());
    }
  }
  return detail::rotate_unchecked(s, df_hz);
}

/// Frequency-domain multiplication by H(f), f relative to the envelope.
/// Length-preserving: non power-of-two inputs are zero-padded to the next
/// power of two for the transform and trimmed back.
template <typename F>
Signal apply_transfer(const Signal& s, F&& h) {
  check_signal(s);
  Signal out = s;
  const std::size_t n = s.size();
  const std::size_t nfft = detail::next_pow2(n);
  for (auto& p : out.pol) {
    std::vector<cpx> a(p.begin(), p.end());
    a.resize(nfft, cpx(0.0, 0.0));
    detail::fft_inplace(a, false);
    for (std::size_t k = 0; k < nfft; ++k)
      a[k] *= cpx(h(detail::bin_freq(k, nfft, s.sample_rate_hz)));
    detail::fft_inplace(a, true);
    std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n), p.begin());
  }
  return out;
}

/// Add circularly-symmetric complex white Gaussian noise, independent per
/// polarization. Total added noise power per polarization is psd * sample_rate.
inline Signal add_awgn(const Signal& s, double psd_w_per_hz, Rng& rng) {
  check_signal(s);
  if (psd_w_per_hz < 0.0) throw std::invalid_argument("add_awgn: psd must be >= 0");
  if (psd_w_per_hz == 0.0) return s;
  Signal out = s;
  const double sigma_quad = std::sqrt(psd_w_per_hz * s.sample_rate_hz / 2.0);
  for (auto& p : out.pol)
    for (auto& x : p) x += sigma_quad * rng.gauss_cpx();
  return out;
}

/// Add real-valued white Gaussian noise (for real passband/IF signals).
/// Total added power is `power_w` measured over the full sampled band.
inline Signal add_real_noise(const Signal& s, double power_w, Rng& rng) {
  check_signal(s);
  if (power_w < 0.0) throw std::invalid_argument("add_real_noise: power must be >= 0");
  if (power_w == 0.0) return s;
  Signal out = s;
  const double sigma = std::sqrt(power_w);
  for (auto& p : out.pol)
    for (auto& x : p) x += cpx(sigma * rng.gauss(), 0.0);
  return out;
}

/// Band-limited rate conversion via spectral zero-insert/truncation.
/// Requires a power-of-two length and a rational ratio that keeps the
/// length integral; errors if occupied content would alias.
inline Signal resample(const Signal& s, double new_rate_hz) {
  check_signal(s);
  if (new_rate_hz <= 0.0) throw std::invalid_argument("resample: rate must be > 0");
  const std::size_t n = s.size();
  if (!detail::is_pow2(n)) throw std::invalid_argument("resample: length must be a power of two");
  const double ratio = new_rate_hz / s.sample_rate_hz;
  const double n_new_f = static_cast<double>(n) * ratio;
  const auto n_new = static_cast<std::size_t>(std::llround(n_new_f));
  if (std::abs(n_new_f - static_cast<double>(n_new)) > 1e-6 || n_new == 0)
    throw std::invalid_argument("resample: rate ratio must keep the sample count integral");

  if (new_rate_hz < s.sample_rate_hz) {
    // Aliasing gate: occupied content must fit the new Nyquist band.
    const auto ps = detail::power_spectrum(s);
    double total = 0.0, outside = 0.0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      total += ps[k];
      const double f = detail::bin_freq(k, ps.size(), s.sample_rate_hz);
      if (f < -new_rate_hz / 2.0 || f >= new_rate_hz / 2.0) outside += ps[k];
    }
    if (total > 0.0 && outside > 1e-6 * total) {
      std::ostringstream msg;
      msg << "resample: signal occupies more than the new rate supports ("
          << lin_to_db(outside / total) << " dB of power outside +-" << new_rate_hz / 2e9
          << " GHz)";
      throw std::invalid_argument(msg.str());
    }
  }

  Signal out;
  out.sample_rate_hz = new_rate_hz;
  out.center_freq_hz = s.center_freq_hz;
  out.ase_psd_w_per_hz = s.ase_psd_w_per_hz;
  out.pol.resize(s.pol.size());
  const double gain = static_cast<double>(n_new) / static_cast<double>(n);
  for (std::size_t ip = 0; ip < s.pol.size(); ++ip) {
    std::vector<cpx> a(s.pol[ip].begin(), s.pol[ip].end());
    detail::fft_inplace(a, false);
    std::vector<cpx> b(n_new, cpx(0.0, 0.0));
    const std::size_t keep = std::min(n, n_new);
    for (std::size_t k = 0; k < keep / 2; ++k) b[k] = a[k] * gain;
    for (std::size_t k = 0; k < keep / 2; ++k) b[n_new - 1 - k] = a[n - 1 - k] * gain;
    detail::fft_inplace(b, true);
    out.pol[ip] = std::move(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Phase noise
// ---------------------------------------------------------------------------

/// Wiener phase-noise trajectory: increments are N(0, 2*pi*linewidth*dt).
inline std::vector<double> wiener_phase(std::size_t n, double linewidth_hz, double dt_s,
                                        Rng& rng) {
  std::vector<double> phi(n, 0.0);
  if (linewidth_hz <= 0.0 || n == 0) return phi;
  const double sigma = std::sqrt(2.0 * kPi * linewidth_hz * dt_s);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += sigma * rng.gauss();
    phi[i] = acc;
  }
  return phi;
}

/// Multiply all polarizations by exp(j*phi[t]) (common phase process, as for
/// one laser feeding both polarizations).
inline Signal apply_phase(const Signal& s, const std::vector<double>& phi) {
  if (phi.size() != s.size()) throw std::invalid_argument("apply_phase: length mismatch");
  Signal out = s;
  for (auto& p : out.pol)
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] *= cpx(std::cos(phi[i]), std::sin(phi[i]));
  return out;
}

inline Signal apply_laser_phase_noise(const Signal& s, double linewidth_hz, Rng& rng) {
  if (linewidth_hz <= 0.0) return s;
  const auto phi = wiener_phase(s.size(), linewidth_hz, 1.0 / s.sample_rate_hz, rng);
  return apply_phase(s, phi);
}

}  // namespace thzlink

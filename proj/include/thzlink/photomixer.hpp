// SPDX-License-Identifier: Apache-2.0
//
// thzlink - fiber-THz-fiber 2x2 MIMO link simulator
// Copyright (c) 2026 thzlink contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "thzlink/fiber.hpp"
#include "thzlink/signal.hpp"

namespace thzlink {

struct LaserSpec {
  double freq_hz = 193.115e12;
  double power_dbm = 13.5;
  double linewidth_hz = 100e3;
};

/// Photomixer (UTC-PD based) parameters. conversion_efficiency_ohm is a
/// lumped calibration constant: radiated power per squared beat photocurrent.
struct PdSpec {
  double responsivity_a_per_w = 0.5;
  double sat_input_power_dbm = 13.1;
  double compression_knee_sharpness = 2.0;
  double conversion_efficiency_ohm = 90.0;
  std::vector<std::pair<double, double>> band_windows_hz = {{300e9, 500e9}};
  bool saturation_enabled = true;
};

/// Channels plus the optical LO heading into the photomixers, after the
/// coupler. Members keep their own envelopes; total power is bookkeeping.
struct CoupledEnsemble {
  std::vector<Signal> members;  // channels first, LO last
  std::size_t lo_index = 0;
  double total_power_w = 0.0;
};

/// Continuous-wave optical LO with phase noise, split evenly over both
/// polarizations (polarization controllers assumed optimally adjusted).
inline Signal make_lo_laser(const LaserSpec& spec, std::size_t n, double sample_rate_hz,
                            Rng& rng) {
  Signal lo = make_cw(dbm_to_watt(spec.power_dbm), 2, n, sample_rate_hz, spec.freq_hz);
  return apply_laser_phase_noise(lo, spec.linewidth_hz, rng);
}

/// Couple channels with the optical LO; each member takes the coupler loss.
inline CoupledEnsemble couple(const std::vector<Signal>& channels, const Signal& lo,
                              double coupler_loss_db = 3.0) {
  if (channels.empty()) throw std::invalid_argument("couple: at least one channel");
  for (const auto& ch : channels) {
    if (ch.sample_rate_hz != lo.sample_rate_hz || ch.size() != lo.size())
      throw std::invalid_argument("couple: members must share sample rate and length");
    if (std::llround(ch.center_freq_hz) == std::llround(lo.center_freq_hz)) {
      std::ostringstream msg;
      msg << "couple: channel at " << ch.center_freq_hz * 1e-12
          << " THz coincides with the LO (degenerate beat)";
      throw std::invalid_argument(msg.str());
    }
  }
  for (std::size_t i = 0; i < channels.size(); ++i)
    for (std::size_t j = i + 1; j < channels.size(); ++j)
      if (std::llround(channels[i].center_freq_hz) == std::llround(channels[j].center_freq_hz))
        throw std::invalid_argument("couple: duplicate channel center frequencies");

  CoupledEnsemble ens;
  const double a = std::pow(10.0, -coupler_loss_db / 20.0);
  for (const auto& ch : channels) ens.members.push_back(scale_amplitude(ch, a));
  ens.members.push_back(scale_amplitude(lo, a));
  ens.lo_index = ens.members.size() - 1;
  for (const auto& m : ens.members) ens.total_power_w += mean_power_w(m);
  return ens;
}

/// Amplify the whole ensemble with one EDFA. Fixed-output mode sets the total
/// power over all members; ASE lands in every member's spectral window.
inline CoupledEnsemble edfa_ensemble(const CoupledEnsemble& ens, const AmpSpec& a, Rng& rng) {
  double p_in = 0.0;
  for (const auto& m : ens.members) p_in += mean_power_w(m);
  double gain_lin;
  if (a.mode == AmpSpec::Mode::FixedGain) {
    gain_lin = db_to_lin(a.gain_db);
  } else {
    const double p_target = dbm_to_watt(a.target_power_dbm);
    if (p_target < p_in * (1.0 - 1e-12)) {
      std::ostringstream msg;
      msg << "edfa: fixed-output target " << a.target_power_dbm << " dBm is below input power "
          << watt_to_dbm(p_in) << " dBm";
      throw std::invalid_argument(msg.str());
    }
    gain_lin = p_target / p_in;
  }
  CoupledEnsemble out;
  out.lo_index = ens.lo_index;
  const double amp = std::sqrt(gain_lin);
  std::uint64_t idx = 0;
  for (const auto& m : ens.members) {
    Signal g = scale_amplitude(m, amp);
    if (a.noise_figure_db > kNoiselessNf) {
      const double psd =
          ase_psd_per_pol(gain_lin, db_to_lin(a.noise_figure_db), m.center_freq_hz);
      Rng r = rng.stream(idx);
      g = add_awgn(g, psd, r);
      g.ase_psd_w_per_hz += psd * g.n_pol();
    }
    out.members.push_back(std::move(g));
    ++idx;
  }
  for (const auto& m : out.members) out.total_power_w += mean_power_w(m);
  return out;
}

/// Split every ensemble member on the PBS axes; returns (X branch, Y branch).
inline std::pair<CoupledEnsemble, CoupledEnsemble> pbs_split_ensemble(
    const CoupledEnsemble& ens) {
  CoupledEnsemble bx, by;
  bx.lo_index = by.lo_index = ens.lo_index;
  for (const auto& m : ens.members) {
    auto [x, y] = pbs_split(m);
    bx.members.push_back(std::move(x));
    by.members.push_back(std::move(y));
  }
  for (const auto& m : bx.members) bx.total_power_w += mean_power_w(m);
  for (const auto& m : by.members) by.total_power_w += mean_power_w(m);
  return {std::move(bx), std::move(by)};
}

/// Photomixer polarization sensitivity: field scaled by cos(misalignment).
inline CoupledEnsemble polarization_sensitivity_loss(const CoupledEnsemble& branch,
                                                     double misalignment_rad) {
  if (misalignment_rad < 0.0 || misalignment_rad > kPi / 2.0)
    throw std::invalid_argument("polarization_sensitivity_loss: angle must be in [0, pi/2]");
  if (misalignment_rad == 0.0) return branch;
  CoupledEnsemble out;
  out.lo_index = branch.lo_index;
  const double c = std::cos(misalignment_rad);
  for (const auto& m : branch.members) out.members.push_back(scale_amplitude(m, c));
  for (const auto& m : out.members) out.total_power_w += mean_power_w(m);
  return out;
}

namespace detail {

/// Compression factor of the saturation law at instantaneous power p.
inline double sat_scale(double p, double p_sat_w, double knee) {
  const double u = std::pow(p / p_sat_w, 2.0 * knee);
  return std::pow(1.0 + u, -1.0 / (2.0 * knee));
}

/// Effective gain of the beat fundamental through the compression law.
/// The photocurrent tracks the optical power across a beat cycle,
/// P(theta) = m + a*cos(theta); the radiated envelope follows the compressed
/// current's fundamental, extracted here by midpoint quadrature.
inline double beat_compression_gain(double m, double a, double p_sat_w, double knee) {
  if (a <= 1e-9 * m || a <= 0.0) {
    // small-signal limit: incremental gain of the operating point
    const double u = std::pow(m / p_sat_w, 2.0 * knee);
    return sat_scale(m, p_sat_w, knee) / (1.0 + u);
  }
  // fast path: even the cycle peak is far below the knee
  if (std::pow((m + a) / p_sat_w, 2.0 * knee) < 1e-9) return 1.0;

  constexpr int kQuad = 32;
  double acc = 0.0;
  for (int j = 0; j < kQuad; ++j) {
    const double theta = kPi * (static_cast<double>(j) + 0.5) / kQuad;
    const double c = std::cos(theta);
    const double p = std::max(0.0, m + a * c);
    acc += p * sat_scale(p, p_sat_w, knee) * c;
  }
  // (2/pi) * integral over [0, pi] of P*s(P)*cos, divided by the
  // uncompressed fundamental amplitude a
  return (2.0 / kQuad) * acc / a;
}

}  // namespace detail

/// Photomix one polarization branch: each channel beats with the LO into a
/// THz-band envelope at f_ch - f_LO. Signal-signal beats fall outside the
/// admissible windows and are dropped. With saturation enabled, the beat
/// amplitude compresses according to the instantaneous input power across
/// the beat cycle.
inline std::vector<Signal> photomix(const CoupledEnsemble& branch, const PdSpec& pd) {
  if (branch.members.size() < 2)
    throw std::invalid_argument("photomix: need at least one channel plus the LO");
  for (const auto& m : branch.members)
    if (m.n_pol() != 1)
      throw std::invalid_argument("photomix: branch members must be single-polarization");
  if (pd.responsivity_a_per_w <= 0.0) throw std::invalid_argument("photomix: responsivity > 0");
  if (pd.compression_knee_sharpness < 1.0)
    throw std::invalid_argument("photomix: knee sharpness must be >= 1");

  const Signal& lo = branch.members[branch.lo_index];
  const std::size_t n = lo.size();
  const double p_sat_w = dbm_to_watt(pd.sat_input_power_dbm);
  const double knee = pd.compression_knee_sharpness;
  const double amp_const = std::sqrt(pd.conversion_efficiency_ohm) * pd.responsivity_a_per_w;

  // total instantaneous envelope power over all members
  std::vector<double> mean_power(n, 0.0);
  for (const auto& m : branch.members)
    for (std::size_t i = 0; i < n; ++i) mean_power[i] += std::norm(m.pol[0][i]);

  std::vector<Signal> out;
  for (std::size_t c = 0; c < branch.members.size(); ++c) {
    if (c == branch.lo_index) continue;
    const Signal& ch = branch.members[c];
    const double beat_hz = ch.center_freq_hz - lo.center_freq_hz;
    const double beat_abs = std::abs(beat_hz);
    bool admissible = false;
    for (const auto& w : pd.band_windows_hz)
      if (beat_abs >= w.first && beat_abs <= w.second) admissible = true;
    if (!admissible) {
      std::ostringstream msg;
      msg << "photomix: beat at " << beat_abs * 1e-9
          << " GHz falls outside the admissible THz windows";
      throw std::invalid_argument(msg.str());
    }

    Signal thz = make_signal(1, n, lo.sample_rate_hz, beat_abs);
    for (std::size_t i = 0; i < n; ++i) {
      const cpx e_ch = ch.pol[0][i];
      const cpx e_lo = lo.pol[0][i];
      cpx beat = (beat_hz >= 0.0) ? e_ch * std::conj(e_lo) : std::conj(e_ch) * e_lo;
      if (pd.saturation_enabled) {
        const double a = 2.0 * std::abs(e_ch) * std::abs(e_lo);
        beat *= detail::beat_compression_gain(mean_power[i], a, p_sat_w, knee);
      }
      thz.pol[0][i] = amp_const * beat;
    }
    out.push_back(std::move(thz));
  }
  return out;
}

}  // namespace thzlink

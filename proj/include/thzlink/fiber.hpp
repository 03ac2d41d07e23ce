// SPDX-License-Identifier: Apache-2.0
//
// thzlink - fiber-THz-fiber 2x2 MIMO link simulator
// Copyright (c) 2026 thzlink contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "thzlink/signal.hpp"

namespace thzlink {

struct FiberSpec {
  double length_km = 20.0;
  double atten_db_per_km = 0.2;
  double dispersion_ps_per_nm_km = 17.0;
  double reference_wavelength_nm = 1550.0;
};

struct AmpSpec {
  enum class Mode { FixedGain, FixedOutputPower };
  Mode mode = Mode::FixedGain;
  double gain_db = 20.0;
  double target_power_dbm = 0.0;
  double noise_figure_db = 5.0;  // kNoiselessNf disables ASE
};

struct TofSpec {
  double center_freq_hz = 0.0;
  double bandwidth_hz = 45e9;
  int order = 3;  // super-Gaussian order
  double stop_band_rejection_db = 40.0;
};

/// Accumulated dispersion of a span in s/m (D * L).
inline double accumulated_dispersion_s_per_m(const FiberSpec& f) {
  // ps/nm/km * km = ps/nm = 1e-12 s / 1e-9 m = 1e-3 s/m
  return f.dispersion_ps_per_nm_km * f.length_km * 1e-3;
}

namespace detail {

/// All-pass quadratic-phase factor for accumulated dispersion dl (s/m) at
/// carrier frequency fc. Sign convention: anomalous dispersion (D > 0)
/// advances the high-frequency side.
inline cpx dispersion_phase(double f, double dl_s_per_m, double carrier_freq_hz) {
  const double lambda = kSpeedOfLight / carrier_freq_hz;
  const double phi = kPi * dl_s_per_m * lambda * lambda * f * f / kSpeedOfLight;
  return cpx(std::cos(phi), std::sin(phi));
}

}  // namespace detail

/// Linear SSMF span: attenuation plus chromatic dispersion relative to the
/// signal's own center frequency.
inline Signal ssmf_propagate(const Signal& s, const FiberSpec& f) {
  if (f.length_km < 0.0 || f.atten_db_per_km < 0.0)
    throw std::invalid_argument("ssmf_propagate: negative length or attenuation");
  if (f.length_km == 0.0) return s;
  const double dl = accumulated_dispersion_s_per_m(f);
  const double fc = s.center_freq_hz;
  Signal out = apply_transfer(s, [&](double freq) {
    return detail::dispersion_phase(freq, dl, fc);
  });
  const double loss_db = f.length_km * f.atten_db_per_km;
  return scale_amplitude(out, std::pow(10.0, -loss_db / 20.0));
}

/// ASE power spectral density per polarization for an amplifier of linear
/// gain g and noise factor nf_lin at optical frequency nu.
inline double ase_psd_per_pol(double gain_lin, double nf_lin, double nu_hz) {
  return std::max(0.0, (nf_lin * gain_lin - 1.0) * kPlanck * nu_hz / 2.0);
}

/// EDFA: fixed gain or fixed output power, ASE added as AWGN over the
/// simulated band of this signal.
inline Signal edfa(const Signal& s, const AmpSpec& a, Rng& rng) {
  const double p_in = mean_power_w(s);
  double gain_lin = 0.0;
  if (a.mode == AmpSpec::Mode::FixedGain) {
    if (a.gain_db < 0.0) throw std::invalid_argument("edfa: fixed gain must be >= 0 dB");
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
  Signal out = scale_amplitude(s, std::sqrt(gain_lin));
  if (a.noise_figure_db > kNoiselessNf) {
    const double psd =
        ase_psd_per_pol(gain_lin, db_to_lin(a.noise_figure_db), s.center_freq_hz);
    out = add_awgn(out, psd, rng);
    out.ase_psd_w_per_hz += psd * out.n_pol();
  }
  return out;
}

/// Variable optical attenuator: uniform power scaling of the signal and the
/// noise riding with it.
inline Signal voa(const Signal& s, double attenuation_db) {
  if (attenuation_db < 0.0) throw std::invalid_argument("voa: attenuation must be >= 0 dB");
  return scale_amplitude(s, std::pow(10.0, -attenuation_db / 20.0));
}

namespace detail {

/// Super-Gaussian amplitude response with a stop-band floor.
inline double tof_response(double f_abs, const TofSpec& t) {
  const double x = (f_abs - t.center_freq_hz) / (t.bandwidth_hz / 2.0);
  double e = -0.5;
  double xp = 1.0;
  for (int i = 0; i < 2 * t.order; ++i) xp *= x;
  e *= xp;
  const double floor_amp = std::pow(10.0, -t.stop_band_rejection_db / 20.0);
  return std::max(std::exp(e), floor_amp);
}

}  // namespace detail

/// Tunable optical filter. The TofSpec center is an absolute frequency; the
/// response is evaluated against the signal's absolute spectrum.
inline Signal tof_filter(const Signal& s, const TofSpec& t) {
  if (t.bandwidth_hz <= 0.0) throw std::invalid_argument("tof_filter: bandwidth must be > 0");
  const double nyq = s.sample_rate_hz / 2.0;
  const double off = t.center_freq_hz - s.center_freq_hz;
  if (off + t.bandwidth_hz / 2.0 < -nyq || off - t.bandwidth_hz / 2.0 > nyq) {
    std::ostringstream msg;
    msg << "tof_filter: passband at " << t.center_freq_hz * 1e-12
        << " THz does not overlap the representable band around " << s.center_freq_hz * 1e-12
        << " THz";
    throw std::invalid_argument(msg.str());
  }
  Signal out = apply_transfer(s, [&](double f) {
    return detail::tof_response(s.center_freq_hz + f, t);
  });
  // In-band ASE PSD is preserved up to the response at the signal center.
  const double r0 = detail::tof_response(s.center_freq_hz, t);
  out.ase_psd_w_per_hz = s.ase_psd_w_per_hz * r0 * r0;
  return out;
}

/// Unitary 2x2 Jones rotation (rotation angle theta, differential phase phi).
inline Signal pol_rotate(const Signal& s, double theta_rad, double phi_rad) {
  if (s.n_pol() != 2) throw std::invalid_argument("pol_rotate: 2 polarizations required");
  const double c = std::cos(theta_rad);
  const double sn = std::sin(theta_rad);
  const cpx ep = cpx(std::cos(phi_rad), std::sin(phi_rad));
  Signal out = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const cpx x = s.pol[0][i];
    const cpx y = s.pol[1][i];
    out.pol[0][i] = c * x - sn * ep * y;
    out.pol[1][i] = sn * std::conj(ep) * x + c * y;
  }
  return out;
}

/// Polarization beam splitter: project onto the X and Y axes.
inline std::pair<Signal, Signal> pbs_split(const Signal& s) {
  if (s.n_pol() != 2) throw std::invalid_argument("pbs_split: 2 polarizations required");
  Signal x = s;
  Signal y = s;
  x.pol.resize(1);
  y.pol.erase(y.pol.begin());
  x.ase_psd_w_per_hz = s.ase_psd_w_per_hz / 2.0;
  y.ase_psd_w_per_hz = s.ase_psd_w_per_hz / 2.0;
  return {std::move(x), std::move(y)};
}

}  // namespace thzlink

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
#include <stdexcept>
#include <utility>
#include <vector>

#include "thzlink/signal.hpp"

namespace thzlink {

/// Crosstalk at or below this sentinel means "no leakage".
inline constexpr double kNoCrosstalkDb = -200.0;

struct WirelessSpec {
  double distance_m = 3.0;
  double tx_gain_dbi = 25.0;
  double rx_gain_dbi = 25.0;
  // receiver-referred, 290 K with a 10 dB noise figure by default
  double noise_psd_w_per_hz = kBoltzmann * kRoomTempK * 10.0;
  double crosstalk_db = -25.0;  // X<->Y leakage, frequency-flat
};

/// Friis free-space path loss in dB.
inline double fspl_db(double freq_hz, double distance_m) {
  if (freq_hz <= 0.0 || distance_m <= 0.0)
    throw std::invalid_argument("fspl_db: frequency and distance must be > 0");
  return 20.0 * std::log10(4.0 * kPi * distance_m * freq_hz / kSpeedOfLight);
}

/// The 2x2 MIMO wireless hop. x_branch/y_branch hold one THz envelope per
/// channel; per channel the link budget -FSPL(f) + G_tx + G_rx applies, a
/// static leakage matrix mixes the two spatial branches identically for all
/// channels, and receiver-referred AWGN lands on every branch signal.
inline std::pair<std::vector<Signal>, std::vector<Signal>> propagate_mimo(
    const std::vector<Signal>& x_branch, const std::vector<Signal>& y_branch,
    const WirelessSpec& w, Rng& rng) {
  if (x_branch.size() != y_branch.size())
    throw std::invalid_argument("propagate_mimo: branch channel counts differ");
  if (w.crosstalk_db > 0.0)
    throw std::invalid_argument("propagate_mimo: crosstalk must be <= 0 dB");

  const double eps = (w.crosstalk_db <= kNoCrosstalkDb) ? 0.0 : db_to_lin(w.crosstalk_db);
  const double diag = std::sqrt(1.0 - eps);
  const double off = std::sqrt(eps);

  std::vector<Signal> xo, yo;
  for (std::size_t c = 0; c < x_branch.size(); ++c) {
    const Signal& xs = x_branch[c];
    const Signal& ys = y_branch[c];
    if (xs.sample_rate_hz != ys.sample_rate_hz || xs.size() != ys.size() ||
        xs.center_freq_hz != ys.center_freq_hz)
      throw std::invalid_argument("propagate_mimo: X/Y branch signals must match per channel");

    const double budget_db = -fspl_db(xs.center_freq_hz, w.distance_m) + w.tx_gain_dbi +
                             w.rx_gain_dbi;
    const double g = std::pow(10.0, budget_db / 20.0);

    Signal xr = xs, yr = ys;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const cpx xv = g * xs.pol[0][i];
      const cpx yv = g * ys.pol[0][i];
      xr.pol[0][i] = diag * xv + off * yv;
      yr.pol[0][i] = off * xv + diag * yv;
    }
    if (w.noise_psd_w_per_hz > 0.0) {
      Rng rx = rng.stream(2 * c);
      Rng ry = rng.stream(2 * c + 1);
      xr = add_awgn(xr, w.noise_psd_w_per_hz, rx);
      yr = add_awgn(yr, w.noise_psd_w_per_hz, ry);
    }
    xo.push_back(std::move(xr));
    yo.push_back(std::move(yr));
  }
  return {std::move(xo), std::move(yo)};
}

}  // namespace thzlink

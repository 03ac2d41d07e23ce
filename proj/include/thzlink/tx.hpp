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
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "thzlink/signal.hpp"

namespace thzlink {

/// Transmit-side configuration for one wavelength channel.
struct TxChannel {
  double center_freq_hz = 193.5e12;
  double launch_power_dbm = 3.0;
};

struct TxConfig {
  double symbol_rate_baud = 31.379e9;
  double rolloff = 0.2;
  std::vector<TxChannel> channels = {{193.5e12, 3.0}, {193.55e12, 3.0}};
  double laser_linewidth_hz = 100e3;
  int samples_per_symbol = 4;
  std::size_t n_symbols = 65536;
  bool grid_check = true;
  double grid_spacing_hz = 50e9;

  double sample_rate_hz() const { return symbol_rate_baud * samples_per_symbol; }
  /// Serial line rate carried by one channel (both polarizations).
  double line_rate_bps() const { return symbol_rate_baud * 2.0 * 2.0; }
};

inline void check_tx_config(const TxConfig& c) {
  if (c.symbol_rate_baud <= 0.0) throw config_error("tx: symbol rate must be > 0");
  if (c.rolloff < 0.0 || c.rolloff > 1.0) throw config_error("tx: rolloff must be in [0,1]");
  if (c.channels.empty()) throw config_error("tx: at least one channel required");
  if (c.samples_per_symbol < 2.0 * (1.0 + c.rolloff))
    throw config_error("tx: samples_per_symbol below 2*(1+rolloff)");
}

/// Bits for one channel, one vector per polarization.
struct BitStream {
  std::vector<std::vector<std::uint8_t>> pol;

  std::size_t n_bits_per_pol() const { return pol.empty() ? 0 : pol[0].size(); }
};

/// i.i.d. uniform bits, reproducible from the rng state. n_bits must be even
/// (two bits per QPSK symbol).
inline std::vector<std::uint8_t> gen_bits(std::size_t n_bits, Rng& rng) {
  if (n_bits == 0 || n_bits % 2 != 0)
    throw std::invalid_argument("gen_bits: bit count must be even and > 0");
  std::vector<std::uint8_t> bits(n_bits);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
  return bits;
}

inline BitStream gen_bitstream(std::size_t n_bits_per_pol, int n_pol, Rng& rng) {
  BitStream bs;
  for (int p = 0; p < n_pol; ++p) {
    Rng r = rng.stream(static_cast<std::uint64_t>(p) + 1);
    bs.pol.push_back(gen_bits(n_bits_per_pol, r));
  }
  return bs;
}

// Gray map, one symbol per bit pair (b0, b1):
//   00 -> (+1+j)/sqrt2   01 -> (-1+j)/sqrt2
//   11 -> (-1-j)/sqrt2   10 -> (+1-j)/sqrt2
// i.e. b1 selects the real sign, b0 the imaginary sign.
inline std::vector<cpx> qpsk_map(const std::vector<std::uint8_t>& bits) {
  if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk_map: even bit count required");
  const double a = 1.0 / std::sqrt(2.0);
  std::vector<cpx> syms(bits.size() / 2);
  for (std::size_t i = 0; i < syms.size(); ++i) {
    const double re = bits[2 * i + 1] ? -a : a;
    const double im = bits[2 * i] ? -a : a;
    syms[i] = cpx(re, im);
  }
  return syms;
}

/// Hard-decision demap, inverse of qpsk_map.
inline std::vector<std::uint8_t> qpsk_demap(const std::vector<cpx>& syms) {
  std::vector<std::uint8_t> bits(2 * syms.size());
  for (std::size_t i = 0; i < syms.size(); ++i) {
    bits[2 * i] = syms[i].imag() < 0.0 ? 1 : 0;
    bits[2 * i + 1] = syms[i].real() < 0.0 ? 1 : 0;
  }
  return bits;
}

namespace detail {

/// Root-raised-cosine transfer evaluated at frequency f for the given symbol
/// rate and rolloff. sqrt(sps) scaling makes a shape + matched-filter cascade
/// recover unit-gain symbols at the symbol instants.
inline double rrc_response(double f, double symbol_rate, double rolloff) {
  const double fa = std::abs(f);
  const double f1 = (1.0 - rolloff) * symbol_rate / 2.0;
  const double f2 = (1.0 + rolloff) * symbol_rate / 2.0;
  if (fa <= f1) return 1.0;
  if (fa >= f2 || rolloff == 0.0) return 0.0;
  const double x = kPi * (fa - f1) / (rolloff * symbol_rate);
  return std::sqrt(0.5 * (1.0 + std::cos(x)));
}

}  // namespace detail

/// Root-raised-cosine pulse shaping of a symbol sequence at the given
/// oversampling. Output is a baseband Signal at symbol_rate * sps, with the
/// k-th symbol centered on sample k*sps. The symbol count times sps must be a
/// power of two (the shaping is circular-spectral).
inline Signal rrc_shape(const std::vector<cpx>& symbols, int samples_per_symbol,
                        double rolloff, double symbol_rate_baud) {
  if (rolloff < 0.0 || rolloff > 1.0) throw std::invalid_argument("rrc_shape: bad rolloff");
  if (samples_per_symbol < 2.0 * (1.0 + rolloff))
    throw std::invalid_argument("rrc_shape: insufficient oversampling (need >= 2*(1+rolloff))");
  const std::size_t n = symbols.size() * static_cast<std::size_t>(samples_per_symbol);
  if (!detail::is_pow2(n))
    throw std::invalid_argument("rrc_shape: n_symbols * samples_per_symbol must be a power of two");

  Signal s = make_signal(1, n, symbol_rate_baud * samples_per_symbol, 0.0);
  for (std::size_t k = 0; k < symbols.size(); ++k)
    s.pol[0][k * static_cast<std::size_t>(samples_per_symbol)] = symbols[k];
  const double g = std::sqrt(static_cast<double>(samples_per_symbol));
  return apply_transfer(s, [&](double f) {
    return g * detail::rrc_response(f, symbol_rate_baud, rolloff);
  });
}

/// Matched (receive) RRC filter; same transfer as the shaping filter.
inline Signal rrc_matched_filter(const Signal& s, double symbol_rate_baud, double rolloff,
                                 int samples_per_symbol) {
  const double g = std::sqrt(static_cast<double>(samples_per_symbol));
  return apply_transfer(s, [&](double f) {
    return g * detail::rrc_response(f, symbol_rate_baud, rolloff);
  });
}

struct TxOutput {
  Signal signal;                      // 2-pol optical envelope at channel center
  BitStream bits;                     // payload actually carried
  std::vector<std::vector<cpx>> symbols;  // per-pol reference symbols
};

/// One DP-QPSK transmitter: two independently modulated polarizations,
/// RRC-shaped, scaled to the launch power, under a common laser phase-noise
/// process.
inline TxOutput dp_qpsk_tx(const TxConfig& cfg, const TxChannel& ch, const BitStream& bits,
                           Rng& rng) {
  check_tx_config(cfg);
  if (bits.pol.size() != 2) throw std::invalid_argument("dp_qpsk_tx: 2 bit streams required");

  TxOutput out;
  out.bits = bits;
  Signal sig = make_signal(2, 0, cfg.sample_rate_hz(), ch.center_freq_hz);
  for (int p = 0; p < 2; ++p) {
    auto syms = qpsk_map(bits.pol[static_cast<std::size_t>(p)]);
    Signal shaped = rrc_shape(syms, cfg.samples_per_symbol, cfg.rolloff, cfg.symbol_rate_baud);
    sig.pol[static_cast<std::size_t>(p)] = std::move(shaped.pol[0]);
    out.symbols.push_back(std::move(syms));
  }
  sig = set_power_dbm(sig, ch.launch_power_dbm);
  Rng pn = rng.stream(17);
  sig = apply_laser_phase_noise(sig, cfg.laser_linewidth_hz, pn);
  sig.center_freq_hz = ch.center_freq_hz;
  out.signal = std::move(sig);
  return out;
}

/// Validate a channel ensemble against the frequency grid: every pairwise
/// spacing must be a nonzero multiple of the grid spacing.
inline void mux_channels(const std::vector<Signal>& channels, bool grid_check = true,
                         double grid_spacing_hz = 50e9) {
  if (channels.empty()) throw std::invalid_argument("mux_channels: at least one channel");
  if (!grid_check) return;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    for (std::size_t j = i + 1; j < channels.size(); ++j) {
      const double df = std::abs(channels[i].center_freq_hz - channels[j].center_freq_hz);
      const double ratio = df / grid_spacing_hz;
      if (df < 1.0 || std::abs(ratio - std::round(ratio)) * grid_spacing_hz > 1.0) {
        std::ostringstream msg;
        msg << "mux_channels: spacing between " << channels[i].center_freq_hz * 1e-12
            << " THz and " << channels[j].center_freq_hz * 1e-12 << " THz is " << df * 1e-9
            << " GHz, not a nonzero multiple of " << grid_spacing_hz * 1e-9 << " GHz";
        throw config_error(msg.str());
      }
    }
  }
}

}  // namespace thzlink

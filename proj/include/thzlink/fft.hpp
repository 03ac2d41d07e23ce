// SPDX-License-Identifier: Apache-2.0
//
// thzlink - fiber-THz-fiber 2x2 MIMO link simulator
// Copyright (c) 2026 thzlink contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "thzlink/util.hpp"

namespace thzlink::detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Twiddle factors are cached per transform size. Entries are immutable once
// built, so handing out references after the lock is released is fine.
inline const std::vector<cpx>& fft_twiddles(std::size_t n) {
  static std::mutex mtx;
  static std::map<std::size_t, std::unique_ptr<std::vector<cpx>>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto& slot = cache[n];
  if (!slot) {
    auto tw = std::make_unique<std::vector<cpx>>(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      double a = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
      (*tw)[k] = cpx(std::cos(a), std::sin(a));
    }
    slot = std::move(tw);
  }
  return *slot;
}

/// In-place radix-2 FFT. Forward is unnormalized; inverse scales by 1/N.
inline void fft_inplace(std::vector<cpx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (!is_pow2(n)) throw std::invalid_argument("fft: length must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const auto& tw = fft_twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cpx w = tw[k * step];
        if (inverse) w = std::conj(w);
        const cpx u = a[i + k];
        const cpx v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double s = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= s;
  }
}

inline std::vector<cpx> fft(std::vector<cpx> a) {
  fft_inplace(a, false);
  return a;
}

inline std::vector<cpx> ifft(std::vector<cpx> a) {
  fft_inplace(a, true);
  return a;
}

/// Frequency of FFT bin k for an N-point transform at sample rate sr, in the
/// usual wrapped order. The Nyquist bin maps to -sr/2 (half-open band).
inline double bin_freq(std::size_t k, std::size_t n, double sr) {
  if (2 * k < n) return static_cast<double>(k) * sr / static_cast<double>(n);
  return (static_cast<double>(k) - static_cast<double>(n)) * sr / static_cast<double>(n);
}

}  // namespace thzlink::detail

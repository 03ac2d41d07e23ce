// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "test_util.hpp"
#include "thzlink/signal.hpp"

using namespace thzlink;
using thztest::band_power_w;
using thztest::peak_freq;

namespace {

Signal random_signal(int n_pol, std::size_t n, double sr, Rng& rng, double bw_frac = 0.3) {
  // Band-limited random content so occupied-band checks behave.
  Signal s = make_signal(n_pol, n, sr);
  for (auto& p : s.pol)
    for (auto& x : p) x = rng.gauss_cpx();
  return apply_transfer(s, [&](double f) {
    return std::abs(f) <= bw_frac * sr / 2.0 ? 1.0 : 0.0;
  });
}

}  // namespace

TEST_CASE("power_dbm definition") {
  const std::size_t n = 1024;
  Signal cw = make_cw(1e-3, 1, n, 100e9);
  CHECK(power_dbm(cw) == Catch::Approx(0.0).margin(1e-12));

  Signal cw10 = scale_amplitude(cw, std::sqrt(10.0));
  CHECK(power_dbm(cw10) == Catch::Approx(10.0).margin(1e-12));

  // powers add across polarizations
  Signal dp = make_cw(1e-3, 2, n, 100e9);
  CHECK(std::abs(dp.pol[0][0] - std::sqrt(0.5e-3)) < 1e-15);
  CHECK(power_dbm(dp) == Catch::Approx(0.0).margin(1e-12));

  Signal empty = make_signal(1, 0, 100e9);
  CHECK_THROWS(power_dbm(empty));
}

TEST_CASE("frequency_shift moves a tone and preserves power") {
  const std::size_t n = 4096;
  Signal cw = make_cw(1e-3, 1, n, 100e9);
  Signal shifted = frequency_shift(cw, 25e9);
  CHECK(peak_freq(shifted) == Catch::Approx(25e9).margin(100e9 / n + 1.0));
  CHECK(mean_power_w(shifted) == Catch::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("frequency_shift inverse pair") {
  Rng rng(7);
  Signal s = random_signal(2, 4096, 100e9, rng);
  Signal back = frequency_shift(frequency_shift(s, 17.3e9), -17.3e9);
  double err = 0.0, ref = 0.0;
  for (int p = 0; p < 2; ++p)
    for (std::size_t i = 0; i < s.size(); ++i) {
      err += std::norm(back.pol[p][i] - s.pol[p][i]);
      ref += std::norm(s.pol[p][i]);
    }
  CHECK(std::sqrt(err / ref) < 1e-12);
}

TEST_CASE("frequency_shift rejects shifts past the band edge") {
  const std::size_t n = 4096;
  Signal cw = frequency_shift(make_cw(1e-3, 1, n, 100e9), 40e9);
  CHECK_THROWS_WITH(frequency_shift(cw, 20e9),
                    Catch::Matchers::ContainsSubstring("exceeds"));
}

TEST_CASE("apply_transfer identity and flat attenuation") {
  Rng rng(3);
  Signal s = random_signal(1, 2048, 50e9, rng);
  Signal id = apply_transfer(s, [](double) { return 1.0; });
  CHECK(thztest::evm_exact(id.pol[0], s.pol[0]) < 1e-12);

  Signal half = apply_transfer(s, [](double) { return 0.5; });
  CHECK(power_dbm(half) - power_dbm(s) == Catch::Approx(-6.0206).margin(1e-6));
}

TEST_CASE("apply_transfer brick wall keeps one of two tones") {
  const std::size_t n = 8192;
  const double sr = 100e9;
  Signal two = make_signal(1, n, sr);
  // two equal tones at +-25 GHz, total power 1 mW
  const double amp = std::sqrt(0.5e-3);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    const double th = 2.0 * kPi * 25e9 * t;
    two.pol[0][i] = amp * (cpx(std::cos(th), std::sin(th)) + cpx(std::cos(th), -std::sin(th)));
  }
  REQUIRE(mean_power_w(two) == Catch::Approx(1e-3).epsilon(1e-9));

  Signal one = apply_transfer(two, [](double f) { return f > 0.0 ? 1.0 : 0.0; });
  CHECK(mean_power_w(one) == Catch::Approx(0.5e-3).epsilon(1e-9));
  CHECK(peak_freq(one) == Catch::Approx(25e9).margin(sr / n + 1.0));
}

TEST_CASE("apply_transfer satisfies Parseval") {
  Rng rng(11);
  Signal s = random_signal(2, 4096, 80e9, rng);
  auto h = [](double f) { return cpx(1.0 / (1.0 + f * f / 1e20), 0.3); };
  Signal out = apply_transfer(s, h);

  // frequency-domain power computation
  double pf = 0.0;
  for (const auto& p : s.pol) {
    auto ps = thztest::spectrum(p);
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const double f = detail::bin_freq(k, ps.size(), s.sample_rate_hz);
      pf += ps[k] * std::norm(cpx(h(f)));
    }
  }
  CHECK(mean_power_w(out) == Catch::Approx(pf).epsilon(1e-9));
}

TEST_CASE("frequency_shift commutes with a correspondingly shifted transfer") {
  Rng rng(5);
  const double sr = 80e9;
  const std::size_t n = 4096;
  Signal s = random_signal(1, n, sr, rng, 0.2);
  const double df = 64.0 * sr / static_cast<double>(n);  // bin-aligned shift
  auto h = [](double f) { return std::exp(-f * f / (2.0 * 1e20)); };

  Signal a = frequency_shift(apply_transfer(s, h), df);
  Signal b = apply_transfer(frequency_shift(s, df), [&](double f) { return h(f - df); });
  CHECK(thztest::evm_exact(a.pol[0], b.pol[0]) < 1e-9);
}

TEST_CASE("add_awgn with zero psd is bit-identical") {
  Rng rng(21);
  Signal s = random_signal(1, 1024, 50e9, rng);
  Rng noise_rng(99);
  Signal out = add_awgn(s, 0.0, noise_rng);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(out.pol[0][i].real() == s.pol[0][i].real());
    CHECK(out.pol[0][i].imag() == s.pol[0][i].imag());
  }
  CHECK_THROWS(add_awgn(s, -1e-21, noise_rng));
}

TEST_CASE("add_awgn realizes the requested noise power") {
  const std::size_t n = 1 << 20;
  const double sr = 100e9;
  Signal zero = make_signal(1, n, sr);
  Rng rng(42);
  const double psd = 1e-3 / sr;  // noise power 1e-3 W -> 0 dBm
  Signal noisy = add_awgn(zero, psd, rng);
  CHECK(power_dbm(noisy) == Catch::Approx(0.0).margin(0.05));
}

TEST_CASE("add_awgn hits a constructed SNR") {
  const std::size_t n = 1 << 20;
  const double sr = 100e9;
  Signal cw = make_cw(1e-3, 1, n, sr);
  Rng rng(1234);
  const double psd = 1e-3 / 100.0 / sr;  // 20 dB below signal power
  Signal noisy = add_awgn(cw, psd, rng);
  // Tone sits in bin 0; everything else is noise.
  const auto ps = thztest::spectrum(noisy.pol[0]);
  double noise = 0.0;
  for (std::size_t k = 1; k < ps.size(); ++k) noise += ps[k];
  const double snr_db = lin_to_db(ps[0] / noise);
  CHECK(snr_db == Catch::Approx(20.0).margin(0.2));
}

TEST_CASE("resample round trip and tone preservation") {
  Rng rng(8);
  Signal s = random_signal(1, 4096, 50e9, rng, 0.4);
  Signal up = resample(s, 100e9);
  Signal back = resample(up, 50e9);
  CHECK(thztest::evm_exact(back.pol[0], s.pol[0]) < 1e-6);

  Signal cw = frequency_shift(make_cw(1e-3, 1, 4096, 50e9), 10e9);
  Signal cw2 = resample(cw, 100e9);
  CHECK(peak_freq(cw2) == Catch::Approx(10e9).margin(100e9 / 8192 + 1.0));
  CHECK(power_dbm(cw2) == Catch::Approx(0.0).margin(0.01));
}

TEST_CASE("resample rejects aliasing") {
  Rng rng(9);
  // occupies +-30 GHz at SR 100 GHz; 50 GHz cannot hold it
  Signal wide = random_signal(1, 4096, 100e9, rng, 0.6);
  CHECK_THROWS_WITH(resample(wide, 50e9), Catch::Matchers::ContainsSubstring("resample"));
}

TEST_CASE("rng determinism and stream independence") {
  Rng a(123, 7), b(123, 7), c(123, 8);
  bool same = true, diff = false;
  for (int i = 0; i < 256; ++i) {
    const auto va = a.u64(), vb = b.u64(), vc = c.u64();
    same = same && (va == vb);
    diff = diff || (va != vc);
  }
  CHECK(same);
  CHECK(diff);

  // identical pipelines reproduce bit-identically
  Rng r1(55), r2(55);
  Signal s1 = add_awgn(make_signal(2, 512, 10e9), 1e-15, r1);
  Signal s2 = add_awgn(make_signal(2, 512, 10e9), 1e-15, r2);
  for (int p = 0; p < 2; ++p)
    for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1.pol[p][i] == s2.pol[p][i]);
}

TEST_CASE("wiener phase noise statistics") {
  const double linewidth = 100e3;
  const double dt = 1.0 / 125.516e9;
  const std::size_t n = 1 << 20;
  Rng rng(77);
  const auto phi = wiener_phase(n, linewidth, dt, rng);
  double mean = 0.0, var = 0.0;
  for (std::size_t i = 1; i < n; ++i) mean += phi[i] - phi[i - 1];
  mean /= static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double d = phi[i] - phi[i - 1] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n - 2);
  const double expected = 2.0 * kPi * linewidth * dt;
  CHECK(std::abs(mean) < 3.0 * std::sqrt(expected / static_cast<double>(n)));
  CHECK(var == Catch::Approx(expected).epsilon(0.10));
}

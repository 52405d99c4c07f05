// Copyright 2026 The corpus-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fixture.hpp"
#include "corpus_forge/error.hpp"
#include "corpus_forge/loudness.hpp"

using namespace cforge;
using namespace cforge::testsupport;

namespace {

// Gated loudness with the fixed 48 kHz coefficient tables from the
// recommendation, written out longhand.
double reference_lufs_48k(std::span<const float> x) {
  const double b1[3] = {1.53512485958697, -2.69169618940638, 1.19839281085285};
  const double a1[3] = {1.0, -1.69065929318241, 0.73248077421585};
  const double b2[3] = {1.0, -2.0, 1.0};
  const double a2[3] = {1.0, -1.99004745483398, 0.99007225036621};
  std::vector<double> y(x.size());
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double v = b1[0] * x[n] + b1[1] * x1 + b1[2] * x2 - a1[1] * y1 - a1[2] * y2;
    x2 = x1;
    x1 = x[n];
    y2 = y1;
    y1 = v;
    y[n] = v;
  }
  x1 = x2 = y1 = y2 = 0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double in = y[n];
    const double v = b2[0] * in + b2[1] * x1 + b2[2] * x2 - a2[1] * y1 - a2[2] * y2;
    x2 = x1;
    x1 = in;
    y2 = y1;
    y1 = v;
    y[n] = v;
  }
  const std::size_t block = 19200;
  const std::size_t step = 4800;
  std::vector<double> z;
  for (std::size_t s = 0; s + block <= y.size(); s += step) {
    double acc = 0;
    for (std::size_t n = s; n < s + block; ++n) acc += y[n] * y[n];
    z.push_back(acc / block);
  }
  auto l = [](double ms) { return -0.691 + 10.0 * std::log10(ms); };
  double sum = 0;
  std::size_t cnt = 0;
  for (double m : z) {
    if (l(m) > -70.0) {
      sum += m;
      ++cnt;
    }
  }
  const double rel = l(sum / cnt) - 10.0;
  sum = 0;
  cnt = 0;
  for (double m : z) {
    if (l(m) > -70.0 && l(m) > rel) {
      sum += m;
      ++cnt;
    }
  }
  return l(sum / cnt);
}

AudioClip scaled(const AudioClip& c, double g) {
  std::vector<float> x(c.samples().begin(), c.samples().end());
  for (float& v : x) v = static_cast<float>(v * g);
  return AudioClip(std::move(x), c.sample_rate());
}

AudioClip noise_bursts(int rate, double seconds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.05);
  const auto n = static_cast<std::size_t>(seconds * rate);
  std::vector<float> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double env = (i / (rate / 2)) % 3 == 0 ? 0.02 : 1.0;  // quiet stretches exercise the gates
    x[i] = static_cast<float>(std::clamp(g(rng) * env, -1.0, 1.0));
  }
  return AudioClip(std::move(x), rate);
}

}  // namespace

TEST_SUITE("loudness") {
  TEST_CASE("conformance sine measures -23 LUFS") {
    // 997 Hz at -23 dBFS per channel in the stereo conformance signal; the
    // mono equivalent carries both channels' energy.
    const double amp = std::pow(10.0, -23.0 / 20.0) * std::numbers::sqrt2;
    for (int rate : {48000, 44100}) {
      const auto s = sine(997.0, amp, 20.0, rate);
      CHECK(measure_integrated_loudness(s) == doctest::Approx(-23.0).epsilon(0.1 / 23.0));
    }
  }

  TEST_CASE("matches the fixed-coefficient reference at 48 kHz") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto c = noise_bursts(48000, 6.0, seed);
      CHECK(measure_integrated_loudness(c) == doctest::Approx(reference_lufs_48k(c.samples())).epsilon(1e-6));
    }
  }

  TEST_CASE("half amplitude is 6.02 LU quieter") {
    const auto c = noise_bursts(44100, 5.0, 9);
    const double a = measure_integrated_loudness(c);
    const double b = measure_integrated_loudness(scaled(c, 0.5));
    CHECK(a - b == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-9));
  }

  TEST_CASE("silence and short clips cannot be measured") {
    auto code = [](const AudioClip& c) {
      try {
        measure_integrated_loudness(c);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::kInternal;
    };
    CHECK(code(AudioClip(std::vector<float>(48000, 0.0f), 48000)) == ErrorCode::kMeasurement);
    CHECK(code(sine(997.0, 0.1, 0.3, 48000)) == ErrorCode::kMeasurement);
  }

  TEST_CASE("normalization") {
    SUBCASE("-30 LUFS gets +10 dB") {
      const double amp = std::pow(10.0, -30.0 / 20.0) * std::numbers::sqrt2;
      const auto c = sine(997.0, amp, 5.0, 48000);
      const double before = measure_integrated_loudness(c);
      const auto [out, rep] = normalize_loudness(c, -20.0);
      CHECK(rep.gain_applied_db == doctest::Approx(-20.0 - before).epsilon(1e-9));
      CHECK(std::abs(rep.gain_applied_db - 10.0) < 0.2);
      CHECK(std::abs(measure_integrated_loudness(out) + 20.0) <= 0.5);
      CHECK(rep.integrated_lufs == doctest::Approx(measure_integrated_loudness(out)));
      CHECK_FALSE(rep.gain_capped);
    }
    SUBCASE("a clip at the target is a fixed point") {
      const auto [once, r1] = normalize_loudness(noise_bursts(44100, 5.0, 4), -20.0);
      const auto [twice, r2] = normalize_loudness(once, -20.0);
      CHECK(std::abs(r2.gain_applied_db) <= 0.1);
    }
    SUBCASE("gain is capped at full scale") {
      // Quiet tone plus sparse 0.9 clicks: loud peaks, low loudness.
      auto c = sine(997.0, 0.04, 5.0, 48000);
      std::vector<float> x(c.samples().begin(), c.samples().end());
      for (std::size_t i = 1000; i < x.size(); i += 48000) x[i] = 0.9f;
      const AudioClip clicky(std::move(x), 48000);
      const double before = measure_integrated_loudness(clicky);
      REQUIRE(before < -25.0);
      const auto [out, rep] = normalize_loudness(clicky, before + 5.0);
      CHECK(rep.gain_capped);
      CHECK(rep.gain_applied_db < 5.0);
      CHECK(rep.gain_applied_db == doctest::Approx(20.0 * std::log10(1.0 / 0.9)).epsilon(1e-4));
      CHECK(rep.clipped_samples > 0);
      float peak = 0;
      for (float v : out.samples()) peak = std::max(peak, std::abs(v));
      CHECK(peak <= 1.0f);
    }
  }

  TEST_CASE("fades") {
    const AudioClip ones(std::vector<float>(44100, 1.0f), 44100);
    const auto f = apply_fade(ones, 0.1);
    const auto s = f.samples();
    CHECK(s[0] == 0.0f);
    for (std::size_t k : {1u, 100u, 2205u, 4409u}) CHECK(s[k] == doctest::Approx(k / 4410.0).epsilon(1e-6));
    CHECK(s[4410] == 1.0f);
    CHECK(s[22050] == 1.0f);
    CHECK(s[44099] == 0.0f);

    const auto ff = apply_fade(f, 0.1);
    for (std::size_t k : {1u, 2205u, 4409u}) {
      CHECK(ff.samples()[k] == doctest::Approx((k / 4410.0) * (k / 4410.0)).epsilon(1e-6));
    }
    for (std::size_t k = 4410; k < 44100 - 4410; ++k) REQUIRE(ff.samples()[k] == s[k]);
  }
}

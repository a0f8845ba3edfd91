// Copyright 2026 The capisdr Authors.
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
#include <vector>

#include <gtest/gtest.h>

#include "capisdr/rng.hpp"
#include "capisdr/signal.hpp"
#include "oracles.hpp"

namespace capisdr {
namespace {

std::vector<double> noise(Rng& rng, std::size_t n) {
  std::vector<double> x(n);
  for (double& v : x) v = rng.gaussian();
  return x;
}

TEST(Energy, ZeroSignal) {
  EXPECT_EQ(energy(Waveform(std::vector<double>(100, 0.0), 32000)), 0.0);
}

TEST(Energy, SingleSample) { EXPECT_EQ(energy(Waveform({3.0}, 32000)), 9.0); }

TEST(Energy, ConstantHalf) {
  EXPECT_EQ(energy(Waveform(std::vector<double>(32000, 0.5), 32000)), 8000.0);
}

TEST(WaveformTest, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(Waveform({}, 16000), Error);
  EXPECT_THROW(Waveform({1.0, std::nan("")}, 16000), Error);
  EXPECT_THROW(Waveform({1.0, INFINITY}, 16000), Error);
  EXPECT_THROW(Waveform({1.0}, 0), Error);
}

TEST(Sdr, PerfectReconstructionHitsCap) {
  Rng rng(1);
  Waveform s(noise(rng, 512), 16000);
  EXPECT_EQ(sdr(s, s), 60.0);
  NumericGuards g;
  g.sdr_cap_db = 35.0;
  EXPECT_EQ(sdr(s, s, g), 35.0);
}

TEST(Sdr, DoubledEstimateIsZeroDb) {
  Rng rng(2);
  auto x = noise(rng, 777);
  std::vector<double> twice = x;
  for (double& v : twice) v *= 2.0;
  EXPECT_NEAR(sdr(Waveform(twice, 16000), Waveform(x, 16000)), 0.0, 1e-12);
}

TEST(Sdr, ConstructedTenDb) {
  Rng rng(3);
  auto s = noise(rng, 4000);
  auto n = noise(rng, 4000);
  const double beta = std::sqrt(energy(s) / (energy(n) * std::pow(10.0, 10.0 / 10.0)));
  std::vector<double> est(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) est[i] = s[i] + beta * n[i];
  EXPECT_NEAR(sdr(Waveform(est, 16000), Waveform(s, 16000)), 10.0, 1e-9);
}

TEST(Sdr, Errors) {
  Waveform a({1.0, 2.0, 3.0}, 16000);
  Waveform b({1.0, 2.0}, 16000);
  Waveform silent({0.0, 0.0, 0.0}, 16000);
  Waveform other_rate({1.0, 2.0, 3.0}, 8000);
  try {
    sdr(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
  try {
    sdr(a, silent);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSilentReference);
  }
  try {
    sdr(a, other_rate);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSampleRateMismatch);
  }
}

TEST(Sdri, MixtureAsEstimateIsZero) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    Waveform s(noise(rng, 300), 16000);
    Waveform y(noise(rng, 300), 16000);
    EXPECT_EQ(sdri(y, s, y), 0.0);
  }
}

TEST(Sdri, PerfectEstimateGivesCapMinusMixtureSdr) {
  // y = s + n with SDR(y, s) = -3.2 dB by construction.
  Rng rng(5);
  auto s = noise(rng, 2048);
  auto n = noise(rng, 2048);
  const double beta = std::sqrt(energy(s) / (energy(n) * std::pow(10.0, -3.2 / 10.0)));
  std::vector<double> y(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) y[i] = s[i] + beta * n[i];
  Waveform ws(s, 16000), wy(y, 16000);
  ASSERT_NEAR(sdr(wy, ws), -3.2, 1e-9);
  EXPECT_NEAR(sdri(ws, ws, wy), 60.0 + 3.2, 1e-9);
}

TEST(Sdri, MatchesStraightFormulaOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 64 + rng.below(1000);
    auto s = noise(rng, n);
    auto y = noise(rng, n);
    const double scale = rng.uniform(0.1, 3.0), level = rng.uniform(0.01, 2.0);
    std::vector<double> est(n);
    for (std::size_t i = 0; i < n; ++i) est[i] = scale * s[i] + level * rng.gaussian() + 0.3 * y[i];
    const double got = sdri(Waveform(est, 16000), Waveform(s, 16000), Waveform(y, 16000));
    EXPECT_NEAR(got, oracle::sdri_db(est, s, y), 1e-9);
  }
}

TEST(SdrProperties, JointScalingInvariance) {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    auto s = noise(rng, 500);
    auto e = noise(rng, 500);
    for (std::size_t i = 0; i < s.size(); ++i) e[i] = s[i] + 0.3 * e[i];
    const double alpha = rng.uniform(-5.0, 5.0);
    if (std::abs(alpha) < 1e-3) continue;
    auto sa = s, ea = e;
    for (auto& v : sa) v *= alpha;
    for (auto& v : ea) v *= alpha;
    EXPECT_NEAR(sdr(Waveform(ea, 1), Waveform(sa, 1)), sdr(Waveform(e, 1), Waveform(s, 1)), 1e-9);
  }
}

TEST(SdrProperties, FiniteAndBelowCap) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = noise(rng, 64);
    std::vector<double> e = s;
    const double eps = std::pow(10.0, -rng.uniform(0.0, 20.0));
    for (auto& v : e) v += eps * rng.gaussian();
    const double v = sdr(Waveform(e, 1), Waveform(s, 1));
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LE(v, 60.0);
  }
}

TEST(SdrProperties, DecreasesWithNoiseLevel) {
  Rng rng(9);
  auto s = noise(rng, 1000);
  auto n = noise(rng, 1000);
  double previous = INFINITY;
  for (double beta = 0.01; beta < 10.0; beta *= 1.5) {
    std::vector<double> e(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) e[i] = s[i] + beta * n[i];
    const double v = sdr(Waveform(e, 1), Waveform(s, 1));
    EXPECT_LT(v, previous);
    previous = v;
  }
}

TEST(NumericGuardsTest, Validation) {
  NumericGuards g;
  EXPECT_NO_THROW(g.validate());
  g.sdr_cap_db = 0.0;
  EXPECT_THROW(g.validate(), Error);
  g = {};
  g.energy_floor = 0.0;
  EXPECT_THROW(g.validate(), Error);
}

}  // namespace
}  // namespace capisdr

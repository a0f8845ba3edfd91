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

#include "capisdr/dataset.hpp"
#include "capisdr/metrics.hpp"
#include "capisdr/synth.hpp"

namespace capisdr {
namespace {

SceneSpec small_spec(std::uint64_t seed) {
  SceneSpec spec;
  spec.seed = seed;
  spec.duration_s = 0.5;
  spec.sample_rate_hz = 16000;
  spec.labels = {"a", "a", "b"};
  spec.n_interference = 2;
  return spec;
}

TEST(GenerateScene, DefaultsFollowSceneParameters) {
  const SceneSpec spec;
  EXPECT_EQ(spec.duration_s, 10.0);
  EXPECT_EQ(spec.sample_rate_hz, 32000);
  EXPECT_EQ(spec.target_snr_db_range, (std::pair<double, double>{5.0, 20.0}));
  EXPECT_EQ(spec.interference_snr_db_range, (std::pair<double, double>{0.0, 15.0}));
  EXPECT_EQ(kMaxTargets, 3u);
}

TEST(GenerateScene, Deterministic) {
  const Scene a = generate_scene(small_spec(42));
  const Scene b = generate_scene(small_spec(42));
  EXPECT_EQ(a.mixture_ref, b.mixture_ref);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(a.references[k].waveform, b.references[k].waveform);
  EXPECT_EQ(a.interferers, b.interferers);
  const Scene c = generate_scene(small_spec(43));
  EXPECT_NE(a.mixture_ref, c.mixture_ref);
}

TEST(GenerateScene, FullLengthAtDefaultRate) {
  SceneSpec spec;
  spec.labels = {"Speech"};
  const Scene s = generate_scene(spec);
  EXPECT_EQ(s.mixture_ref.size(), 320000u);
  EXPECT_EQ(s.mixture_ref.sample_rate_hz(), 32000);
}

TEST(GenerateScene, SingleTargetWithoutBackgroundIsTheMixture) {
  SceneSpec spec = small_spec(1);
  spec.labels = {"a"};
  spec.n_interference = 0;
  spec.include_noise = false;
  const Scene s = generate_scene(spec);
  EXPECT_EQ(s.mixture_ref, s.references[0].waveform);
}

TEST(GenerateScene, KeepsDuplicatedLabels) {
  const Scene s = generate_scene(small_spec(2));
  ASSERT_EQ(s.references.size(), 3u);
  EXPECT_EQ(s.references[0].label, Label("a"));
  EXPECT_EQ(s.references[1].label, Label("a"));
  EXPECT_EQ(s.references[2].label, Label("b"));
}

TEST(GenerateScene, MixtureIsSampleExactSum) {
  for (bool f32 : {false, true}) {
    SceneSpec spec = small_spec(3);
    spec.float32_exact = f32;
    const Scene s = generate_scene(spec);
    for (std::size_t i = 0; i < s.mixture_ref.size(); ++i) {
      double acc = 0.0;
      for (const auto& r : s.references) acc += r.waveform[i];
      for (const auto& w : s.interferers) acc += w[i];
      acc += (*s.noise)[i];
      if (f32) acc = static_cast<float>(acc);
      ASSERT_EQ(s.mixture_ref[i], acc);
    }
  }
}

TEST(GenerateScene, TargetSnrWithinTolerance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SceneSpec spec = small_spec(seed);
    spec.n_interference = seed % 3;
    spec.float32_exact = seed % 2 == 0;
    const Scene s = generate_scene(spec);
    for (std::size_t k = 0; k < s.references.size(); ++k) {
      EXPECT_GE(s.target_snr_db[k], 5.0);
      EXPECT_LE(s.target_snr_db[k], 20.0);
      EXPECT_NEAR(measured_target_snr_db(s, k), s.target_snr_db[k], 0.1);
    }
    for (double snr : s.interference_snr_db) {
      EXPECT_GE(snr, 0.0);
      EXPECT_LE(snr, 15.0);
    }
  }
}

TEST(GenerateScene, RejectsInvalidSpecs) {
  SceneSpec spec = small_spec(0);
  spec.labels = {};
  EXPECT_THROW(generate_scene(spec), Error);
  spec.labels = {"a", "b", "c", "d"};
  EXPECT_THROW(generate_scene(spec), Error);
  spec = small_spec(0);
  spec.n_interference = 3;
  EXPECT_THROW(generate_scene(spec), Error);
  spec = small_spec(0);
  spec.target_snr_db_range = {20.0, 5.0};
  EXPECT_THROW(generate_scene(spec), Error);
}

TEST(MakeEstimate, HitsTargetSdr) {
  const Scene s = generate_scene(small_spec(5));
  const Waveform& ref = s.references[0].waveform;
  for (double target : {10.0, 0.0, -5.0, 33.3, 59.99}) {
    const Waveform est = make_estimate_with_sdr(ref, target, 9);
    EXPECT_NEAR(sdr(est, ref), target, 1e-9) << target;
  }
}

TEST(MakeEstimate, ZeroDbErrorEqualsSignalEnergy) {
  const Scene s = generate_scene(small_spec(6));
  const Waveform& ref = s.references[1].waveform;
  const Waveform est = make_estimate_with_sdr(ref, 0.0, 1);
  EXPECT_NEAR(error_energy(est, ref) / energy(ref), 1.0, 1e-12);
}

TEST(MakeEstimate, Float32ExactStaysClose) {
  SceneSpec spec = small_spec(7);
  spec.float32_exact = true;
  const Scene s = generate_scene(spec);
  const Waveform& ref = s.references[0].waveform;
  for (double target : {0.0, 12.5, 40.0}) {
    const Waveform est = make_estimate_with_sdr(ref, target, 3, {}, true);
    for (double v : est.samples()) ASSERT_EQ(v, static_cast<double>(static_cast<float>(v)));
    EXPECT_NEAR(sdr(est, ref), target, 1e-6);
  }
}

TEST(MakeEstimate, Errors) {
  Waveform silent(std::vector<double>(100, 0.0), 16000);
  try {
    make_estimate_with_sdr(silent, 10.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSilentReference);
  }
  Waveform ref(std::vector<double>(100, 1.0), 16000);
  EXPECT_THROW(make_estimate_with_sdr(ref, 60.0, 1), Error);
}

TEST(Dataset, ClosedFormExpectationHolds) {
  DatasetSpec spec;
  spec.duration_s = 0.5;
  spec.sample_rate_hz = 16000;
  spec.seed = 77;
  spec.fp_rate = 0.3;
  spec.fn_rate = 0.3;
  for (std::size_t i = 0; i < 40; ++i) {
    const auto mix = generate_mixture(spec, i);
    EXPECT_LE(mix.estimates.size(), 3u);
    const auto ev = ca_pi_sdri(mix.scene.references, mix.estimates, mix.scene.mixture_ref);
    EXPECT_NEAR(ev.metric_db, mix.expected_db, 1e-6) << mix.id;
    if (mix.subset == kDupSubset) {
      EXPECT_FALSE(labels_distinct(mix.scene.references));
    } else {
      EXPECT_TRUE(labels_distinct(mix.scene.references));
    }
  }
}

}  // namespace
}  // namespace capisdr

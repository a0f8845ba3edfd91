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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "capisdr/metrics.hpp"
#include "capisdr/rng.hpp"
#include "capisdr/synth.hpp"
#include "oracles.hpp"

namespace capisdr {
namespace {

std::vector<double> vec(const Waveform& w) { return {w.samples().begin(), w.samples().end()}; }

Scene short_scene(std::uint64_t seed, std::vector<Label> labels, std::size_t interferers = 1) {
  SceneSpec spec;
  spec.seed = seed;
  spec.duration_s = 0.1;
  spec.sample_rate_hz = 16000;
  spec.labels = std::move(labels);
  spec.n_interference = interferers;
  return generate_scene(spec);
}

// est = ref + noise at a random level: distinct, finite SDRi per pair.
LabeledSources noisy_estimates(const LabeledSources& refs, Rng& rng) {
  LabeledSources out;
  for (const auto& s : refs) {
    out.push_back({s.label, make_estimate_with_sdr(s.waveform, rng.uniform(0.0, 30.0), rng.next_u64())});
  }
  return out;
}

TEST(ClassComponent, AllFalseNegatives) {
  const Scene scene = short_scene(1, {"a", "a"});
  const LabeledSources none;
  const auto groups = group_by_label(scene.references, none);
  ASSERT_EQ(groups.size(), 1u);
  const auto comp = class_component(groups[0], scene.mixture_ref, {});
  EXPECT_EQ(comp.p_value, 0.0);
  EXPECT_EQ(comp.counts.n_total, 2u);
  EXPECT_EQ(comp.counts.n_fn, 2u);
  EXPECT_EQ(comp.unmatched_refs, (std::vector<std::size_t>{0, 1}));
}

TEST(ClassComponent, SinglePair) {
  Rng rng(2);
  const Scene scene = short_scene(2, {"a"});
  const LabeledSources ests = noisy_estimates(scene.references, rng);
  const auto groups = group_by_label(scene.references, ests);
  const auto comp = class_component(groups[0], scene.mixture_ref, {});
  EXPECT_EQ(comp.p_value, sdri(ests[0].waveform, scene.references[0].waveform, scene.mixture_ref));
  EXPECT_EQ(comp.counts, (PredictionCounts{1, 0, 0, 1}));
}

TEST(ClassComponent, ThreeRefsTwoEstsMatchesSelectionEnumeration) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Scene scene = short_scene(100 + trial, {"a", "a", "a"}, 2);
    const auto& refs = scene.references;
    // Each estimate blends two references so that several pairings compete.
    LabeledSources ests;
    for (int e = 0; e < 2; ++e) {
      const auto& r1 = refs[rng.below(3)].waveform;
      const auto& r2 = refs[rng.below(3)].waveform;
      const double w = rng.uniform(0.3, 1.0);
      std::vector<double> x(r1.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = w * r1[i] + (1 - w) * r2[i] + 0.01 * rng.gaussian();
      ests.push_back({Label("a"), Waveform(std::move(x), r1.sample_rate_hz())});
    }
    MetricConfig cfg;
    cfg.penalty_fn = -3.0;
    const auto groups = group_by_label(refs, ests);
    const auto comp = class_component(groups[0], scene.mixture_ref, cfg);

    double table[2][3];
    for (int e = 0; e < 2; ++e)
      for (int r = 0; r < 3; ++r)
        table[e][r] = oracle::sdri_db(vec(ests[e].waveform), vec(refs[r].waveform), vec(scene.mixture_ref));
    // sigma over ordered estimate pairs {(0,1),(1,0)}, pi over reference
    // combinations {(0,1),(0,2),(1,2)}.
    double best = -std::numeric_limits<double>::infinity();
    const int sigmas[2][2] = {{0, 1}, {1, 0}};
    const int pis[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& s : sigmas)
      for (const auto& p : pis) best = std::max(best, table[s[0]][p[0]] + table[s[1]][p[1]]);
    EXPECT_NEAR(comp.p_value, best + 1 * cfg.penalty_fn, 1e-9);
    EXPECT_EQ(comp.counts, (PredictionCounts{2, 1, 0, 3}));
    EXPECT_EQ(comp.unmatched_refs.size(), 1u);
  }
}

TEST(CaPiSdri, PerfectPrediction) {
  const Scene scene = short_scene(4, {"a", "b", "a"});
  const auto& refs = scene.references;
  const auto ev = ca_pi_sdri(refs, refs, scene.mixture_ref);
  double expected = 0.0;
  for (const auto& s : refs) expected += 60.0 - sdr(scene.mixture_ref, s.waveform);
  EXPECT_NEAR(ev.metric_db, expected / 3.0, 1e-9);
  for (const auto& c : ev.components)
    for (const auto& [e, r] : c.matched) EXPECT_EQ(e, r);
}

TEST(CaPiSdri, AllLabelsWrong) {
  Rng rng(5);
  const Scene scene = short_scene(5, {"a", "b"});
  LabeledSources ests;
  for (const auto& s : noisy_estimates(scene.references, rng)) {
    ests.push_back({Label("x" + s.label.str()), s.waveform});
  }
  const auto ev = ca_pi_sdri(scene.references, ests, scene.mixture_ref);
  EXPECT_EQ(ev.metric_db, 0.0);
  EXPECT_EQ(ev.total_n, 4u);
}

TEST(CaPiSdri, MixtureCopiesScoreZero) {
  const Scene scene = short_scene(6, {"a", "a", "b"});
  LabeledSources ests;
  for (const auto& s : scene.references) ests.push_back({s.label, scene.mixture_ref});
  EXPECT_NEAR(ca_pi_sdri(scene.references, ests, scene.mixture_ref).metric_db, 0.0, 1e-9);
}

TEST(CaPiSdri, ReducesToBaselineOnDistinctLabels) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Scene scene = short_scene(200 + trial, {"a", "b", "c"});
    LabeledSources ests = noisy_estimates(scene.references, rng);
    MetricConfig cfg;
    cfg.penalty_fn = rng.uniform(-5, 5);
    cfg.penalty_fp = rng.uniform(-5, 5);
    LabeledSources partial;
    for (const auto& s : ests)
      if (rng.below(4) != 0) partial.push_back(s);
    if (rng.below(2)) partial.push_back({Label("z"), scene.mixture_ref});
    EXPECT_EQ(ca_pi_sdri(scene.references, partial, scene.mixture_ref, cfg).metric_db,
              ca_sdri_baseline(scene.references, partial, scene.mixture_ref, cfg));
  }
}

TEST(CaSdriBaseline, MixtureAsEstimate) {
  const Scene scene = short_scene(8, {"a"});
  LabeledSources ests;
  ests.push_back({Label("a"), scene.mixture_ref});
  EXPECT_EQ(ca_sdri_baseline(scene.references, ests, scene.mixture_ref), 0.0);
}

TEST(CaSdriBaseline, DuplicateLabels) {
  const Scene scene = short_scene(9, {"a", "a"});
  try {
    ca_sdri_baseline(scene.references, scene.references, scene.mixture_ref);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateLabels);
  }
  // duplicates on the estimate side only
  const Scene single = short_scene(10, {"a"});
  LabeledSources ests;
  ests.push_back({Label("b"), single.mixture_ref});
  ests.push_back({Label("b"), single.mixture_ref});
  EXPECT_THROW(ca_sdri_baseline(single.references, ests, single.mixture_ref), Error);
}

TEST(CaPiSdri, EmptyReference) {
  const Scene scene = short_scene(11, {"a"});
  try {
    ca_pi_sdri(LabeledSources{}, scene.references, scene.mixture_ref);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyReference);
  }
}

TEST(CaPiSdri, OrderInvariance) {
  Rng rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const std::vector<Label> labels =
        trial % 2 ? std::vector<Label>{Label("a"), Label("a"), Label("a")}
                  : std::vector<Label>{Label("a"), Label("a"), Label("b")};
    const Scene scene = short_scene(300 + trial, labels, 2);
    LabeledSources ests = noisy_estimates(scene.references, rng);
    const double base = ca_pi_sdri(scene.references, ests, scene.mixture_ref).metric_db;
    std::vector<LabeledSource> r(scene.references.begin(), scene.references.end());
    std::vector<LabeledSource> e(ests.begin(), ests.end());
    rng.shuffle(r.begin(), r.end());
    rng.shuffle(e.begin(), e.end());
    EXPECT_EQ(ca_pi_sdri(LabeledSources(r), LabeledSources(e), scene.mixture_ref).metric_db, base);
  }
}

TEST(CaPiSdri, FalsePositiveDilution) {
  Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const Scene scene = short_scene(400 + trial, {"a", "b", "a"});
    LabeledSources ests = noisy_estimates(scene.references, rng);
    const auto before = ca_pi_sdri(scene.references, ests, scene.mixture_ref);
    ests.push_back({Label("c"), scene.mixture_ref});
    const auto after = ca_pi_sdri(scene.references, ests, scene.mixture_ref);
    EXPECT_EQ(after.total_n, before.total_n + 1);
    EXPECT_EQ(after.metric_db, before.p_sum / static_cast<double>(before.total_n + 1));
  }
}

TEST(CaPiSdri, PenaltiesEnterSumAndCount) {
  Rng rng(14);
  const Scene scene = short_scene(15, {"a", "b"});
  LabeledSources ests = noisy_estimates(scene.references, rng);
  LabeledSources one;
  one.push_back(ests[0]);                               // b missed
  one.push_back({Label("c"), scene.mixture_ref});       // c spurious
  MetricConfig cfg;
  cfg.penalty_fn = -10.0;
  cfg.penalty_fp = -20.0;
  const auto ev = ca_pi_sdri(scene.references, one, scene.mixture_ref, cfg);
  const double tp = sdri(ests[0].waveform, scene.references[0].waveform, scene.mixture_ref);
  EXPECT_NEAR(ev.metric_db, (tp - 10.0 - 20.0) / 3.0, 1e-12);
}

TEST(CaPiSdri, PenaltyHookScalesPerSource) {
  Rng rng(16);
  const Scene scene = short_scene(16, {"a", "b"});
  LabeledSources ests;
  ests.push_back(noisy_estimates(scene.references, rng)[0]);
  MetricConfig cfg;
  cfg.penalty_fn = -1.0;
  cfg.penalty_hook = [](PredictionKind kind, const Waveform& w, double flat) {
    EXPECT_EQ(kind, PredictionKind::kFalseNegative);
    return flat * energy(w);
  };
  const auto ev = ca_pi_sdri(scene.references, ests, scene.mixture_ref, cfg);
  const auto& missed = scene.references[1].waveform;
  const double tp = sdri(ests[0].waveform, scene.references[0].waveform, scene.mixture_ref);
  EXPECT_NEAR(ev.metric_db, (tp - energy(missed)) / 2.0, 1e-12);
  EXPECT_EQ(ev.metric_db, ca_sdri_baseline(scene.references, ests, scene.mixture_ref, cfg));
}

TEST(PiSdri, PermutedPerfectEstimates) {
  const Scene scene = short_scene(17, {"a", "b", "c"});
  std::vector<LabeledSource> e(scene.references.begin(), scene.references.end());
  std::rotate(e.begin(), e.begin() + 1, e.end());
  double expected = 0.0;
  for (const auto& s : scene.references) expected += 60.0 - sdr(scene.mixture_ref, s.waveform);
  EXPECT_NEAR(pi_sdri(scene.references, LabeledSources(e), scene.mixture_ref), expected / 3, 1e-9);
}

TEST(PiSdri, SingleSource) {
  Rng rng(18);
  const Scene scene = short_scene(18, {"a"});
  LabeledSources ests;
  ests.push_back({Label("unrelated"), noisy_estimates(scene.references, rng)[0].waveform});
  EXPECT_EQ(pi_sdri(scene.references, ests, scene.mixture_ref),
            sdri(ests[0].waveform, scene.references[0].waveform, scene.mixture_ref));
}

TEST(PiSdri, ThreeSourcesMatchPermutationEnumeration) {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const Scene scene = short_scene(500 + trial, {"a", "b", "c"});
    const auto& refs = scene.references;
    LabeledSources ests;
    for (int e = 0; e < 3; ++e) {
      const auto& r1 = refs[rng.below(3)].waveform;
      std::vector<double> x(r1.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = r1[i] + 0.5 * scene.mixture_ref[i] + 0.01 * rng.gaussian();
      ests.push_back({Label("q"), Waveform(std::move(x), 16000)});
    }
    double table[3][3];
    for (int e = 0; e < 3; ++e)
      for (int r = 0; r < 3; ++r)
        table[e][r] = oracle::sdri_db(vec(ests[e].waveform), vec(refs[r].waveform), vec(scene.mixture_ref));
    std::vector<int> p = {0, 1, 2};
    double best = -std::numeric_limits<double>::infinity();
    do {
      best = std::max(best, table[p[0]][0] + table[p[1]][1] + table[p[2]][2]);
    } while (std::next_permutation(p.begin(), p.end()));
    EXPECT_NEAR(pi_sdri(refs, ests, scene.mixture_ref), best / 3.0, 1e-9);
  }
}

TEST(PiSdri, CountMismatch) {
  const Scene scene = short_scene(20, {"a", "b"});
  LabeledSources one;
  one.push_back(scene.references[0]);
  try {
    pi_sdri(scene.references, one, scene.mixture_ref);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCountMismatch);
  }
}

TEST(PiSdri, BoundsClassAwareSeparationTerm) {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const Scene scene = short_scene(600 + trial, {"a", "a", "b"});
    const auto& refs = scene.references;
    LabeledSources ests;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& src = refs[rng.below(3)].waveform;
      std::vector<double> x(src.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = src[i] + 0.2 * rng.gaussian();
      ests.push_back({refs[k].label, Waveform(std::move(x), 16000)});
    }
    const double ca = ca_pi_sdri(refs, ests, scene.mixture_ref).metric_db;
    EXPECT_GE(pi_sdri(refs, ests, scene.mixture_ref), ca - 1e-12);
  }
}

}  // namespace
}  // namespace capisdr

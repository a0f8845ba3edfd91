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

// Batches of synthetic mixtures with estimates of known quality, so that the
// metric value of every mixture is known in closed form.

#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "capisdr/error.hpp"
#include "capisdr/grouping.hpp"
#include "capisdr/manifest.hpp"
#include "capisdr/rng.hpp"
#include "capisdr/signal.hpp"
#include "capisdr/synth.hpp"
#include "capisdr/wav.hpp"

namespace capisdr {

inline const std::string kDupSubset = "DupSet";
inline const std::string kNoDupSubset = "NoDupSet";

struct DatasetSpec {
  std::size_t n_mixtures = 12;
  std::uint64_t seed = 0;
  double duration_s = 10.0;
  int sample_rate_hz = 32000;
  double dup_fraction = 0.4;  // share of mixtures with same-class targets
  std::pair<double, double> sdri_target_range{0.0, 20.0};
  double fn_rate = 0.0;  // chance of dropping one estimate
  double fp_rate = 0.0;  // chance of adding one estimate of an absent class
  std::size_t max_estimates = kMaxTargets;
  bool include_noise = true;
  std::vector<std::string> vocabulary = dcase2025_vocabulary();
  bool float32_exact = true;
  // Scene-level overrides; unset fields are drawn per mixture.
  std::optional<std::vector<std::string>> fixed_labels;
  std::optional<std::size_t> fixed_interference;
  std::pair<double, double> target_snr_db_range{5.0, 20.0};
  std::pair<double, double> interference_snr_db_range{0.0, 15.0};
};

struct SyntheticMixture {
  std::string id;
  std::string subset;
  Scene scene;
  LabeledSources estimates;
  // Intended SDRi of each kept estimate against its source reference.
  std::vector<double> sdri_targets;
  std::size_t n_false_positive = 0;
  // Mean of the intended SDRi values over K + false positives (zero penalties).
  double expected_db = 0.0;
};

namespace detail {

inline std::vector<Label> draw_labels(Rng& rng, bool duplicated,
                                      const std::vector<std::string>& vocab) {
  std::vector<std::string> pool = vocab;
  rng.shuffle(pool.begin(), pool.end());
  std::vector<Label> labels;
  if (duplicated) {
    const auto k = static_cast<std::size_t>(rng.between(2, 3));
    labels.assign(2, Label(pool[0]));
    if (k == 3) labels.push_back(rng.below(2) == 0 ? Label(pool[0]) : Label(pool[1]));
  } else {
    const auto k = static_cast<std::size_t>(rng.between(1, 3));
    for (std::size_t i = 0; i < k; ++i) labels.emplace_back(pool[i]);
  }
  rng.shuffle(labels.begin(), labels.end());
  return labels;
}

}  // namespace detail

inline SyntheticMixture generate_mixture(const DatasetSpec& spec, std::size_t index) {
  if (spec.vocabulary.size() < 4) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary needs at least 4 labels");
  }
  Rng rng(spec.seed, 1'000'000 + index);
  SyntheticMixture mix;
  char id[32];
  std::snprintf(id, sizeof id, "mix%05zu", index);
  mix.id = id;
  const bool duplicated = rng.uniform() < spec.dup_fraction;

  SceneSpec scene_spec;
  scene_spec.seed = Rng::splitmix64(spec.seed) ^ (index * 0x9e3779b97f4a7c15ULL);
  scene_spec.duration_s = spec.duration_s;
  scene_spec.sample_rate_hz = spec.sample_rate_hz;
  scene_spec.labels = detail::draw_labels(rng, duplicated, spec.vocabulary);
  scene_spec.n_interference = static_cast<std::size_t>(rng.between(0, 2));
  if (spec.fixed_labels) {
    scene_spec.labels.clear();
    for (const auto& name : *spec.fixed_labels) scene_spec.labels.emplace_back(name);
  }
  if (spec.fixed_interference) scene_spec.n_interference = *spec.fixed_interference;
  scene_spec.target_snr_db_range = spec.target_snr_db_range;
  scene_spec.interference_snr_db_range = spec.interference_snr_db_range;
  scene_spec.include_noise = spec.include_noise;
  scene_spec.float32_exact = spec.float32_exact;
  mix.scene = generate_scene(scene_spec);
  mix.subset = labels_distinct(mix.scene.references) ? kNoDupSubset : kDupSubset;

  const auto& refs = mix.scene.references;
  std::vector<std::size_t> kept(refs.size());
  for (std::size_t k = 0; k < kept.size(); ++k) kept[k] = k;
  if (refs.size() > 0 && rng.uniform() < spec.fn_rate) {
    kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(rng.below(kept.size())));
  }
  while (kept.size() > spec.max_estimates) kept.pop_back();

  std::vector<LabeledSource> ests;
  double total = 0.0;
  for (std::size_t k : kept) {
    const double target =
        rng.uniform(spec.sdri_target_range.first, spec.sdri_target_range.second);
    const double mixture_sdr = sdr(mix.scene.mixture_ref, refs[k].waveform);
    ests.push_back({refs[k].label,
                    make_estimate_with_sdr(refs[k].waveform, target + mixture_sdr,
                                           rng.next_u64(), {}, spec.float32_exact)});
    mix.sdri_targets.push_back(target);
    total += target;
  }
  if (ests.size() < spec.max_estimates && rng.uniform() < spec.fp_rate) {
    std::vector<std::string> absent;
    for (const auto& v : spec.vocabulary) {
      bool used = false;
      for (const auto& r : refs) used = used || r.label.str() == v;
      if (!used) absent.push_back(v);
    }
    const std::string label = absent[rng.below(absent.size())];
    // A scaled copy of the mixture: plausible output for a wrong query.
    std::vector<double> x(mix.scene.mixture_ref.samples().begin(),
                          mix.scene.mixture_ref.samples().end());
    const double gain = rng.uniform(0.1, 0.5);
    for (double& v : x) v = spec.float32_exact ? detail::round_to_float(v * gain) : v * gain;
    ests.push_back({Label(label), Waveform(std::move(x), spec.sample_rate_hz)});
    mix.n_false_positive = 1;
  }
  rng.shuffle(ests.begin(), ests.end());
  mix.estimates = LabeledSources(std::move(ests));
  mix.expected_db = total / static_cast<double>(refs.size() + mix.n_false_positive);
  return mix;
}

// Writes every mixture as float WAV files under `dir` plus `dir/manifest.json`.
inline Manifest write_dataset(const DatasetSpec& spec, const std::filesystem::path& dir,
                              SampleFormat format = SampleFormat::kFloat32) {
  std::filesystem::create_directories(dir);
  Manifest manifest;
  manifest.base_dir = dir;
  manifest.vocabulary = spec.vocabulary;
  for (std::size_t i = 0; i < spec.n_mixtures; ++i) {
    const SyntheticMixture mix = generate_mixture(spec, i);
    const std::filesystem::path rel = mix.id;
    std::filesystem::create_directories(dir / rel);
    MixtureEntry entry;
    entry.id = mix.id;
    entry.subset_tag = mix.subset;
    entry.expected_db = mix.expected_db;
    entry.mixture_path = rel / "mixture.wav";
    write_wav(dir / entry.mixture_path, mix.scene.mixture_ref, format);
    for (std::size_t k = 0; k < mix.scene.references.size(); ++k) {
      const auto& s = mix.scene.references[k];
      const auto path = rel / ("ref" + std::to_string(k) + "_" + s.label.str() + ".wav");
      write_wav(dir / path, s.waveform, format);
      entry.references.push_back({s.label.str(), path});
    }
    for (std::size_t k = 0; k < mix.estimates.size(); ++k) {
      const auto& s = mix.estimates[k];
      const auto path = rel / ("est" + std::to_string(k) + "_" + s.label.str() + ".wav");
      write_wav(dir / path, s.waveform, format);
      entry.estimates.push_back({s.label.str(), path});
    }
    manifest.entries.push_back(std::move(entry));
  }
  save_manifest(dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace capisdr

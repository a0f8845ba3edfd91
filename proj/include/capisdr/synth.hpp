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

// Deterministic single-channel scene generator for metric validation.
//
// Sources are band-limited noise bursts, each in its own spectral band, mixed
// without spatialization: targets scaled to a drawn SNR against the summed
// non-target content (interferers plus background noise), interferers scaled
// against the background noise level.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "capisdr/error.hpp"
#include "capisdr/grouping.hpp"
#include "capisdr/rng.hpp"
#include "capisdr/signal.hpp"

namespace capisdr {

struct SceneSpec {
  std::uint64_t seed = 0;
  double duration_s = 10.0;
  int sample_rate_hz = 32000;
  std::vector<Label> labels;  // one per target, duplicates allowed
  std::pair<double, double> target_snr_db_range{5.0, 20.0};
  std::size_t n_interference = 0;
  std::pair<double, double> interference_snr_db_range{0.0, 15.0};
  bool include_noise = true;
  double noise_floor_db = -30.0;  // background RMS level, dB re full scale
  // Round every generated component to float32 so it survives a float WAV
  // round trip unchanged.
  bool float32_exact = false;

  std::size_t k_targets() const noexcept { return labels.size(); }

  void validate() const {
    if (labels.empty() || labels.size() > kMaxTargets) {
      throw Error(ErrorCode::kInvalidArgument,
                  "scene needs between 1 and " + std::to_string(kMaxTargets) + " targets");
    }
    if (n_interference > 2) {
      throw Error(ErrorCode::kInvalidArgument, "at most 2 interference sources");
    }
    if (!(duration_s > 0.0) || sample_rate_hz <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "duration and sample rate must be positive");
    }
    if (target_snr_db_range.first > target_snr_db_range.second ||
        interference_snr_db_range.first > interference_snr_db_range.second) {
      throw Error(ErrorCode::kInvalidArgument, "SNR range is not ordered");
    }
    if (!std::isfinite(noise_floor_db)) {
      throw Error(ErrorCode::kInvalidArgument, "noise floor must be finite");
    }
  }

  std::size_t num_samples() const {
    return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  }
};

struct Scene {
  Waveform mixture_ref;
  LabeledSources references;
  std::vector<Waveform> interferers;
  std::optional<Waveform> noise;
  std::vector<double> target_snr_db;
  std::vector<double> interference_snr_db;
};

namespace detail {

inline double round_to_float(double x) { return static_cast<double>(static_cast<float>(x)); }

// RBJ constant-peak-gain band-pass biquad applied to white Gaussian noise.
inline std::vector<double> bandpass_noise(Rng& rng, std::size_t n, double fs, double center_hz,
                                          double q) {
  const double w0 = 2.0 * std::numbers::pi * center_hz / fs;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  const double b0 = alpha / a0, b2 = -alpha / a0;
  const double a1 = -2.0 * std::cos(w0) / a0, a2 = (1.0 - alpha) / a0;
  std::vector<double> out(n);
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.gaussian();
    const double y = b0 * x + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    out[i] = y;
  }
  return out;
}

// One active burst covering at least 60 % of the signal, raised-cosine edges.
inline void apply_burst_envelope(Rng& rng, std::vector<double>& x, double fs) {
  const std::size_t n = x.size();
  const auto active = static_cast<std::size_t>(std::ceil(n * rng.uniform(0.6, 1.0)));
  const std::size_t onset = active >= n ? 0 : static_cast<std::size_t>(rng.below(n - active + 1));
  const std::size_t ramp =
      std::min<std::size_t>(static_cast<std::size_t>(0.02 * fs), active / 4);
  for (std::size_t i = 0; i < n; ++i) {
    double g = 0.0;
    if (i >= onset && i < onset + active) {
      const std::size_t t = i - onset;
      const std::size_t from_end = onset + active - 1 - i;
      const std::size_t edge = std::min(t, from_end);
      g = edge >= ramp ? 1.0
                       : 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(edge) /
                                              static_cast<double>(ramp));
    }
    x[i] *= g;
  }
}

// Source i gets a log-spaced band between 150 Hz and 0.4 fs; the centre is
// jittered inside the middle half of its slot so neighbouring bands overlap
// only in their skirts.
inline double band_center(Rng& rng, std::size_t slot, std::size_t n_slots, double fs) {
  const double lo = std::log(150.0), hi = std::log(0.4 * fs);
  const double width = (hi - lo) / static_cast<double>(n_slots);
  const double pos = lo + width * (static_cast<double>(slot) + rng.uniform(0.25, 0.75));
  return std::exp(pos);
}

inline void scale_to_energy(std::vector<double>& x, double target_energy) {
  const double e = energy(x);
  const double g = std::sqrt(target_energy / e);
  for (double& v : x) v *= g;
}

}  // namespace detail

// Builds one scene. Identical specs produce bit-identical scenes.
inline Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  const std::size_t n = spec.num_samples();
  const double fs = spec.sample_rate_hz;
  const std::size_t n_sources = spec.k_targets() + spec.n_interference;
  auto quantize = [&](std::vector<double>& x) {
    if (spec.float32_exact)
      for (double& v : x) v = detail::round_to_float(v);
  };

  Rng draws(spec.seed, 0);
  std::vector<std::size_t> slots(n_sources);
  for (std::size_t i = 0; i < n_sources; ++i) slots[i] = i;
  draws.shuffle(slots.begin(), slots.end());

  auto make_source = [&](std::size_t index) {
    Rng rng(spec.seed, 100 + index);
    const double center = detail::band_center(rng, slots[index], n_sources, fs);
    auto x = detail::bandpass_noise(rng, n, fs, center, 2.0);
    detail::apply_burst_envelope(rng, x, fs);
    return x;
  };

  Scene scene;
  const double nominal_energy = static_cast<double>(n) * std::pow(10.0, spec.noise_floor_db / 10.0);
  double level_energy = nominal_energy;
  std::vector<double> background(n, 0.0);
  if (spec.include_noise) {
    Rng rng(spec.seed, 1);
    std::vector<double> noise(n);
    for (double& v : noise) v = rng.gaussian();
    detail::scale_to_energy(noise, nominal_energy);
    quantize(noise);
    level_energy = energy(noise);
    for (std::size_t i = 0; i < n; ++i) background[i] += noise[i];
    scene.noise = Waveform(std::move(noise), spec.sample_rate_hz);
  }
  for (std::size_t j = 0; j < spec.n_interference; ++j) {
    const double snr = draws.uniform(spec.interference_snr_db_range.first,
                                     spec.interference_snr_db_range.second);
    auto x = make_source(spec.k_targets() + j);
    detail::scale_to_energy(x, level_energy * std::pow(10.0, snr / 10.0));
    quantize(x);
    for (std::size_t i = 0; i < n; ++i) background[i] += x[i];
    scene.interference_snr_db.push_back(snr);
    scene.interferers.emplace_back(std::move(x), spec.sample_rate_hz);
  }
  const double background_energy = energy(background);
  const double target_level = background_energy > 0.0 ? background_energy : nominal_energy;

  std::vector<std::vector<double>> targets;
  for (std::size_t k = 0; k < spec.k_targets(); ++k) {
    const double snr =
        draws.uniform(spec.target_snr_db_range.first, spec.target_snr_db_range.second);
    auto x = make_source(k);
    detail::scale_to_energy(x, target_level * std::pow(10.0, snr / 10.0));
    quantize(x);
    scene.target_snr_db.push_back(snr);
    targets.push_back(std::move(x));
  }

  // references, then interferers, then noise
  std::vector<double> mix(n, 0.0);
  for (const auto& t : targets)
    for (std::size_t i = 0; i < n; ++i) mix[i] += t[i];
  for (const auto& w : scene.interferers)
    for (std::size_t i = 0; i < n; ++i) mix[i] += w[i];
  if (scene.noise)
    for (std::size_t i = 0; i < n; ++i) mix[i] += (*scene.noise)[i];
  quantize(mix);

  for (std::size_t k = 0; k < targets.size(); ++k) {
    scene.references.push_back({spec.labels[k], Waveform(std::move(targets[k]), spec.sample_rate_hz)});
  }
  scene.mixture_ref = Waveform(std::move(mix), spec.sample_rate_hz);
  return scene;
}

// SNR of target k against the summed interferers and noise of the scene.
inline double measured_target_snr_db(const Scene& scene, std::size_t k) {
  const std::size_t n = scene.mixture_ref.size();
  std::vector<double> background(n, 0.0);
  for (const auto& w : scene.interferers)
    for (std::size_t i = 0; i < n; ++i) background[i] += w[i];
  if (scene.noise)
    for (std::size_t i = 0; i < n; ++i) background[i] += (*scene.noise)[i];
  return 10.0 * std::log10(energy(scene.references[k].waveform) / energy(background));
}

// Returns ref + beta * noise with beta chosen so that sdr(result, ref) equals
// target_sdr_db. With float32_exact the result is float-representable and
// the residual error is within float rounding.
inline Waveform make_estimate_with_sdr(const Waveform& ref, double target_sdr_db,
                                       std::uint64_t seed, const NumericGuards& guards = {},
                                       bool float32_exact = false) {
  const double ref_energy = energy(ref);
  if (!(ref_energy > guards.energy_floor)) {
    throw Error(ErrorCode::kSilentReference, "reference energy is below the numeric floor");
  }
  if (!std::isfinite(target_sdr_db) || !(target_sdr_db < guards.sdr_cap_db)) {
    throw Error(ErrorCode::kInvalidArgument, "target SDR must be finite and below the cap");
  }
  Rng rng(seed, 7);
  const auto s = ref.samples();
  std::vector<double> noise(s.size());
  for (double& v : noise) v = rng.gaussian();
  double beta = std::sqrt(ref_energy / (energy(noise) * std::pow(10.0, target_sdr_db / 10.0)));

  std::vector<double> est(s.size());
  auto build = [&] {
    for (std::size_t i = 0; i < s.size(); ++i) {
      est[i] = s[i] + beta * noise[i];
      if (float32_exact) est[i] = detail::round_to_float(est[i]);
    }
  };
  // Rescale beta from the measured error energy to absorb rounding in the sum.
  for (int iter = 0; iter < (float32_exact ? 6 : 2); ++iter) {
    build();
    double err = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) err += (s[i] - est[i]) * (s[i] - est[i]);
    const double measured = 10.0 * std::log10(ref_energy / err);
    beta *= std::pow(10.0, (measured - target_sdr_db) / 20.0);
  }
  build();
  return Waveform(std::move(est), ref.sample_rate_hz());
}

}  // namespace capisdr

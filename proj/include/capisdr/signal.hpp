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

// Waveforms and the scalar SDR / SDRi primitives.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "capisdr/error.hpp"

namespace capisdr {

// A finite single-channel sampled signal.
class Waveform {
 public:
  Waveform() = default;

  Waveform(std::vector<double> samples, int sample_rate_hz)
      : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    if (samples_.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "waveform has no samples");
    }
    if (sample_rate_hz_ <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
    }
    for (double x : samples_) {
      if (!std::isfinite(x)) {
        throw Error(ErrorCode::kInvalidArgument, "waveform sample is not finite");
      }
    }
  }

  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  int sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }

  friend bool operator==(const Waveform&, const Waveform&) = default;

 private:
  std::vector<double> samples_;
  int sample_rate_hz_ = 0;
};

// Bounds that keep SDR finite when the error energy vanishes.
struct NumericGuards {
  double sdr_cap_db = 60.0;
  // Relative to the reference energy for the error term, absolute for the
  // silent-reference test.
  double energy_floor = 1e-12;

  void validate() const {
    if (!(sdr_cap_db > 0.0) || !std::isfinite(sdr_cap_db)) {
      throw Error(ErrorCode::kInvalidArgument, "sdr_cap_db must be positive");
    }
    if (!(energy_floor > 0.0) || !std::isfinite(energy_floor)) {
      throw Error(ErrorCode::kInvalidArgument, "energy_floor must be positive");
    }
  }
};

inline double energy(std::span<const double> x) noexcept {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

inline double energy(const Waveform& w) noexcept { return energy(w.samples()); }

inline void check_compatible(const Waveform& a, const Waveform& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "waveform lengths differ (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
  }
  if (a.sample_rate_hz() != b.sample_rate_hz()) {
    throw Error(ErrorCode::kSampleRateMismatch,
                "sample rates differ (" + std::to_string(a.sample_rate_hz()) +
                    " vs " + std::to_string(b.sample_rate_hz()) + ")");
  }
}

// Energy of (ref - est), accumulated without materializing the difference.
inline double error_energy(const Waveform& est, const Waveform& ref) {
  check_compatible(est, ref);
  auto e = est.samples();
  auto r = ref.samples();
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = r[i] - e[i];
    acc += d * d;
  }
  return acc;
}

// 10 log10(|ref|^2 / |ref - est|^2), capped at guards.sdr_cap_db.
inline double sdr(const Waveform& est, const Waveform& ref,
                  const NumericGuards& guards = {}) {
  const double err = error_energy(est, ref);
  const double ref_energy = energy(ref);
  if (!(ref_energy > guards.energy_floor)) {
    throw Error(ErrorCode::kSilentReference,
                "reference energy is below the numeric floor");
  }
  const double denom = std::max(err, guards.energy_floor * ref_energy);
  const double value = 10.0 * std::log10(ref_energy / denom);
  return std::min(value, guards.sdr_cap_db);
}

// SDR improvement of `est` over the unprocessed mixture channel.
inline double sdri(const Waveform& est, const Waveform& ref,
                   const Waveform& mixture_ref_channel,
                   const NumericGuards& guards = {}) {
  check_compatible(mixture_ref_channel, ref);
  return sdr(est, ref, guards) - sdr(mixture_ref_channel, ref, guards);
}

}  // namespace capisdr

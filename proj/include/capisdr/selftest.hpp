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

// Randomized consistency suites shared by the `selftest` command and the
// acceptance tests: fast assignment vs enumeration, CA-PI-SDRi vs CA-SDRi on
// distinct-label mixtures, and the ordering of the three losses.

#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "capisdr/assignment.hpp"
#include "capisdr/dataset.hpp"
#include "capisdr/evaluate.hpp"
#include "capisdr/grouping.hpp"
#include "capisdr/losses.hpp"
#include "capisdr/metrics.hpp"
#include "capisdr/rng.hpp"

namespace capisdr {

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;
  double seconds = 0.0;

  bool passed() const noexcept { return cases > 0 && failures == 0; }

  void fail(const std::string& why) {
    if (failures++ == 0) first_failure = why;
  }
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// Random matrix with rows, cols in [0, 7] and min(rows, cols) <= max_min_dim.
// Every third matrix is integer valued in a narrow range so that exact ties
// exercise the tie-break.
inline ScoreMatrix random_score_matrix(Rng& rng, std::size_t max_min_dim = 5) {
  std::size_t rows, cols;
  do {
    rows = rng.below(8);
    cols = rng.below(8);
  } while (std::min(rows, cols) > max_min_dim);
  const bool integral = rng.below(3) == 0;
  ScoreMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = integral ? static_cast<double>(rng.between(-2, 2)) : rng.uniform(-30.0, 60.0);
  return m;
}

inline std::string describe(const Assignment& a) {
  std::ostringstream os;
  os << "{";
  for (const auto& [r, c] : a.pairs) os << "(" << r << "," << c << ")";
  os << "} objective=" << format_double(a.objective);
  return os.str();
}

inline SuiteResult check_assignment_oracle(std::size_t count, std::uint64_t seed) {
  detail::Stopwatch clock;
  SuiteResult res;
  res.name = "assignment matches enumeration oracle";
  Rng rng(seed, 2);
  for (std::size_t i = 0; i < count; ++i) {
    const ScoreMatrix m = random_score_matrix(rng);
    const Assignment fast = solve_max_assignment(m);
    const Assignment slow = solve_max_assignment_bruteforce(m);
    ++res.cases;
    if (fast.objective != slow.objective || fast.pairs != slow.pairs) {
      res.fail("case " + std::to_string(i) + " (" + std::to_string(m.rows()) + "x" +
               std::to_string(m.cols()) + "): fast " + describe(fast) + " vs oracle " +
               describe(slow));
    }
  }
  res.seconds = clock.seconds();
  return res;
}

// Short synthetic mixtures with distinct labels and random FN/FP injections,
// evaluated with random penalties.
inline SuiteResult check_reduction_equivalence(std::size_t count, std::uint64_t seed) {
  detail::Stopwatch clock;
  SuiteResult res;
  res.name = "CA-PI-SDRi reduces to CA-SDRi on distinct labels";
  DatasetSpec spec;
  spec.seed = seed;
  spec.duration_s = 0.05;
  spec.sample_rate_hz = 16000;
  spec.dup_fraction = 0.0;
  spec.fn_rate = 0.3;
  spec.fp_rate = 0.3;
  spec.float32_exact = false;
  Rng rng(seed, 3);
  for (std::size_t i = 0; i < count; ++i) {
    const SyntheticMixture mix = generate_mixture(spec, i);
    MetricConfig cfg;
    if (i % 2 == 1) {
      cfg.penalty_fn = rng.uniform(-10.0, 10.0);
      cfg.penalty_fp = rng.uniform(-10.0, 10.0);
    }
    const double pi = ca_pi_sdri(mix.scene.references, mix.estimates, mix.scene.mixture_ref, cfg)
                          .metric_db;
    const double base =
        ca_sdri_baseline(mix.scene.references, mix.estimates, mix.scene.mixture_ref, cfg);
    ++res.cases;
    if (pi != base) {
      res.fail(mix.id + ": CA-PI-SDRi " + format_double(pi) + " vs CA-SDRi " +
               format_double(base));
    }
  }
  res.seconds = clock.seconds();
  return res;
}

// K references over a 3-letter alphabet (duplicates likely) and estimates
// built from a random, not necessarily label-consistent, rearrangement of the
// references plus noise, listed in shuffled label order.
inline std::pair<LabeledSources, LabeledSources> random_loss_instance(Rng& rng,
                                                                      std::size_t max_k = 4,
                                                                      std::size_t n = 256) {
  static const char* kAlphabet[] = {"a", "b", "c"};
  const std::size_t k = 1 + rng.below(max_k);
  std::vector<Label> labels;
  for (std::size_t i = 0; i < k; ++i) labels.emplace_back(kAlphabet[rng.below(3)]);
  LabeledSources refs;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.gaussian();
    refs.push_back({labels[i], Waveform(std::move(x), 16000)});
  }
  std::vector<std::size_t> source(k), est_order(k);
  for (std::size_t i = 0; i < k; ++i) source[i] = est_order[i] = i;
  rng.shuffle(source.begin(), source.end());
  rng.shuffle(est_order.begin(), est_order.end());
  LabeledSources ests;
  for (std::size_t i = 0; i < k; ++i) {
    const auto ref = refs[source[i]].waveform.samples();
    const double gain = rng.uniform(0.5, 1.5), noise = rng.uniform(0.05, 1.5);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = gain * ref[t] + noise * rng.gaussian();
    ests.push_back({labels[est_order[i]], Waveform(std::move(x), 16000)});
  }
  return {std::move(refs), std::move(ests)};
}

inline SuiteResult check_loss_ordering(std::size_t count, std::size_t seeds_per_case,
                                       std::uint64_t seed) {
  detail::Stopwatch clock;
  SuiteResult res;
  res.name = "loss ordering PI <= CA-PI <= CA and CA-PI equals enumeration minimum";
  Rng rng(seed, 4);
  for (std::size_t i = 0; i < count; ++i) {
    const auto [refs, ests] = random_loss_instance(rng);
    const LossResult pi = pi_sdr_loss(ests, refs);
    const LossResult capi = ca_pi_sdr_loss(ests, refs);
    ++res.cases;
    const std::string tag = "case " + std::to_string(i) + ": ";
    if (!(pi.loss_value <= capi.loss_value)) {
      res.fail(tag + "PI " + format_double(pi.loss_value) + " > CA-PI " +
               format_double(capi.loss_value));
    }
    for (std::size_t s = 0; s < seeds_per_case; ++s) {
      const LossResult ca = ca_sdr_loss(ests, refs, rng.next_u64());
      if (!(capi.loss_value <= ca.loss_value)) {
        res.fail(tag + "CA-PI " + format_double(capi.loss_value) + " > CA " +
                 format_double(ca.loss_value));
      }
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& mapping : enumerate_label_preserving_mappings(ests, refs)) {
      best = std::min(best, loss_at_permutation(ests, refs, mapping).loss_value);
    }
    if (capi.loss_value != best) {
      res.fail(tag + "CA-PI " + format_double(capi.loss_value) + " != enumeration " +
               format_double(best));
    }
  }
  res.seconds = clock.seconds();
  return res;
}

}  // namespace capisdr

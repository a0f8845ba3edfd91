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

// Class-aware permutation-invariant SDRi (CA-PI-SDRi) and its companions:
// the label-matched CA-SDRi it reduces to, and the label-blind PI-SDRi.

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "capisdr/assignment.hpp"
#include "capisdr/error.hpp"
#include "capisdr/grouping.hpp"
#include "capisdr/signal.hpp"

namespace capisdr {

enum class PredictionKind { kFalseNegative, kFalsePositive };

// Optional per-source penalty override. Receives the unmatched waveform and
// the configured flat penalty; returns the penalty to charge for it.
using PenaltyHook =
    std::function<double(PredictionKind, const Waveform& unmatched, double flat_penalty)>;

struct MetricConfig {
  double penalty_fn = 0.0;
  double penalty_fp = 0.0;
  NumericGuards guards;
  PenaltyHook penalty_hook;  // empty: flat penalties

  void validate() const {
    if (!std::isfinite(penalty_fn) || !std::isfinite(penalty_fp)) {
      throw Error(ErrorCode::kInvalidArgument, "penalties must be finite");
    }
    guards.validate();
  }
};

struct ClassComponent {
  Label label;
  double p_value = 0.0;  // summed dB over this class's predictions
  PredictionCounts counts;
  Assignment assignment;                   // indices local to the class group
  std::vector<IndexPair> matched;          // (estimate, reference) in input indices
  std::vector<std::size_t> unmatched_refs; // false negatives, input indices
  std::vector<std::size_t> unmatched_ests; // false positives, input indices
};

struct MixtureEvaluation {
  std::vector<ClassComponent> components;  // lexicographic by label
  double p_sum = 0.0;
  std::size_t total_n = 0;
  double metric_db = 0.0;
};

// SDRi of every (estimate, reference) pair in the group. SDR(y, s) is
// computed once per reference.
inline ScoreMatrix class_score_matrix(const ClassGroup& group, const Waveform& mixture_ref,
                                      const NumericGuards& guards) {
  ScoreMatrix m(group.ests.size(), group.refs.size());
  for (std::size_t c = 0; c < group.refs.size(); ++c) {
    const Waveform& ref = *group.refs[c];
    check_compatible(mixture_ref, ref);
    const double mixture_sdr = sdr(mixture_ref, ref, guards);
    for (std::size_t r = 0; r < group.ests.size(); ++r) {
      m(r, c) = sdr(*group.ests[r], ref, guards) - mixture_sdr;
    }
  }
  return m;
}

inline ClassComponent class_component(const ClassGroup& group, const Waveform& mixture_ref,
                                      const MetricConfig& cfg) {
  ClassComponent out;
  out.label = group.label;
  out.counts = count_predictions(group);
  const ScoreMatrix m = class_score_matrix(group, mixture_ref, cfg.guards);
  out.assignment = solve_max_assignment(m);

  std::vector<bool> ref_hit(group.refs.size(), false), est_hit(group.ests.size(), false);
  for (const auto& [r, c] : out.assignment.pairs) {
    est_hit[r] = true;
    ref_hit[c] = true;
    out.matched.emplace_back(group.est_indices[r], group.ref_indices[c]);
  }
  for (std::size_t c = 0; c < ref_hit.size(); ++c)
    if (!ref_hit[c]) out.unmatched_refs.push_back(group.ref_indices[c]);
  for (std::size_t r = 0; r < est_hit.size(); ++r)
    if (!est_hit[r]) out.unmatched_ests.push_back(group.est_indices[r]);

  if (cfg.penalty_hook) {
    // Summed in value order so that reordering same-class sources is exact.
    std::vector<double> terms;
    for (std::size_t c = 0; c < ref_hit.size(); ++c)
      if (!ref_hit[c])
        terms.push_back(cfg.penalty_hook(PredictionKind::kFalseNegative, *group.refs[c], cfg.penalty_fn));
    for (std::size_t r = 0; r < est_hit.size(); ++r)
      if (!est_hit[r])
        terms.push_back(cfg.penalty_hook(PredictionKind::kFalsePositive, *group.ests[r], cfg.penalty_fp));
    std::sort(terms.begin(), terms.end());
    double penalties = 0.0;
    for (double t : terms) penalties += t;
    out.p_value = penalties + out.assignment.objective;
  } else {
    out.p_value = static_cast<double>(out.counts.n_fn) * cfg.penalty_fn +
                  static_cast<double>(out.counts.n_fp) * cfg.penalty_fp +
                  out.assignment.objective;
  }
  return out;
}

// Mixture-level CA-PI-SDRi: summed class components over the total number of
// true and false predictions.
inline MixtureEvaluation ca_pi_sdri(const LabeledSources& refs, const LabeledSources& ests,
                                    const Waveform& mixture_ref, const MetricConfig& cfg = {}) {
  cfg.validate();
  if (refs.empty()) {
    throw Error(ErrorCode::kEmptyReference, "mixture has no reference sources");
  }
  check_compatible(mixture_ref, refs[0].waveform);
  if (!ests.empty()) check_compatible(mixture_ref, ests[0].waveform);

  MixtureEvaluation eval;
  for (const auto& group : group_by_label(refs, ests)) {
    ClassComponent comp = class_component(group, mixture_ref, cfg);
    eval.p_sum += comp.p_value;
    eval.total_n += comp.counts.n_total;
    eval.components.push_back(std::move(comp));
  }
  eval.metric_db = eval.p_sum / static_cast<double>(eval.total_n);
  return eval;
}

// Label-matched CA-SDRi. Defined only when labels are unique on each side.
inline double ca_sdri_baseline(const LabeledSources& refs, const LabeledSources& ests,
                               const Waveform& mixture_ref, const MetricConfig& cfg = {}) {
  cfg.validate();
  if (refs.empty()) {
    throw Error(ErrorCode::kEmptyReference, "mixture has no reference sources");
  }
  if (!labels_distinct(refs) || !labels_distinct(ests)) {
    throw Error(ErrorCode::kDuplicateLabels, "CA-SDRi requires mutually exclusive labels");
  }
  std::map<Label, std::pair<const Waveform*, const Waveform*>> by_label;
  for (const auto& s : refs) by_label[s.label].first = &s.waveform;
  for (const auto& s : ests) by_label[s.label].second = &s.waveform;

  auto penalty = [&](PredictionKind kind, const Waveform& w) {
    const double flat = kind == PredictionKind::kFalseNegative ? cfg.penalty_fn : cfg.penalty_fp;
    return cfg.penalty_hook ? cfg.penalty_hook(kind, w, flat) : flat;
  };
  double total = 0.0;
  for (const auto& [label, pair] : by_label) {
    const auto [ref, est] = pair;
    if (ref != nullptr && est != nullptr) {
      total += sdri(*est, *ref, mixture_ref, cfg.guards);
    } else if (ref != nullptr) {
      total += penalty(PredictionKind::kFalseNegative, *ref);
    } else {
      total += penalty(PredictionKind::kFalsePositive, *est);
    }
  }
  return total / static_cast<double>(by_label.size());
}

struct PiSdriResult {
  double metric_db = 0.0;
  Assignment assignment;  // (estimate, reference)
};

// Label-blind permutation-invariant SDRi over equally many estimates and
// references.
inline PiSdriResult pi_sdri_detail(const LabeledSources& refs, const LabeledSources& ests,
                                   const Waveform& mixture_ref, const MetricConfig& cfg = {}) {
  cfg.validate();
  if (refs.empty()) {
    throw Error(ErrorCode::kEmptyReference, "mixture has no reference sources");
  }
  if (refs.size() != ests.size()) {
    throw Error(ErrorCode::kCountMismatch,
                "PI-SDRi needs as many estimates as references (" +
                    std::to_string(ests.size()) + " vs " + std::to_string(refs.size()) + ")");
  }
  ClassGroup all;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    all.refs.push_back(&refs[i].waveform);
    all.ref_indices.push_back(i);
    all.ests.push_back(&ests[i].waveform);
    all.est_indices.push_back(i);
  }
  PiSdriResult out;
  out.assignment = solve_max_assignment(class_score_matrix(all, mixture_ref, cfg.guards));
  out.metric_db = out.assignment.objective / static_cast<double>(refs.size());
  return out;
}

inline double pi_sdri(const LabeledSources& refs, const LabeledSources& ests,
                      const Waveform& mixture_ref, const MetricConfig& cfg = {}) {
  return pi_sdri_detail(refs, ests, mixture_ref, cfg).metric_db;
}

}  // namespace capisdr

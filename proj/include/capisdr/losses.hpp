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

// Value-level SDR training losses: the class-aware permutation-invariant
// loss, the class-aware loss with a fixed or random within-class mapping, and
// the label-blind permutation-invariant loss. Each returns the loss together
// with the estimate-to-reference mapping that produced it.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "capisdr/assignment.hpp"
#include "capisdr/error.hpp"
#include "capisdr/grouping.hpp"
#include "capisdr/rng.hpp"
#include "capisdr/signal.hpp"

namespace capisdr {

struct LossResult {
  double loss_value = 0.0;
  // chosen_permutation[k] is the estimate index paired with reference k.
  Permutation chosen_permutation;
  std::vector<double> per_pair_sdr;  // indexed by reference
};

namespace detail {

inline void check_loss_sizes(const LabeledSources& ests, const LabeledSources& refs) {
  if (refs.empty()) {
    throw Error(ErrorCode::kEmptyReference, "loss needs at least one reference");
  }
  if (ests.size() != refs.size()) {
    throw Error(ErrorCode::kCountMismatch,
                "loss needs as many estimates as references (" + std::to_string(ests.size()) +
                    " vs " + std::to_string(refs.size()) + ")");
  }
  check_compatible(ests[0].waveform, refs[0].waveform);
}

inline void check_label_multisets(const LabeledSources& ests, const LabeledSources& refs) {
  auto a = ests.labels();
  auto b = refs.labels();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) {
    throw Error(ErrorCode::kLabelMultisetMismatch,
                "estimate labels are not a rearrangement of reference labels");
  }
}

}  // namespace detail

// Pairs the j-th reference of each class with the j-th estimate of the same
// class. Equals the identity when both sides list labels in the same order.
inline Permutation order_as_given_mapping(const LabeledSources& ests,
                                          const LabeledSources& refs) {
  detail::check_label_multisets(ests, refs);
  std::map<Label, std::vector<std::size_t>> est_slots;
  for (std::size_t i = 0; i < ests.size(); ++i) est_slots[ests[i].label].push_back(i);
  std::map<Label, std::size_t> taken;
  Permutation mapping(refs.size());
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const Label& label = refs[k].label;
    mapping[k] = est_slots[label][taken[label]++];
  }
  return mapping;
}

// Loss of one explicit mapping: -(1/K) * sum_k SDR(est[mapping[k]], ref[k]).
inline LossResult loss_at_permutation(const LabeledSources& ests, const LabeledSources& refs,
                                      const Permutation& mapping,
                                      const NumericGuards& guards = {}) {
  detail::check_loss_sizes(ests, refs);
  if (mapping.size() != refs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "mapping size differs from reference count");
  }
  std::vector<bool> seen(refs.size(), false);
  for (std::size_t idx : mapping) {
    if (idx >= refs.size() || seen[idx]) {
      throw Error(ErrorCode::kInvalidArgument, "mapping is not a permutation");
    }
    seen[idx] = true;
  }
  LossResult out;
  out.chosen_permutation = mapping;
  out.per_pair_sdr.resize(refs.size());
  double total = 0.0;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    out.per_pair_sdr[k] = sdr(ests[mapping[k]].waveform, refs[k].waveform, guards);
    total += out.per_pair_sdr[k];
  }
  out.loss_value = -(total / static_cast<double>(refs.size()));
  return out;
}

// Every label-preserving mapping, as the order-as-given mapping composed with
// each within-class permutation of the reference positions.
inline std::vector<Permutation> enumerate_label_preserving_mappings(
    const LabeledSources& ests, const LabeledSources& refs,
    std::uint64_t limit = kDefaultEnumerationLimit) {
  const Permutation base = order_as_given_mapping(ests, refs);
  std::vector<Permutation> out;
  for (const auto& pi : enumerate_class_permutations(refs.labels(), limit)) {
    Permutation mapping(pi.size());
    for (std::size_t k = 0; k < pi.size(); ++k) mapping[k] = base[pi[k]];
    out.push_back(std::move(mapping));
  }
  return out;
}

// Minimum over label-preserving mappings. The search factorizes into one
// square assignment per class because the objective is a sum over references
// and admissible mappings never cross classes.
inline LossResult ca_pi_sdr_loss(const LabeledSources& ests, const LabeledSources& refs,
                                 const NumericGuards& guards = {}) {
  detail::check_loss_sizes(ests, refs);
  detail::check_label_multisets(ests, refs);
  Permutation mapping(refs.size());
  for (const auto& group : group_by_label(refs, ests)) {
    ScoreMatrix m(group.ests.size(), group.refs.size());
    for (std::size_t r = 0; r < group.ests.size(); ++r)
      for (std::size_t c = 0; c < group.refs.size(); ++c)
        m(r, c) = sdr(*group.ests[r], *group.refs[c], guards);
    for (const auto& [r, c] : solve_max_assignment(m).pairs) {
      mapping[group.ref_indices[c]] = group.est_indices[r];
    }
  }
  return loss_at_permutation(ests, refs, mapping, guards);
}

// Class-aware loss at a single mapping: order-as-given without a seed, or a
// seeded uniform draw from the label-preserving mappings.
inline LossResult ca_sdr_loss(const LabeledSources& ests, const LabeledSources& refs,
                              std::optional<std::uint64_t> mapping_seed,
                              const NumericGuards& guards = {}) {
  detail::check_loss_sizes(ests, refs);
  const Permutation base = order_as_given_mapping(ests, refs);
  Permutation pi(refs.size());
  for (std::size_t k = 0; k < pi.size(); ++k) pi[k] = k;
  if (mapping_seed) {
    Rng rng(*mapping_seed, /*stream=*/0x10551);
    std::map<Label, std::vector<std::size_t>> positions;
    for (std::size_t k = 0; k < refs.size(); ++k) positions[refs[k].label].push_back(k);
    for (const auto& [label, slots] : positions) {
      std::vector<std::size_t> shuffled = slots;
      rng.shuffle(shuffled.begin(), shuffled.end());
      for (std::size_t i = 0; i < slots.size(); ++i) pi[slots[i]] = shuffled[i];
    }
  }
  Permutation mapping(refs.size());
  for (std::size_t k = 0; k < pi.size(); ++k) mapping[k] = base[pi[k]];
  return loss_at_permutation(ests, refs, mapping, guards);
}

// Label-blind permutation-invariant loss over all K! mappings.
inline LossResult pi_sdr_loss(const LabeledSources& ests, const LabeledSources& refs,
                              const NumericGuards& guards = {}) {
  detail::check_loss_sizes(ests, refs);
  ScoreMatrix m(ests.size(), refs.size());
  for (std::size_t r = 0; r < ests.size(); ++r)
    for (std::size_t c = 0; c < refs.size(); ++c)
      m(r, c) = sdr(ests[r].waveform, refs[c].waveform, guards);
  Permutation mapping(refs.size());
  for (const auto& [r, c] : solve_max_assignment(m).pairs) mapping[c] = r;
  return loss_at_permutation(ests, refs, mapping, guards);
}

}  // namespace capisdr

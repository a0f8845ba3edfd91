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

// Class labels, labeled source sequences, and per-class TP/FN/FP accounting.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "capisdr/error.hpp"
#include "capisdr/signal.hpp"

namespace capisdr {

inline constexpr std::size_t kMaxTargets = 3;

// An open-vocabulary class token. Comparison is exact string equality.
class Label {
 public:
  Label() = default;
  explicit Label(std::string id) : id_(std::move(id)) {
    if (id_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty label");
  }
  Label(const char* id) : Label(std::string(id)) {}  // NOLINT

  const std::string& str() const noexcept { return id_; }

  friend auto operator<=>(const Label&, const Label&) = default;

 private:
  std::string id_;
};

struct LabeledSource {
  Label label;
  Waveform waveform;
};

// Ordered (label, waveform) pairs sharing one length and sample rate.
class LabeledSources {
 public:
  LabeledSources() = default;
  explicit LabeledSources(std::vector<LabeledSource> entries)
      : entries_(std::move(entries)) {
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      check_compatible(entries_[0].waveform, entries_[i].waveform);
    }
  }

  void push_back(LabeledSource s) {
    if (!entries_.empty()) check_compatible(entries_.front().waveform, s.waveform);
    entries_.push_back(std::move(s));
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const LabeledSource& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  std::vector<Label> labels() const {
    std::vector<Label> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.label);
    return out;
  }

 private:
  std::vector<LabeledSource> entries_;
};

struct PredictionCounts {
  std::size_t n_tp = 0;
  std::size_t n_fn = 0;
  std::size_t n_fp = 0;
  std::size_t n_total = 0;

  friend bool operator==(const PredictionCounts&, const PredictionCounts&) = default;
};

// References and estimates sharing one label. The index vectors point back
// into the LabeledSources the group was built from, in original order.
struct ClassGroup {
  Label label;
  std::vector<const Waveform*> refs;
  std::vector<const Waveform*> ests;
  std::vector<std::size_t> ref_indices;
  std::vector<std::size_t> est_indices;
};

inline PredictionCounts count_predictions(std::size_t n_refs, std::size_t n_ests) {
  PredictionCounts c;
  c.n_tp = std::min(n_refs, n_ests);
  c.n_fn = n_refs > n_ests ? n_refs - n_ests : 0;
  c.n_fp = n_ests > n_refs ? n_ests - n_refs : 0;
  c.n_total = c.n_tp + c.n_fn + c.n_fp;
  return c;
}

inline PredictionCounts count_predictions(const ClassGroup& group) {
  return count_predictions(group.refs.size(), group.ests.size());
}

// One group per label in the union of reference and estimate labels, ordered
// lexicographically by label. The returned groups borrow the waveforms.
inline std::vector<ClassGroup> group_by_label(const LabeledSources& refs,
                                              const LabeledSources& ests) {
  std::map<Label, ClassGroup> by_label;
  auto slot = [&](const Label& label) -> ClassGroup& {
    auto [it, inserted] = by_label.try_emplace(label);
    if (inserted) it->second.label = label;
    return it->second;
  };
  for (std::size_t i = 0; i < refs.size(); ++i) {
    auto& g = slot(refs[i].label);
    g.refs.push_back(&refs[i].waveform);
    g.ref_indices.push_back(i);
  }
  for (std::size_t i = 0; i < ests.size(); ++i) {
    auto& g = slot(ests[i].label);
    g.ests.push_back(&ests[i].waveform);
    g.est_indices.push_back(i);
  }
  std::vector<ClassGroup> out;
  out.reserve(by_label.size());
  for (auto& [label, group] : by_label) out.push_back(std::move(group));
  return out;
}

inline bool labels_distinct(const LabeledSources& sources) {
  auto labels = sources.labels();
  std::sort(labels.begin(), labels.end());
  return std::adjacent_find(labels.begin(), labels.end()) == labels.end();
}

// The DCASE 2025 task 4 sound-event vocabulary. Optional; the metric math
// accepts any token.
inline const std::vector<std::string>& dcase2025_vocabulary() {
  static const std::vector<std::string> kVocabulary = {
      "AlarmClock",    "BicycleBell",  "Blender",      "Buzzer",
      "Clapping",      "Cough",        "CupboardOpenClose", "Dishes",
      "Doorbell",      "FootSteps",    "HairDryer",    "MechanicalFans",
      "MusicalKeyboard", "Percussion", "Pour",         "Speech",
      "Typing",        "VacuumCleaner"};
  return kVocabulary;
}

}  // namespace capisdr

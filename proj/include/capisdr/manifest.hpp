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

// Evaluation manifests: one JSON object per mixture, paths relative to the
// manifest file.
//
//   {
//     "version": 1,
//     "vocabulary": ["Speech", ...],          // optional
//     "mixtures": [
//       {
//         "id": "mix000",
//         "mixture": "mix000/mixture.wav",
//         "ref_channel": 0,                   // 0-based channel index
//         "subset": "DupSet",                 // optional
//         "references": [{"label": "Speech", "path": "mix000/ref0.wav"}],
//         "estimates":  [{"label": "Speech", "path": "mix000/est0.wav"}],
//         "expected_db": 12.5                 // optional, informational
//       }
//     ]
//   }

#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "capisdr/error.hpp"
#include "capisdr/grouping.hpp"

namespace capisdr {

struct SourceRef {
  std::string label;
  std::filesystem::path path;  // as written in the manifest
};

struct MixtureEntry {
  std::string id;
  std::filesystem::path mixture_path;
  std::size_t ref_channel_index = 0;
  std::vector<SourceRef> references;
  std::vector<SourceRef> estimates;
  std::optional<std::string> subset_tag;
  std::optional<double> expected_db;
};

struct Manifest {
  std::filesystem::path base_dir;  // paths resolve against this
  std::vector<MixtureEntry> entries;
  std::optional<std::vector<std::string>> vocabulary;

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : base_dir / p;
  }
};

namespace detail {

inline std::vector<SourceRef> parse_sources(const nlohmann::json& arr, const std::string& id,
                                            const char* field) {
  std::vector<SourceRef> out;
  if (!arr.is_array()) {
    throw Error(ErrorCode::kManifestError, "entry '" + id + "': '" + field + "' must be an array");
  }
  for (const auto& s : arr) {
    if (!s.contains("label") || !s.contains("path")) {
      throw Error(ErrorCode::kManifestError,
                  "entry '" + id + "': every " + field + " item needs label and path");
    }
    SourceRef ref{s.at("label").get<std::string>(), s.at("path").get<std::string>()};
    if (ref.label.empty()) {
      throw Error(ErrorCode::kManifestError, "entry '" + id + "': empty label");
    }
    out.push_back(std::move(ref));
  }
  return out;
}

}  // namespace detail

inline Manifest parse_manifest(const nlohmann::json& doc, std::filesystem::path base_dir) {
  Manifest m;
  m.base_dir = std::move(base_dir);
  try {
    if (!doc.is_object() || !doc.contains("mixtures") || !doc.at("mixtures").is_array()) {
      throw Error(ErrorCode::kManifestError, "manifest needs a 'mixtures' array");
    }
    if (doc.contains("vocabulary")) {
      m.vocabulary = doc.at("vocabulary").get<std::vector<std::string>>();
    }
    std::set<std::string> ids;
    for (const auto& e : doc.at("mixtures")) {
      MixtureEntry entry;
      entry.id = e.at("id").get<std::string>();
      if (!ids.insert(entry.id).second) {
        throw Error(ErrorCode::kManifestError, "duplicate entry id '" + entry.id + "'");
      }
      entry.mixture_path = e.at("mixture").get<std::string>();
      if (e.contains("ref_channel")) {
        const auto ch = e.at("ref_channel").get<long long>();
        if (ch < 0) {
          throw Error(ErrorCode::kManifestError, "entry '" + entry.id + "': negative ref_channel");
        }
        entry.ref_channel_index = static_cast<std::size_t>(ch);
      }
      entry.references = detail::parse_sources(e.value("references", nlohmann::json::array()),
                                               entry.id, "references");
      entry.estimates = detail::parse_sources(e.value("estimates", nlohmann::json::array()),
                                              entry.id, "estimates");
      if (e.contains("subset") && !e.at("subset").is_null()) {
        entry.subset_tag = e.at("subset").get<std::string>();
      }
      if (e.contains("expected_db") && !e.at("expected_db").is_null()) {
        entry.expected_db = e.at("expected_db").get<double>();
      }
      if (m.vocabulary) {
        const std::set<std::string> vocab(m.vocabulary->begin(), m.vocabulary->end());
        for (const auto* list : {&entry.references, &entry.estimates})
          for (const auto& s : *list)
            if (!vocab.count(s.label)) {
              throw Error(ErrorCode::kManifestError, "entry '" + entry.id + "': label '" +
                                                         s.label + "' is not in the vocabulary");
            }
      }
      m.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kManifestError, ex.what());
  }
  return m;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kManifestError, "cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kManifestError, path.string() + ": " + ex.what());
  }
  return parse_manifest(doc, path.parent_path());
}

inline nlohmann::json to_json(const Manifest& m) {
  nlohmann::json doc;
  doc["version"] = 1;
  if (m.vocabulary) doc["vocabulary"] = *m.vocabulary;
  auto sources = [](const std::vector<SourceRef>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : list) arr.push_back({{"label", s.label}, {"path", s.path.generic_string()}});
    return arr;
  };
  nlohmann::json mixtures = nlohmann::json::array();
  for (const auto& e : m.entries) {
    nlohmann::json j;
    j["id"] = e.id;
    j["mixture"] = e.mixture_path.generic_string();
    j["ref_channel"] = e.ref_channel_index;
    if (e.subset_tag) j["subset"] = *e.subset_tag;
    j["references"] = sources(e.references);
    j["estimates"] = sources(e.estimates);
    if (e.expected_db) j["expected_db"] = *e.expected_db;
    mixtures.push_back(std::move(j));
  }
  doc["mixtures"] = std::move(mixtures);
  return doc;
}

inline void save_manifest(const std::filesystem::path& path, const Manifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << to_json(m).dump(2) << "\n";
}

}  // namespace capisdr

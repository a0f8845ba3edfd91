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

// Batch evaluation of a manifest and report emission (JSON lines or CSV).

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstddef>
#include <exception>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "capisdr/error.hpp"
#include "capisdr/grouping.hpp"
#include "capisdr/manifest.hpp"
#include "capisdr/metrics.hpp"
#include "capisdr/wav.hpp"

namespace capisdr {

inline constexpr const char* kVersion = "1.0.0";

enum class RowStatus { kOk, kSkipped, kError };

inline const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::kOk: return "ok";
    case RowStatus::kSkipped: return "skipped";
    case RowStatus::kError: return "error";
  }
  return "unknown";
}

struct MixtureRow {
  std::string id;
  std::optional<std::string> subset_tag;
  RowStatus status = RowStatus::kOk;
  std::optional<MixtureEvaluation> evaluation;
  std::string error_code;
  std::string error_message;
};

struct Aggregate {
  double mean_db = 0.0;
  std::size_t count = 0;  // mixtures with status ok
};

struct EvaluationReport {
  MetricConfig config;
  std::vector<MixtureRow> rows;  // ordered by id
  Aggregate overall;
  std::map<std::string, Aggregate> by_subset;
  std::size_t n_skipped = 0;
  std::size_t n_errors = 0;
};

struct LoadedEntry {
  Waveform mixture_ref;
  LabeledSources references;
  LabeledSources estimates;
};

inline LoadedEntry load_entry(const Manifest& manifest, const MixtureEntry& entry) {
  LoadedEntry out;
  out.mixture_ref =
      load_wav(manifest.resolve(entry.mixture_path)).channel(entry.ref_channel_index);
  auto load_list = [&](const std::vector<SourceRef>& list, LabeledSources& dst) {
    for (const auto& s : list) {
      Waveform w = load_wav_channel(manifest.resolve(s.path), 0);
      check_compatible(out.mixture_ref, w);
      dst.push_back({Label(s.label), std::move(w)});
    }
  };
  load_list(entry.references, out.references);
  load_list(entry.estimates, out.estimates);
  return out;
}

inline MixtureRow evaluate_entry(const Manifest& manifest, const MixtureEntry& entry,
                                 const MetricConfig& cfg) {
  MixtureRow row;
  row.id = entry.id;
  row.subset_tag = entry.subset_tag;
  if (entry.references.empty() && entry.estimates.empty()) {
    // Zero predictions: the metric divides by zero.
    row.status = RowStatus::kSkipped;
    return row;
  }
  try {
    if (entry.references.size() > kMaxTargets) {
      throw Error(ErrorCode::kManifestError,
                  "more than " + std::to_string(kMaxTargets) + " references");
    }
    const LoadedEntry loaded = load_entry(manifest, entry);
    row.evaluation = ca_pi_sdri(loaded.references, loaded.estimates, loaded.mixture_ref, cfg);
  } catch (const Error& e) {
    row.status = RowStatus::kError;
    row.error_code = std::string(to_string(e.code()));
    row.error_message = e.what();
  } catch (const std::exception& e) {
    row.status = RowStatus::kError;
    row.error_code = "Internal";
    row.error_message = e.what();
  }
  return row;
}

// Evaluates every entry on `workers` threads. Entries are independent and the
// report is assembled in id order, so the output does not depend on the
// worker count.
inline EvaluationReport evaluate_manifest(const Manifest& manifest, const MetricConfig& cfg,
                                          std::size_t workers = 1) {
  cfg.validate();
  EvaluationReport report;
  report.config = cfg;
  const std::size_t n = manifest.entries.size();
  report.rows.resize(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      report.rows[i] = evaluate_entry(manifest, manifest.entries[i], cfg);
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const MixtureRow& a, const MixtureRow& b) { return a.id < b.id; });

  std::map<std::string, double> subset_sums;
  double total = 0.0;
  for (const auto& row : report.rows) {
    if (row.status == RowStatus::kSkipped) ++report.n_skipped;
    if (row.status == RowStatus::kError) ++report.n_errors;
    if (row.status != RowStatus::kOk) continue;
    total += row.evaluation->metric_db;
    ++report.overall.count;
    if (row.subset_tag) {
      subset_sums[*row.subset_tag] += row.evaluation->metric_db;
      ++report.by_subset[*row.subset_tag].count;
    }
  }
  if (report.overall.count > 0) report.overall.mean_db = total / report.overall.count;
  for (auto& [tag, agg] : report.by_subset) agg.mean_db = subset_sums[tag] / agg.count;
  return report;
}

// Shortest representation that round-trips.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline nlohmann::json config_json(const MetricConfig& cfg) {
  return {{"type", "config"},
          {"penalty_fn", cfg.penalty_fn},
          {"penalty_fp", cfg.penalty_fp},
          {"sdr_cap_db", cfg.guards.sdr_cap_db},
          {"energy_floor", cfg.guards.energy_floor},
          {"penalty_hook", static_cast<bool>(cfg.penalty_hook)},
          {"version", kVersion}};
}

inline nlohmann::json row_json(const MixtureRow& row) {
  nlohmann::json j;
  j["type"] = "mixture";
  j["id"] = row.id;
  j["subset"] = row.subset_tag ? nlohmann::json(*row.subset_tag) : nlohmann::json(nullptr);
  j["status"] = to_string(row.status);
  if (row.status == RowStatus::kOk) {
    const auto& ev = *row.evaluation;
    j["metric_db"] = ev.metric_db;
    j["total_n"] = ev.total_n;
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : ev.components) {
      nlohmann::json pairs = nlohmann::json::array();
      for (const auto& [est, ref] : c.matched) pairs.push_back({{"estimate", est}, {"reference", ref}});
      comps.push_back({{"label", c.label.str()},
                       {"p_value", c.p_value},
                       {"n_tp", c.counts.n_tp},
                       {"n_fn", c.counts.n_fn},
                       {"n_fp", c.counts.n_fp},
                       {"n_total", c.counts.n_total},
                       {"pairs", pairs},
                       {"unmatched_references", c.unmatched_refs},
                       {"unmatched_estimates", c.unmatched_ests}});
    }
    j["components"] = comps;
  } else if (row.status == RowStatus::kError) {
    j["error"] = {{"code", row.error_code}, {"message", row.error_message}};
  }
  return j;
}

inline nlohmann::json aggregate_json(const std::string& subset, const Aggregate& agg) {
  return {{"type", "aggregate"},
          {"subset", subset.empty() ? nlohmann::json(nullptr) : nlohmann::json(subset)},
          {"mean_db", agg.count ? nlohmann::json(agg.mean_db) : nlohmann::json(nullptr)},
          {"count", agg.count}};
}

inline void write_report_jsonl(std::ostream& out, const EvaluationReport& report) {
  out << config_json(report.config).dump() << "\n";
  for (const auto& row : report.rows) out << row_json(row).dump() << "\n";
  for (const auto& [tag, agg] : report.by_subset) out << aggregate_json(tag, agg).dump() << "\n";
  nlohmann::json overall = aggregate_json("", report.overall);
  overall["skipped"] = report.n_skipped;
  overall["errors"] = report.n_errors;
  out << overall.dump() << "\n";
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_report_csv(std::ostream& out, const EvaluationReport& report) {
  const auto& cfg = report.config;
  out << "# capisdr " << kVersion << " penalty_fn=" << format_double(cfg.penalty_fn)
      << " penalty_fp=" << format_double(cfg.penalty_fp)
      << " sdr_cap_db=" << format_double(cfg.guards.sdr_cap_db)
      << " energy_floor=" << format_double(cfg.guards.energy_floor) << "\n";
  out << "id,subset,status,metric_db,total_n,n_tp,n_fn,n_fp,components,pairs,error\n";
  for (const auto& row : report.rows) {
    out << detail::csv_field(row.id) << "," << detail::csv_field(row.subset_tag.value_or(""))
        << "," << to_string(row.status) << ",";
    if (row.status == RowStatus::kOk) {
      const auto& ev = *row.evaluation;
      std::size_t tp = 0, fn = 0, fp = 0;
      std::string comps, pairs;
      for (const auto& c : ev.components) {
        tp += c.counts.n_tp;
        fn += c.counts.n_fn;
        fp += c.counts.n_fp;
        if (!comps.empty()) comps += ";";
        comps += c.label.str() + ":" + format_double(c.p_value);
        for (const auto& [est, ref] : c.matched) {
          if (!pairs.empty()) pairs += ";";
          pairs += std::to_string(est) + ">" + std::to_string(ref);
        }
      }
      out << format_double(ev.metric_db) << "," << ev.total_n << "," << tp << "," << fn << ","
          << fp << "," << detail::csv_field(comps) << "," << pairs << ",";
    } else {
      out << ",,,,,,,";
    }
    out << detail::csv_field(row.error_code) << "\n";
  }
  for (const auto& [tag, agg] : report.by_subset) {
    out << "__subset__," << detail::csv_field(tag) << ",aggregate,"
        << (agg.count ? format_double(agg.mean_db) : "") << "," << agg.count << ",,,,,,\n";
  }
  out << "__overall__,,aggregate,"
      << (report.overall.count ? format_double(report.overall.mean_db) : "") << ","
      << report.overall.count << ",,,,,,\n";
}

}  // namespace capisdr

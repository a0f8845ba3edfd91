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

// capisdr: evaluate labeled source-separation outputs with CA-PI-SDRi,
// synthesize validation scenes, compute the SDR loss family, and run the
// built-in consistency checks.
//
//   capisdr evaluate --manifest data/manifest.json --output report.jsonl
//   capisdr synth --output-dir data --count 12 --seed 1
//   capisdr losses --manifest data/manifest.json --id mix00003
//   capisdr selftest

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "capisdr.hpp"
#include "capisdr/selftest.hpp"

namespace {

using namespace capisdr;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void report_error(const std::string& code, const std::string& message) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << std::endl;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("CAPISDR_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SampleFormat parse_sample_format(const std::string& s) {
  if (s == "pcm16") return SampleFormat::kPcm16;
  if (s == "pcm24") return SampleFormat::kPcm24;
  if (s == "float64") return SampleFormat::kFloat64;
  return SampleFormat::kFloat32;
}

struct EvaluateArgs {
  std::string manifest;
  std::string output = "-";
  double penalty_fn = 0.0;
  double penalty_fp = 0.0;
  double sdr_cap = 60.0;
  double energy_floor = 1e-12;
  std::size_t workers = 1;
  std::string format = "jsonl";
};

int run_evaluate(const EvaluateArgs& args) {
  MetricConfig cfg;
  cfg.penalty_fn = args.penalty_fn;
  cfg.penalty_fp = args.penalty_fp;
  cfg.guards.sdr_cap_db = args.sdr_cap;
  cfg.guards.energy_floor = args.energy_floor;
  const Manifest manifest = load_manifest(args.manifest);
  const EvaluationReport report = evaluate_manifest(manifest, cfg, args.workers);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (args.output != "-") {
    file.open(args.output, std::ios::trunc);
    if (!file) throw Error(ErrorCode::kIoError, "cannot write " + args.output);
    out = &file;
  }
  if (args.format == "csv") {
    write_report_csv(*out, report);
  } else {
    write_report_jsonl(*out, report);
  }
  out->flush();
  std::cerr << "evaluated " << report.rows.size() << " mixtures: " << report.overall.count
            << " ok, " << report.n_skipped << " skipped, " << report.n_errors << " errors";
  if (report.overall.count > 0) {
    std::cerr << "; mean CA-PI-SDRi " << format_double(report.overall.mean_db) << " dB";
  }
  std::cerr << "\n";
  return 0;
}

struct SynthArgs {
  std::string output_dir;
  std::string sample_format = "float32";
  std::vector<std::string> labels;
  int interferers = -1;
};

int run_synth(DatasetSpec spec, const SynthArgs& args) {
  if (!args.labels.empty()) spec.fixed_labels = args.labels;
  if (args.interferers >= 0) spec.fixed_interference = static_cast<std::size_t>(args.interferers);
  const SampleFormat fmt = parse_sample_format(args.sample_format);
  spec.float32_exact = fmt != SampleFormat::kFloat64;
  const Manifest m = write_dataset(spec, args.output_dir, fmt);
  std::cerr << "wrote " << m.entries.size() << " mixtures to "
            << (std::filesystem::path(args.output_dir) / "manifest.json").string() << "\n";
  return 0;
}

nlohmann::json loss_json(const LossResult& r) {
  return {{"loss", r.loss_value},
          {"permutation", r.chosen_permutation},
          {"per_pair_sdr", r.per_pair_sdr}};
}

struct LossesArgs {
  std::string manifest;
  std::string id;
  std::vector<std::uint64_t> seeds;
  double sdr_cap = 60.0;
};

int run_losses(const LossesArgs& args) {
  const Manifest manifest = load_manifest(args.manifest);
  const MixtureEntry* entry = nullptr;
  for (const auto& e : manifest.entries)
    if (e.id == args.id) entry = &e;
  if (entry == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "no manifest entry with id '" + args.id + "'");
  }
  const LoadedEntry loaded = load_entry(manifest, *entry);
  NumericGuards guards;
  guards.sdr_cap_db = args.sdr_cap;
  nlohmann::json out;
  out["id"] = entry->id;
  out["pi_sdr"] = loss_json(pi_sdr_loss(loaded.estimates, loaded.references, guards));
  out["ca_pi_sdr"] = loss_json(ca_pi_sdr_loss(loaded.estimates, loaded.references, guards));
  out["ca_sdr"] = loss_json(ca_sdr_loss(loaded.estimates, loaded.references, std::nullopt, guards));
  nlohmann::json seeded = nlohmann::json::array();
  for (std::uint64_t seed : args.seeds) {
    nlohmann::json j = loss_json(ca_sdr_loss(loaded.estimates, loaded.references, seed, guards));
    j["seed"] = seed;
    seeded.push_back(std::move(j));
  }
  out["ca_sdr_seeded"] = std::move(seeded);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_selftest(std::size_t scale, std::uint64_t seed) {
  const std::vector<SuiteResult> results = {
      check_assignment_oracle(100 * scale, seed),
      check_reduction_equivalence(100 * scale, seed),
      check_loss_ordering(50 * scale, 16, seed),
  };
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed() ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.cases
              << " cases, " << r.failures << " failures, " << format_double(r.seconds) << " s)\n";
    if (!r.passed()) {
      std::cout << "      first failure: " << r.first_failure << "\n";
      ok = false;
    }
  }
  return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class-aware permutation-invariant SDRi evaluation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(capisdr::kVersion));

  EvaluateArgs eval_args;
  eval_args.workers = default_workers();
  auto* evaluate = app.add_subcommand("evaluate", "Score every mixture of a manifest");
  evaluate->add_option("-m,--manifest", eval_args.manifest, "Manifest JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("-o,--output", eval_args.output, "Report path ('-' for stdout)");
  evaluate->add_option("--penalty-fn", eval_args.penalty_fn, "Penalty per missed source (dB)");
  evaluate->add_option("--penalty-fp", eval_args.penalty_fp, "Penalty per spurious source (dB)");
  evaluate->add_option("--sdr-cap", eval_args.sdr_cap, "Upper bound on SDR (dB)")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--energy-floor", eval_args.energy_floor, "Relative error-energy floor")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("-j,--workers", eval_args.workers,
                       "Worker threads (default: $CAPISDR_WORKERS or core count)")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("-f,--format", eval_args.format, "Report format")
      ->check(CLI::IsMember({"jsonl", "json-lines", "csv"}));

  capisdr::DatasetSpec synth_spec;
  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write synthetic scenes, estimates and a manifest");
  synth->add_option("-o,--output-dir", synth_args.output_dir, "Destination directory")->required();
  synth->add_option("-n,--count", synth_spec.n_mixtures, "Number of mixtures");
  synth->add_option("--seed", synth_spec.seed, "Random seed");
  synth->add_option("--duration", synth_spec.duration_s, "Duration in seconds")
      ->check(CLI::PositiveNumber);
  synth->add_option("--sample-rate", synth_spec.sample_rate_hz, "Sample rate in Hz")
      ->check(CLI::PositiveNumber);
  synth->add_option("--labels", synth_args.labels,
                    "Fixed target labels for every scene (duplicates allowed)")
      ->delimiter(',');
  synth->add_option("--interferers", synth_args.interferers, "Fixed interferer count (0-2)")
      ->check(CLI::Range(0, 2));
  synth->add_option("--dup-fraction", synth_spec.dup_fraction,
                    "Share of scenes with same-class targets")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--snr-min", synth_spec.target_snr_db_range.first, "Target SNR lower bound");
  synth->add_option("--snr-max", synth_spec.target_snr_db_range.second, "Target SNR upper bound");
  synth->add_option("--sdri-min", synth_spec.sdri_target_range.first, "Estimate SDRi lower bound");
  synth->add_option("--sdri-max", synth_spec.sdri_target_range.second, "Estimate SDRi upper bound");
  synth->add_option("--fn-rate", synth_spec.fn_rate, "Chance of dropping one estimate")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--fp-rate", synth_spec.fp_rate, "Chance of one spurious estimate")
      ->check(CLI::Range(0.0, 1.0));
  bool no_noise = false;
  synth->add_flag("--no-noise", no_noise, "Omit background noise");
  synth->add_option("--sample-format", synth_args.sample_format, "WAV sample format")
      ->check(CLI::IsMember({"float32", "float64", "pcm16", "pcm24"}));

  LossesArgs loss_args;
  auto* losses = app.add_subcommand("losses", "Loss variants for one manifest entry (oracle labels)");
  losses->add_option("-m,--manifest", loss_args.manifest, "Manifest JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  losses->add_option("--id", loss_args.id, "Entry id")->required();
  losses->add_option("--seed", loss_args.seeds, "Seeds for random class-aware mappings");
  losses->add_option("--sdr-cap", loss_args.sdr_cap, "Upper bound on SDR (dB)")
      ->check(CLI::PositiveNumber);

  std::size_t selftest_scale = 1;
  std::uint64_t selftest_seed = 2025;
  auto* selftest = app.add_subcommand("selftest", "Run the randomized consistency checks");
  selftest->add_option("--scale", selftest_scale, "Multiply case counts")->check(CLI::PositiveNumber);
  selftest->add_option("--seed", selftest_seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "\n";
    report_error("UsageError", e.what());
    return kExitUsage;
  }

  try {
    if (*evaluate) return run_evaluate(eval_args);
    if (*synth) {
      synth_spec.include_noise = !no_noise;
      return run_synth(synth_spec, synth_args);
    }
    if (*losses) return run_losses(loss_args);
    if (*selftest) return run_selftest(selftest_scale, selftest_seed);
  } catch (const capisdr::Error& e) {
    report_error(std::string(capisdr::to_string(e.code())), e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    report_error("Internal", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}

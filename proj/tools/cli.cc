//
// Copyright 2026 The Canary Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cli.h"

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "canary_audit/attack.h"
#include "canary_audit/audit.h"
#include "canary_audit/baseline.h"
#include "canary_audit/ingest.h"
#include "canary_audit/report.h"
#include "canary_audit/simulate.h"

namespace canary_audit {
namespace {

struct AuditOptions {
  std::string file;
  std::string format;
  double confidence = 0.95;
  std::vector<double> fpr_targets;
  std::string tie_policy = "pessimistic";
  std::string out = "json";
  int64_t histogram_bins = 0;
  int64_t baseline_trials = 100;
  uint64_t seed = 0;
};

struct BaselineOptions {
  int64_t m = 1000;
  int64_t n = 1000;
  std::string statistic = "median";
  int64_t trials = 200;
  uint64_t seed = 0;
  bool json = false;
};

struct SimulateOptions {
  double mu = 0.0;
  double sigma = 1.0;
  int64_t m = 1000;
  int64_t n = 1000;
  uint64_t seed = 0;
  std::string out_file;
  std::string format = "csv";
};

struct RocOptions {
  std::string file;
  std::string format;
  std::string out_file;
};

absl::StatusOr<DataFormat> ResolveFormat(const std::string& flag,
                                         const std::string& path) {
  if (flag.empty()) return InferDataFormat(path);
  return ParseDataFormat(flag);
}

// Writes to `path`, or to `out` when the path is empty.
bool Emit(const std::string& text, const std::string& path, std::ostream& out,
          std::ostream& err) {
  if (path.empty()) {
    out << text;
    return static_cast<bool>(out);
  }
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file) {
    err << "error: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

int RunAudit(const AuditOptions& options, std::ostream& out,
             std::ostream& err) {
  absl::StatusOr<DataFormat> format = ResolveFormat(options.format, options.file);
  if (!format.ok()) {
    err << "error: " << format.status().message() << "\n";
    return kExitUsageError;
  }
  if (!(options.confidence > 0.0 && options.confidence < 1.0)) {
    err << "error: --confidence must lie in (0, 1)\n";
    return kExitUsageError;
  }
  absl::StatusOr<TiePolicy> tie_policy = ParseTiePolicy(options.tie_policy);
  if (!tie_policy.ok()) {
    err << "error: " << tie_policy.status().message() << "\n";
    return kExitUsageError;
  }
  AuditConfig config;
  config.confidence = options.confidence;
  config.tie_policy = *tie_policy;
  config.baseline_trials = options.baseline_trials;
  config.baseline_seed = options.seed;
  for (double target : options.fpr_targets) {
    config.operating_points.push_back(OperatingPoint::FprTarget(target));
  }

  absl::StatusOr<AuditDataset> dataset = ReadDatasetFile(options.file, *format);
  if (!dataset.ok()) {
    err << "error: " << dataset.status().message() << "\n";
    return kExitDataError;
  }
  absl::StatusOr<AuditResult> result = canary_audit::RunAudit(*dataset, config);
  if (!result.ok()) {
    err << "error: " << result.status().message() << "\n";
    return kExitDataError;
  }
  absl::StatusOr<AuditReportDocument> doc =
      BuildReport(*result, options.histogram_bins);
  if (!doc.ok()) {
    err << "error: " << doc.status().message() << "\n";
    return kExitDataError;
  }
  if (options.out == "md") {
    out << ReportToMarkdown(*doc);
  } else if (options.out == "csv") {
    out << ReportToCsv(*doc);
  } else {
    out << ReportToJson(*doc);
  }
  return kExitOk;
}

int RunBaseline(const BaselineOptions& options, std::ostream& out,
                std::ostream& err) {
  absl::StatusOr<ExposureStatistic> statistic =
      ParseExposureStatistic(options.statistic);
  if (!statistic.ok()) {
    err << "error: " << statistic.status().message() << "\n";
    return kExitUsageError;
  }
  absl::StatusOr<BaselineSummary> summary = MonteCarloBaseline(
      options.m, options.n, *statistic, options.trials, options.seed);
  if (!summary.ok()) {
    err << "error: " << summary.status().message() << "\n";
    return kExitUsageError;
  }
  out << (options.json ? BaselineSummaryToJson(*summary)
                       : BaselineSummaryToText(*summary));
  return kExitOk;
}

int RunSimulate(const SimulateOptions& options, std::ostream& out,
                std::ostream& err) {
  absl::StatusOr<DataFormat> format = ParseDataFormat(options.format);
  if (!format.ok()) {
    err << "error: " << format.status().message() << "\n";
    return kExitUsageError;
  }
  const GaussianShiftModel model{options.mu, options.sigma, options.m,
                                 options.n, options.seed};
  if (absl::Status status = ValidateModel(model); !status.ok()) {
    err << "error: " << status.message() << "\n";
    return kExitUsageError;
  }
  absl::StatusOr<AuditDataset> dataset = Simulate(model);
  if (!dataset.ok()) {
    err << "error: " << dataset.status().message() << "\n";
    return kExitDataError;
  }
  absl::StatusOr<std::string> text = SerializeDataset(*dataset, *format);
  if (!text.ok()) {
    err << "error: " << text.status().message() << "\n";
    return kExitDataError;
  }
  return Emit(*text, options.out_file, out, err) ? kExitOk : kExitDataError;
}

int RunRoc(const RocOptions& options, std::ostream& out, std::ostream& err) {
  absl::StatusOr<DataFormat> format = ResolveFormat(options.format, options.file);
  if (!format.ok()) {
    err << "error: " << format.status().message() << "\n";
    return kExitUsageError;
  }
  absl::StatusOr<AuditDataset> dataset = ReadDatasetFile(options.file, *format);
  if (!dataset.ok()) {
    err << "error: " << dataset.status().message() << "\n";
    return kExitDataError;
  }
  return Emit(RocToCsv(Roc(*dataset)), options.out_file, out, err)
             ? kExitOk
             : kExitDataError;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Canary exposure auditing: exposure statistics, random-guessing "
               "baselines and epsilon lower bounds from canary/reference "
               "losses.",
               "canary_audit"};
  app.set_version_flag("--version", std::string(ToolVersion()));
  app.require_subcommand(1);

  AuditOptions audit;
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "Audit a loss file and print a report");
  audit_cmd->add_option("file", audit.file, "Loss file (CSV or JSONL)")
      ->required();
  audit_cmd
      ->add_option("--format", audit.format,
                   "Input format; inferred from the extension if omitted")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  audit_cmd
      ->add_option("--confidence", audit.confidence,
                   "Confidence level of the epsilon lower bounds")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  audit_cmd
      ->add_option("--fpr-target", audit.fpr_targets,
                   "Additional operating point at this FPR (repeatable)")
      ->check(CLI::Range(0.0, 1.0))
      ->take_all()
      ->allow_extra_args(false);
  audit_cmd->add_option("--tie-policy", audit.tie_policy, "Rank tie policy")
      ->check(CLI::IsMember({"pessimistic", "optimistic"}))
      ->capture_default_str();
  audit_cmd->add_option("--out", audit.out, "Report format")
      ->check(CLI::IsMember({"json", "md", "csv"}))
      ->capture_default_str();
  audit_cmd
      ->add_option("--histogram-bins", audit.histogram_bins,
                   "Number of equal-width exposure bins (0: 0.5-bit bins)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  audit_cmd
      ->add_option("--baseline-trials", audit.baseline_trials,
                   "Monte Carlo trials for the random-guessing baseline")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  audit_cmd->add_option("--seed", audit.seed, "Baseline Monte Carlo seed")
      ->capture_default_str();

  BaselineOptions baseline;
  CLI::App* baseline_cmd = app.add_subcommand(
      "baseline", "Random-guessing baseline of an exposure statistic");
  baseline_cmd->add_option("--m", baseline.m, "Canaries per trial")
      ->capture_default_str();
  baseline_cmd->add_option("--n", baseline.n, "References")
      ->capture_default_str();
  baseline_cmd
      ->add_option("--statistic", baseline.statistic,
                   "mean, median or quantile=<q>")
      ->capture_default_str();
  baseline_cmd->add_option("--trials", baseline.trials, "Monte Carlo trials")
      ->capture_default_str();
  baseline_cmd->add_option("--seed", baseline.seed, "Seed")
      ->capture_default_str();
  baseline_cmd->add_flag("--json", baseline.json, "Print JSON");

  SimulateOptions simulate;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Write a synthetic Gaussian-shift loss file");
  simulate_cmd
      ->add_option("--mu", simulate.mu,
                   "Canary loss shift (canaries ~ N(-mu, sigma^2))")
      ->capture_default_str();
  simulate_cmd->add_option("--sigma", simulate.sigma, "Loss standard deviation")
      ->capture_default_str();
  simulate_cmd->add_option("--m", simulate.m, "Canaries")
      ->capture_default_str();
  simulate_cmd->add_option("--n", simulate.n, "References")
      ->capture_default_str();
  simulate_cmd->add_option("--seed", simulate.seed, "Seed")
      ->capture_default_str();
  simulate_cmd->add_option("--out-file", simulate.out_file,
                           "Output path (stdout if omitted)");
  simulate_cmd->add_option("--format", simulate.format, "Output format")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();

  RocOptions roc;
  CLI::App* roc_cmd = app.add_subcommand(
      "roc", "Write the threshold attack ROC sweep as threshold,fpr,tpr");
  roc_cmd->add_option("file", roc.file, "Loss file (CSV or JSONL)")
      ->required();
  roc_cmd
      ->add_option("--format", roc.format,
                   "Input format; inferred from the extension if omitted")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  roc_cmd->add_option("--out-file", roc.out_file,
                      "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  if (*audit_cmd) return RunAudit(audit, out, err);
  if (*baseline_cmd) return RunBaseline(baseline, out, err);
  if (*simulate_cmd) return RunSimulate(simulate, out, err);
  return RunRoc(roc, out, err);
}

}  // namespace canary_audit

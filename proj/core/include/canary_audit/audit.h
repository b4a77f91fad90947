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

#ifndef CANARY_AUDIT_AUDIT_H_
#define CANARY_AUDIT_AUDIT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "canary_audit/attack.h"
#include "canary_audit/baseline.h"
#include "canary_audit/exposure.h"
#include "canary_audit/ingest.h"

namespace canary_audit {

// ln(tpr / fpr). Returns +infinity when fpr = 0 < tpr and 0 when
// tpr = fpr = 0. Negative values are returned as is.
absl::StatusOr<double> EpsilonPoint(double tpr, double fpr);

// ln(2) * (median_exposure - 1): the bound obtained by taking the median
// canary loss as threshold, so that TPR = 1/2 and FPR = 2^-exposure.
double EpsilonFromMedianExposure(double median_exposure);

enum class BoundSide { kLower, kUpper };

// One-sided exact (Clopper-Pearson) bound on a binomial proportion from k
// successes in `trials` trials:
//   lower = inf { p : P[Bin(trials, p) >= k] >= alpha }   (0 when k = 0)
//   upper = sup { p : P[Bin(trials, p) <= k] >= alpha }   (1 when k = trials)
// Solved by bisection on the binomial tail to absolute error below 1e-12;
// the returned endpoint is always the conservative side of the bracket.
absl::StatusOr<double> ClopperPearson(int64_t k, int64_t trials, double alpha,
                                      BoundSide side);

// Where the threshold of an ε bound came from.
enum class BoundSource { kMedianExposure, kThreshold, kTprAtFpr };

absl::string_view BoundSourceName(BoundSource source);
absl::StatusOr<BoundSource> ParseBoundSource(absl::string_view name);

struct EpsilonBound {
  // ln(tpr / fpr) on the empirical rates; may be negative or +infinity.
  double point_estimate = 0.0;
  // max(0, ln(tpr_lower / fpr_upper)).
  double confident_lower_bound = 0.0;
  double confidence = 0.95;
  // One-sided error budgets of the TPR and FPR intervals.
  std::pair<double, double> alpha_split = {0.025, 0.025};
  double tpr_lower = 0.0;
  double fpr_upper = 1.0;
  BoundSource source = BoundSource::kThreshold;
  TiePolicy tie_policy = TiePolicy::kPessimistic;
  int64_t replications = 1;
  // True once the group-privacy division by `replications` has been applied.
  bool per_example = false;

  friend bool operator==(const EpsilonBound&, const EpsilonBound&) = default;
};

// Confidence-corrected bound for an attack outcome on `dataset`. The error
// budget 1 - confidence is split evenly between a lower bound on TPR and an
// upper bound on FPR (union bound). Canary and reference losses are assumed
// independent.
absl::StatusOr<EpsilonBound> EpsilonConfident(
    const AuditDataset& dataset, const MIResult& attack, double confidence,
    BoundSource source = BoundSource::kThreshold,
    TiePolicy tie_policy = TiePolicy::kPessimistic);

// Group privacy for k duplicated canaries: epsilon / k.
absl::StatusOr<double> GroupPrivacyAdjust(double epsilon, int64_t replications);

// Divides both the point estimate and the confident bound by the bound's
// replication count and marks it per-example. Fails if already per-example.
absl::StatusOr<EpsilonBound> ToPerExample(const EpsilonBound& raw);

struct OperatingPoint {
  enum class Kind { kMedian, kFprTarget };

  Kind kind = Kind::kMedian;
  double fpr_target = 0.0;

  static OperatingPoint Median() { return {Kind::kMedian, 0.0}; }
  static OperatingPoint FprTarget(double target) {
    return {Kind::kFprTarget, target};
  }

  friend bool operator==(const OperatingPoint&,
                         const OperatingPoint&) = default;
};

std::string OperatingPointName(const OperatingPoint& point);

struct AuditConfig {
  std::vector<OperatingPoint> operating_points = {OperatingPoint::Median()};
  double confidence = 0.95;
  TiePolicy tie_policy = TiePolicy::kPessimistic;
  // Random-guessing Monte Carlo used for the baseline comparison. Zero trials
  // skips the simulation.
  int64_t baseline_trials = 100;
  uint64_t baseline_seed = 0;
};

struct OperatingPointResult {
  OperatingPoint operating_point;
  MIResult attack;
  EpsilonBound raw;
  EpsilonBound per_example;
  // ln(2) * (median exposure - 1); set for the median operating point only.
  std::optional<double> exposure_epsilon;
  // An FPR target below 1/n can only be met at FPR 0.
  bool target_unachievable = false;

  friend bool operator==(const OperatingPointResult&,
                         const OperatingPointResult&) = default;
};

// Observed exposure aggregate next to what random guessing would give.
struct BaselineComparison {
  ExposureStatistic statistic;
  double observed = 0.0;
  std::optional<double> exact;
  double asymptotic = 0.0;
  std::optional<double> mc_mean;
  std::optional<double> mc_std;

  friend bool operator==(const BaselineComparison&,
                         const BaselineComparison&) = default;
};

inline constexpr absl::string_view kIndependenceWarning =
    "canary and reference losses are assumed independent (heuristic); "
    "confidence intervals are not corrected for dependence";

struct AuditResult {
  DatasetSummary summary;
  ExposureReport exposure;
  std::vector<OperatingPointResult> bounds;
  std::vector<BaselineComparison> baselines;
  std::vector<std::string> warnings;

  friend bool operator==(const AuditResult&, const AuditResult&) = default;
};

// Exposure report, one confidence-corrected bound per operating point (in
// config order, raw and per-example), and random-guessing comparisons for the
// mean and every reported quantile.
absl::StatusOr<AuditResult> RunAudit(const AuditDataset& dataset,
                                     const AuditConfig& config);

}  // namespace canary_audit

#endif  // CANARY_AUDIT_AUDIT_H_

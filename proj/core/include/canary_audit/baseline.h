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

#ifndef CANARY_AUDIT_BASELINE_H_
#define CANARY_AUDIT_BASELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "absl/types/span.h"

namespace canary_audit {

// An aggregate over per-canary exposures.
struct ExposureStatistic {
  enum class Kind { kMean, kQuantile };

  Kind kind = Kind::kMean;
  double q = 0.0;  // only meaningful for kQuantile

  static ExposureStatistic Mean() { return {Kind::kMean, 0.0}; }
  static ExposureStatistic Quantile(double q) { return {Kind::kQuantile, q}; }

  friend bool operator==(const ExposureStatistic&,
                         const ExposureStatistic&) = default;
};

// "mean", "median", or "quantile=<q>".
absl::StatusOr<ExposureStatistic> ParseExposureStatistic(absl::string_view text);
std::string ExposureStatisticName(const ExposureStatistic& statistic);

// Mean exposure of a canary whose rank is uniform on {1, ..., n + 1}:
//   log2(n) - log2((n + 1)!) / (n + 1),
// evaluated through lgamma so the cost does not depend on n.
absl::StatusOr<double> ExpectedExposureExact(int64_t n);

// Large-n limit of ExpectedExposureExact, 1 / ln 2.
double ExpectedExposureAsymptote();

// Limit (m, n -> infinity) of the q-quantile of exposure under random
// guessing: -log2(1 - q). The median is 1 and the 75th percentile is 2.
absl::StatusOr<double> BaselineQuantileExposure(double q);

// Exact value when one exists (mean only), otherwise nullopt.
std::optional<double> BaselineExactValue(const ExposureStatistic& statistic,
                                         int64_t n);
// Asymptotic value of the statistic under random guessing.
double BaselineAsymptoticValue(const ExposureStatistic& statistic);

struct BaselineSummary {
  ExposureStatistic statistic;
  std::optional<double> exact_value;
  double asymptotic_value = 0.0;
  double mc_mean = 0.0;
  double mc_std = 0.0;
  // Quantiles (0.05, 0.5, 0.95) of the statistic across trials.
  std::map<double, double> mc_quantiles;
  int64_t m = 0;
  int64_t n = 0;
  int64_t trials = 0;
  uint64_t seed = 0;

  friend bool operator==(const BaselineSummary&,
                         const BaselineSummary&) = default;
};

// Simulates random guessing: each trial draws m independent ranks uniformly
// from {1, ..., n + 1} and evaluates the statistic on the resulting exposures.
// Trial t uses its own substream derived from (seed, t), so the result is a
// pure function of the arguments.
absl::StatusOr<BaselineSummary> MonteCarloBaseline(
    int64_t m, int64_t n, const ExposureStatistic& statistic, int64_t trials,
    uint64_t seed);

// Same as MonteCarloBaseline but evaluates several statistics on the same
// simulated trials. Element i of the result summarizes statistics[i].
absl::StatusOr<std::vector<BaselineSummary>> MonteCarloBaselines(
    int64_t m, int64_t n, absl::Span<const ExposureStatistic> statistics,
    int64_t trials, uint64_t seed);

}  // namespace canary_audit

#endif  // CANARY_AUDIT_BASELINE_H_

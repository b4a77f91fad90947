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

#include "canary_audit/baseline.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "canary_audit/exposure.h"
#include "canary_audit/random.h"

namespace canary_audit {
namespace {

constexpr double kTrialQuantiles[] = {0.05, 0.5, 0.95};

absl::Status CheckStatistic(const ExposureStatistic& statistic) {
  if (statistic.kind == ExposureStatistic::Kind::kQuantile &&
      !(statistic.q > 0.0 && statistic.q < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("quantile must lie in (0, 1), got ", statistic.q));
  }
  return absl::OkStatus();
}

double SortedQuantile(const std::vector<double>& sorted, double q) {
  return sorted[NearestRankIndex(q, static_cast<int64_t>(sorted.size()))];
}

// Nearest-rank quantile by selection; reorders `values`.
double SelectQuantile(std::vector<double>& values, double q) {
  const auto nth =
      values.begin() + NearestRankIndex(q, static_cast<int64_t>(values.size()));
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

}  // namespace

absl::StatusOr<ExposureStatistic> ParseExposureStatistic(
    absl::string_view text) {
  const std::string lowered = absl::AsciiStrToLower(text);
  if (lowered == "mean") return ExposureStatistic::Mean();
  if (lowered == "median") return ExposureStatistic::Quantile(0.5);
  constexpr absl::string_view kPrefix = "quantile=";
  if (absl::StartsWith(lowered, kPrefix)) {
    const absl::string_view value =
        absl::string_view(lowered).substr(kPrefix.size());
    double q = 0.0;
    auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), q);
    if (ec == std::errc() && ptr == value.data() + value.size()) {
      const ExposureStatistic statistic = ExposureStatistic::Quantile(q);
      if (absl::Status status = CheckStatistic(statistic); !status.ok()) {
        return status;
      }
      return statistic;
    }
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown statistic '", text,
      "'; expected mean, median or quantile=<q> with 0 < q < 1"));
}

std::string ExposureStatisticName(const ExposureStatistic& statistic) {
  if (statistic.kind == ExposureStatistic::Kind::kMean) return "mean";
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), statistic.q);
  return absl::StrCat("quantile=", absl::string_view(buffer, ptr - buffer));
}

absl::StatusOr<double> ExpectedExposureExact(int64_t n) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n must be >= 1, got ", n));
  }
  const double count = static_cast<double>(n);
  // log2((n + 1)!) = lgamma(n + 2) / ln 2
  return std::log2(count) -
         std::lgamma(count + 2.0) / (std::numbers::ln2 * (count + 1.0));
}

double ExpectedExposureAsymptote() { return 1.0 / std::numbers::ln2; }

absl::StatusOr<double> BaselineQuantileExposure(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("quantile must lie in (0, 1), got ", q));
  }
  return -std::log2(1.0 - q);
}

std::optional<double> BaselineExactValue(const ExposureStatistic& statistic,
                                         int64_t n) {
  if (statistic.kind != ExposureStatistic::Kind::kMean) return std::nullopt;
  absl::StatusOr<double> exact = ExpectedExposureExact(n);
  if (!exact.ok()) return std::nullopt;
  return *exact;
}

double BaselineAsymptoticValue(const ExposureStatistic& statistic) {
  if (statistic.kind == ExposureStatistic::Kind::kMean) {
    return ExpectedExposureAsymptote();
  }
  return -std::log2(1.0 - statistic.q);
}

absl::StatusOr<std::vector<BaselineSummary>> MonteCarloBaselines(
    int64_t m, int64_t n, absl::Span<const ExposureStatistic> statistics,
    int64_t trials, uint64_t seed) {
  if (m < 1 || n < 1 || trials < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "m, n and trials must be >= 1, got m=", m, " n=", n,
        " trials=", trials));
  }
  for (const ExposureStatistic& statistic : statistics) {
    if (absl::Status status = CheckStatistic(statistic); !status.ok()) {
      return status;
    }
  }

  // values[s][t] is statistic s evaluated on trial t.
  std::vector<std::vector<double>> values(
      statistics.size(), std::vector<double>(static_cast<size_t>(trials)));
  std::vector<double> exposures(static_cast<size_t>(m));
  const uint64_t rank_count = static_cast<uint64_t>(n) + 1;
  for (int64_t t = 0; t < trials; ++t) {
    std::mt19937_64 engine(DeriveStreamKey(seed, static_cast<uint64_t>(t)));
    double sum = 0.0;
    for (double& exposure : exposures) {
      const int64_t rank =
          1 + static_cast<int64_t>(UniformBelow(engine, rank_count));
      exposure = ExposureFromRank(rank, n);
      sum += exposure;
    }
    for (size_t s = 0; s < statistics.size(); ++s) {
      values[s][t] = statistics[s].kind == ExposureStatistic::Kind::kMean
                         ? sum / static_cast<double>(m)
                         : SelectQuantile(exposures, statistics[s].q);
    }
  }

  std::vector<BaselineSummary> summaries;
  summaries.reserve(statistics.size());
  for (size_t s = 0; s < statistics.size(); ++s) {
    std::vector<double>& trial_values = values[s];
    BaselineSummary summary;
    summary.statistic = statistics[s];
    summary.exact_value = BaselineExactValue(statistics[s], n);
    summary.asymptotic_value = BaselineAsymptoticValue(statistics[s]);
    summary.m = m;
    summary.n = n;
    summary.trials = trials;
    summary.seed = seed;

    double sum = 0.0;
    for (double value : trial_values) sum += value;
    summary.mc_mean = sum / static_cast<double>(trials);
    if (trials > 1) {
      double squares = 0.0;
      for (double value : trial_values) {
        squares += (value - summary.mc_mean) * (value - summary.mc_mean);
      }
      summary.mc_std = std::sqrt(squares / static_cast<double>(trials - 1));
    }
    std::sort(trial_values.begin(), trial_values.end());
    for (double q : kTrialQuantiles) {
      summary.mc_quantiles[q] = SortedQuantile(trial_values, q);
    }
    summaries.push_back(std::move(summary));
  }
  return summaries;
}

absl::StatusOr<BaselineSummary> MonteCarloBaseline(
    int64_t m, int64_t n, const ExposureStatistic& statistic, int64_t trials,
    uint64_t seed) {
  absl::StatusOr<std::vector<BaselineSummary>> summaries =
      MonteCarloBaselines(m, n, {statistic}, trials, seed);
  if (!summaries.ok()) return summaries.status();
  return std::move(summaries->front());
}

}  // namespace canary_audit

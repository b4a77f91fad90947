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

#include "canary_audit/exposure.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace canary_audit {
namespace {

// Rank without validation; `sorted_references` must be sorted ascending.
int64_t RankUnchecked(double loss, absl::Span<const double> sorted_references,
                      TiePolicy policy) {
  const auto position =
      policy == TiePolicy::kPessimistic
          ? std::upper_bound(sorted_references.begin(),
                             sorted_references.end(), loss)
          : std::lower_bound(sorted_references.begin(),
                             sorted_references.end(), loss);
  return 1 + (position - sorted_references.begin());
}

absl::Status CheckQuantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("quantile must lie in (0, 1), got ", q));
  }
  return absl::OkStatus();
}

}  // namespace

absl::string_view TiePolicyName(TiePolicy policy) {
  return policy == TiePolicy::kPessimistic ? "pessimistic" : "optimistic";
}

absl::StatusOr<TiePolicy> ParseTiePolicy(absl::string_view name) {
  const std::string lowered = absl::AsciiStrToLower(name);
  if (lowered == "pessimistic") return TiePolicy::kPessimistic;
  if (lowered == "optimistic") return TiePolicy::kOptimistic;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown tie policy '", name, "'; expected pessimistic or optimistic"));
}

absl::StatusOr<int64_t> Rank(double loss,
                             absl::Span<const double> sorted_references,
                             TiePolicy policy) {
  if (sorted_references.empty()) {
    return absl::InvalidArgumentError("reference set is empty");
  }
  if (!std::isfinite(loss)) {
    return absl::InvalidArgumentError("loss must be finite");
  }
  for (size_t i = 0; i < sorted_references.size(); ++i) {
    if (!std::isfinite(sorted_references[i])) {
      return absl::InvalidArgumentError("reference losses must be finite");
    }
    if (i > 0 && sorted_references[i] < sorted_references[i - 1]) {
      return absl::InvalidArgumentError(
          "reference losses must be sorted ascending");
    }
  }
  return RankUnchecked(loss, sorted_references, policy);
}

double ExposureFromRank(int64_t rank, int64_t n) {
  return std::log2(static_cast<double>(n)) -
         std::log2(static_cast<double>(rank));
}

absl::StatusOr<double> ExposureOf(double loss,
                                  absl::Span<const double> sorted_references,
                                  TiePolicy policy) {
  absl::StatusOr<int64_t> rank = Rank(loss, sorted_references, policy);
  if (!rank.ok()) return rank.status();
  return ExposureFromRank(*rank,
                          static_cast<int64_t>(sorted_references.size()));
}

int64_t NearestRankIndex(double q, int64_t size) {
  // q is usually a decimal such as 0.07 whose binary value sits a hair above
  // or below the intended fraction; the slack keeps ceil(0.07 * 100) at 7.
  constexpr double kSlack = 1e-9;
  const double position =
      std::ceil(q * static_cast<double>(size) - kSlack);
  const int64_t one_based =
      std::clamp(static_cast<int64_t>(position), int64_t{1}, size);
  return one_based - 1;
}

absl::StatusOr<double> ExposureQuantile(absl::Span<const double> exposures,
                                        double q) {
  if (exposures.empty()) {
    return absl::InvalidArgumentError("exposure list is empty");
  }
  if (absl::Status status = CheckQuantile(q); !status.ok()) return status;
  std::vector<double> sorted(exposures.begin(), exposures.end());
  const int64_t index =
      NearestRankIndex(q, static_cast<int64_t>(sorted.size()));
  std::nth_element(sorted.begin(), sorted.begin() + index, sorted.end());
  return sorted[index];
}

absl::StatusOr<ExposureReport> ComputeExposures(
    const AuditDataset& dataset, TiePolicy policy,
    absl::Span<const double> extra_quantiles) {
  std::set<double> quantiles(std::begin(kDefaultReportQuantiles),
                             std::end(kDefaultReportQuantiles));
  for (double q : extra_quantiles) {
    if (absl::Status status = CheckQuantile(q); !status.ok()) return status;
    quantiles.insert(q);
  }

  std::vector<double> references = dataset.ReferenceLosses();
  std::sort(references.begin(), references.end());

  ExposureReport report;
  report.m = dataset.m();
  report.n = dataset.n();
  report.tie_policy = policy;
  report.per_canary.reserve(dataset.canaries().size());

  const double n = static_cast<double>(report.n);
  double sum = 0.0;
  for (size_t i = 0; i < dataset.canaries().size(); ++i) {
    ExposureResult result;
    result.canary_index = static_cast<int64_t>(i);
    result.rank = RankUnchecked(dataset.canaries()[i].loss, references, policy);
    result.exposure = ExposureFromRank(result.rank, report.n);
    result.empirical_fpr = static_cast<double>(result.rank - 1) / n;
    sum += result.exposure;
    report.per_canary.push_back(result);
  }
  report.mean_exposure = sum / static_cast<double>(report.m);

  std::vector<double> sorted;
  sorted.reserve(report.per_canary.size());
  for (const ExposureResult& result : report.per_canary) {
    sorted.push_back(result.exposure);
  }
  std::sort(sorted.begin(), sorted.end());
  for (double q : quantiles) {
    report.quantile_exposures[q] = sorted[NearestRankIndex(q, report.m)];
  }
  return report;
}

}  // namespace canary_audit

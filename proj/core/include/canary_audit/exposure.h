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

#ifndef CANARY_AUDIT_EXPOSURE_H_
#define CANARY_AUDIT_EXPOSURE_H_

#include <cstdint>
#include <map>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "absl/types/span.h"
#include "canary_audit/ingest.h"

namespace canary_audit {

// How references whose loss equals the canary's loss are counted.
//   kPessimistic: ties count as smaller references (rank = 1 + #{r <= loss}).
//   kOptimistic:  ties are ignored (rank = 1 + #{r < loss}).
// Pessimistic never reports more exposure than optimistic.
enum class TiePolicy { kPessimistic, kOptimistic };

absl::string_view TiePolicyName(TiePolicy policy);
absl::StatusOr<TiePolicy> ParseTiePolicy(absl::string_view name);

// Rank of `loss` among `sorted_references`, in [1, n + 1]. The references must
// be finite and sorted ascending.
absl::StatusOr<int64_t> Rank(double loss,
                             absl::Span<const double> sorted_references,
                             TiePolicy policy);

// log2(n) - log2(rank). Requires n >= 1 and 1 <= rank <= n + 1.
double ExposureFromRank(int64_t rank, int64_t n);

absl::StatusOr<double> ExposureOf(double loss,
                                  absl::Span<const double> sorted_references,
                                  TiePolicy policy);

struct ExposureResult {
  int64_t canary_index = 0;
  int64_t rank = 1;
  double exposure = 0.0;
  // (rank - 1) / n: fraction of references a loss threshold at this canary's
  // loss would classify as members.
  double empirical_fpr = 0.0;

  friend bool operator==(const ExposureResult&,
                         const ExposureResult&) = default;
};

struct ExposureReport {
  std::vector<ExposureResult> per_canary;
  double mean_exposure = 0.0;
  // Nearest-rank lower quantiles of the per-canary exposures. Always contains
  // 0.5 and 0.75.
  std::map<double, double> quantile_exposures;
  int64_t m = 0;
  int64_t n = 0;
  TiePolicy tie_policy = TiePolicy::kPessimistic;

  double median_exposure() const { return quantile_exposures.at(0.5); }

  friend bool operator==(const ExposureReport&,
                         const ExposureReport&) = default;
};

// Quantiles every report carries.
inline constexpr double kDefaultReportQuantiles[] = {0.5, 0.75, 0.9};

// Ranks every canary against the reference set. References are sorted once
// and each canary is located by binary search, so the cost is
// O((m + n) log n). `extra_quantiles` must lie in (0, 1).
absl::StatusOr<ExposureReport> ComputeExposures(
    const AuditDataset& dataset, TiePolicy policy = TiePolicy::kPessimistic,
    absl::Span<const double> extra_quantiles = {});

// Nearest-rank lower quantile: the element at 1-based position ceil(q * size)
// of the ascending order. q = 0.5 gives the lower median.
absl::StatusOr<double> ExposureQuantile(absl::Span<const double> exposures,
                                        double q);

// 0-based position of the nearest-rank lower q-quantile in a sorted sequence
// of `size` elements. ceil(q * size) tolerates representation error of 1e-9
// in the product, so decimal quantiles select the intended element.
int64_t NearestRankIndex(double q, int64_t size);

}  // namespace canary_audit

#endif  // CANARY_AUDIT_EXPOSURE_H_

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

#ifndef CANARY_AUDIT_ATTACK_H_
#define CANARY_AUDIT_ATTACK_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "canary_audit/ingest.h"

namespace canary_audit {

// Outcome of the loss-threshold membership inference attack, which guesses
// "member" for every example with loss < threshold.
struct MIResult {
  double threshold = 0.0;
  double tpr = 0.0;  // canary_hits / m
  double fpr = 0.0;  // reference_hits / n
  int64_t canary_hits = 0;
  int64_t reference_hits = 0;
  int64_t m = 0;
  int64_t n = 0;

  friend bool operator==(const MIResult&, const MIResult&) = default;
};

absl::StatusOr<MIResult> ThresholdAttack(const AuditDataset& dataset,
                                         double threshold);

// Nearest-rank lower median of the canary losses. Always the loss of an
// actual canary.
double MedianThreshold(const AuditDataset& dataset);

// Full sweep: one point per distinct loss in the pooled dataset, ascending,
// framed by the all-out point (threshold -inf) and the all-in point
// (threshold +inf). Both hit counts are non-decreasing along the sweep.
std::vector<MIResult> Roc(const AuditDataset& dataset);

// Operating point with the largest TPR among those with FPR <= target_fpr.
// Among equal TPRs the lowest FPR wins, then the lowest threshold. The result
// reports the achieved FPR, which is a multiple of 1/n.
absl::StatusOr<MIResult> TprAtFpr(const AuditDataset& dataset,
                                  double target_fpr);

// Same selection over a precomputed sweep.
absl::StatusOr<MIResult> TprAtFpr(absl::Span<const MIResult> roc,
                                  double target_fpr);

// `threshold,fpr,tpr` rows with a header. Infinite thresholds print as
// `-inf` / `inf`.
std::string RocToCsv(absl::Span<const MIResult> roc);

}  // namespace canary_audit

#endif  // CANARY_AUDIT_ATTACK_H_

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

#include "canary_audit/attack.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "canary_audit/exposure.h"

namespace canary_audit {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

MIResult MakeResult(double threshold, int64_t canary_hits,
                    int64_t reference_hits, int64_t m, int64_t n) {
  MIResult result;
  result.threshold = threshold;
  result.canary_hits = canary_hits;
  result.reference_hits = reference_hits;
  result.m = m;
  result.n = n;
  result.tpr = static_cast<double>(canary_hits) / static_cast<double>(m);
  result.fpr = static_cast<double>(reference_hits) / static_cast<double>(n);
  return result;
}

std::string Shortest(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace

absl::StatusOr<MIResult> ThresholdAttack(const AuditDataset& dataset,
                                         double threshold) {
  if (!std::isfinite(threshold)) {
    return absl::InvalidArgumentError("threshold must be finite");
  }
  const auto below = [threshold](const LossRecord& record) {
    return record.loss < threshold;
  };
  return MakeResult(
      threshold,
      std::count_if(dataset.canaries().begin(), dataset.canaries().end(),
                    below),
      std::count_if(dataset.references().begin(), dataset.references().end(),
                    below),
      dataset.m(), dataset.n());
}

double MedianThreshold(const AuditDataset& dataset) {
  std::vector<double> losses = dataset.CanaryLosses();
  const auto median =
      losses.begin() + NearestRankIndex(0.5, static_cast<int64_t>(losses.size()));
  std::nth_element(losses.begin(), median, losses.end());
  return *median;
}

std::vector<MIResult> Roc(const AuditDataset& dataset) {
  std::vector<double> canaries = dataset.CanaryLosses();
  std::vector<double> references = dataset.ReferenceLosses();
  std::sort(canaries.begin(), canaries.end());
  std::sort(references.begin(), references.end());
  const int64_t m = dataset.m();
  const int64_t n = dataset.n();

  std::vector<MIResult> roc;
  roc.reserve(canaries.size() + references.size() + 2);
  roc.push_back(MakeResult(-kInfinity, 0, 0, m, n));
  // Two-pointer merge: at each distinct value v, the pointers sit at the
  // number of losses strictly below v.
  size_t c = 0;
  size_t r = 0;
  while (c < canaries.size() || r < references.size()) {
    const double value =
        r == references.size() ||
                (c < canaries.size() && canaries[c] < references[r])
            ? canaries[c]
            : references[r];
    roc.push_back(MakeResult(value, static_cast<int64_t>(c),
                             static_cast<int64_t>(r), m, n));
    while (c < canaries.size() && canaries[c] == value) ++c;
    while (r < references.size() && references[r] == value) ++r;
  }
  roc.push_back(MakeResult(kInfinity, m, n, m, n));
  return roc;
}

absl::StatusOr<MIResult> TprAtFpr(absl::Span<const MIResult> roc,
                                  double target_fpr) {
  if (!(target_fpr >= 0.0 && target_fpr <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("target FPR must lie in [0, 1], got ", target_fpr));
  }
  if (roc.empty()) {
    return absl::InvalidArgumentError("empty ROC sweep");
  }
  const MIResult* best = nullptr;
  for (const MIResult& point : roc) {
    if (point.fpr > target_fpr) continue;
    if (best == nullptr || point.canary_hits > best->canary_hits ||
        (point.canary_hits == best->canary_hits &&
         point.reference_hits < best->reference_hits)) {
      best = &point;
    }
  }
  if (best == nullptr) {
    return absl::InvalidArgumentError("ROC sweep has no point with FPR 0");
  }
  return *best;
}

absl::StatusOr<MIResult> TprAtFpr(const AuditDataset& dataset,
                                  double target_fpr) {
  return TprAtFpr(Roc(dataset), target_fpr);
}

std::string RocToCsv(absl::Span<const MIResult> roc) {
  std::string out = "threshold,fpr,tpr\n";
  for (const MIResult& point : roc) {
    absl::StrAppend(&out, Shortest(point.threshold), ",", Shortest(point.fpr),
                    ",", Shortest(point.tpr), "\n");
  }
  return out;
}

}  // namespace canary_audit

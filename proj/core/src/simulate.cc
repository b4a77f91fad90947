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

#include "canary_audit/simulate.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "absl/strings/str_cat.h"
#include "canary_audit/random.h"

namespace canary_audit {
namespace {

constexpr uint64_t kReferenceStream = 0;
constexpr uint64_t kCanaryStream = 1;

}  // namespace

absl::Status ValidateModel(const GaussianShiftModel& model) {
  if (!(std::isfinite(model.mu) && model.mu >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("mu must be finite and >= 0, got ", model.mu));
  }
  if (!(std::isfinite(model.sigma) && model.sigma > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma must be finite and > 0, got ", model.sigma));
  }
  if (model.m < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("m >= 1 required, got ", model.m));
  }
  if (model.n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n >= 1 required, got ", model.n));
  }
  return absl::OkStatus();
}

absl::StatusOr<AuditDataset> Simulate(const GaussianShiftModel& model) {
  if (absl::Status status = ValidateModel(model); !status.ok()) return status;
  const uint64_t canary_key = DeriveStreamKey(model.seed, kCanaryStream);
  const uint64_t reference_key = DeriveStreamKey(model.seed, kReferenceStream);

  std::vector<LossRecord> canaries(static_cast<size_t>(model.m));
  for (size_t i = 0; i < canaries.size(); ++i) {
    canaries[i].role = Role::kCanary;
    canaries[i].loss = -model.mu + model.sigma * CounterNormal(canary_key, i);
  }
  std::vector<LossRecord> references(static_cast<size_t>(model.n));
  for (size_t i = 0; i < references.size(); ++i) {
    references[i].role = Role::kReference;
    references[i].loss = model.sigma * CounterNormal(reference_key, i);
  }
  return AuditDataset::Create(std::move(canaries), std::move(references));
}

double StandardNormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

absl::StatusOr<AnalyticOperatingPoint> AnalyticOperatingPointAt(
    const GaussianShiftModel& model, double threshold) {
  if (absl::Status status = ValidateModel(model); !status.ok()) return status;
  if (std::isnan(threshold)) {
    return absl::InvalidArgumentError("threshold is NaN");
  }
  return AnalyticOperatingPoint{
      StandardNormalCdf((threshold + model.mu) / model.sigma),
      StandardNormalCdf(threshold / model.sigma)};
}

}  // namespace canary_audit

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

#ifndef CANARY_AUDIT_SIMULATE_H_
#define CANARY_AUDIT_SIMULATE_H_

#include <cstdint>
#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "canary_audit/ingest.h"

namespace canary_audit {

// Synthetic losses with a known answer: references ~ N(0, sigma^2) and
// canaries ~ N(-mu, sigma^2). mu = 0 is the no-memorization regime.
struct GaussianShiftModel {
  double mu = 0.0;
  double sigma = 1.0;
  int64_t m = 1000;
  int64_t n = 1000;
  uint64_t seed = 0;
};

absl::Status ValidateModel(const GaussianShiftModel& model);

// Sample i of each role is a pure function of (seed, role, i).
absl::StatusOr<AuditDataset> Simulate(const GaussianShiftModel& model);

double StandardNormalCdf(double x);

struct AnalyticOperatingPoint {
  double tpr = 0.0;
  double fpr = 0.0;
};

// Population TPR and FPR of the loss-threshold attack:
// tpr = Phi((threshold + mu) / sigma), fpr = Phi(threshold / sigma).
absl::StatusOr<AnalyticOperatingPoint> AnalyticOperatingPointAt(
    const GaussianShiftModel& model, double threshold);

}  // namespace canary_audit

#endif  // CANARY_AUDIT_SIMULATE_H_

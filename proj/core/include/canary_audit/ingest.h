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

#ifndef CANARY_AUDIT_INGEST_H_
#define CANARY_AUDIT_INGEST_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace canary_audit {

enum class Role { kCanary, kReference };

absl::string_view RoleName(Role role);

// One example's loss. Lower loss means the example is more probable under the
// model; losses are only ever compared, so the unit does not matter.
struct LossRecord {
  Role role = Role::kCanary;
  double loss = 0.0;
  std::optional<std::string> id;
  // How many times the canary was duplicated in training. Always 1 for
  // references.
  int64_t replications = 1;

  friend bool operator==(const LossRecord&, const LossRecord&) = default;
};

// Validated collection of m >= 1 canaries and n >= 1 references. All canaries
// share one replication count. Input order is preserved within each role.
class AuditDataset {
 public:
  static absl::StatusOr<AuditDataset> Create(std::vector<LossRecord> canaries,
                                             std::vector<LossRecord> references);

  const std::vector<LossRecord>& canaries() const { return canaries_; }
  const std::vector<LossRecord>& references() const { return references_; }
  int64_t m() const { return static_cast<int64_t>(canaries_.size()); }
  int64_t n() const { return static_cast<int64_t>(references_.size()); }
  int64_t replications() const { return canaries_.front().replications; }

  std::vector<double> CanaryLosses() const;
  std::vector<double> ReferenceLosses() const;

  friend bool operator==(const AuditDataset&, const AuditDataset&) = default;

 private:
  AuditDataset(std::vector<LossRecord> canaries,
               std::vector<LossRecord> references)
      : canaries_(std::move(canaries)), references_(std::move(references)) {}

  std::vector<LossRecord> canaries_;
  std::vector<LossRecord> references_;
};

enum class DataFormat { kCsv, kJsonl };

absl::StatusOr<DataFormat> ParseDataFormat(absl::string_view name);
absl::string_view DataFormatName(DataFormat format);

// Parses a loss file.
//
// CSV: a header row `role,loss[,id][,replications]` followed by one record per
// row. Columns are not quoted. The role token is case-insensitive.
// JSONL: one object per line with keys `role`, `loss`, and optionally `id`
// and `replications`.
//
// Blank lines are ignored in both formats. An empty id is treated as absent.
// Unknown columns or keys are rejected. Errors name the 1-based line.
absl::StatusOr<AuditDataset> ParseDataset(absl::string_view raw,
                                          DataFormat format);

// Writes canaries first, then references. Losses are printed in their
// shortest round-trip form so parsing the output reproduces the dataset
// bit for bit. CSV output fails for ids that contain a comma or newline.
absl::StatusOr<std::string> SerializeDataset(const AuditDataset& dataset,
                                             DataFormat format);

absl::StatusOr<AuditDataset> ReadDatasetFile(const std::string& path,
                                             DataFormat format);

// Picks the format from the file extension: `.jsonl`/`.ndjson` are JSONL,
// everything else is CSV.
DataFormat InferDataFormat(absl::string_view path);

struct RoleSummary {
  int64_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;

  friend bool operator==(const RoleSummary&, const RoleSummary&) = default;
};

struct DatasetSummary {
  int64_t m = 0;
  int64_t n = 0;
  int64_t replications = 1;
  RoleSummary canary;
  RoleSummary reference;

  friend bool operator==(const DatasetSummary&,
                         const DatasetSummary&) = default;
};

DatasetSummary SummarizeDataset(const AuditDataset& dataset);

}  // namespace canary_audit

#endif  // CANARY_AUDIT_INGEST_H_

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

#ifndef CANARY_AUDIT_REPORT_H_
#define CANARY_AUDIT_REPORT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "canary_audit/audit.h"
#include "canary_audit/baseline.h"
#include "canary_audit/exposure.h"

namespace canary_audit {

inline constexpr int kReportSchemaVersion = 1;

absl::string_view ToolVersion();

// Bins [edges[i], edges[i + 1]); the last bin also holds its right edge.
struct Histogram {
  std::vector<double> edges;
  std::vector<int64_t> counts;

  friend bool operator==(const Histogram&, const Histogram&) = default;
};

// Histogram of per-canary exposures over the full exposure range
// [log2(n) - log2(n + 1), log2(n)]. With bins == 0 the bins are 0.5 bits wide
// starting at the lower end; otherwise `bins` equal-width bins.
absl::StatusOr<Histogram> ExposureHistogram(const ExposureReport& report,
                                            int64_t bins = 0);

struct AuditReportDocument {
  int schema_version = kReportSchemaVersion;
  std::string tool_version;
  AuditResult result;
  Histogram histogram;

  friend bool operator==(const AuditReportDocument&,
                         const AuditReportDocument&) = default;
};

absl::StatusOr<AuditReportDocument> BuildReport(const AuditResult& result,
                                                int64_t histogram_bins = 0);

// Doubles are written in shortest round-trip form, so ReportFromJson
// reproduces the document exactly. Non-finite values are written as the
// strings "inf", "-inf" and "nan".
std::string ReportToJson(const AuditReportDocument& doc);
absl::StatusOr<AuditReportDocument> ReportFromJson(absl::string_view json);

// Human-readable rendering. Every number is printed with the same formatter
// as the JSON report.
std::string ReportToMarkdown(const AuditReportDocument& doc);

// Per-canary rows: canary_index,rank,exposure,empirical_fpr.
std::string ReportToCsv(const AuditReportDocument& doc);

// The text ReportToJson uses for a number.
std::string FormatNumber(double value);

std::string BaselineSummaryToText(const BaselineSummary& summary);
std::string BaselineSummaryToJson(const BaselineSummary& summary);

}  // namespace canary_audit

#endif  // CANARY_AUDIT_REPORT_H_

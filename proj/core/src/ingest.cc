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

#include "canary_audit/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "json.hpp"

namespace canary_audit {
namespace {

using Json = nlohmann::json;

absl::Status LineError(int64_t line, absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat("line ", line, ": ", message));
}

absl::StatusOr<Role> ParseRole(absl::string_view token) {
  const std::string lowered = absl::AsciiStrToLower(token);
  if (lowered == "canary") return Role::kCanary;
  if (lowered == "reference") return Role::kReference;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown role '", token, "'"));
}

absl::StatusOr<double> ParseLoss(absl::string_view token) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec == std::errc::invalid_argument || ptr != end) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed loss '", token, "'"));
  }
  if (ec == std::errc::result_out_of_range || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat("non-finite loss '", token, "'"));
  }
  return value;
}

absl::StatusOr<int64_t> ParseReplications(absl::string_view token) {
  int64_t value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed replications '", token, "'"));
  }
  return value;
}

absl::Status CheckRecord(const LossRecord& record) {
  if (!std::isfinite(record.loss)) {
    return absl::InvalidArgumentError(
        absl::StrCat("non-finite loss ", record.loss));
  }
  if (record.replications < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "replications must be >= 1, got ", record.replications));
  }
  if (record.role == Role::kReference && record.replications != 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "references must have replications = 1, got ", record.replications));
  }
  return absl::OkStatus();
}

// Accumulates records while parsing and checks the cross-record invariants
// at the line where they first break.
class DatasetBuilder {
 public:
  absl::Status Add(LossRecord record, int64_t line) {
    if (absl::Status status = CheckRecord(record); !status.ok()) {
      return LineError(line, status.message());
    }
    if (record.role == Role::kCanary) {
      if (!canaries_.empty() &&
          canaries_.front().replications != record.replications) {
        return LineError(
            line, absl::StrCat("mixed replication counts: ",
                               canaries_.front().replications, " and ",
                               record.replications));
      }
      canaries_.push_back(std::move(record));
    } else {
      references_.push_back(std::move(record));
    }
    return absl::OkStatus();
  }

  absl::StatusOr<AuditDataset> Finish() && {
    return AuditDataset::Create(std::move(canaries_), std::move(references_));
  }

 private:
  std::vector<LossRecord> canaries_;
  std::vector<LossRecord> references_;
};

// Splits into lines, dropping a trailing '\r'. Line numbers are 1-based.
std::vector<absl::string_view> SplitLines(absl::string_view raw) {
  std::vector<absl::string_view> lines = absl::StrSplit(raw, '\n');
  for (absl::string_view& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  return lines;
}

enum class Column { kRole, kLoss, kId, kReplications };

absl::StatusOr<std::vector<Column>> ParseCsvHeader(absl::string_view line,
                                                   int64_t line_number) {
  std::vector<absl::string_view> names = absl::StrSplit(line, ',');
  for (absl::string_view& name : names) name = absl::StripAsciiWhitespace(name);
  if (names.size() < 2 || names[0] != "role" || names[1] != "loss") {
    return LineError(line_number,
                     "header must start with 'role,loss', got '" +
                         std::string(line) + "'");
  }
  std::vector<Column> columns = {Column::kRole, Column::kLoss};
  size_t i = 2;
  if (i < names.size() && names[i] == "id") {
    columns.push_back(Column::kId);
    ++i;
  }
  if (i < names.size() && names[i] == "replications") {
    columns.push_back(Column::kReplications);
    ++i;
  }
  if (i < names.size()) {
    return LineError(line_number,
                     absl::StrCat("unknown or misplaced column '", names[i],
                                  "'; expected role,loss[,id][,replications]"));
  }
  return columns;
}

absl::StatusOr<AuditDataset> ParseCsv(absl::string_view raw) {
  const std::vector<absl::string_view> lines = SplitLines(raw);
  std::vector<Column> columns;
  DatasetBuilder builder;
  for (size_t i = 0; i < lines.size(); ++i) {
    const int64_t line_number = static_cast<int64_t>(i) + 1;
    const absl::string_view line = lines[i];
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    if (columns.empty()) {
      absl::StatusOr<std::vector<Column>> header =
          ParseCsvHeader(line, line_number);
      if (!header.ok()) return header.status();
      columns = *std::move(header);
      continue;
    }
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    if (fields.size() != columns.size()) {
      return LineError(line_number,
                       absl::StrCat("malformed row: expected ", columns.size(),
                                    " fields, got ", fields.size()));
    }
    LossRecord record;
    for (size_t c = 0; c < columns.size(); ++c) {
      const absl::string_view field = absl::StripAsciiWhitespace(fields[c]);
      switch (columns[c]) {
        case Column::kRole: {
          absl::StatusOr<Role> role = ParseRole(field);
          if (!role.ok()) return LineError(line_number, role.status().message());
          record.role = *role;
          break;
        }
        case Column::kLoss: {
          absl::StatusOr<double> loss = ParseLoss(field);
          if (!loss.ok()) return LineError(line_number, loss.status().message());
          record.loss = *loss;
          break;
        }
        case Column::kId:
          if (!field.empty()) record.id = std::string(field);
          break;
        case Column::kReplications:
          if (!field.empty()) {
            absl::StatusOr<int64_t> replications = ParseReplications(field);
            if (!replications.ok()) {
              return LineError(line_number, replications.status().message());
            }
            record.replications = *replications;
          }
          break;
      }
    }
    if (absl::Status status = builder.Add(std::move(record), line_number);
        !status.ok()) {
      return status;
    }
  }
  if (columns.empty()) {
    return absl::InvalidArgumentError("missing CSV header");
  }
  return std::move(builder).Finish();
}

absl::StatusOr<LossRecord> JsonToRecord(const Json& object) {
  if (!object.is_object()) {
    return absl::InvalidArgumentError("expected a JSON object");
  }
  LossRecord record;
  bool has_role = false;
  bool has_loss = false;
  for (const auto& [key, value] : object.items()) {
    if (key == "role") {
      if (!value.is_string()) {
        return absl::InvalidArgumentError("'role' must be a string");
      }
      absl::StatusOr<Role> role = ParseRole(value.get<std::string>());
      if (!role.ok()) return role.status();
      record.role = *role;
      has_role = true;
    } else if (key == "loss") {
      if (!value.is_number()) {
        return absl::InvalidArgumentError("'loss' must be a number");
      }
      record.loss = value.get<double>();
      if (!std::isfinite(record.loss)) {
        return absl::InvalidArgumentError("non-finite loss");
      }
      has_loss = true;
    } else if (key == "id") {
      if (!value.is_string()) {
        return absl::InvalidArgumentError("'id' must be a string");
      }
      std::string id = value.get<std::string>();
      if (!id.empty()) record.id = std::move(id);
    } else if (key == "replications") {
      if (value.is_number_unsigned()) {
        const uint64_t count = value.get<uint64_t>();
        if (count > static_cast<uint64_t>(
                        std::numeric_limits<int64_t>::max())) {
          return absl::InvalidArgumentError("'replications' is too large");
        }
        record.replications = static_cast<int64_t>(count);
      } else if (value.is_number_integer()) {
        record.replications = value.get<int64_t>();
      } else {
        return absl::InvalidArgumentError("'replications' must be an integer");
      }
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown key '", key, "'"));
    }
  }
  if (!has_role) return absl::InvalidArgumentError("missing key 'role'");
  if (!has_loss) return absl::InvalidArgumentError("missing key 'loss'");
  return record;
}

absl::StatusOr<AuditDataset> ParseJsonl(absl::string_view raw) {
  const std::vector<absl::string_view> lines = SplitLines(raw);
  DatasetBuilder builder;
  for (size_t i = 0; i < lines.size(); ++i) {
    const int64_t line_number = static_cast<int64_t>(i) + 1;
    const absl::string_view line = lines[i];
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    const Json object = Json::parse(line, /*cb=*/nullptr,
                                    /*allow_exceptions=*/false);
    if (object.is_discarded()) {
      return LineError(line_number, "malformed row: invalid JSON");
    }
    absl::StatusOr<LossRecord> record = JsonToRecord(object);
    if (!record.ok()) return LineError(line_number, record.status().message());
    if (absl::Status status = builder.Add(*std::move(record), line_number);
        !status.ok()) {
      return status;
    }
  }
  return std::move(builder).Finish();
}

std::string ShortestDouble(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

absl::StatusOr<std::string> ToCsv(const AuditDataset& dataset) {
  std::string out = "role,loss,id,replications\n";
  for (const auto* records : {&dataset.canaries(), &dataset.references()}) {
    for (const LossRecord& record : *records) {
      const std::string id = record.id.value_or("");
      if (id.find_first_of(",\r\n") != std::string::npos) {
        return absl::InvalidArgumentError(absl::StrCat(
            "id '", id, "' cannot be written as CSV; use JSONL"));
      }
      if (id != absl::StripAsciiWhitespace(id)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "id '", id, "' has surrounding whitespace; use JSONL"));
      }
      absl::StrAppend(&out, RoleName(record.role), ",",
                      ShortestDouble(record.loss), ",", id, ",",
                      record.replications, "\n");
    }
  }
  return out;
}

std::string ToJsonl(const AuditDataset& dataset) {
  std::string out;
  for (const auto* records : {&dataset.canaries(), &dataset.references()}) {
    for (const LossRecord& record : *records) {
      absl::StrAppend(&out, "{\"role\":\"", RoleName(record.role),
                      "\",\"loss\":", ShortestDouble(record.loss));
      if (record.id.has_value()) {
        absl::StrAppend(&out, ",\"id\":", Json(*record.id).dump());
      }
      if (record.role == Role::kCanary) {
        absl::StrAppend(&out, ",\"replications\":", record.replications);
      }
      out += "}\n";
    }
  }
  return out;
}

RoleSummary Summarize(const std::vector<LossRecord>& records) {
  RoleSummary summary;
  summary.count = static_cast<int64_t>(records.size());
  summary.min = records.front().loss;
  summary.max = records.front().loss;
  double sum = 0.0;
  for (const LossRecord& record : records) {
    summary.min = std::min(summary.min, record.loss);
    summary.max = std::max(summary.max, record.loss);
    sum += record.loss;
  }
  summary.mean = sum / static_cast<double>(records.size());
  return summary;
}

std::vector<double> Losses(const std::vector<LossRecord>& records) {
  std::vector<double> losses;
  losses.reserve(records.size());
  for (const LossRecord& record : records) losses.push_back(record.loss);
  return losses;
}

}  // namespace

absl::string_view RoleName(Role role) {
  return role == Role::kCanary ? "canary" : "reference";
}

absl::StatusOr<AuditDataset> AuditDataset::Create(
    std::vector<LossRecord> canaries, std::vector<LossRecord> references) {
  if (canaries.empty()) {
    return absl::InvalidArgumentError("dataset has no canaries");
  }
  if (references.empty()) {
    return absl::InvalidArgumentError("dataset has no references");
  }
  for (const auto* records : {&canaries, &references}) {
    const Role expected =
        records == &canaries ? Role::kCanary : Role::kReference;
    for (size_t i = 0; i < records->size(); ++i) {
      const LossRecord& record = (*records)[i];
      if (record.role != expected) {
        return absl::InvalidArgumentError(absl::StrCat(
            RoleName(expected), " ", i, " has role ", RoleName(record.role)));
      }
      if (absl::Status status = CheckRecord(record); !status.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            RoleName(expected), " ", i, ": ", status.message()));
      }
    }
  }
  for (const LossRecord& canary : canaries) {
    if (canary.replications != canaries.front().replications) {
      return absl::InvalidArgumentError(
          absl::StrCat("mixed replication counts: ",
                       canaries.front().replications, " and ",
                       canary.replications));
    }
  }
  return AuditDataset(std::move(canaries), std::move(references));
}

std::vector<double> AuditDataset::CanaryLosses() const {
  return Losses(canaries_);
}

std::vector<double> AuditDataset::ReferenceLosses() const {
  return Losses(references_);
}

absl::StatusOr<DataFormat> ParseDataFormat(absl::string_view name) {
  const std::string lowered = absl::AsciiStrToLower(name);
  if (lowered == "csv") return DataFormat::kCsv;
  if (lowered == "jsonl") return DataFormat::kJsonl;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown format '", name, "'; expected csv or jsonl"));
}

absl::string_view DataFormatName(DataFormat format) {
  return format == DataFormat::kCsv ? "csv" : "jsonl";
}

DataFormat InferDataFormat(absl::string_view path) {
  const std::string lowered = absl::AsciiStrToLower(path);
  return absl::EndsWith(lowered, ".jsonl") || absl::EndsWith(lowered, ".ndjson")
             ? DataFormat::kJsonl
             : DataFormat::kCsv;
}

absl::StatusOr<AuditDataset> ParseDataset(absl::string_view raw,
                                          DataFormat format) {
  switch (format) {
    case DataFormat::kCsv:
      return ParseCsv(raw);
    case DataFormat::kJsonl:
      return ParseJsonl(raw);
  }
  return absl::InvalidArgumentError("unknown format");
}

absl::StatusOr<std::string> SerializeDataset(const AuditDataset& dataset,
                                             DataFormat format) {
  if (format == DataFormat::kCsv) return ToCsv(dataset);
  return ToJsonl(dataset);
}

absl::StatusOr<AuditDataset> ReadDatasetFile(const std::string& path,
                                             DataFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  }
  std::ostringstream contents;
  contents << in.rdbuf();
  absl::StatusOr<AuditDataset> dataset = ParseDataset(contents.str(), format);
  if (!dataset.ok()) {
    return absl::Status(dataset.status().code(),
                        absl::StrCat(path, ": ", dataset.status().message()));
  }
  return dataset;
}

DatasetSummary SummarizeDataset(const AuditDataset& dataset) {
  DatasetSummary summary;
  summary.m = dataset.m();
  summary.n = dataset.n();
  summary.replications = dataset.replications();
  summary.canary = Summarize(dataset.canaries());
  summary.reference = Summarize(dataset.references());
  return summary;
}

}  // namespace canary_audit

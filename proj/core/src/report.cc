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

#include "canary_audit/report.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "json.hpp"

#ifndef CANARY_AUDIT_VERSION
#define CANARY_AUDIT_VERSION "0.0.0"
#endif

namespace canary_audit {
namespace {

using Json = nlohmann::json;

constexpr size_t kMarkdownTopCanaries = 10;

Json Number(double value) {
  if (std::isfinite(value)) return value;
  if (std::isnan(value)) return "nan";
  return value > 0 ? "inf" : "-inf";
}

double ReadNumber(const Json& value) {
  if (value.is_number()) return value.get<double>();
  const std::string text = value.get<std::string>();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw std::invalid_argument("expected a number, got '" + text + "'");
}

Json OptionalNumber(const std::optional<double>& value) {
  return value.has_value() ? Number(*value) : Json(nullptr);
}

std::optional<double> ReadOptionalNumber(const Json& value) {
  if (value.is_null()) return std::nullopt;
  return ReadNumber(value);
}

template <typename T>
T Unwrap(absl::StatusOr<T> value) {
  if (!value.ok()) throw std::invalid_argument(std::string(value.status().message()));
  return *std::move(value);
}

Json RoleSummaryToJson(const RoleSummary& summary) {
  return {{"count", summary.count},
          {"min", Number(summary.min)},
          {"max", Number(summary.max)},
          {"mean", Number(summary.mean)}};
}

RoleSummary RoleSummaryFromJson(const Json& j) {
  RoleSummary summary;
  summary.count = j.at("count").get<int64_t>();
  summary.min = ReadNumber(j.at("min"));
  summary.max = ReadNumber(j.at("max"));
  summary.mean = ReadNumber(j.at("mean"));
  return summary;
}

Json StatisticToJson(const ExposureStatistic& statistic) {
  return ExposureStatisticName(statistic);
}

Json MIResultToJson(const MIResult& attack) {
  return {{"threshold", Number(attack.threshold)},
          {"tpr", Number(attack.tpr)},
          {"fpr", Number(attack.fpr)},
          {"canary_hits", attack.canary_hits},
          {"reference_hits", attack.reference_hits},
          {"m", attack.m},
          {"n", attack.n}};
}

MIResult MIResultFromJson(const Json& j) {
  MIResult attack;
  attack.threshold = ReadNumber(j.at("threshold"));
  attack.tpr = ReadNumber(j.at("tpr"));
  attack.fpr = ReadNumber(j.at("fpr"));
  attack.canary_hits = j.at("canary_hits").get<int64_t>();
  attack.reference_hits = j.at("reference_hits").get<int64_t>();
  attack.m = j.at("m").get<int64_t>();
  attack.n = j.at("n").get<int64_t>();
  return attack;
}

Json BoundToJson(const EpsilonBound& bound) {
  return {{"point_estimate", Number(bound.point_estimate)},
          {"confident_lower_bound", Number(bound.confident_lower_bound)},
          {"confidence", Number(bound.confidence)},
          {"alpha_split",
           {Number(bound.alpha_split.first), Number(bound.alpha_split.second)}},
          {"tpr_lower", Number(bound.tpr_lower)},
          {"fpr_upper", Number(bound.fpr_upper)},
          {"source", BoundSourceName(bound.source)},
          {"tie_policy", TiePolicyName(bound.tie_policy)},
          {"replications", bound.replications},
          {"per_example", bound.per_example}};
}

EpsilonBound BoundFromJson(const Json& j) {
  EpsilonBound bound;
  bound.point_estimate = ReadNumber(j.at("point_estimate"));
  bound.confident_lower_bound = ReadNumber(j.at("confident_lower_bound"));
  bound.confidence = ReadNumber(j.at("confidence"));
  bound.alpha_split = {ReadNumber(j.at("alpha_split").at(0)),
                       ReadNumber(j.at("alpha_split").at(1))};
  bound.tpr_lower = ReadNumber(j.at("tpr_lower"));
  bound.fpr_upper = ReadNumber(j.at("fpr_upper"));
  bound.source = Unwrap(ParseBoundSource(j.at("source").get<std::string>()));
  bound.tie_policy =
      Unwrap(ParseTiePolicy(j.at("tie_policy").get<std::string>()));
  bound.replications = j.at("replications").get<int64_t>();
  bound.per_example = j.at("per_example").get<bool>();
  return bound;
}

Json OperatingPointToJson(const OperatingPoint& point) {
  if (point.kind == OperatingPoint::Kind::kMedian) {
    return {{"kind", "median"}};
  }
  return {{"kind", "fpr_target"}, {"fpr_target", Number(point.fpr_target)}};
}

OperatingPoint OperatingPointFromJson(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "median") return OperatingPoint::Median();
  if (kind == "fpr_target") {
    return OperatingPoint::FprTarget(ReadNumber(j.at("fpr_target")));
  }
  throw std::invalid_argument("unknown operating point kind '" + kind + "'");
}

Json ToJsonValue(const AuditReportDocument& doc) {
  const AuditResult& result = doc.result;
  Json dataset = {{"m", result.summary.m},
                  {"n", result.summary.n},
                  {"replications", result.summary.replications},
                  {"canary", RoleSummaryToJson(result.summary.canary)},
                  {"reference", RoleSummaryToJson(result.summary.reference)}};

  Json quantiles = Json::array();
  for (const auto& [q, value] : result.exposure.quantile_exposures) {
    quantiles.push_back({{"q", Number(q)}, {"exposure", Number(value)}});
  }
  Json per_canary = Json::array();
  for (const ExposureResult& row : result.exposure.per_canary) {
    per_canary.push_back({{"canary_index", row.canary_index},
                          {"rank", row.rank},
                          {"exposure", Number(row.exposure)},
                          {"empirical_fpr", Number(row.empirical_fpr)}});
  }
  Json exposure = {{"m", result.exposure.m},
                   {"n", result.exposure.n},
                   {"tie_policy", TiePolicyName(result.exposure.tie_policy)},
                   {"mean_exposure", Number(result.exposure.mean_exposure)},
                   {"quantiles", std::move(quantiles)},
                   {"per_canary", std::move(per_canary)}};

  Json baselines = Json::array();
  for (const BaselineComparison& comparison : result.baselines) {
    baselines.push_back({{"statistic", StatisticToJson(comparison.statistic)},
                         {"observed", Number(comparison.observed)},
                         {"exact", OptionalNumber(comparison.exact)},
                         {"asymptotic", Number(comparison.asymptotic)},
                         {"mc_mean", OptionalNumber(comparison.mc_mean)},
                         {"mc_std", OptionalNumber(comparison.mc_std)}});
  }

  Json bounds = Json::array();
  for (const OperatingPointResult& entry : result.bounds) {
    bounds.push_back(
        {{"operating_point", OperatingPointToJson(entry.operating_point)},
         {"label", OperatingPointName(entry.operating_point)},
         {"attack", MIResultToJson(entry.attack)},
         {"raw", BoundToJson(entry.raw)},
         {"per_example", BoundToJson(entry.per_example)},
         {"exposure_epsilon", OptionalNumber(entry.exposure_epsilon)},
         {"target_unachievable", entry.target_unachievable}});
  }

  Json edges = Json::array();
  for (double edge : doc.histogram.edges) edges.push_back(Number(edge));

  return {{"schema_version", doc.schema_version},
          {"tool_version", doc.tool_version},
          {"dataset", std::move(dataset)},
          {"exposure", std::move(exposure)},
          {"baselines", std::move(baselines)},
          {"epsilon_bounds", std::move(bounds)},
          {"assumptions", {{"independence", "heuristic"}}},
          {"warnings", result.warnings},
          {"histogram",
           {{"edges", std::move(edges)}, {"counts", doc.histogram.counts}}}};
}

AuditReportDocument FromJsonValue(const Json& j) {
  AuditReportDocument doc;
  doc.schema_version = j.at("schema_version").get<int>();
  if (doc.schema_version != kReportSchemaVersion) {
    throw std::invalid_argument(
        absl::StrCat("unsupported schema_version ", doc.schema_version));
  }
  doc.tool_version = j.at("tool_version").get<std::string>();
  AuditResult& result = doc.result;

  const Json& dataset = j.at("dataset");
  result.summary.m = dataset.at("m").get<int64_t>();
  result.summary.n = dataset.at("n").get<int64_t>();
  result.summary.replications = dataset.at("replications").get<int64_t>();
  result.summary.canary = RoleSummaryFromJson(dataset.at("canary"));
  result.summary.reference = RoleSummaryFromJson(dataset.at("reference"));

  const Json& exposure = j.at("exposure");
  result.exposure.m = exposure.at("m").get<int64_t>();
  result.exposure.n = exposure.at("n").get<int64_t>();
  result.exposure.tie_policy =
      Unwrap(ParseTiePolicy(exposure.at("tie_policy").get<std::string>()));
  result.exposure.mean_exposure = ReadNumber(exposure.at("mean_exposure"));
  for (const Json& q : exposure.at("quantiles")) {
    result.exposure.quantile_exposures[ReadNumber(q.at("q"))] =
        ReadNumber(q.at("exposure"));
  }
  for (const Json& row : exposure.at("per_canary")) {
    ExposureResult parsed;
    parsed.canary_index = row.at("canary_index").get<int64_t>();
    parsed.rank = row.at("rank").get<int64_t>();
    parsed.exposure = ReadNumber(row.at("exposure"));
    parsed.empirical_fpr = ReadNumber(row.at("empirical_fpr"));
    result.exposure.per_canary.push_back(parsed);
  }

  for (const Json& b : j.at("baselines")) {
    BaselineComparison comparison;
    comparison.statistic =
        Unwrap(ParseExposureStatistic(b.at("statistic").get<std::string>()));
    comparison.observed = ReadNumber(b.at("observed"));
    comparison.exact = ReadOptionalNumber(b.at("exact"));
    comparison.asymptotic = ReadNumber(b.at("asymptotic"));
    comparison.mc_mean = ReadOptionalNumber(b.at("mc_mean"));
    comparison.mc_std = ReadOptionalNumber(b.at("mc_std"));
    result.baselines.push_back(comparison);
  }

  for (const Json& e : j.at("epsilon_bounds")) {
    OperatingPointResult entry;
    entry.operating_point = OperatingPointFromJson(e.at("operating_point"));
    entry.attack = MIResultFromJson(e.at("attack"));
    entry.raw = BoundFromJson(e.at("raw"));
    entry.per_example = BoundFromJson(e.at("per_example"));
    entry.exposure_epsilon = ReadOptionalNumber(e.at("exposure_epsilon"));
    entry.target_unachievable = e.at("target_unachievable").get<bool>();
    result.bounds.push_back(entry);
  }

  result.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const Json& edge : j.at("histogram").at("edges")) {
    doc.histogram.edges.push_back(ReadNumber(edge));
  }
  doc.histogram.counts =
      j.at("histogram").at("counts").get<std::vector<int64_t>>();
  return doc;
}

// FormatNumber without JSON string quotes, for prose.
std::string Plain(double value) {
  if (std::isfinite(value)) return FormatNumber(value);
  if (std::isnan(value)) return "nan";
  return value > 0 ? "inf" : "-inf";
}

std::string PlainOptional(const std::optional<double>& value) {
  return value.has_value() ? Plain(*value) : "n/a";
}

}  // namespace

absl::string_view ToolVersion() { return CANARY_AUDIT_VERSION; }

std::string FormatNumber(double value) { return Number(value).dump(); }

absl::StatusOr<Histogram> ExposureHistogram(const ExposureReport& report,
                                            int64_t bins) {
  if (bins < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("histogram bins must be >= 0, got ", bins));
  }
  if (report.n < 1) {
    return absl::InvalidArgumentError("exposure report has no references");
  }
  const double lo = ExposureFromRank(report.n + 1, report.n);
  const double hi = ExposureFromRank(1, report.n);
  Histogram histogram;
  if (bins == 0) {
    constexpr double kWidth = 0.5;
    const int64_t count =
        std::max<int64_t>(1, static_cast<int64_t>(std::ceil((hi - lo) / kWidth)));
    for (int64_t k = 0; k <= count; ++k) {
      histogram.edges.push_back(lo + kWidth * static_cast<double>(k));
    }
  } else {
    for (int64_t k = 0; k < bins; ++k) {
      histogram.edges.push_back(lo + (hi - lo) * static_cast<double>(k) /
                                         static_cast<double>(bins));
    }
    histogram.edges.push_back(hi);
  }
  histogram.counts.assign(histogram.edges.size() - 1, 0);
  const auto last = static_cast<std::ptrdiff_t>(histogram.counts.size()) - 1;
  for (const ExposureResult& row : report.per_canary) {
    const auto position = std::upper_bound(histogram.edges.begin(),
                                           histogram.edges.end(), row.exposure);
    const std::ptrdiff_t bin =
        std::clamp<std::ptrdiff_t>(position - histogram.edges.begin() - 1, 0, last);
    ++histogram.counts[bin];
  }
  return histogram;
}

absl::StatusOr<AuditReportDocument> BuildReport(const AuditResult& result,
                                                int64_t histogram_bins) {
  absl::StatusOr<Histogram> histogram =
      ExposureHistogram(result.exposure, histogram_bins);
  if (!histogram.ok()) return histogram.status();
  AuditReportDocument doc;
  doc.tool_version = std::string(ToolVersion());
  doc.result = result;
  doc.histogram = *std::move(histogram);
  return doc;
}

std::string ReportToJson(const AuditReportDocument& doc) {
  return ToJsonValue(doc).dump(2) + "\n";
}

absl::StatusOr<AuditReportDocument> ReportFromJson(absl::string_view json) {
  const Json value = Json::parse(json, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) {
    return absl::InvalidArgumentError("report is not valid JSON");
  }
  try {
    return FromJsonValue(value);
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed report: ", e.what()));
  }
}

std::string ReportToMarkdown(const AuditReportDocument& doc) {
  const AuditResult& result = doc.result;
  std::string out;
  absl::StrAppend(&out, "# Canary exposure audit\n\n",
                  "Tool version ", doc.tool_version, ", report schema ",
                  doc.schema_version, ".\n\n");

  absl::StrAppend(&out, "## Dataset\n\n",
                  "| role | count | min loss | max loss | mean loss |\n",
                  "|---|---|---|---|---|\n");
  for (const auto& [name, summary] :
       {std::pair{"canary", &result.summary.canary},
        std::pair{"reference", &result.summary.reference}}) {
    absl::StrAppend(&out, "| ", name, " | ", summary->count, " | ",
                    Plain(summary->min), " | ", Plain(summary->max), " | ",
                    Plain(summary->mean), " |\n");
  }
  absl::StrAppend(&out, "\nCanary replications: ", result.summary.replications,
                  ". Tie policy: ", TiePolicyName(result.exposure.tie_policy),
                  ".\n\n");

  absl::StrAppend(&out, "## Exposure vs. random guessing\n\n",
                  "| statistic | observed | exact baseline | asymptotic "
                  "baseline | Monte Carlo mean | Monte Carlo std |\n",
                  "|---|---|---|---|---|---|\n");
  for (const BaselineComparison& comparison : result.baselines) {
    absl::StrAppend(&out, "| ", ExposureStatisticName(comparison.statistic),
                    " | ", Plain(comparison.observed), " | ",
                    PlainOptional(comparison.exact), " | ",
                    Plain(comparison.asymptotic), " | ",
                    PlainOptional(comparison.mc_mean), " | ",
                    PlainOptional(comparison.mc_std), " |\n");
  }

  absl::StrAppend(&out, "\n## Epsilon lower bounds\n\n",
                  "| operating point | threshold | TPR | FPR | TPR lower | "
                  "FPR upper | confidence | point estimate | confident bound "
                  "| per-example point | per-example bound | replications |\n",
                  "|---|---|---|---|---|---|---|---|---|---|---|---|\n");
  for (const OperatingPointResult& entry : result.bounds) {
    absl::StrAppend(
        &out, "| ", OperatingPointName(entry.operating_point), " | ",
        Plain(entry.attack.threshold), " | ", Plain(entry.attack.tpr), " | ",
        Plain(entry.attack.fpr), " | ", Plain(entry.raw.tpr_lower), " | ",
        Plain(entry.raw.fpr_upper), " | ", Plain(entry.raw.confidence), " | ",
        Plain(entry.raw.point_estimate), " | ",
        Plain(entry.raw.confident_lower_bound), " | ",
        Plain(entry.per_example.point_estimate), " | ",
        Plain(entry.per_example.confident_lower_bound), " | ",
        entry.raw.replications, " |\n");
  }
  for (const OperatingPointResult& entry : result.bounds) {
    if (entry.exposure_epsilon.has_value()) {
      absl::StrAppend(&out, "\nEpsilon implied by the median exposure: ",
                      Plain(*entry.exposure_epsilon), ".\n");
    }
  }

  std::vector<const ExposureResult*> top;
  for (const ExposureResult& row : result.exposure.per_canary) {
    top.push_back(&row);
  }
  const size_t shown = std::min(top.size(), kMarkdownTopCanaries);
  std::partial_sort(top.begin(), top.begin() + shown, top.end(),
                    [](const ExposureResult* a, const ExposureResult* b) {
                      return a->exposure > b->exposure ||
                             (a->exposure == b->exposure &&
                              a->canary_index < b->canary_index);
                    });
  absl::StrAppend(&out, "\n## Most exposed canaries\n\n",
                  "| canary | rank | exposure | empirical FPR |\n",
                  "|---|---|---|---|\n");
  for (size_t i = 0; i < shown; ++i) {
    absl::StrAppend(&out, "| ", top[i]->canary_index, " | ", top[i]->rank,
                    " | ", Plain(top[i]->exposure), " | ",
                    Plain(top[i]->empirical_fpr), " |\n");
  }

  absl::StrAppend(&out, "\n## Exposure histogram\n\n",
                  "| bin start | bin end | canaries |\n|---|---|---|\n");
  for (size_t i = 0; i < doc.histogram.counts.size(); ++i) {
    absl::StrAppend(&out, "| ", Plain(doc.histogram.edges[i]), " | ",
                    Plain(doc.histogram.edges[i + 1]), " | ",
                    doc.histogram.counts[i], " |\n");
  }

  if (!result.warnings.empty()) {
    absl::StrAppend(&out, "\n## Warnings\n\n");
    for (const std::string& warning : result.warnings) {
      absl::StrAppend(&out, "- ", warning, "\n");
    }
  }
  return out;
}

std::string ReportToCsv(const AuditReportDocument& doc) {
  std::string out = "canary_index,rank,exposure,empirical_fpr\n";
  for (const ExposureResult& row : doc.result.exposure.per_canary) {
    absl::StrAppend(&out, row.canary_index, ",", row.rank, ",",
                    Plain(row.exposure), ",", Plain(row.empirical_fpr), "\n");
  }
  return out;
}

std::string BaselineSummaryToText(const BaselineSummary& summary) {
  std::vector<std::string> quantiles;
  for (const auto& [q, value] : summary.mc_quantiles) {
    quantiles.push_back(absl::StrCat("q", Plain(q), "=", Plain(value)));
  }
  return absl::StrCat(
      "statistic:   ", ExposureStatisticName(summary.statistic), "\n",
      "m:           ", summary.m, "\n",
      "n:           ", summary.n, "\n",
      "trials:      ", summary.trials, "\n",
      "seed:        ", summary.seed, "\n",
      "exact:       ", PlainOptional(summary.exact_value), "\n",
      "asymptotic:  ", Plain(summary.asymptotic_value), "\n",
      "mc_mean:     ", Plain(summary.mc_mean), "\n",
      "mc_std:      ", Plain(summary.mc_std), "\n",
      "mc_quantiles: ", absl::StrJoin(quantiles, " "), "\n");
}

std::string BaselineSummaryToJson(const BaselineSummary& summary) {
  Json quantiles = Json::array();
  for (const auto& [q, value] : summary.mc_quantiles) {
    quantiles.push_back({{"q", Number(q)}, {"value", Number(value)}});
  }
  const Json j = {{"statistic", StatisticToJson(summary.statistic)},
                  {"m", summary.m},
                  {"n", summary.n},
                  {"trials", summary.trials},
                  {"seed", summary.seed},
                  {"exact", OptionalNumber(summary.exact_value)},
                  {"asymptotic", Number(summary.asymptotic_value)},
                  {"mc_mean", Number(summary.mc_mean)},
                  {"mc_std", Number(summary.mc_std)},
                  {"mc_quantiles", std::move(quantiles)}};
  return j.dump(2) + "\n";
}

}  // namespace canary_audit

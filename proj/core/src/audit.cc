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

#include "canary_audit/audit.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "boost/math/special_functions/beta.hpp"

namespace canary_audit {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kBisectionTolerance = 1e-13;
constexpr int kMaxBisectionSteps = 200;

bool InUnitInterval(double x) { return x >= 0.0 && x <= 1.0; }

// P[Bin(trials, p) >= k] for 1 <= k <= trials.
double UpperTail(int64_t k, int64_t trials, double p) {
  return boost::math::ibeta(static_cast<double>(k),
                            static_cast<double>(trials - k + 1), p);
}

// P[Bin(trials, p) <= k] for 0 <= k < trials.
double LowerTail(int64_t k, int64_t trials, double p) {
  return boost::math::ibetac(static_cast<double>(k + 1),
                             static_cast<double>(trials - k), p);
}

std::string Shortest(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace

absl::StatusOr<double> EpsilonPoint(double tpr, double fpr) {
  if (!InUnitInterval(tpr) || !InUnitInterval(fpr)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "tpr and fpr must lie in [0, 1], got tpr=", tpr, " fpr=", fpr));
  }
  if (fpr == 0.0) return tpr > 0.0 ? kInfinity : 0.0;
  return std::log(tpr / fpr);
}

double EpsilonFromMedianExposure(double median_exposure) {
  return std::numbers::ln2 * (median_exposure - 1.0);
}

absl::StatusOr<double> ClopperPearson(int64_t k, int64_t trials, double alpha,
                                      BoundSide side) {
  if (trials < 1 || k < 0 || k > trials) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need 0 <= k <= trials and trials >= 1, got k=", k,
        " trials=", trials));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in (0, 1), got ", alpha));
  }
  if (side == BoundSide::kLower && k == 0) return 0.0;
  if (side == BoundSide::kUpper && k == trials) return 1.0;

  // Lower: tail(lo) < alpha <= tail(hi). Upper: cdf(lo) >= alpha > cdf(hi).
  double lo = 0.0;
  double hi = 1.0;
  for (int step = 0; step < kMaxBisectionSteps && hi - lo > kBisectionTolerance;
       ++step) {
    const double mid = 0.5 * (lo + hi);
    const bool accepted = side == BoundSide::kLower
                              ? UpperTail(k, trials, mid) >= alpha
                              : LowerTail(k, trials, mid) < alpha;
    if (accepted) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return side == BoundSide::kLower ? lo : hi;
}

absl::string_view BoundSourceName(BoundSource source) {
  switch (source) {
    case BoundSource::kMedianExposure:
      return "median_exposure";
    case BoundSource::kThreshold:
      return "threshold";
    case BoundSource::kTprAtFpr:
      return "tpr_at_fpr";
  }
  return "threshold";
}

absl::StatusOr<BoundSource> ParseBoundSource(absl::string_view name) {
  for (BoundSource source :
       {BoundSource::kMedianExposure, BoundSource::kThreshold,
        BoundSource::kTprAtFpr}) {
    if (name == BoundSourceName(source)) return source;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown bound source '", name, "'"));
}

absl::StatusOr<EpsilonBound> EpsilonConfident(const AuditDataset& dataset,
                                              const MIResult& attack,
                                              double confidence,
                                              BoundSource source,
                                              TiePolicy tie_policy) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("confidence must lie in (0, 1), got ", confidence));
  }
  if (attack.m != dataset.m() || attack.n != dataset.n()) {
    return absl::InvalidArgumentError(
        "attack result was not computed on this dataset");
  }
  const double alpha = 1.0 - confidence;
  EpsilonBound bound;
  bound.confidence = confidence;
  bound.alpha_split = {alpha / 2.0, alpha / 2.0};
  bound.source = source;
  bound.tie_policy = tie_policy;
  bound.replications = dataset.replications();

  absl::StatusOr<double> point = EpsilonPoint(attack.tpr, attack.fpr);
  if (!point.ok()) return point.status();
  bound.point_estimate = *point;

  absl::StatusOr<double> tpr_lower = ClopperPearson(
      attack.canary_hits, attack.m, bound.alpha_split.first, BoundSide::kLower);
  if (!tpr_lower.ok()) return tpr_lower.status();
  absl::StatusOr<double> fpr_upper =
      ClopperPearson(attack.reference_hits, attack.n, bound.alpha_split.second,
                     BoundSide::kUpper);
  if (!fpr_upper.ok()) return fpr_upper.status();
  bound.tpr_lower = *tpr_lower;
  bound.fpr_upper = *fpr_upper;
  bound.confident_lower_bound =
      bound.tpr_lower > 0.0
          ? std::max(0.0, std::log(bound.tpr_lower / bound.fpr_upper))
          : 0.0;
  return bound;
}

absl::StatusOr<double> GroupPrivacyAdjust(double epsilon,
                                          int64_t replications) {
  if (replications < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("replications must be >= 1, got ", replications));
  }
  if (!(epsilon >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be >= 0, got ", epsilon));
  }
  return epsilon / static_cast<double>(replications);
}

absl::StatusOr<EpsilonBound> ToPerExample(const EpsilonBound& raw) {
  if (raw.per_example) {
    return absl::FailedPreconditionError(
        "group-privacy adjustment already applied");
  }
  absl::StatusOr<double> confident =
      GroupPrivacyAdjust(raw.confident_lower_bound, raw.replications);
  if (!confident.ok()) return confident.status();
  EpsilonBound adjusted = raw;
  // The point estimate may be negative, so it is divided directly.
  adjusted.point_estimate =
      raw.point_estimate / static_cast<double>(raw.replications);
  adjusted.confident_lower_bound = *confident;
  adjusted.per_example = true;
  return adjusted;
}

std::string OperatingPointName(const OperatingPoint& point) {
  if (point.kind == OperatingPoint::Kind::kMedian) return "median";
  return absl::StrCat("fpr<=", Shortest(point.fpr_target));
}

absl::StatusOr<AuditResult> RunAudit(const AuditDataset& dataset,
                                     const AuditConfig& config) {
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "confidence must lie in (0, 1), got ", config.confidence));
  }
  bool needs_roc = false;
  for (const OperatingPoint& point : config.operating_points) {
    if (point.kind == OperatingPoint::Kind::kFprTarget) {
      if (!InUnitInterval(point.fpr_target)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "FPR target must lie in [0, 1], got ", point.fpr_target));
      }
      needs_roc = true;
    }
  }

  AuditResult result;
  result.summary = SummarizeDataset(dataset);
  absl::StatusOr<ExposureReport> exposure =
      ComputeExposures(dataset, config.tie_policy);
  if (!exposure.ok()) return exposure.status();
  result.exposure = *std::move(exposure);
  result.warnings.emplace_back(kIndependenceWarning);

  const std::vector<MIResult> roc =
      needs_roc ? Roc(dataset) : std::vector<MIResult>();
  for (const OperatingPoint& point : config.operating_points) {
    OperatingPointResult entry;
    entry.operating_point = point;
    BoundSource source;
    if (point.kind == OperatingPoint::Kind::kMedian) {
      absl::StatusOr<MIResult> attack =
          ThresholdAttack(dataset, MedianThreshold(dataset));
      if (!attack.ok()) return attack.status();
      entry.attack = *attack;
      entry.exposure_epsilon =
          EpsilonFromMedianExposure(result.exposure.median_exposure());
      source = BoundSource::kMedianExposure;
    } else {
      absl::StatusOr<MIResult> attack = TprAtFpr(roc, point.fpr_target);
      if (!attack.ok()) return attack.status();
      entry.attack = *attack;
      source = BoundSource::kTprAtFpr;
      if (point.fpr_target > 0.0 &&
          point.fpr_target * static_cast<double>(dataset.n()) < 1.0) {
        entry.target_unachievable = true;
        result.warnings.push_back(absl::StrCat(
            "FPR target ", Shortest(point.fpr_target), " is below 1/n = ",
            Shortest(1.0 / static_cast<double>(dataset.n())),
            "; bound computed at achieved FPR ", Shortest(entry.attack.fpr)));
      }
    }
    absl::StatusOr<EpsilonBound> raw = EpsilonConfident(
        dataset, entry.attack, config.confidence, source, config.tie_policy);
    if (!raw.ok()) return raw.status();
    entry.raw = *raw;
    absl::StatusOr<EpsilonBound> per_example = ToPerExample(entry.raw);
    if (!per_example.ok()) return per_example.status();
    entry.per_example = *per_example;
    result.bounds.push_back(std::move(entry));
  }
  if (dataset.replications() > 1) {
    result.warnings.push_back(absl::StrCat(
        "canaries were duplicated ", dataset.replications(),
        " times; per-example bounds divide epsilon by ",
        dataset.replications(), " (group privacy)"));
  }

  std::vector<ExposureStatistic> statistics = {ExposureStatistic::Mean()};
  for (const auto& [q, value] : result.exposure.quantile_exposures) {
    statistics.push_back(ExposureStatistic::Quantile(q));
  }
  std::vector<BaselineSummary> simulated;
  if (config.baseline_trials > 0) {
    absl::StatusOr<std::vector<BaselineSummary>> baselines =
        MonteCarloBaselines(dataset.m(), dataset.n(), statistics,
                            config.baseline_trials, config.baseline_seed);
    if (!baselines.ok()) return baselines.status();
    simulated = *std::move(baselines);
  }
  for (size_t i = 0; i < statistics.size(); ++i) {
    BaselineComparison comparison;
    comparison.statistic = statistics[i];
    comparison.observed =
        statistics[i].kind == ExposureStatistic::Kind::kMean
            ? result.exposure.mean_exposure
            : result.exposure.quantile_exposures.at(statistics[i].q);
    comparison.exact = BaselineExactValue(statistics[i], dataset.n());
    comparison.asymptotic = BaselineAsymptoticValue(statistics[i]);
    if (!simulated.empty()) {
      comparison.mc_mean = simulated[i].mc_mean;
      comparison.mc_std = simulated[i].mc_std;
    }
    result.baselines.push_back(comparison);
  }
  return result;
}

}  // namespace canary_audit

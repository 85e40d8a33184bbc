#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stride/model.hpp"

namespace stride {

/// Logistic function 1 / (1 + e^{-z}).
template <typename Scalar>
Scalar sigmoid(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

// ---------------------------------------------------------------------------
// Sub-metrics. Each returns the raw closed form; clamping only happens where
// the formula itself has a min/max. Functions returning std::optional yield
// nullopt when the metric cannot be evaluated for the given data.
// ---------------------------------------------------------------------------

/// Fourth root of the product of the three coverage ratios and the
/// external-data factor 1 / (1 + e^{x - 0.5}).
double inclusiveness_materiality(const CoverageProfile& coverage);

/// Mean of (aud + tr) / 2 over the evidence items; nullopt for no evidence.
std::optional<double> auditability_traceability(std::span<const EvidenceItem> evidence);

/// 1 - (1 - sigma)^n.
double exemplary_reference(const RecognitionProfile& recognition);

/// exp(-lambda * lag).
double time_relevance(const TemporalProfile& temporal);

double statistical_methodology(std::uint64_t sample_size, std::uint64_t saturation_size,
                               double share_deviation, const SamplingWeights& weights);

/// Not clamped: large agreement deviations can push the value above one.
double ground_truth(const AnnotationStats& annotation, const GroundTruthWeights& weights);

double agility(const AgilityStats& stats);

double security_safety(const SafetyAudit& audit);

double human_governed(const GovernanceStats& governance);

double domain_expert(const GovernanceStats& governance);

/// Mean first difference of the accuracy series; nullopt when fewer than two
/// observations exist. May be negative.
std::optional<double> iterative_feedback(std::span<const double> accuracy_series);

/// Disclosed / required assumptions; nullopt when nothing is required.
std::optional<double> transparency(const GovernanceStats& governance);

double role_separation(const GovernanceStats& governance);

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct SubScore {
  Metric metric = Metric::IM;
  std::optional<double> value;  // absent iff not applicable
  std::string reason;           // why the metric was not applied
  std::string inputs_digest;

  bool applicable() const { return value.has_value(); }
  bool operator==(const SubScore&) const = default;
};

struct BreakdownTerm {
  Metric metric = Metric::IM;
  double weight = 0.0;
  double value = 0.0;
  double contribution = 0.0;

  bool operator==(const BreakdownTerm&) const = default;
};

struct ComponentBreakdown {
  Component component = Component::Credibility;
  std::vector<BreakdownTerm> terms;
  double total = 0.0;

  bool operator==(const ComponentBreakdown&) const = default;
};

/// Convex combination of the component's applicable sub-scores. The config
/// weights are renormalized over the metrics that are both marked applicable
/// in `cfg` and carry a value in `scores`. Throws ComputationError if none do.
ComponentBreakdown component_score(Component component, std::span<const SubScore> scores,
                                   const WeightConfig& cfg);

/// sigmoid(a_C C + a_R R + a_I I - a_S S).
double trust_score(double credibility, double reliability, double intimacy,
                   double self_served, const std::array<double, kComponentCount>& alpha);

struct StrideReport {
  std::array<SubScore, kMetricCount> sub_scores;
  std::array<ComponentBreakdown, kComponentCount> components;
  double latent = 0.0;  // argument of the sigmoid
  double trust = 0.5;
  WeightConfig config;
  std::string dataset_id;
  std::string manifest_digest;
  std::string config_digest;
  std::vector<std::string> flags;

  const SubScore& sub_score(Metric m) const { return sub_scores[index(m)]; }
  double component_total(Component c) const { return components[index(c)].total; }

  bool operator==(const StrideReport&) const = default;
};

/// Runs every applicable sub-metric, the four components and the trust score.
/// Throws ValidationError for invalid inputs and ComputationError where a
/// formula is undefined on otherwise valid data.
StrideReport score_dataset(const DatasetManifest& manifest, const WeightConfig& cfg);

}  // namespace stride

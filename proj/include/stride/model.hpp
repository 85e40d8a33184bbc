#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stride/errors.hpp"

namespace stride {

// ---------------------------------------------------------------------------
// Sub-metrics and components
// ---------------------------------------------------------------------------

enum class Metric : std::uint8_t {
  IM,  // inclusiveness & materiality
  AT,  // auditable & traceable data
  ER,  // exemplary reference
  TR,  // time relevance
  SM,  // statistical methodology
  GT,  // ground-truth annotation
  AG,  // agility with the right trade-off
  SS,  // security & safety
  HG,  // AI-driven, human-governed
  DE,  // domain expert in the loop
  IF,  // iterative feedback loop
  T,   // transparency
  RS,  // role separation & independent oversight
};

inline constexpr std::size_t kMetricCount = 13;

enum class Component : std::uint8_t {
  Credibility,
  Reliability,
  Intimacy,
  SelfServed,
};

inline constexpr std::size_t kComponentCount = 4;

inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::IM, Metric::AT, Metric::ER, Metric::TR, Metric::SM,
    Metric::GT, Metric::AG, Metric::SS, Metric::HG, Metric::DE,
    Metric::IF, Metric::T,  Metric::RS};

inline constexpr std::array<Component, kComponentCount> kAllComponents = {
    Component::Credibility, Component::Reliability, Component::Intimacy,
    Component::SelfServed};

constexpr std::size_t index(Metric m) { return static_cast<std::size_t>(m); }
constexpr std::size_t index(Component c) { return static_cast<std::size_t>(c); }

constexpr Component component_of(Metric m) {
  switch (m) {
    case Metric::IM:
    case Metric::AT:
    case Metric::ER:
    case Metric::TR:
      return Component::Credibility;
    case Metric::SM:
    case Metric::GT:
    case Metric::AG:
    case Metric::SS:
      return Component::Reliability;
    case Metric::HG:
    case Metric::DE:
    case Metric::IF:
      return Component::Intimacy;
    case Metric::T:
    case Metric::RS:
      return Component::SelfServed;
  }
  return Component::Credibility;
}

/// Metrics of one component, in canonical order.
std::vector<Metric> metrics_of(Component c);

std::string_view to_string(Metric m);
std::string_view to_string(Component c);
/// Single-letter component symbol: "C", "R", "I", "S".
std::string_view symbol(Component c);
std::optional<Metric> metric_from_string(std::string_view name);
std::optional<Component> component_from_string(std::string_view name);

// ---------------------------------------------------------------------------
// Measured inputs
// ---------------------------------------------------------------------------

enum class StandardLayer : std::uint8_t { Global, National, Local, Industry, Company };

inline constexpr std::size_t kStandardLayerCount = 5;

std::string_view to_string(StandardLayer layer);
std::optional<StandardLayer> standard_layer_from_string(std::string_view name);

struct CoverageProfile {
  std::uint64_t countries_covered = 0;
  std::uint64_t countries_total = 0;
  std::uint64_t industries_covered = 0;
  std::uint64_t industries_total = 0;
  std::set<StandardLayer> standard_layers_covered;
  std::uint64_t standard_layers_total = kStandardLayerCount;
  int external_data_flag = 0;

  bool operator==(const CoverageProfile&) const = default;
};

struct EvidenceItem {
  std::string id;
  std::string source_uri;
  double auditability = 0.0;
  double traceability = 0.0;

  bool operator==(const EvidenceItem&) const = default;
};

struct RecognitionProfile {
  std::uint64_t recognitions_per_year = 0;
  double single_event_confidence = 0.5;

  bool operator==(const RecognitionProfile&) const = default;
};

struct TemporalProfile {
  double lag_years = 0.0;
  double decay_rate = 0.1;

  bool operator==(const TemporalProfile&) const = default;
};

struct AnnotationStats {
  double human_fraction = 0.0;
  double mean_tenure_years = 0.0;
  double tenure_cap_years = 1.0;
  double human_machine_deviation = 0.0;
  double machine_machine_deviation = 0.0;

  bool operator==(const AnnotationStats&) const = default;
};

inline constexpr double kDefaultAgilityEpsilon = 1e-6;

struct AgilityStats {
  double accuracy_gain = 0.0;
  double change_proportion = 0.0;
  double epsilon = kDefaultAgilityEpsilon;

  bool operator==(const AgilityStats&) const = default;
};

struct SafetyAudit {
  std::uint64_t harmful_rows = 0;
  std::uint64_t total_rows = 0;

  bool operator==(const SafetyAudit&) const = default;
};

struct GovernanceStats {
  std::uint64_t interventions = 0;
  std::uint64_t governed_cases = 0;
  std::uint64_t experts_involved = 0;
  std::uint64_t experts_total = 0;
  std::uint64_t stages_with_experts = 0;
  std::uint64_t stages_total = 0;
  std::vector<double> accuracy_series;
  std::uint64_t assumptions_disclosed = 0;
  std::uint64_t assumptions_required = 0;
  std::uint64_t role_relations_separated = 0;
  std::uint64_t role_relations_total = 0;

  bool operator==(const GovernanceStats&) const = default;
};

/// Effective sample size, saturation threshold and representativeness spread.
struct SamplingInputs {
  std::uint64_t sample_size = 0;
  std::uint64_t saturation_size = 300;
  double share_deviation = 0.0;

  bool operator==(const SamplingInputs&) const = default;
};

/// Everything measured about one benchmark dataset. Optional sections mark
/// the corresponding sub-metric as not computable.
struct DatasetManifest {
  std::string manifest_version = "1";
  std::string dataset_id;
  CoverageProfile coverage;
  std::vector<EvidenceItem> evidence;
  RecognitionProfile recognition;
  TemporalProfile temporal;
  std::optional<AnnotationStats> annotation;
  std::optional<AgilityStats> agility;
  SafetyAudit safety;
  GovernanceStats governance;
  std::optional<SamplingInputs> sampling_inputs;

  bool operator==(const DatasetManifest&) const = default;
};

/// Checks every invariant of the manifest and its embedded profiles. Returns
/// the violations found; an empty list means the manifest is valid.
std::vector<Violation> validate_manifest(const DatasetManifest& manifest);

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

struct GroundTruthWeights {
  double human = 0.25;
  double tenure = 0.25;
  double human_machine = 0.25;
  double machine_machine = 0.25;

  bool operator==(const GroundTruthWeights&) const = default;
};

struct SamplingWeights {
  double saturation = 0.5;
  double representativeness = 0.5;

  bool operator==(const SamplingWeights&) const = default;
};

/// Cross-dimension coefficients and per-component convex weights.
///
/// `weights` is indexed by `index(Metric)`. After `validate_weight_config`
/// the applicable weights of each component sum to one and inapplicable
/// weights are zero. `alpha` is indexed by `index(Component)` and is never
/// renormalized.
struct WeightConfig {
  std::array<double, kComponentCount> alpha{0.25, 0.25, 0.25, 0.25};
  std::array<double, kMetricCount> weights{};
  std::array<bool, kMetricCount> applicable{};
  GroundTruthWeights ground_truth;
  SamplingWeights sampling;

  double weight(Metric m) const { return weights[index(m)]; }
  bool is_applicable(Metric m) const { return applicable[index(m)]; }
  double alpha_of(Component c) const { return alpha[index(c)]; }

  /// Uniform weights, every metric applicable, alpha = 1/4.
  static WeightConfig equal();

  bool operator==(const WeightConfig&) const = default;
};

/// Renormalizes each component's weights over its applicable sub-metrics.
/// Throws ValidationError on a negative weight, a component without any
/// applicable sub-metric, or a component whose applicable weights are all 0.
WeightConfig validate_weight_config(const WeightConfig& cfg);

}  // namespace stride

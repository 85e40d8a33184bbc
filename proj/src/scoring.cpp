#include "stride/scoring.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "stride/digest.hpp"
#include "stride/io.hpp"

namespace stride {

namespace {

double ratio(std::uint64_t part, std::uint64_t whole, const char* what) {
  if (whole == 0) throw ComputationError(std::string(what) + ": denominator is zero");
  return static_cast<double>(part) / static_cast<double>(whole);
}

// Round-trippable text for a double, used in input digests.
std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_digest(const std::string& canonical_inputs) {
  return sha256_hex(canonical_inputs).substr(0, 16);
}

}  // namespace

double inclusiveness_materiality(const CoverageProfile& cov) {
  const double countries = ratio(cov.countries_covered, cov.countries_total, "IM countries");
  const double industries = ratio(cov.industries_covered, cov.industries_total, "IM industries");
  const double layers =
      ratio(cov.standard_layers_covered.size(), cov.standard_layers_total, "IM standard layers");
  const double external = 1.0 / (1.0 + std::exp(static_cast<double>(cov.external_data_flag) - 0.5));
  return std::pow(countries * industries * layers * external, 0.25);
}

std::optional<double> auditability_traceability(std::span<const EvidenceItem> evidence) {
  if (evidence.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& e : evidence) sum += 0.5 * (e.auditability + e.traceability);
  return sum / static_cast<double>(evidence.size());
}

double exemplary_reference(const RecognitionProfile& rec) {
  return 1.0 - std::pow(1.0 - rec.single_event_confidence,
                        static_cast<double>(rec.recognitions_per_year));
}

double time_relevance(const TemporalProfile& t) { return std::exp(-t.decay_rate * t.lag_years); }

double statistical_methodology(std::uint64_t sample_size, std::uint64_t saturation_size,
                               double share_deviation, const SamplingWeights& w) {
  const double saturation = std::min(1.0, ratio(sample_size, saturation_size, "SM saturation"));
  return w.saturation * saturation + w.representativeness * (1.0 - share_deviation);
}

double ground_truth(const AnnotationStats& a, const GroundTruthWeights& w) {
  if (!(a.tenure_cap_years > 0.0)) throw ComputationError("GT: tenure cap must be > 0");
  const double tenure = std::min(1.0, a.mean_tenure_years / a.tenure_cap_years);
  return w.human * a.human_fraction + w.tenure * tenure +
         w.human_machine * a.human_machine_deviation +
         w.machine_machine * a.machine_machine_deviation;
}

double agility(const AgilityStats& a) {
  return std::min(1.0, std::max(0.0, a.accuracy_gain / (a.change_proportion + a.epsilon)));
}

double security_safety(const SafetyAudit& s) {
  return 1.0 - ratio(s.harmful_rows, s.total_rows, "SS");
}

double human_governed(const GovernanceStats& g) {
  return ratio(g.interventions, g.governed_cases, "HG");
}

double domain_expert(const GovernanceStats& g) {
  return 0.5 * (ratio(g.experts_involved, g.experts_total, "DE experts") +
                ratio(g.stages_with_experts, g.stages_total, "DE stages"));
}

std::optional<double> iterative_feedback(std::span<const double> series) {
  if (series.size() < 2) return std::nullopt;
  double sum = 0.0;
  for (std::size_t t = 1; t < series.size(); ++t) sum += series[t] - series[t - 1];
  return sum / static_cast<double>(series.size() - 1);
}

std::optional<double> transparency(const GovernanceStats& g) {
  if (g.assumptions_required == 0) return std::nullopt;
  return ratio(g.assumptions_disclosed, g.assumptions_required, "T");
}

double role_separation(const GovernanceStats& g) {
  return ratio(g.role_relations_separated, g.role_relations_total, "RS");
}

// ---------------------------------------------------------------------------

ComponentBreakdown component_score(Component component, std::span<const SubScore> scores,
                                   const WeightConfig& cfg) {
  ComponentBreakdown out;
  out.component = component;

  double weight_sum = 0.0;
  for (const auto& s : scores) {
    if (component_of(s.metric) != component || !s.applicable() || !cfg.is_applicable(s.metric))
      continue;
    out.terms.push_back({s.metric, cfg.weight(s.metric), *s.value, 0.0});
    weight_sum += cfg.weight(s.metric);
  }
  if (out.terms.empty()) {
    throw ComputationError("component " + std::string(to_string(component)) +
                           " has no applicable sub-metric");
  }
  if (!(weight_sum > 0.0)) {
    throw ComputationError("component " + std::string(to_string(component)) +
                           " has zero total weight over its applicable sub-metrics");
  }
  for (auto& term : out.terms) {
    term.weight /= weight_sum;
    term.contribution = term.weight * term.value;
    out.total += term.contribution;
  }
  return out;
}

double trust_score(double credibility, double reliability, double intimacy, double self_served,
                   const std::array<double, kComponentCount>& alpha) {
  const double z = alpha[index(Component::Credibility)] * credibility +
                   alpha[index(Component::Reliability)] * reliability +
                   alpha[index(Component::Intimacy)] * intimacy -
                   alpha[index(Component::SelfServed)] * self_served;
  return sigmoid(z);
}

// ---------------------------------------------------------------------------

namespace {

struct Evaluation {
  std::optional<double> value;
  std::string reason;
  std::string inputs;
};

Evaluation evaluate(Metric m, const DatasetManifest& mf, const WeightConfig& cfg) {
  const auto& g = mf.governance;
  switch (m) {
    case Metric::IM: {
      const auto& c = mf.coverage;
      return {inclusiveness_materiality(c), {},
              std::to_string(c.countries_covered) + "/" + std::to_string(c.countries_total) + "|" +
                  std::to_string(c.industries_covered) + "/" + std::to_string(c.industries_total) +
                  "|" + std::to_string(c.standard_layers_covered.size()) + "/" +
                  std::to_string(c.standard_layers_total) +
                  "|x=" + std::to_string(c.external_data_flag)};
    }
    case Metric::AT: {
      std::string inputs;
      for (const auto& e : mf.evidence)
        inputs += e.id + ":" + exact(e.auditability) + "," + exact(e.traceability) + ";";
      auto v = auditability_traceability(mf.evidence);
      return {v, v ? "" : "no evidence items", inputs};
    }
    case Metric::ER:
      return {exemplary_reference(mf.recognition), {},
              std::to_string(mf.recognition.recognitions_per_year) + "|" +
                  exact(mf.recognition.single_event_confidence)};
    case Metric::TR:
      return {time_relevance(mf.temporal), {},
              exact(mf.temporal.lag_years) + "|" + exact(mf.temporal.decay_rate)};
    case Metric::SM: {
      if (!mf.sampling_inputs) return {std::nullopt, "no sampling inputs", {}};
      const auto& s = *mf.sampling_inputs;
      return {statistical_methodology(s.sample_size, s.saturation_size, s.share_deviation,
                                      cfg.sampling),
              {},
              std::to_string(s.sample_size) + "|" + std::to_string(s.saturation_size) + "|" +
                  exact(s.share_deviation) + "|" + exact(cfg.sampling.saturation) + "," +
                  exact(cfg.sampling.representativeness)};
    }
    case Metric::GT: {
      if (!mf.annotation) return {std::nullopt, "no annotation statistics", {}};
      const auto& a = *mf.annotation;
      const auto& w = cfg.ground_truth;
      return {ground_truth(a, w), {},
              exact(a.human_fraction) + "|" + exact(a.mean_tenure_years) + "/" +
                  exact(a.tenure_cap_years) + "|" + exact(a.human_machine_deviation) + "|" +
                  exact(a.machine_machine_deviation) + "|" + exact(w.human) + "," +
                  exact(w.tenure) + "," + exact(w.human_machine) + "," +
                  exact(w.machine_machine)};
    }
    case Metric::AG: {
      if (!mf.agility) return {std::nullopt, "no agility statistics", {}};
      const auto& a = *mf.agility;
      return {agility(a), {},
              exact(a.accuracy_gain) + "|" + exact(a.change_proportion) + "|" + exact(a.epsilon)};
    }
    case Metric::SS:
      return {security_safety(mf.safety), {},
              std::to_string(mf.safety.harmful_rows) + "/" + std::to_string(mf.safety.total_rows)};
    case Metric::HG:
      return {human_governed(g), {},
              std::to_string(g.interventions) + "/" + std::to_string(g.governed_cases)};
    case Metric::DE:
      return {domain_expert(g), {},
              std::to_string(g.experts_involved) + "/" + std::to_string(g.experts_total) + "|" +
                  std::to_string(g.stages_with_experts) + "/" + std::to_string(g.stages_total)};
    case Metric::IF: {
      std::string inputs;
      for (double a : g.accuracy_series) inputs += exact(a) + ";";
      auto v = iterative_feedback(g.accuracy_series);
      return {v, v ? "" : "fewer than two accuracy observations", inputs};
    }
    case Metric::T: {
      auto v = transparency(g);
      return {v, v ? "" : "no required assumptions",
              std::to_string(g.assumptions_disclosed) + "/" +
                  std::to_string(g.assumptions_required)};
    }
    case Metric::RS:
      return {role_separation(g), {},
              std::to_string(g.role_relations_separated) + "/" +
                  std::to_string(g.role_relations_total)};
  }
  return {};
}

}  // namespace

StrideReport score_dataset(const DatasetManifest& manifest, const WeightConfig& raw_cfg) {
  if (auto violations = validate_manifest(manifest); !violations.empty()) {
    throw ValidationError(std::move(violations));
  }
  const WeightConfig cfg = validate_weight_config(raw_cfg);

  StrideReport report;
  report.config = cfg;
  report.dataset_id = manifest.dataset_id;
  report.manifest_digest = manifest_digest(manifest);
  report.config_digest = config_digest(cfg);

  for (Metric m : kAllMetrics) {
    SubScore& s = report.sub_scores[index(m)];
    s.metric = m;
    if (!cfg.is_applicable(m)) {
      s.reason = "disabled by weight config";
      continue;
    }
    Evaluation e = evaluate(m, manifest, cfg);
    s.value = e.value;
    s.reason = std::move(e.reason);
    s.inputs_digest = short_digest(std::string(to_string(m)) + ":" + e.inputs);
    if (s.value && !std::isfinite(*s.value)) {
      throw ComputationError(std::string(to_string(m)) + " evaluated to a non-finite value");
    }
  }

  for (Component c : kAllComponents) {
    report.components[index(c)] = component_score(c, report.sub_scores, cfg);
  }

  const auto total = [&](Component c) { return report.component_total(c); };
  report.latent = cfg.alpha_of(Component::Credibility) * total(Component::Credibility) +
                  cfg.alpha_of(Component::Reliability) * total(Component::Reliability) +
                  cfg.alpha_of(Component::Intimacy) * total(Component::Intimacy) -
                  cfg.alpha_of(Component::SelfServed) * total(Component::SelfServed);
  report.trust = trust_score(total(Component::Credibility), total(Component::Reliability),
                             total(Component::Intimacy), total(Component::SelfServed), cfg.alpha);

  if (const auto& gt = report.sub_score(Metric::GT).value; gt && *gt > 1.0) {
    report.flags.push_back("GT exceeds 1 (agreement deviations are additive and unclamped)");
  }
  if (const auto& fb = report.sub_score(Metric::IF).value; fb && *fb < 0.0) {
    report.flags.push_back("IF is negative (accuracy declined across feedback iterations)");
  }
  for (Component c : kAllComponents) {
    const double v = total(c);
    if (v < 0.0 || v > 1.0) {
      report.flags.push_back("component " + std::string(symbol(c)) + " lies outside [0, 1]");
    }
  }
  return report;
}

}  // namespace stride

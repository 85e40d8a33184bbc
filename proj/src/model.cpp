#include "stride/model.hpp"

#include <cmath>
#include <sstream>

namespace stride {

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << violations.size() << " invariant violation(s)";
        for (const auto& v : violations) os << "\n  " << v.path << ": " << v.message;
        return os.str();
      }()),
      violations_(std::move(violations)) {}

namespace {

constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "IM", "AT", "ER", "TR", "SM", "GT", "AG", "SS", "HG", "DE", "IF", "T", "RS"};

constexpr std::array<std::string_view, kComponentCount> kComponentNames = {
    "credibility", "reliability", "intimacy", "self_served"};

constexpr std::array<std::string_view, kComponentCount> kComponentSymbols = {
    "C", "R", "I", "S"};

constexpr std::array<std::string_view, kStandardLayerCount> kLayerNames = {
    "global", "national", "local", "industry", "company"};

}  // namespace

std::vector<Metric> metrics_of(Component c) {
  std::vector<Metric> out;
  for (Metric m : kAllMetrics) {
    if (component_of(m) == c) out.push_back(m);
  }
  return out;
}

std::string_view to_string(Metric m) { return kMetricNames[index(m)]; }
std::string_view to_string(Component c) { return kComponentNames[index(c)]; }
std::string_view symbol(Component c) { return kComponentSymbols[index(c)]; }
std::string_view to_string(StandardLayer layer) {
  return kLayerNames[static_cast<std::size_t>(layer)];
}

std::optional<Metric> metric_from_string(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<Component> component_from_string(std::string_view name) {
  for (Component c : kAllComponents) {
    if (to_string(c) == name || symbol(c) == name) return c;
  }
  return std::nullopt;
}

std::optional<StandardLayer> standard_layer_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kLayerNames.size(); ++i) {
    if (kLayerNames[i] == name) return static_cast<StandardLayer>(i);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

class ViolationCollector {
 public:
  void require(bool ok, std::string path, std::string message) {
    if (!ok) out_.push_back({std::move(path), std::move(message)});
  }

  void unit_interval(double v, const std::string& path) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, path, "must lie in [0, 1]");
  }

  void non_negative(double v, const std::string& path) {
    require(std::isfinite(v) && v >= 0.0, path, "must be finite and >= 0");
  }

  void positive(double v, const std::string& path) {
    require(std::isfinite(v) && v > 0.0, path, "must be finite and > 0");
  }

  void at_most(std::uint64_t part, std::uint64_t whole, const std::string& path,
               std::string_view whole_name) {
    require(part <= whole, path, "must not exceed " + std::string(whole_name));
  }

  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate_manifest(const DatasetManifest& m) {
  ViolationCollector v;
  v.require(!m.dataset_id.empty(), "/dataset_id", "must be non-empty");

  const auto& cov = m.coverage;
  v.require(cov.countries_total > 0, "/coverage/countries_total", "must be > 0");
  v.require(cov.industries_total > 0, "/coverage/industries_total", "must be > 0");
  v.require(cov.standard_layers_total == kStandardLayerCount,
            "/coverage/standard_layers_total", "must equal 5");
  v.at_most(cov.countries_covered, cov.countries_total,
            "/coverage/countries_covered", "countries_total");
  v.at_most(cov.industries_covered, cov.industries_total,
            "/coverage/industries_covered", "industries_total");
  v.require(cov.external_data_flag == 0 || cov.external_data_flag == 1,
            "/coverage/external_data_flag", "must be 0 or 1");

  for (std::size_t i = 0; i < m.evidence.size(); ++i) {
    const std::string base = "/evidence/" + std::to_string(i);
    v.unit_interval(m.evidence[i].auditability, base + "/auditability");
    v.unit_interval(m.evidence[i].traceability, base + "/traceability");
  }

  const double sigma = m.recognition.single_event_confidence;
  v.require(std::isfinite(sigma) && sigma > 0.0 && sigma < 1.0,
            "/recognition/single_event_confidence", "must lie in the open interval (0, 1)");

  v.non_negative(m.temporal.lag_years, "/temporal/lag_years");
  v.positive(m.temporal.decay_rate, "/temporal/decay_rate");

  if (m.annotation) {
    const auto& a = *m.annotation;
    v.unit_interval(a.human_fraction, "/annotation/human_fraction");
    v.non_negative(a.mean_tenure_years, "/annotation/mean_tenure_years");
    v.positive(a.tenure_cap_years, "/annotation/tenure_cap_years");
    v.non_negative(a.human_machine_deviation, "/annotation/human_machine_deviation");
    v.non_negative(a.machine_machine_deviation, "/annotation/machine_machine_deviation");
  }

  if (m.agility) {
    const auto& a = *m.agility;
    v.require(std::isfinite(a.accuracy_gain), "/agility/accuracy_gain", "must be finite");
    v.unit_interval(a.change_proportion, "/agility/change_proportion");
    v.positive(a.epsilon, "/agility/epsilon");
  }

  v.require(m.safety.total_rows > 0, "/safety/total_rows", "must be > 0");
  v.at_most(m.safety.harmful_rows, m.safety.total_rows, "/safety/harmful_rows", "total_rows");

  const auto& g = m.governance;
  v.at_most(g.interventions, g.governed_cases, "/governance/interventions", "governed_cases");
  v.at_most(g.experts_involved, g.experts_total, "/governance/experts_involved", "experts_total");
  v.at_most(g.stages_with_experts, g.stages_total, "/governance/stages_with_experts",
            "stages_total");
  v.at_most(g.assumptions_disclosed, g.assumptions_required,
            "/governance/assumptions_disclosed", "assumptions_required");
  v.at_most(g.role_relations_separated, g.role_relations_total,
            "/governance/role_relations_separated", "role_relations_total");
  for (std::size_t i = 0; i < g.accuracy_series.size(); ++i) {
    v.unit_interval(g.accuracy_series[i], "/governance/accuracy_series/" + std::to_string(i));
  }

  if (m.sampling_inputs) {
    v.require(m.sampling_inputs->saturation_size > 0, "/sampling_inputs/saturation_size",
              "must be > 0");
    v.non_negative(m.sampling_inputs->share_deviation, "/sampling_inputs/share_deviation");
  }
  return v.take();
}

// ---------------------------------------------------------------------------

WeightConfig WeightConfig::equal() {
  WeightConfig cfg;
  cfg.applicable.fill(true);
  for (Component c : kAllComponents) {
    const auto members = metrics_of(c);
    for (Metric m : members) cfg.weights[index(m)] = 1.0 / static_cast<double>(members.size());
  }
  return cfg;
}

namespace {

// Sums already equal to one (up to rounding) are left untouched so that
// renormalization is idempotent bit for bit.
constexpr double kUnitSumSlack = 1e-14;

double scale_for(double total) {
  return std::abs(total - 1.0) <= kUnitSumSlack ? 1.0 : total;
}

template <std::size_t N>
void renormalize(std::array<double*, N> parts, const std::string& path,
                 std::vector<Violation>& out) {
  double total = 0.0;
  for (double* p : parts) total += *p;
  if (!(total > 0.0) || !std::isfinite(total)) {
    out.push_back({path, "weights must not all be zero"});
    return;
  }
  const double scale = scale_for(total);
  for (double* p : parts) *p /= scale;
}

}  // namespace

WeightConfig validate_weight_config(const WeightConfig& cfg) {
  std::vector<Violation> violations;
  WeightConfig out = cfg;

  for (Component c : kAllComponents) {
    const double a = cfg.alpha_of(c);
    if (!std::isfinite(a) || a < 0.0) {
      violations.push_back({"/alpha/" + std::string(to_string(c)), "must be finite and >= 0"});
    }
  }
  for (Metric m : kAllMetrics) {
    const double w = cfg.weight(m);
    if (!std::isfinite(w) || w < 0.0) {
      violations.push_back({"/weights/" + std::string(to_string(m)), "must be finite and >= 0"});
    }
  }
  const auto& gt = cfg.ground_truth;
  for (double w : {gt.human, gt.tenure, gt.human_machine, gt.machine_machine}) {
    if (!std::isfinite(w) || w < 0.0) {
      violations.push_back({"/ground_truth_weights", "weights must be finite and >= 0"});
      break;
    }
  }
  for (double w : {cfg.sampling.saturation, cfg.sampling.representativeness}) {
    if (!std::isfinite(w) || w < 0.0) {
      violations.push_back({"/sampling_weights", "weights must be finite and >= 0"});
      break;
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));

  for (Component c : kAllComponents) {
    const auto members = metrics_of(c);
    double total = 0.0;
    bool any = false;
    for (Metric m : members) {
      if (cfg.is_applicable(m)) {
        any = true;
        total += cfg.weight(m);
      }
    }
    const std::string path = "/weights/" + std::string(to_string(c));
    if (!any) {
      violations.push_back({path, "component has no applicable sub-metric"});
      continue;
    }
    if (!(total > 0.0)) {
      violations.push_back({path, "applicable weights are all zero"});
      continue;
    }
    const double scale = scale_for(total);
    for (Metric m : members) {
      out.weights[index(m)] = cfg.is_applicable(m) ? cfg.weight(m) / scale : 0.0;
    }
  }

  renormalize<4>({&out.ground_truth.human, &out.ground_truth.tenure,
                  &out.ground_truth.human_machine, &out.ground_truth.machine_machine},
                 "/ground_truth_weights", violations);
  renormalize<2>({&out.sampling.saturation, &out.sampling.representativeness},
                 "/sampling_weights", violations);

  if (!violations.empty()) throw ValidationError(std::move(violations));
  return out;
}

}  // namespace stride

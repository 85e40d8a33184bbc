#include "stride/io.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "json_reader.hpp"
#include "stride/digest.hpp"

namespace stride {

using detail::Json;
using detail::Reader;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Evidence scores may be given as booleans.
double unit_score(const Reader& r, std::string_view key) {
  const Json& v = r.require(key);
  if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
  return r.number(key);
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

DatasetManifest parse_manifest_unchecked(std::string_view document) {
  const Json root = detail::parse_json(document, "manifest");
  const Reader r(root, "");
  if (!root.is_object()) r.fail_here("manifest must be a JSON object");

  DatasetManifest m;
  m.manifest_version = r.string_or("manifest_version", "1");
  m.dataset_id = r.string("dataset_id");

  {
    const Reader c = r.object("coverage");
    auto& cov = m.coverage;
    cov.countries_covered = c.count("countries_covered");
    cov.countries_total = c.count("countries_total");
    cov.industries_covered = c.count("industries_covered");
    cov.industries_total = c.count("industries_total");
    const Reader layers = c.array("standard_layers_covered");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const Json& v = layers.node().at(i);
      const std::string path = layers.path() + "/" + std::to_string(i);
      if (!v.is_string()) throw SchemaError(path, "expected a string");
      auto layer = standard_layer_from_string(v.get<std::string>());
      if (!layer) {
        throw SchemaError(path, "unknown standard layer '" + v.get<std::string>() +
                                    "' (expected global, national, local, industry, company)");
      }
      if (!cov.standard_layers_covered.insert(*layer).second) {
        throw SchemaError(path, "duplicate standard layer");
      }
    }
    cov.standard_layers_total =
        c.has("standard_layers_total") ? c.count("standard_layers_total") : kStandardLayerCount;
    cov.external_data_flag = static_cast<int>(c.integer("external_data_flag"));
  }

  if (r.has("evidence")) {
    const Reader ev = r.array("evidence");
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const Reader e = ev.element(i);
      m.evidence.push_back({e.string("id"), e.string_or("source_uri", ""),
                            unit_score(e, "auditability"), unit_score(e, "traceability")});
    }
  }

  {
    const Reader rec = r.object("recognition");
    m.recognition.recognitions_per_year = rec.count("recognitions_per_year");
    m.recognition.single_event_confidence = rec.number("single_event_confidence");
  }
  {
    const Reader t = r.object("temporal");
    m.temporal.lag_years = t.number("lag_years");
    m.temporal.decay_rate = t.number("decay_rate");
  }
  if (auto a = r.optional_object("annotation")) {
    m.annotation = AnnotationStats{a->number("human_fraction"), a->number("mean_tenure_years"),
                                   a->number("tenure_cap_years"),
                                   a->number("human_machine_deviation"),
                                   a->number("machine_machine_deviation")};
  }
  if (auto a = r.optional_object("agility")) {
    m.agility = AgilityStats{a->number("accuracy_gain"), a->number("change_proportion"),
                             a->number_or("epsilon", kDefaultAgilityEpsilon)};
  }
  {
    const Reader s = r.object("safety");
    m.safety.harmful_rows = s.count("harmful_rows");
    m.safety.total_rows = s.count("total_rows");
  }
  {
    const Reader g = r.object("governance");
    auto& gov = m.governance;
    gov.interventions = g.count("interventions");
    gov.governed_cases = g.count("governed_cases");
    gov.experts_involved = g.count("experts_involved");
    gov.experts_total = g.count("experts_total");
    gov.stages_with_experts = g.count("stages_with_experts");
    gov.stages_total = g.count("stages_total");
    if (g.has("accuracy_series")) {
      const Reader series = g.array("accuracy_series");
      for (std::size_t i = 0; i < series.size(); ++i) {
        const Json& v = series.node().at(i);
        if (!v.is_number()) {
          throw SchemaError(series.path() + "/" + std::to_string(i), "expected a number");
        }
        gov.accuracy_series.push_back(v.get<double>());
      }
    }
    gov.assumptions_disclosed = g.count("assumptions_disclosed");
    gov.assumptions_required = g.count("assumptions_required");
    gov.role_relations_separated = g.count("role_relations_separated");
    gov.role_relations_total = g.count("role_relations_total");
  }
  if (auto s = r.optional_object("sampling_inputs")) {
    m.sampling_inputs = SamplingInputs{s->count("sample_size"), s->count("saturation_size"),
                                       s->number("share_deviation")};
  }
  return m;
}

DatasetManifest parse_manifest(std::string_view document) {
  DatasetManifest m = parse_manifest_unchecked(document);
  if (auto violations = validate_manifest(m); !violations.empty()) {
    throw ValidationError(std::move(violations));
  }
  return m;
}

namespace {

Json manifest_to_json(const DatasetManifest& m) {
  Json j;
  j["manifest_version"] = m.manifest_version;
  j["dataset_id"] = m.dataset_id;

  const auto& c = m.coverage;
  Json layers = Json::array();
  for (StandardLayer l : c.standard_layers_covered) layers.push_back(std::string(to_string(l)));
  j["coverage"] = {{"countries_covered", c.countries_covered},
                   {"countries_total", c.countries_total},
                   {"industries_covered", c.industries_covered},
                   {"industries_total", c.industries_total},
                   {"standard_layers_covered", layers},
                   {"standard_layers_total", c.standard_layers_total},
                   {"external_data_flag", c.external_data_flag}};

  Json evidence = Json::array();
  for (const auto& e : m.evidence) {
    evidence.push_back({{"id", e.id},
                        {"source_uri", e.source_uri},
                        {"auditability", e.auditability},
                        {"traceability", e.traceability}});
  }
  j["evidence"] = evidence;
  j["recognition"] = {{"recognitions_per_year", m.recognition.recognitions_per_year},
                      {"single_event_confidence", m.recognition.single_event_confidence}};
  j["temporal"] = {{"lag_years", m.temporal.lag_years}, {"decay_rate", m.temporal.decay_rate}};
  if (m.annotation) {
    const auto& a = *m.annotation;
    j["annotation"] = {{"human_fraction", a.human_fraction},
                       {"mean_tenure_years", a.mean_tenure_years},
                       {"tenure_cap_years", a.tenure_cap_years},
                       {"human_machine_deviation", a.human_machine_deviation},
                       {"machine_machine_deviation", a.machine_machine_deviation}};
  }
  if (m.agility) {
    const auto& a = *m.agility;
    j["agility"] = {{"accuracy_gain", a.accuracy_gain},
                    {"change_proportion", a.change_proportion},
                    {"epsilon", a.epsilon}};
  }
  j["safety"] = {{"harmful_rows", m.safety.harmful_rows}, {"total_rows", m.safety.total_rows}};
  const auto& g = m.governance;
  j["governance"] = {{"interventions", g.interventions},
                     {"governed_cases", g.governed_cases},
                     {"experts_involved", g.experts_involved},
                     {"experts_total", g.experts_total},
                     {"stages_with_experts", g.stages_with_experts},
                     {"stages_total", g.stages_total},
                     {"accuracy_series", g.accuracy_series},
                     {"assumptions_disclosed", g.assumptions_disclosed},
                     {"assumptions_required", g.assumptions_required},
                     {"role_relations_separated", g.role_relations_separated},
                     {"role_relations_total", g.role_relations_total}};
  if (m.sampling_inputs) {
    const auto& s = *m.sampling_inputs;
    j["sampling_inputs"] = {{"sample_size", s.sample_size},
                            {"saturation_size", s.saturation_size},
                            {"share_deviation", s.share_deviation}};
  }
  return j;
}

}  // namespace

std::string emit_manifest(const DatasetManifest& manifest) {
  return manifest_to_json(manifest).dump(2) + "\n";
}

std::string manifest_digest(const DatasetManifest& manifest) {
  return sha256_hex(manifest_to_json(manifest).dump());
}

// ---------------------------------------------------------------------------
// Weight config
// ---------------------------------------------------------------------------

namespace {

Json config_to_json(const WeightConfig& cfg) {
  Json alpha, weights, applicable;
  for (Component c : kAllComponents) alpha[std::string(symbol(c))] = cfg.alpha_of(c);
  for (Metric m : kAllMetrics) {
    weights[std::string(to_string(m))] = cfg.weight(m);
    applicable[std::string(to_string(m))] = cfg.is_applicable(m);
  }
  return {{"alpha", alpha},
          {"weights", weights},
          {"applicable", applicable},
          {"ground_truth_weights",
           {{"human", cfg.ground_truth.human},
            {"tenure", cfg.ground_truth.tenure},
            {"human_machine", cfg.ground_truth.human_machine},
            {"machine_machine", cfg.ground_truth.machine_machine}}},
          {"sampling_weights",
           {{"saturation", cfg.sampling.saturation},
            {"representativeness", cfg.sampling.representativeness}}}};
}

WeightConfig config_from_reader(const Reader& r) {
  WeightConfig cfg;
  const bool preset = r.has("preset");
  if (preset) {
    if (r.string("preset") != "equal") r.fail("preset", "unknown preset (expected \"equal\")");
    cfg = WeightConfig::equal();
  } else {
    cfg.applicable.fill(true);
    if (!r.has("weights")) r.fail("weights", "required field is missing (or give a preset)");
  }

  if (r.has("alpha")) {
    const Json& a = r.require("alpha");
    if (a.is_array()) {
      const Reader arr = r.array("alpha");
      if (arr.size() != kComponentCount) r.fail("alpha", "expected four coefficients (C, R, I, S)");
      for (std::size_t i = 0; i < kComponentCount; ++i) {
        const Json& v = arr.node().at(i);
        if (!v.is_number()) throw SchemaError(arr.path() + "/" + std::to_string(i), "expected a number");
        cfg.alpha[i] = v.get<double>();
      }
    } else {
      const Reader obj = r.object("alpha");
      for (const auto& [key, value] : obj.node().items()) {
        auto c = component_from_string(key);
        if (!c) obj.fail(key, "unknown component");
        cfg.alpha[index(*c)] = obj.number(key);
      }
    }
  }

  if (r.has("weights")) {
    const Reader w = r.object("weights");
    for (const auto& [key, value] : w.node().items()) {
      auto m = metric_from_string(key);
      if (!m) w.fail(key, "unknown sub-metric");
      cfg.weights[index(*m)] = w.number(key);
    }
  }
  if (r.has("applicable")) {
    const Reader a = r.object("applicable");
    for (const auto& [key, value] : a.node().items()) {
      auto m = metric_from_string(key);
      if (!m) a.fail(key, "unknown sub-metric");
      cfg.applicable[index(*m)] = a.boolean(key);
    }
  }
  if (auto g = r.optional_object("ground_truth_weights")) {
    cfg.ground_truth = {g->number_or("human", cfg.ground_truth.human),
                        g->number_or("tenure", cfg.ground_truth.tenure),
                        g->number_or("human_machine", cfg.ground_truth.human_machine),
                        g->number_or("machine_machine", cfg.ground_truth.machine_machine)};
  }
  if (auto s = r.optional_object("sampling_weights")) {
    cfg.sampling = {s->number_or("saturation", cfg.sampling.saturation),
                    s->number_or("representativeness", cfg.sampling.representativeness)};
  }
  return cfg;
}

}  // namespace

WeightConfig parse_weight_config(std::string_view document) {
  if (trim(document) == "equal") return validate_weight_config(WeightConfig::equal());
  const Json root = detail::parse_json(document, "weight config");
  if (root.is_string()) {
    if (root.get<std::string>() != "equal") {
      throw SchemaError("", "unknown weight preset '" + root.get<std::string>() + "'");
    }
    return validate_weight_config(WeightConfig::equal());
  }
  if (!root.is_object()) throw SchemaError("", "weight config must be an object or \"equal\"");
  return validate_weight_config(config_from_reader(Reader(root, "")));
}

std::string emit_weight_config(const WeightConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

std::string config_digest(const WeightConfig& cfg) { return sha256_hex(config_to_json(cfg).dump()); }

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

std::string emit_report(const StrideReport& report) {
  Json subs = Json::array();
  for (const auto& s : report.sub_scores) {
    Json j = {{"metric", std::string(to_string(s.metric))},
              {"applicable", s.applicable()},
              {"inputs_digest", s.inputs_digest}};
    j["value"] = s.value ? Json(*s.value) : Json(nullptr);
    if (!s.reason.empty()) j["reason"] = s.reason;
    subs.push_back(std::move(j));
  }
  Json comps = Json::array();
  for (const auto& c : report.components) {
    Json terms = Json::array();
    for (const auto& t : c.terms) {
      terms.push_back({{"metric", std::string(to_string(t.metric))},
                       {"weight", t.weight},
                       {"value", t.value},
                       {"contribution", t.contribution}});
    }
    comps.push_back({{"component", std::string(symbol(c.component))},
                     {"terms", terms},
                     {"total", c.total}});
  }
  Json root = {{"spec_version", std::string(kReportSchemaVersion)},
               {"dataset_id", report.dataset_id},
               {"manifest_digest", report.manifest_digest},
               {"config_digest", report.config_digest},
               {"sub_scores", subs},
               {"components", comps},
               {"latent", report.latent},
               {"trust", report.trust},
               {"config", config_to_json(report.config)},
               {"flags", report.flags}};
  return root.dump(2) + "\n";
}

StrideReport parse_report(std::string_view document) {
  const Json root = detail::parse_json(document, "report");
  const Reader r(root, "");
  StrideReport report;
  if (r.string("spec_version") != kReportSchemaVersion) {
    r.fail("spec_version", "unsupported report version");
  }
  report.dataset_id = r.string("dataset_id");
  report.manifest_digest = r.string("manifest_digest");
  report.config_digest = r.string("config_digest");
  report.latent = r.number("latent");
  report.trust = r.number("trust");

  const Reader subs = r.array("sub_scores");
  if (subs.size() != kMetricCount) r.fail("sub_scores", "expected 13 entries");
  std::array<bool, kMetricCount> seen{};
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const Reader s = subs.element(i);
    auto m = metric_from_string(s.string("metric"));
    if (!m) s.fail("metric", "unknown sub-metric");
    if (seen[index(*m)]) s.fail("metric", "duplicate sub-metric");
    seen[index(*m)] = true;
    SubScore& out = report.sub_scores[index(*m)];
    out.metric = *m;
    if (s.boolean("applicable")) out.value = s.number("value");
    out.reason = s.string_or("reason", "");
    out.inputs_digest = s.string("inputs_digest");
  }

  const Reader comps = r.array("components");
  if (comps.size() != kComponentCount) r.fail("components", "expected 4 entries");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Reader c = comps.element(i);
    auto comp = component_from_string(c.string("component"));
    if (!comp) c.fail("component", "unknown component");
    ComponentBreakdown& out = report.components[index(*comp)];
    out.component = *comp;
    out.total = c.number("total");
    const Reader terms = c.array("terms");
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const Reader t = terms.element(k);
      auto m = metric_from_string(t.string("metric"));
      if (!m) t.fail("metric", "unknown sub-metric");
      out.terms.push_back(
          {*m, t.number("weight"), t.number("value"), t.number("contribution")});
    }
  }

  report.config = config_from_reader(r.object("config"));
  const Reader flags = r.array("flags");
  for (std::size_t i = 0; i < flags.size(); ++i) {
    report.flags.push_back(flags.node().at(i).get<std::string>());
  }
  return report;
}

std::string explain_report(const StrideReport& report) {
  std::ostringstream os;
  char buf[160];
  os << "dataset: " << report.dataset_id << "\n";
  os << "manifest digest: " << report.manifest_digest << "\n\n";
  for (const auto& c : report.components) {
    std::snprintf(buf, sizeof buf, "%s (%s) = %.4f\n", std::string(symbol(c.component)).c_str(),
                  std::string(to_string(c.component)).c_str(), c.total);
    os << buf;
    for (const auto& t : c.terms) {
      std::snprintf(buf, sizeof buf, "  %-3s weight %.4f x value %.4f = %.4f\n",
                    std::string(to_string(t.metric)).c_str(), t.weight, t.value, t.contribution);
      os << buf;
    }
    for (Metric m : metrics_of(c.component)) {
      const SubScore& s = report.sub_score(m);
      if (s.applicable()) continue;
      os << "  " << to_string(m) << "  not applicable: " << s.reason << "\n";
    }
  }
  const auto& a = report.config.alpha;
  std::snprintf(buf, sizeof buf,
                "\nlatent = %.4f*C + %.4f*R + %.4f*I - %.4f*S = %.4f\ntrust  = sigmoid(%.4f) = %.4f\n",
                a[0], a[1], a[2], a[3], report.latent, report.latent, report.trust);
  os << buf;
  for (const auto& f : report.flags) os << "flag: " << f << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  const auto tmp = path.parent_path() /
                   ("." + path.filename().string() + ".tmp-" + std::to_string(rd()) + "-" +
                    std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

}  // namespace stride

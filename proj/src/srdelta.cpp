#include "stride/srdelta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json_reader.hpp"
#include "stride/io.hpp"

namespace stride::delta {

using detail::Json;
using detail::Reader;

// ---------------------------------------------------------------------------
// Points / intervals
// ---------------------------------------------------------------------------

Points Points::from_double(double value) {
  if (!std::isfinite(value) || std::abs(value) > 9.0e12) {
    throw ValidationError(std::vector<Violation>{{"", "adjustment value out of range"}});
  }
  return Points(std::llround(value * static_cast<double>(kScale)));
}

std::string Points::to_string() const {
  if (micros_ == 0) return "0.0";
  const std::uint64_t mag =
      micros_ < 0 ? static_cast<std::uint64_t>(-(micros_ + 1)) + 1 : static_cast<std::uint64_t>(micros_);
  std::string frac = std::to_string(mag % kScale);
  frac.insert(0, 6 - frac.size(), '0');
  while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
  return (micros_ < 0 ? "-" : "+") + std::to_string(mag / kScale) + "." + frac;
}

std::string AdjustmentInterval::to_string() const {
  if (lo == hi) return lo.to_string();
  return lo.to_string() + " to " + hi.to_string();
}

// ---------------------------------------------------------------------------
// Rating records
// ---------------------------------------------------------------------------

namespace {

bool is_iso_date(const std::string& s) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3) {
    return false;
  }
  return m >= 1 && m <= 12 && d >= 1 && d <= 31;
}

constexpr double kZeroDelta = 1e-9;

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::vector<Violation> validate_rating_record(const RatingRecord& rec) {
  std::vector<Violation> out;
  if (!rec.period_start.empty() && !is_iso_date(rec.period_start)) {
    out.push_back({"/period_start", "expected a YYYY-MM-DD date"});
  }
  if (!rec.period_end.empty() && !is_iso_date(rec.period_end)) {
    out.push_back({"/period_end", "expected a YYYY-MM-DD date"});
  }
  if (is_iso_date(rec.period_start) && is_iso_date(rec.period_end) &&
      rec.period_end < rec.period_start) {
    out.push_back({"/period_end", "must not precede period_start"});
  }
  for (const auto& [key, s] : rec.issue_scores) {
    const std::string path = "/issue_scores/" + key;
    if (!(s.scale_min < s.scale_max)) {
      out.push_back({path, "scale_min must be below scale_max"});
      continue;
    }
    if (s.score < s.scale_min || s.score > s.scale_max) {
      out.push_back({path + "/score", "score lies outside its scale"});
    }
    if (s.score_range) {
      const auto [lo, hi] = *s.score_range;
      if (lo > hi) out.push_back({path + "/score_range", "lower bound exceeds upper bound"});
      if (lo < s.scale_min || hi > s.scale_max) {
        out.push_back({path + "/score_range", "range lies outside its scale"});
      }
    }
  }
  return out;
}

RatingRecord parse_rating_record(std::string_view document) {
  const Json root = detail::parse_json(document, "rating record");
  const Reader r(root, "");
  if (!root.is_object()) r.fail_here("rating record must be a JSON object");

  RatingRecord rec;
  rec.source_label = r.string("source_label");
  rec.period_start = r.string_or("period_start", "");
  rec.period_end = r.string_or("period_end", "");
  rec.overall_rating = r.has("overall_rating")
                           ? (r.require("overall_rating").is_string()
                                  ? r.string("overall_rating")
                                  : r.require("overall_rating").dump())
                           : std::string();

  const Reader issues = r.object("issue_scores");
  for (const auto& [key, value] : issues.node().items()) {
    const Reader s = issues.object(key);
    IssueScore score;
    if (s.has("score_range")) {
      const Reader range = s.array("score_range");
      if (range.size() != 2 || !range.node().at(0).is_number() || !range.node().at(1).is_number()) {
        s.fail("score_range", "expected [lo, hi]");
      }
      const double lo = range.node().at(0).get<double>();
      const double hi = range.node().at(1).get<double>();
      score.score_range = std::make_pair(lo, hi);
      score.score = s.has("score") ? s.number("score") : 0.5 * (lo + hi);
    } else {
      score.score = s.number("score");
    }
    score.scale_min = s.number("scale_min");
    score.scale_max = s.number("scale_max");
    score.methodology_citation = s.string_or("methodology_citation", "");
    rec.issue_scores.emplace(key, std::move(score));
  }
  if (auto v = validate_rating_record(rec); !v.empty()) throw ValidationError(std::move(v));
  return rec;
}

std::vector<IssueDiff> diff_ratings(const RatingRecord& baseline, const RatingRecord& stride) {
  std::set<std::string> keys;
  for (const auto& [k, v] : baseline.issue_scores) keys.insert(k);
  for (const auto& [k, v] : stride.issue_scores) keys.insert(k);

  std::vector<IssueDiff> out;
  std::vector<Violation> mismatched;
  for (const auto& key : keys) {
    IssueDiff d;
    d.issue_key = key;
    if (auto it = baseline.issue_scores.find(key); it != baseline.issue_scores.end()) {
      d.baseline = it->second;
    }
    if (auto it = stride.issue_scores.find(key); it != stride.issue_scores.end()) {
      d.stride = it->second;
    }
    if (d.baseline && d.stride) {
      if (d.baseline->scale_min != d.stride->scale_min ||
          d.baseline->scale_max != d.stride->scale_max) {
        mismatched.push_back({"/issue_scores/" + key,
                              "scales differ: [" + format_score(d.baseline->scale_min) + ", " +
                                  format_score(d.baseline->scale_max) + "] vs [" +
                                  format_score(d.stride->scale_min) + ", " +
                                  format_score(d.stride->scale_max) + "]"});
        continue;
      }
      d.delta = d.stride->score - d.baseline->score;
    }
    out.push_back(std::move(d));
  }
  if (!mismatched.empty()) throw ValidationError(std::move(mismatched));
  return out;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 4> kCategoryNames = {
    "definition_ambiguity", "over_penalization", "under_penalization", "other_scoring_error"};

AdjustmentInterval read_adjustment(const Reader& r) {
  const Json& v = r.require("adjustment");
  const std::string path = r.child_path("adjustment");
  if (v.is_number()) {
    const Points p = Points::from_double(v.get<double>());
    return {p, p};
  }
  double lo = 0.0, hi = 0.0;
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    lo = v[0].get<double>();
    hi = v[1].get<double>();
  } else if (v.is_object()) {
    const Reader obj(v, path);
    lo = obj.number("lo");
    hi = obj.number("hi");
  } else {
    throw SchemaError(path, "expected a number, [lo, hi] or {lo, hi}");
  }
  AdjustmentInterval out{Points::from_double(lo), Points::from_double(hi)};
  if (out.lo > out.hi) throw ValidationError(std::vector<Violation>{{path, "lo must not exceed hi"}});
  return out;
}

}  // namespace

std::string_view to_string(DiscrepancyCategory c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<DiscrepancyCategory> category_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return static_cast<DiscrepancyCategory>(i);
  }
  return std::nullopt;
}

AnnotationMap parse_annotations(std::string_view document) {
  const Json root = detail::parse_json(document, "annotations");
  const Json* map = &root;
  std::string base;
  if (root.is_object() && root.contains("annotations")) {
    map = &root.at("annotations");
    base = "/annotations";
  }
  if (!map->is_object()) throw SchemaError(base, "expected an object keyed by issue");

  AnnotationMap out;
  const Reader all(*map, base);
  for (const auto& [key, value] : map->items()) {
    const Reader a = all.object(key);
    Annotation ann;
    const auto category = category_from_string(a.string("category"));
    if (!category) {
      a.fail("category",
             "unknown category (expected definition_ambiguity, over_penalization, "
             "under_penalization or other_scoring_error)");
    }
    ann.category = *category;
    ann.adjustment = read_adjustment(a);
    if (a.has("evidence")) {
      const Reader ev = a.array("evidence");
      for (std::size_t i = 0; i < ev.size(); ++i) {
        if (!ev.node().at(i).is_string()) {
          throw SchemaError(ev.path() + "/" + std::to_string(i), "expected a string");
        }
        ann.evidence_refs.push_back(ev.node().at(i).get<std::string>());
      }
    }
    ann.narrative = a.string_or("narrative", "");
    ann.finding = a.string_or("finding", "");
    ann.reference_definition = a.string_or("reference_definition", "");
    ann.analysis = a.string_or("analysis", "");
    ann.conclusion = a.string_or("conclusion", "");
    out.emplace(key, std::move(ann));
  }
  return out;
}

std::vector<DiscrepancyItem> attach_classification(std::span<const IssueDiff> diffs,
                                                   const AnnotationMap& annotations) {
  std::vector<Violation> unknown;
  for (const auto& [key, ann] : annotations) {
    const bool found = std::any_of(diffs.begin(), diffs.end(),
                                   [&](const IssueDiff& d) { return d.issue_key == key; });
    if (!found) unknown.push_back({"/annotations/" + key, "annotation references an unknown issue"});
  }
  if (!unknown.empty()) throw ValidationError(std::move(unknown));

  std::vector<DiscrepancyItem> items;
  for (const auto& d : diffs) {
    DiscrepancyItem item;
    item.issue_key = d.issue_key;
    item.baseline = d.baseline;
    item.stride = d.stride;
    item.delta = d.delta;

    if (auto it = annotations.find(d.issue_key); it != annotations.end()) {
      const Annotation& a = it->second;
      item.annotated = true;
      item.category = a.category;
      item.adjustment = a.adjustment;
      item.evidence_refs = a.evidence_refs;
      item.narrative = a.narrative;
      item.finding = a.finding;
      item.reference_definition = a.reference_definition;
      item.analysis = a.analysis;
      item.conclusion = a.conclusion;
    } else if (d.one_sided()) {
      item.narrative = d.baseline ? "scored only by the baseline" : "scored only by the recomputation";
    } else if (std::abs(*d.delta) > kZeroDelta) {
      const Points p = Points::from_double(*d.delta);
      item.adjustment = {p, p};
      item.narrative = "unclassified score difference";
    } else {
      continue;
    }
    items.push_back(std::move(item));
  }
  return items;
}

AdjustmentInterval net_adjustment(std::span<const DiscrepancyItem> items) {
  AdjustmentInterval net;
  for (const auto& item : items) {
    net.lo += item.adjustment.lo;
    net.hi += item.adjustment.hi;
  }
  return net;
}

DeltaReport make_delta_report(std::vector<DiscrepancyItem> items, std::string baseline_label,
                              std::string baseline_overall, std::string stride_label) {
  DeltaReport report;
  report.net = net_adjustment(items);
  report.baseline_label = std::move(baseline_label);
  report.baseline_overall = std::move(baseline_overall);
  report.stride_label = std::move(stride_label);

  std::set<std::pair<double, double>> scales;
  for (const auto& item : items) {
    const auto& side = item.baseline ? item.baseline : item.stride;
    if (side) scales.insert({side->scale_min, side->scale_max});
    if (!item.baseline || !item.stride) {
      report.notes.push_back("issue " + item.issue_key + " is " + item.narrative);
    }
  }
  if (scales.size() > 1) {
    std::string note = "net adjustment sums issues on different scales:";
    for (const auto& [lo, hi] : scales) note += " [" + format_score(lo) + ", " + format_score(hi) + "]";
    report.notes.push_back(note);
  }
  report.items = std::move(items);
  return report;
}

DeltaReport analyze(const RatingRecord& baseline, const RatingRecord& stride,
                    const AnnotationMap& annotations) {
  const auto diffs = diff_ratings(baseline, stride);
  return make_delta_report(attach_classification(diffs, annotations), baseline.source_label,
                           baseline.overall_rating, stride.source_label);
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

std::optional<ReportFormat> format_from_string(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  return std::nullopt;
}

namespace {

Json score_json(const std::optional<IssueScore>& s) {
  if (!s) return nullptr;
  Json j = {{"score", s->score}, {"scale", {s->scale_min, s->scale_max}}};
  if (s->score_range) j["score_range"] = {s->score_range->first, s->score_range->second};
  if (!s->methodology_citation.empty()) j["methodology_citation"] = s->methodology_citation;
  return j;
}

Json interval_json(const AdjustmentInterval& a) {
  return {{"lo", a.lo.to_double()}, {"hi", a.hi.to_double()}, {"display", a.to_string()}};
}

std::string emit_json(const DeltaReport& report) {
  Json items = Json::array();
  for (const auto& item : report.items) {
    Json j = {{"issue_key", item.issue_key},
              {"category", std::string(to_string(item.category))},
              {"annotated", item.annotated},
              {"baseline", score_json(item.baseline)},
              {"stride", score_json(item.stride)},
              {"adjustment", interval_json(item.adjustment)},
              {"evidence_refs", item.evidence_refs},
              {"narrative", item.narrative}};
    j["delta"] = item.delta ? Json(*item.delta) : Json(nullptr);
    for (const auto& [key, text] : {std::pair{"finding", &item.finding},
                                    {"reference_definition", &item.reference_definition},
                                    {"analysis", &item.analysis},
                                    {"conclusion", &item.conclusion}}) {
      if (!text->empty()) j[key] = *text;
    }
    items.push_back(std::move(j));
  }
  Json root = {{"spec_version", std::string(kReportSchemaVersion)},
               {"baseline_label", report.baseline_label},
               {"baseline_overall", report.baseline_overall},
               {"stride_label", report.stride_label},
               {"items", items},
               {"net_adjustment", interval_json(report.net)},
               {"notes", report.notes}};
  return root.dump(2) + "\n";
}

std::string cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n') {
      out += "<br>";
    } else {
      out.push_back(c);
    }
  }
  return out.empty() ? "-" : out;
}

std::string score_cell(const std::optional<IssueScore>& s) {
  if (!s) return "not scored";
  std::string out;
  if (s->score_range) {
    out = format_score(s->score_range->first) + " to " + format_score(s->score_range->second) +
          " (midpoint " + format_score(s->score) + ")";
  } else {
    out = format_score(s->score);
  }
  out += " on [" + format_score(s->scale_min) + ", " + format_score(s->scale_max) + "]";
  if (!s->methodology_citation.empty()) out += "; " + s->methodology_citation;
  return cell(out);
}

std::string emit_markdown(const DeltaReport& report) {
  std::ostringstream os;
  os << "# Rating discrepancy report\n\n";
  if (!report.baseline_label.empty()) {
    os << "Baseline: " << report.baseline_label;
    if (!report.baseline_overall.empty()) os << " (overall " << report.baseline_overall << ")";
    os << "\n";
  }
  if (!report.stride_label.empty()) os << "Recomputed: " << report.stride_label << "\n";
  os << "\n";

  if (report.items.empty()) {
    os << "No discrepancies found.\n\n";
  }
  for (const auto& item : report.items) {
    os << "## " << item.issue_key << " (" << to_string(item.category) << ")\n\n";
    os << "| Field | Content |\n|---|---|\n";
    os << "| Baseline result | " << score_cell(item.baseline) << " |\n";
    os << "| STRIDE-guided result | " << score_cell(item.stride) << " |\n";
    if (item.delta) os << "| Score difference | " << cell(format_score(*item.delta)) << " |\n";
    os << "| Finding | " << cell(item.finding.empty() ? item.narrative : item.finding) << " |\n";
    os << "| Reference definition | " << cell(item.reference_definition) << " |\n";
    os << "| Analysis | " << cell(item.analysis) << " |\n";
    os << "| Conclusion | " << cell(item.conclusion) << " |\n";
    os << "| Adjustment | " << item.adjustment.to_string() << " |\n";
    if (!item.evidence_refs.empty()) {
      std::string refs;
      for (const auto& e : item.evidence_refs) refs += (refs.empty() ? "" : "; ") + e;
      os << "| Evidence | " << cell(refs) << " |\n";
    }
    os << "\n";
  }
  os << "**Net adjustment:** " << report.net.lo.to_string() << " to " << report.net.hi.to_string()
     << "\n";
  if (!report.notes.empty()) {
    os << "\nNotes:\n";
    for (const auto& n : report.notes) os << "- " << n << "\n";
  }
  return os.str();
}

}  // namespace

std::string emit_delta_report(const DeltaReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json:
      return emit_json(report);
    case ReportFormat::Markdown:
      return emit_markdown(report);
  }
  throw SchemaError("", "unknown report format");
}

}  // namespace stride::delta

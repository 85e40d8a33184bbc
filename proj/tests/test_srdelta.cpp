#include "doctest.h"
#include "json.hpp"
#include "stride/io.hpp"
#include "stride/srdelta.hpp"

using namespace stride;
using namespace stride::delta;

namespace {

RatingRecord fixture(const char* name) {
  return parse_rating_record(read_text_file(std::string(STRIDE_FIXTURE_DIR "/") + name));
}

AnnotationMap fixture_annotations() {
  return parse_annotations(read_text_file(STRIDE_FIXTURE_DIR "/luxshare_annotations.json"));
}

Points pts(double v) { return Points::from_double(v); }

DiscrepancyItem item(double lo, double hi) {
  DiscrepancyItem d;
  d.adjustment = {pts(lo), pts(hi)};
  return d;
}

RatingRecord simple(std::initializer_list<std::pair<const char*, double>> scores) {
  RatingRecord r;
  r.source_label = "agency";
  for (const auto& [k, v] : scores) r.issue_scores[k] = IssueScore{v, std::nullopt, 0, 10, ""};
  return r;
}

}  // namespace

TEST_CASE("Points formatting and arithmetic") {
  CHECK(pts(1.2).to_string() == "+1.2");
  CHECK(pts(-0.85).to_string() == "-0.85");
  CHECK(pts(0.0).to_string() == "0.0");
  CHECK(pts(-1.1).to_string() == "-1.1");
  CHECK(pts(12.000001).to_string() == "+12.000001");
  CHECK((pts(1.2) + pts(-1.1)) == pts(0.1));
  CHECK((pts(1.2) + pts(-0.5)) == pts(0.7));
  CHECK(pts(0.1).micros() == 100000);
  CHECK(AdjustmentInterval{pts(1.2), pts(1.2)}.to_string() == "+1.2");
  CHECK(AdjustmentInterval{pts(0.1), pts(0.7)}.to_string() == "+0.1 to +0.7");
}

TEST_CASE("rating records") {
  const auto base = fixture("luxshare_baseline.json");
  CHECK(base.overall_rating == "BB");
  CHECK(base.period_start == "2023-11-14");
  CHECK(base.issue_scores.at("chemical_safety").score == 6.1);

  const auto recomputed = fixture("luxshare_stride.json");
  const auto& chem = recomputed.issue_scores.at("chemical_safety");
  CHECK(chem.score == 5.25);
  REQUIRE(chem.score_range.has_value());

  CHECK_THROWS_AS(parse_rating_record(R"({"issue_scores": {}})"), SchemaError);
  CHECK_THROWS_AS(parse_rating_record(
                      R"({"source_label": "x", "issue_scores": {"a": {"score": 11, "scale_min": 0, "scale_max": 10}}})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_rating_record(
                      R"({"source_label": "x", "issue_scores": {"a": {"score": 1, "scale_min": 5, "scale_max": 5}}})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_rating_record(R"({"source_label": "x", "period_start": "14/11/2023", "issue_scores": {}})"),
                  ValidationError);
}

TEST_CASE("diff_ratings") {
  const auto diffs = diff_ratings(fixture("luxshare_baseline.json"), fixture("luxshare_stride.json"));
  REQUIRE(diffs.size() == 2);
  CHECK(diffs[0].issue_key == "chemical_safety");
  CHECK(*diffs[0].delta == doctest::Approx(-0.85).epsilon(1e-12));
  CHECK(*diffs[1].delta == doctest::Approx(1.2).epsilon(1e-12));

  const auto same = simple({{"a", 3.0}, {"b", 7.5}});
  for (const auto& d : diff_ratings(same, same)) CHECK(*d.delta == 0.0);

  const auto one = diff_ratings(simple({{"a", 3.0}, {"only_base", 1.0}}), simple({{"a", 4.0}}));
  REQUIRE(one.size() == 2);
  CHECK(one[1].issue_key == "only_base");
  CHECK(one[1].one_sided());
  CHECK_FALSE(one[1].delta.has_value());

  auto other_scale = simple({{"a", 3.0}});
  other_scale.issue_scores["a"].scale_max = 5;
  CHECK_THROWS_AS(diff_ratings(simple({{"a", 3.0}}), other_scale), ValidationError);
}

TEST_CASE("diff_ratings is antisymmetric") {
  const auto a = simple({{"x", 1.5}, {"y", 9.0}, {"z", 4.25}});
  const auto b = simple({{"x", 2.0}, {"y", 3.0}, {"z", 4.25}});
  const auto ab = diff_ratings(a, b);
  const auto ba = diff_ratings(b, a);
  for (std::size_t i = 0; i < ab.size(); ++i) CHECK(*ab[i].delta == -*ba[i].delta);
}

TEST_CASE("attach_classification") {
  const auto diffs = diff_ratings(fixture("luxshare_baseline.json"), fixture("luxshare_stride.json"));
  const auto items = attach_classification(diffs, fixture_annotations());
  REQUIRE(items.size() == 2);
  CHECK(items[1].issue_key == "executive_pay_disclosure");
  CHECK(items[1].category == DiscrepancyCategory::DefinitionAmbiguity);
  CHECK(items[1].adjustment == AdjustmentInterval{pts(1.2), pts(1.2)});
  CHECK(items[0].category == DiscrepancyCategory::OverPenalization);
  CHECK(items[0].adjustment == AdjustmentInterval{pts(-1.1), pts(-0.5)});
  CHECK(items[0].evidence_refs.size() == 2);

  // unannotated non-zero diff
  const auto plain = attach_classification(diffs, {});
  REQUIRE(plain.size() == 2);
  CHECK(plain[0].category == DiscrepancyCategory::OtherScoringError);
  CHECK(plain[0].adjustment == AdjustmentInterval{pts(-0.85), pts(-0.85)});
  CHECK_FALSE(plain[0].annotated);

  const auto same = simple({{"a", 3.0}});
  CHECK(attach_classification(diff_ratings(same, same), {}).empty());

  AnnotationMap stray;
  stray["nowhere"] = Annotation{};
  CHECK_THROWS_AS(attach_classification(diffs, stray), ValidationError);
}

TEST_CASE("annotation parsing") {
  const auto a = parse_annotations(R"({"annotations": {
      "x": {"category": "under_penalization", "adjustment": 0.4},
      "y": {"category": "other_scoring_error", "adjustment": {"lo": -1, "hi": 2}}}})");
  CHECK(a.at("x").adjustment == AdjustmentInterval{pts(0.4), pts(0.4)});
  CHECK(a.at("y").adjustment == AdjustmentInterval{pts(-1), pts(2)});
  CHECK_THROWS_AS(parse_annotations(R"({"x": {"category": "vibes", "adjustment": 1}})"), SchemaError);
  CHECK_THROWS_AS(parse_annotations(R"({"x": {"category": "other_scoring_error", "adjustment": [2, 1]}})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_annotations(R"({"x": {"category": "other_scoring_error"}})"), SchemaError);
}

TEST_CASE("net_adjustment") {
  const std::vector<DiscrepancyItem> lux{item(1.2, 1.2), item(-1.1, -0.5)};
  const auto net = net_adjustment(lux);
  CHECK(net.lo == pts(0.1));
  CHECK(net.hi == pts(0.7));
  CHECK(net.to_string() == "+0.1 to +0.7");

  CHECK(net_adjustment({}) == AdjustmentInterval{});

  const std::vector<DiscrepancyItem> three{item(1, 2), item(-1, 0), item(0.5, 0.5)};
  CHECK(net_adjustment(three) == AdjustmentInterval{pts(0.5), pts(2.5)});
}

TEST_CASE("Luxshare report") {
  const auto report =
      analyze(fixture("luxshare_baseline.json"), fixture("luxshare_stride.json"), fixture_annotations());
  CHECK(report.net == AdjustmentInterval{pts(0.1), pts(0.7)});
  CHECK(report.baseline_overall == "BB");
  CHECK(report.notes.size() == 1);  // two issue scales

  const auto md = emit_delta_report(report, ReportFormat::Markdown);
  CHECK(md.find("+0.1 to +0.7") != std::string::npos);
  for (const char* field : {"| Finding |", "| Reference definition |", "| Analysis |", "| Conclusion |"}) {
    CHECK(md.find(field) != std::string::npos);
  }
  CHECK(md == emit_delta_report(report, ReportFormat::Markdown));

  const auto json = nlohmann::json::parse(emit_delta_report(report, ReportFormat::Json));
  CHECK(json["spec_version"] == "1.0");
  CHECK(json["net_adjustment"]["display"] == "+0.1 to +0.7");
  CHECK(json["items"].size() == 2);
}

TEST_CASE("empty report") {
  const auto report = make_delta_report({});
  const auto md = emit_delta_report(report, ReportFormat::Markdown);
  CHECK(md.find("No discrepancies found.") != std::string::npos);
  CHECK(md.find("0.0 to 0.0") != std::string::npos);
  CHECK(format_from_string("markdown") == ReportFormat::Markdown);
  CHECK_FALSE(format_from_string("pdf").has_value());
}

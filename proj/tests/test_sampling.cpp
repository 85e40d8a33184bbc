#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "generators.hpp"
#include "stride/io.hpp"
#include "stride/sampling.hpp"

using namespace stride;
using namespace stride::sampling;
using doctest::Approx;

namespace {

PopulationRecord numeric_record(const std::string& id, double pages) {
  PopulationRecord r;
  r.record_id = id;
  r.criteria["page_count"] = pages;
  return r;
}

}  // namespace

TEST_CASE("criteria table") {
  CHECK(criteria_table().size() == 18);
  CHECK(kind_of("page_count") == CriterionKind::Numeric);
  CHECK(kind_of("region") == CriterionKind::Categorical);
  CHECK(kind_of("public") == CriterionKind::Boolean);
  CHECK(kind_of("frameworks") == CriterionKind::Set);
  CHECK(kind_of("custom_column") == CriterionKind::Categorical);
}

TEST_CASE("js_divergence examples") {
  Eigen::Vector2d p(1.0, 0.0), q(0.5, 0.5);
  CHECK(js_divergence(p, q) == Approx(0.31127812445913283).epsilon(1e-12));
  CHECK(std::abs(js_divergence(p, q) - 0.3113) <= 1e-4);
  CHECK(js_divergence(p, p) == 0.0);
  Eigen::Vector2d r(0.0, 1.0);
  CHECK(js_divergence(p, r) == 1.0);
}

TEST_CASE("js_divergence aligns categories") {
  Distribution a{"region", {"asia", "europe"}, Eigen::Vector2d(0.5, 0.5)};
  Distribution b{"region", {"europe", "africa"}, Eigen::Vector2d(0.5, 0.5)};
  // union {africa, asia, europe}: (0, .5, .5) vs (.5, 0, .5)
  Eigen::Vector3d pa(0.0, 0.5, 0.5), pb(0.5, 0.0, 0.5);
  CHECK(js_divergence(a, b) == Approx(js_divergence(pa, pb)).epsilon(1e-15));
  CHECK(js_divergence(a, a) == 0.0);
}

TEST_CASE("representativeness_sigma") {
  const std::vector<double> equal{0.25, 0.25, 0.25, 0.25};
  CHECK(representativeness_sigma(equal) == 0.0);
  const std::vector<double> two{0.8, 0.2};
  CHECK(representativeness_sigma(two) == Approx(0.3).epsilon(1e-12));
  const std::vector<double> spike{1, 0, 0, 0};
  CHECK(representativeness_sigma(spike) == Approx(0.4330127018922193).epsilon(1e-12));
  CHECK_THROWS_AS(representativeness_sigma(std::span<const double>{}), ComputationError);
}

TEST_CASE("numeric criteria are quantile binned") {
  std::vector<PopulationRecord> recs;
  for (int i = 1; i <= 100; ++i) recs.push_back(numeric_record("r" + std::to_string(i), i));
  const Stratifier s(recs, "page_count", 4);
  REQUIRE(s.breakpoints().size() == 3);
  CHECK(s.breakpoints()[0] == Approx(25.75));
  CHECK(s.breakpoints()[1] == Approx(50.5));
  CHECK(s.breakpoints()[2] == Approx(75.25));
  const auto d = s.distribution(recs);
  CHECK(d.probabilities.sum() == Approx(1.0));
  CHECK(d.probabilities(0) == Approx(0.25));
  CHECK(s.categorize(numeric_record("x", 0.0))[0] == 0);
  CHECK(s.categorize(numeric_record("x", 1000.0))[0] == 3);
}

TEST_CASE("ties collapse duplicate breakpoints") {
  std::vector<PopulationRecord> recs;
  for (int i = 0; i < 90; ++i) recs.push_back(numeric_record("a" + std::to_string(i), 10));
  for (int i = 0; i < 10; ++i) recs.push_back(numeric_record("b" + std::to_string(i), 20));
  const Stratifier s(recs, "page_count", 10);
  CHECK(s.categories().size() == 2);
  const auto d = s.distribution(recs);
  CHECK(d.probabilities(0) == Approx(0.9));
  CHECK(d.probabilities(1) == Approx(0.1));
}

TEST_CASE("categorical, boolean and set criteria") {
  const auto pop = gen::population(300, 5);
  for (const char* c : {"region", "industry", "public", "frameworks", "page_count", "revenue_billions"}) {
    const auto d = categorical_distribution(pop, c);
    CHECK(d.probabilities.sum() == Approx(1.0).epsilon(1e-12));
    CHECK(d.probabilities.minCoeff() >= 0.0);
    CHECK(d.categories.size() == static_cast<std::size_t>(d.probabilities.size()));
  }
  const auto pub = categorical_distribution(pop, "public");
  CHECK(pub.categories == std::vector<std::string>{"false", "true"});

  CHECK_THROWS_AS(categorical_distribution(pop, "no_such_column"), ComputationError);
  CHECK_THROWS_AS(categorical_distribution({}, "region"), ComputationError);
}

TEST_CASE("saturation curve") {
  const auto pop = gen::population(400, 9);
  const std::vector<std::size_t> sizes{20, 100, 400};
  const auto a = saturation_curve(pop, "page_count", sizes, 42);
  const auto b = saturation_curve(pop, "page_count", sizes, 42);
  REQUIRE(a.size() == 3);
  CHECK(a[2].divergence == 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].divergence == b[i].divergence);
  CHECK(saturation_curve(pop, "region", {}, 1).empty());
  const std::vector<std::size_t> too_big{401};
  CHECK_THROWS_AS(saturation_curve(pop, "region", too_big, 1), ComputationError);
  CHECK(emit_curve_csv(a).rfind("sample_size,divergence\n", 0) == 0);
}

TEST_CASE("select: whole population") {
  const auto pop = gen::population(40, 2);
  const std::vector<std::string> criteria{"region", "public"};
  const auto s = select_representative_sample(pop, 40, criteria, 1);
  CHECK(s.record_ids.size() == 40);
  CHECK(s.deviation == 0.0);
}

TEST_CASE("select: balanced two-category population") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pop = gen::two_category(10, 10, seed);
    const std::vector<std::string> criteria{"group"};
    const auto s = select_representative_sample(pop, 10, criteria, seed);
    REQUIRE(s.record_ids.size() == 10);
    int a = 0;
    for (const auto& id : s.record_ids) {
      const auto it = std::find_if(pop.begin(), pop.end(), [&](const auto& r) { return r.record_id == id; });
      a += std::get<std::string>(it->criteria.at("group")) == "A";
    }
    CHECK(a == 5);
    CHECK(s.deviation == 0.0);
  }
}

TEST_CASE("select: never worse than the starting subset") {
  const auto pop = gen::population(500, 17);
  const std::vector<std::string> criteria{"region", "industry", "page_count", "public", "frameworks"};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = select_representative_sample(pop, 30, criteria, seed);
    CHECK(s.deviation <= s.initial_deviation);
    CHECK(s.swaps <= 300);
    std::vector<long> positions;
    for (const auto& id : s.record_ids) {
      positions.push_back(std::find_if(pop.begin(), pop.end(), [&](const auto& r) { return r.record_id == id; }) -
                          pop.begin());
    }
    CHECK(std::is_sorted(positions.begin(), positions.end()));
    const auto again = select_representative_sample(pop, 30, criteria, seed);
    CHECK(again.record_ids == s.record_ids);
  }
}

TEST_CASE("select: argument errors") {
  const auto pop = gen::population(10, 1);
  const std::vector<std::string> criteria{"region"};
  CHECK_THROWS_AS(select_representative_sample(pop, 0, criteria, 1), ComputationError);
  CHECK_THROWS_AS(select_representative_sample(pop, 11, criteria, 1), ComputationError);
}

TEST_CASE("population CSV") {
  const auto recs = parse_population_csv(
      "record_id,page_count,region,public,frameworks\n"
      "a,10,asia,yes,GRI;SASB\n"
      "b,20,\"north, america\",0,\n");
  REQUIRE(recs.size() == 2);
  CHECK(std::get<double>(recs[0].criteria.at("page_count")) == 10.0);
  CHECK(std::get<std::string>(recs[1].criteria.at("region")) == "north, america");
  CHECK(std::get<bool>(recs[0].criteria.at("public")));
  CHECK(std::get<std::set<std::string>>(recs[0].criteria.at("frameworks")).size() == 2);
  CHECK(std::get<std::set<std::string>>(recs[1].criteria.at("frameworks")).empty());

  CHECK_THROWS_AS(parse_population_csv("page_count\n1\n"), SchemaError);
  CHECK_THROWS_AS(parse_population_csv("record_id,page_count\na,-3\n"), SchemaError);
  CHECK_THROWS_AS(parse_population_csv("record_id,public\na,maybe\n"), SchemaError);
  CHECK_THROWS_AS(parse_population_csv("record_id,region\na,x\na,y\n"), SchemaError);
  CHECK_THROWS_AS(parse_population_csv("record_id,region\na,x,extra\n"), SchemaError);

  const auto shipped = parse_population_csv(read_text_file(STRIDE_FIXTURE_DIR "/population_small.csv"));
  CHECK(shipped.size() == 60);
  CHECK(common_criteria(shipped).front() == "page_count");
}

TEST_CASE("population JSON") {
  const auto recs = parse_population_json(
      R"({"records": [{"record_id": "a", "criteria": {"page_count": 12, "frameworks": ["GRI"], "public": true}}]})");
  REQUIRE(recs.size() == 1);
  CHECK(std::get<double>(recs[0].criteria.at("page_count")) == 12.0);
  CHECK_THROWS_AS(parse_population_json(R"([{"record_id": "a", "criteria": {"public": "yes"}}])"), SchemaError);
}

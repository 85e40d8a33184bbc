#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "properties.hpp"

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

const std::string kFixtures = STRIDE_FIXTURE_DIR;

Outcome run(const std::string& args, const std::filesystem::path& store) {
  const std::string cmd =
      "STRIDE_STORE='" + store.string() + "' '" STRIDE_CLI_PATH "' " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int status = ::pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

}  // namespace

TEST_CASE("score, store and explain") {
  props::ScratchDir dir("cli");
  const auto store = dir.path() / "runs";
  const auto scored = run("score --manifest " + kFixtures + "/luxshare_manifest.json --weights equal", store);
  REQUIRE(scored.code == 0);
  const auto report = nlohmann::json::parse(scored.out);
  CHECK(report["spec_version"] == "1.0");
  CHECK(report["trust"].get<double>() == doctest::Approx(0.559759666464598).epsilon(1e-12));

  const auto out = dir.path() / "report.json";
  CHECK(run("score --manifest " + kFixtures + "/luxshare_manifest.json --weights " + kFixtures +
                "/equal_weights.json --out " + out.string(),
            store)
            .code == 0);
  CHECK(stride::read_text_file(out) == scored.out);

  // both invocations produced the same content-addressed entry
  std::vector<std::filesystem::path> entries(std::filesystem::directory_iterator(store), {});
  REQUIRE(entries.size() == 1);
  const auto id = entries[0].stem().string();
  const auto explained = run("explain --run " + id.substr(0, 10), store);
  CHECK(explained.code == 0);
  CHECK(explained.out.find("trust  = sigmoid(0.2402) = 0.5598") != std::string::npos);
  CHECK(run("explain --run ffffffffffff", store).code == 1);
}

TEST_CASE("exit codes") {
  props::ScratchDir dir("cli-codes");
  const auto store = dir.path() / "runs";
  CHECK(run("validate --manifest " + kFixtures + "/luxshare_manifest.json", store).code == 0);

  const auto bad = dir.path() / "bad.json";
  auto j = nlohmann::json::parse(stride::read_text_file(kFixtures + "/luxshare_manifest.json"));
  j["coverage"]["external_data_flag"] = 2;
  std::ofstream(bad) << j.dump();
  const auto v = run("validate --manifest " + bad.string(), store);
  CHECK(v.code == 2);
  CHECK(v.out.find("/coverage/external_data_flag") != std::string::npos);
  CHECK(run("score --manifest " + bad.string() + " --weights equal", store).code == 2);

  j = nlohmann::json::parse(stride::read_text_file(kFixtures + "/luxshare_manifest.json"));
  j.erase("safety");
  std::ofstream(bad) << j.dump();
  CHECK(run("validate --manifest " + bad.string(), store).code == 2);

  std::ofstream(bad) << "{ not json";
  CHECK(run("score --manifest " + bad.string() + " --weights equal", store).code == 2);

  j = nlohmann::json::parse(stride::read_text_file(kFixtures + "/luxshare_manifest.json"));
  j["governance"]["governed_cases"] = 0;
  j["governance"]["interventions"] = 0;
  std::ofstream(bad) << j.dump();
  CHECK(run("score --manifest " + bad.string() + " --weights equal", store).code == 3);

  CHECK(run("score --manifest " + kFixtures + "/luxshare_manifest.json", store).code == 1);
  CHECK(run("frobnicate", store).code == 1);
  CHECK(run("score --manifest /no/such/file.json --weights equal", store).code == 1);
}

TEST_CASE("sample commands") {
  props::ScratchDir dir("cli-sample");
  const std::string pop = kFixtures + "/population_small.csv";
  const auto curve = run("sample curve --population " + pop + " --criterion region --sizes 10,30,60 --seed 4",
                         dir.path());
  REQUIRE(curve.code == 0);
  CHECK(curve.out.rfind("sample_size,divergence\n", 0) == 0);
  CHECK(curve.out.find("\n60,0\n") != std::string::npos);
  CHECK(run("sample curve --population " + pop + " --criterion region --sizes 10,30,60 --seed 4", dir.path()).out ==
        curve.out);
  CHECK(run("sample curve --population " + pop + " --criterion region --sizes 61 --seed 4", dir.path()).code == 3);

  const auto sel = run("sample select --population " + pop + " --k 12 --seed 4", dir.path());
  REQUIRE(sel.code == 0);
  const auto doc = nlohmann::json::parse(sel.out);
  CHECK(doc["record_ids"].size() == 12);
  CHECK(doc["deviation"].get<double>() <= doc["initial_deviation"].get<double>());
  CHECK(run("sample select --population " + pop + " --k 0 --seed 4", dir.path()).code == 3);
}

TEST_CASE("delta command") {
  props::ScratchDir dir("cli-delta");
  const std::string args = "delta --baseline " + kFixtures + "/luxshare_baseline.json --stride " + kFixtures +
                           "/luxshare_stride.json --annotations " + kFixtures + "/luxshare_annotations.json";
  const auto md = run(args + " --format markdown", dir.path());
  REQUIRE(md.code == 0);
  CHECK(md.out.find("**Net adjustment:** +0.1 to +0.7") != std::string::npos);
  const auto js = run(args + " --format json", dir.path());
  REQUIRE(js.code == 0);
  CHECK(nlohmann::json::parse(js.out)["net_adjustment"]["display"] == "+0.1 to +0.7");
  CHECK(run(args + " --format pdf", dir.path()).code == 1);
}

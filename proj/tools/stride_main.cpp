// stride: score benchmark datasets, inspect stored runs, analyze samples and
// diff third-party ratings.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stride/io.hpp"
#include "stride/run_store.hpp"
#include "stride/sampling.hpp"
#include "stride/scoring.hpp"
#include "stride/srdelta.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSchema = 2;
constexpr int kExitComputation = 3;

stride::WeightConfig load_weights(const std::string& arg) {
  if (arg == "equal" && !fs::exists(arg)) return stride::parse_weight_config("equal");
  return stride::parse_weight_config(stride::read_text_file(arg));
}

std::vector<stride::sampling::PopulationRecord> load_population(const std::string& path) {
  const std::string text = stride::read_text_file(path);
  if (fs::path(path).extension() == ".json") return stride::sampling::parse_population_json(text);
  return stride::sampling::parse_population_csv(text);
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    out.push_back(item.substr(first, item.find_last_not_of(" \t") - first + 1));
  }
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
  std::vector<std::size_t> sizes;
  for (const auto& item : split_list(list)) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.front() == '-') {
      throw CLI::ValidationError("--sizes", "'" + item + "' is not a non-negative integer");
    }
    sizes.push_back(static_cast<std::size_t>(v));
  }
  return sizes;
}

struct Options {
  std::string manifest;
  std::string weights;
  std::string out;
  std::string run_id;
  std::string population;
  std::string criterion;
  std::string criteria;
  std::string sizes;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::size_t bins = stride::sampling::kDefaultBins;
  std::size_t max_swaps = 0;
  std::string baseline;
  std::string stride_record;
  std::string annotations;
  std::string format = "json";
  std::string store;
};

fs::path store_root(const Options& opt) {
  return opt.store.empty() ? stride::RunStore::default_root() : fs::path(opt.store);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    stride::write_text_file_atomic(out, text);
  }
}

int cmd_score(const Options& opt) {
  const auto manifest = stride::parse_manifest(stride::read_text_file(opt.manifest));
  const auto cfg = load_weights(opt.weights);
  const auto report = stride::score_dataset(manifest, cfg);
  stride::RunStore store(store_root(opt));
  const std::string id = store.save(report);
  emit(stride::emit_report(report), opt.out);
  std::cerr << "run " << id << "\n";
  return kExitOk;
}

int cmd_explain(const Options& opt) {
  const stride::RunStore store(store_root(opt));
  const auto record = store.load(opt.run_id);
  std::cout << "run " << record.run_id << " (" << record.timestamp << ")\n"
            << stride::explain_report(record.report);
  return kExitOk;
}

int cmd_validate(const Options& opt) {
  const auto manifest = stride::parse_manifest_unchecked(stride::read_text_file(opt.manifest));
  const auto violations = stride::validate_manifest(manifest);
  if (violations.empty()) {
    std::cout << opt.manifest << ": ok\n";
    return kExitOk;
  }
  for (const auto& v : violations) std::cout << opt.manifest << ": " << v.path << ": " << v.message << "\n";
  return kExitSchema;
}

int cmd_sample_curve(const Options& opt) {
  const auto population = load_population(opt.population);
  const auto sizes = parse_sizes(opt.sizes);
  const auto curve =
      stride::sampling::saturation_curve(population, opt.criterion, sizes, opt.seed, opt.bins);
  emit(stride::sampling::emit_curve_csv(curve), opt.out);
  return kExitOk;
}

int cmd_sample_select(const Options& opt) {
  const auto population = load_population(opt.population);
  const auto criteria =
      opt.criteria.empty() ? stride::sampling::common_criteria(population) : split_list(opt.criteria);
  stride::sampling::SelectionOptions sel;
  sel.bins = opt.bins;
  sel.max_swaps = opt.max_swaps;
  const auto result =
      stride::sampling::select_representative_sample(population, opt.k, criteria, opt.seed, sel);
  const json doc = {{"spec_version", std::string(stride::kReportSchemaVersion)},
                    {"k", opt.k},
                    {"seed", opt.seed},
                    {"criteria", criteria},
                    {"record_ids", result.record_ids},
                    {"deviation", result.deviation},
                    {"initial_deviation", result.initial_deviation},
                    {"swaps", result.swaps}};
  emit(doc.dump(2) + "\n", opt.out);
  return kExitOk;
}

int cmd_delta(const Options& opt) {
  namespace d = stride::delta;
  const auto format = d::format_from_string(opt.format);
  if (!format) throw CLI::ValidationError("--format", "expected json or markdown");
  const auto baseline = d::parse_rating_record(stride::read_text_file(opt.baseline));
  const auto recomputed = d::parse_rating_record(stride::read_text_file(opt.stride_record));
  const auto annotations = opt.annotations.empty()
                               ? d::AnnotationMap{}
                               : d::parse_annotations(stride::read_text_file(opt.annotations));
  emit(d::emit_delta_report(d::analyze(baseline, recomputed, annotations), *format), opt.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust scoring for benchmark datasets and rating discrepancy analysis", "stride"};
  app.require_subcommand(1);
  Options opt;
  int (*handler)(const Options&) = nullptr;

  auto* score = app.add_subcommand("score", "Score a dataset manifest and store the run");
  score->add_option("--manifest", opt.manifest, "Dataset manifest (JSON)")->required();
  score->add_option("--weights", opt.weights, "Weight config (JSON) or 'equal'")->required();
  score->add_option("--out", opt.out, "Write the report here instead of stdout");
  score->add_option("--store", opt.store, "Run store directory (default $STRIDE_STORE or ./.stride-runs)");
  score->callback([&] { handler = cmd_score; });

  auto* explain = app.add_subcommand("explain", "Print the breakdown of a stored run");
  explain->add_option("--run", opt.run_id, "Run id or unique prefix")->required();
  explain->add_option("--store", opt.store, "Run store directory");
  explain->callback([&] { handler = cmd_explain; });

  auto* validate = app.add_subcommand("validate", "Check a manifest without scoring it");
  validate->add_option("--manifest", opt.manifest, "Dataset manifest (JSON)")->required();
  validate->callback([&] { handler = cmd_validate; });

  auto* sample = app.add_subcommand("sample", "Representativeness analysis of a population");
  sample->require_subcommand(1);
  auto* curve = sample->add_subcommand("curve", "JS divergence of random samples against the population");
  curve->add_option("--population", opt.population, "Population table (.csv or .json)")->required();
  curve->add_option("--criterion", opt.criterion, "Criterion to compare")->required();
  curve->add_option("--sizes", opt.sizes, "Comma-separated sample sizes")->required();
  curve->add_option("--seed", opt.seed, "Random seed")->required();
  curve->add_option("--bins", opt.bins, "Quantile bins for numeric criteria")->check(CLI::PositiveNumber);
  curve->add_option("--out", opt.out, "Write the CSV here instead of stdout");
  curve->callback([&] { handler = cmd_sample_curve; });

  auto* select = sample->add_subcommand("select", "Pick a k-subset that tracks the population");
  select->add_option("--population", opt.population, "Population table (.csv or .json)")->required();
  select->add_option("--k", opt.k, "Subset size")->required();
  select->add_option("--seed", opt.seed, "Random seed")->required();
  select->add_option("--criteria", opt.criteria, "Comma-separated criteria (default: all shared columns)");
  select->add_option("--bins", opt.bins, "Quantile bins for numeric criteria")->check(CLI::PositiveNumber);
  select->add_option("--max-swaps", opt.max_swaps, "Swap cap (default 10*k)");
  select->add_option("--out", opt.out, "Write the result here instead of stdout");
  select->callback([&] { handler = cmd_sample_select; });

  auto* delta = app.add_subcommand("delta", "Diff a baseline rating against a recomputed one");
  delta->add_option("--baseline", opt.baseline, "Baseline rating record (JSON)")->required();
  delta->add_option("--stride", opt.stride_record, "Recomputed rating record (JSON)")->required();
  delta->add_option("--annotations", opt.annotations, "Expert annotations (JSON)");
  delta->add_option("--format", opt.format, "json or markdown")->check(CLI::IsMember({"json", "markdown", "md"}));
  delta->add_option("--out", opt.out, "Write the report here instead of stdout");
  delta->callback([&] { handler = cmd_delta; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return handler(opt);
  } catch (const stride::SchemaError& e) {
    std::cerr << "stride: schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const stride::ValidationError& e) {
    std::cerr << "stride: invalid input:\n";
    for (const auto& v : e.violations()) {
      std::cerr << "  " << (v.path.empty() ? "/" : v.path) << ": " << v.message << "\n";
    }
    return kExitSchema;
  } catch (const stride::ComputationError& e) {
    std::cerr << "stride: computation error: " << e.what() << "\n";
    return kExitComputation;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "stride: " << e.what() << "\n";
    return kExitUsage;
  } catch (const stride::NotFoundError& e) {
    std::cerr << "stride: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "stride: " << e.what() << "\n";
    return kExitUsage;
  }
}

#include "stride/sampling.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <numeric>
#include <random>

namespace stride::sampling {

namespace {

constexpr std::array<CriterionSpec, 18> kCriteria = {{
    {"page_count", CriterionKind::Numeric, "data_properties"},
    {"word_count", CriterionKind::Numeric, "data_properties"},
    {"sentence_count", CriterionKind::Numeric, "data_properties"},
    {"avg_sentence_length", CriterionKind::Numeric, "data_properties"},
    {"file_size_mb", CriterionKind::Numeric, "data_properties"},
    {"image_count", CriterionKind::Numeric, "data_properties"},
    {"visual_elements_per_page", CriterionKind::Numeric, "data_properties"},
    {"region", CriterionKind::Categorical, "company_diversity"},
    {"industry", CriterionKind::Categorical, "company_diversity"},
    {"revenue_billions", CriterionKind::Numeric, "company_diversity"},
    {"employees_thousands", CriterionKind::Numeric, "company_diversity"},
    {"years_since_founded", CriterionKind::Numeric, "company_diversity"},
    {"public", CriterionKind::Boolean, "company_diversity"},
    {"env_keyword_count", CriterionKind::Numeric, "domain_attributes"},
    {"social_keyword_count", CriterionKind::Numeric, "domain_attributes"},
    {"gov_keyword_count", CriterionKind::Numeric, "domain_attributes"},
    {"framework_count", CriterionKind::Numeric, "domain_attributes"},
    {"frameworks", CriterionKind::Set, "domain_attributes"},
}};

constexpr std::string_view kNoneCategory = "(none)";

std::string format_bound(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const CriterionValue& lookup(const PopulationRecord& r, std::string_view criterion) {
  auto it = r.criteria.find(criterion);
  if (it == r.criteria.end()) {
    throw ComputationError("record '" + r.record_id + "' has no value for criterion '" +
                           std::string(criterion) + "'");
  }
  return it->second;
}

double numeric_value(const PopulationRecord& r, std::string_view criterion) {
  const auto& v = lookup(r, criterion);
  if (const double* d = std::get_if<double>(&v)) return *d;
  throw ComputationError("record '" + r.record_id + "': criterion '" + std::string(criterion) +
                         "' is not numeric");
}

// Labels of a non-numeric value.
std::vector<std::string> labels_of(const PopulationRecord& r, std::string_view criterion) {
  const auto& v = lookup(r, criterion);
  return std::visit(
      [](const auto& x) -> std::vector<std::string> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return {x};
        } else if constexpr (std::is_same_v<T, bool>) {
          return {x ? "true" : "false"};
        } else if constexpr (std::is_same_v<T, double>) {
          return {format_bound(x)};
        } else {
          if (x.empty()) return {std::string(kNoneCategory)};
          return {x.begin(), x.end()};
        }
      },
      v);
}

// Linear-interpolation quantile of sorted data (Hyndman-Fan type 7).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::span<const CriterionSpec> criteria_table() { return kCriteria; }

CriterionKind kind_of(std::string_view criterion) {
  for (const auto& spec : criteria_table()) {
    if (spec.name == criterion) return spec.kind;
  }
  return CriterionKind::Categorical;
}

std::vector<std::string> common_criteria(std::span<const PopulationRecord> records) {
  std::vector<std::string> out;
  if (records.empty()) return out;
  const auto in_all = [&](std::string_view name) {
    return std::all_of(records.begin(), records.end(),
                       [&](const PopulationRecord& r) { return r.criteria.contains(name); });
  };
  for (const auto& spec : criteria_table()) {
    if (in_all(spec.name)) out.emplace_back(spec.name);
  }
  for (const auto& [name, value] : records.front().criteria) {
    bool tabled = false;
    for (const auto& spec : criteria_table()) tabled = tabled || spec.name == name;
    if (!tabled && in_all(name)) out.push_back(name);
  }
  return out;
}

// ---------------------------------------------------------------------------

double js_divergence(const Distribution& p, const Distribution& q) {
  std::vector<std::string> categories = p.categories;
  for (const auto& c : q.categories) {
    if (std::find(categories.begin(), categories.end(), c) == categories.end()) {
      categories.push_back(c);
    }
  }
  const auto aligned = [&](const Distribution& d) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(categories.size()));
    for (std::size_t i = 0; i < d.categories.size(); ++i) {
      const auto pos = std::find(categories.begin(), categories.end(), d.categories[i]);
      v(pos - categories.begin()) += d.probabilities(static_cast<Eigen::Index>(i));
    }
    return v;
  };
  return js_divergence(aligned(p), aligned(q));
}

double representativeness_sigma(std::span<const double> shares) {
  return representativeness_sigma(
      Eigen::Map<const Eigen::VectorXd>(shares.data(), static_cast<Eigen::Index>(shares.size())));
}

// ---------------------------------------------------------------------------

Stratifier::Stratifier(std::span<const PopulationRecord> reference, std::string criterion,
                       std::size_t bins)
    : criterion_(std::move(criterion)), kind_(kind_of(criterion_)) {
  if (reference.empty()) throw ComputationError("cannot stratify an empty record set");
  if (std::none_of(reference.begin(), reference.end(),
                   [&](const PopulationRecord& r) { return r.criteria.contains(criterion_); })) {
    throw ComputationError("unknown criterion '" + criterion_ + "'");
  }

  if (kind_ == CriterionKind::Numeric) {
    if (bins < 2) throw ComputationError("numeric criteria need at least 2 bins");
    std::vector<double> values;
    values.reserve(reference.size());
    for (const auto& r : reference) values.push_back(numeric_value(r, criterion_));
    std::sort(values.begin(), values.end());
    for (std::size_t j = 1; j < bins; ++j) {
      const double b = quantile_sorted(values, static_cast<double>(j) / static_cast<double>(bins));
      // A breakpoint at the minimum would leave the lowest bin empty.
      if (b > values.front() && (breakpoints_.empty() || b > breakpoints_.back())) {
        breakpoints_.push_back(b);
      }
    }
    const std::size_t n = breakpoints_.size() + 1;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string lo = i == 0 ? "-inf" : format_bound(breakpoints_[i - 1]);
      const std::string hi = i + 1 == n ? "+inf" : format_bound(breakpoints_[i]);
      categories_.push_back("[" + lo + ", " + hi + ")");
    }
  } else {
    std::set<std::string> seen;
    for (const auto& r : reference) {
      for (auto& label : labels_of(r, criterion_)) seen.insert(std::move(label));
    }
    categories_.assign(seen.begin(), seen.end());
  }
  for (std::size_t i = 0; i < categories_.size(); ++i) category_index_[categories_[i]] = i;
}

std::vector<std::size_t> Stratifier::categorize(const PopulationRecord& record) const {
  if (kind_ == CriterionKind::Numeric) {
    const double v = numeric_value(record, criterion_);
    return {static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), v) -
                                     breakpoints_.begin())};
  }
  std::vector<std::size_t> out;
  for (const auto& label : labels_of(record, criterion_)) {
    auto it = category_index_.find(label);
    if (it == category_index_.end()) {
      throw ComputationError("record '" + record.record_id + "': value '" + label +
                             "' of criterion '" + criterion_ + "' is absent from the reference");
    }
    out.push_back(it->second);
  }
  return out;
}

Eigen::VectorXd Stratifier::counts(std::span<const PopulationRecord> records) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(categories_.size()));
  for (const auto& r : records) {
    for (std::size_t idx : categorize(r)) c(static_cast<Eigen::Index>(idx)) += 1.0;
  }
  return c;
}

Distribution Stratifier::distribution(std::span<const PopulationRecord> records) const {
  if (records.empty()) throw ComputationError("distribution of an empty record set");
  const Eigen::VectorXd c = counts(records);
  return {criterion_, categories_, c / c.sum()};
}

Distribution categorical_distribution(std::span<const PopulationRecord> records,
                                      std::string_view criterion, std::size_t bins) {
  if (records.empty()) throw ComputationError("categorical_distribution: no records");
  return Stratifier(records, std::string(criterion), bins).distribution(records);
}

// ---------------------------------------------------------------------------

std::vector<SaturationPoint> saturation_curve(std::span<const PopulationRecord> population,
                                              std::string_view criterion,
                                              std::span<const std::size_t> sizes,
                                              std::uint64_t seed, std::size_t bins) {
  std::vector<SaturationPoint> curve;
  if (sizes.empty()) return curve;
  for (std::size_t n : sizes) {
    if (n == 0 || n > population.size()) {
      throw ComputationError("sample size " + std::to_string(n) + " outside [1, " +
                             std::to_string(population.size()) + "]");
    }
  }
  const Stratifier strat(population, std::string(criterion), bins);
  const Distribution reference = strat.distribution(population);

  std::vector<std::size_t> all(population.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<PopulationRecord> sample;
  for (std::size_t n : sizes) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(n)};
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> picked;
    picked.reserve(n);
    std::sample(all.begin(), all.end(), std::back_inserter(picked), n, rng);
    sample.clear();
    for (std::size_t i : picked) sample.push_back(population[i]);
    curve.push_back({n, js_divergence(strat.distribution(sample).probabilities,
                                      reference.probabilities)});
  }
  return curve;
}

std::string emit_curve_csv(std::span<const SaturationPoint> curve) {
  std::string out = "sample_size,divergence\n";
  char buf[64];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g\n", p.sample_size, p.divergence);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Per-criterion category counts of the current subset, with the population
// distributions they are compared against.
class SubsetObjective {
 public:
  SubsetObjective(std::span<const PopulationRecord> population,
                  std::span<const std::string> criteria, std::size_t bins) {
    for (const auto& c : criteria) {
      Stratifier strat(population, c, bins);
      Eigen::VectorXd pop = strat.counts(population);
      targets_.push_back(pop / pop.sum());
      std::vector<std::vector<std::size_t>> cats;
      cats.reserve(population.size());
      for (const auto& r : population) cats.push_back(strat.categorize(r));
      categories_.push_back(std::move(cats));
    }
  }

  std::vector<Eigen::VectorXd> counts_for(std::span<const std::size_t> members) const {
    std::vector<Eigen::VectorXd> counts;
    for (std::size_t c = 0; c < targets_.size(); ++c) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(targets_[c].size());
      for (std::size_t i : members) add(v, c, i, 1.0);
      counts.push_back(std::move(v));
    }
    return counts;
  }

  double deviation(const std::vector<Eigen::VectorXd>& counts) const {
    double total = 0.0;
    for (std::size_t c = 0; c < targets_.size(); ++c) {
      total += js_divergence(counts[c] / counts[c].sum(), targets_[c]);
    }
    return total;
  }

  void add(Eigen::VectorXd& v, std::size_t criterion, std::size_t record, double delta) const {
    for (std::size_t idx : categories_[criterion][record]) v(static_cast<Eigen::Index>(idx)) += delta;
  }

  // Deviation after replacing `out` by `in`, leaving `counts` unchanged.
  double deviation_after_swap(std::vector<Eigen::VectorXd>& counts, std::size_t out,
                              std::size_t in) const {
    for (std::size_t c = 0; c < targets_.size(); ++c) {
      add(counts[c], c, out, -1.0);
      add(counts[c], c, in, 1.0);
    }
    const double d = deviation(counts);
    for (std::size_t c = 0; c < targets_.size(); ++c) {
      add(counts[c], c, in, -1.0);
      add(counts[c], c, out, 1.0);
    }
    return d;
  }

  std::size_t criteria_count() const { return targets_.size(); }

 private:
  std::vector<Eigen::VectorXd> targets_;
  std::vector<std::vector<std::vector<std::size_t>>> categories_;
};

constexpr double kImprovementTolerance = 1e-12;

}  // namespace

Selection select_representative_sample(std::span<const PopulationRecord> population,
                                       std::size_t k, std::span<const std::string> criteria,
                                       std::uint64_t seed, const SelectionOptions& options) {
  if (k == 0 || k > population.size()) {
    throw ComputationError("k = " + std::to_string(k) + " outside [1, " +
                           std::to_string(population.size()) + "]");
  }
  if (criteria.empty()) throw ComputationError("select_representative_sample: no criteria");

  const SubsetObjective objective(population, criteria, options.bins);
  const std::size_t max_swaps = options.max_swaps == 0 ? 10 * k : options.max_swaps;

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);

  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> members(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<std::size_t> others(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());

  auto counts = objective.counts_for(members);
  Selection result;
  result.initial_deviation = objective.deviation(counts);
  double current = result.initial_deviation;

  bool improved = true;
  while (improved && result.swaps < max_swaps) {
    improved = false;
    std::shuffle(members.begin(), members.end(), rng);
    std::shuffle(others.begin(), others.end(), rng);
    for (std::size_t mi = 0; mi < members.size() && !improved; ++mi) {
      for (std::size_t oi = 0; oi < others.size(); ++oi) {
        const double candidate = objective.deviation_after_swap(counts, members[mi], others[oi]);
        if (candidate < current - kImprovementTolerance) {
          for (std::size_t c = 0; c < objective.criteria_count(); ++c) {
            objective.add(counts[c], c, members[mi], -1.0);
            objective.add(counts[c], c, others[oi], 1.0);
          }
          std::swap(members[mi], others[oi]);
          current = candidate;
          ++result.swaps;
          improved = true;
          break;
        }
      }
    }
  }

  result.deviation = objective.deviation(objective.counts_for(members));
  std::sort(members.begin(), members.end());
  for (std::size_t i : members) result.record_ids.push_back(population[i].record_id);
  return result;
}

}  // namespace stride::sampling

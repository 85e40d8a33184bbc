#pragma once

// Seeded random inputs for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "stride/model.hpp"
#include "stride/sampling.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::uint64_t count(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return uniform(rng) < p; }

/// A manifest satisfying every invariant, with positive denominators
/// everywhere and optional sections present or absent at random.
inline stride::DatasetManifest manifest(Rng& rng) {
  using namespace stride;
  DatasetManifest m;
  m.dataset_id = "synthetic-" + std::to_string(count(rng, 0, 1u << 30));

  auto& c = m.coverage;
  c.countries_total = count(rng, 1, 250);
  c.countries_covered = count(rng, 0, c.countries_total);
  c.industries_total = count(rng, 1, 200);
  c.industries_covered = count(rng, 0, c.industries_total);
  for (std::uint8_t l = 0; l < kStandardLayerCount; ++l) {
    if (coin(rng, 0.7)) c.standard_layers_covered.insert(static_cast<StandardLayer>(l));
  }
  c.external_data_flag = coin(rng) ? 1 : 0;

  const auto n_evidence = coin(rng, 0.3) ? 0 : count(rng, 1, 6);
  for (std::uint64_t i = 0; i < n_evidence; ++i) {
    m.evidence.push_back({"ev-" + std::to_string(i), "", uniform(rng), uniform(rng)});
  }

  m.recognition.recognitions_per_year = count(rng, 0, 40);
  m.recognition.single_event_confidence = uniform(rng, 0.01, 0.99);
  m.temporal.lag_years = uniform(rng, 0.0, 10.0);
  m.temporal.decay_rate = uniform(rng, 0.01, 2.0);

  if (coin(rng, 0.8)) {
    m.annotation = AnnotationStats{uniform(rng), uniform(rng, 0.0, 20.0), uniform(rng, 0.5, 10.0),
                                   uniform(rng, 0.0, 2.0), uniform(rng, 0.0, 2.0)};
  }
  if (coin(rng, 0.8)) {
    m.agility = AgilityStats{uniform(rng, -0.2, 0.5), uniform(rng, 0.0, 1.0),
                             coin(rng) ? kDefaultAgilityEpsilon : uniform(rng, 1e-9, 1e-3)};
  }

  m.safety.total_rows = count(rng, 1, 5000);
  m.safety.harmful_rows = count(rng, 0, m.safety.total_rows);

  auto& g = m.governance;
  g.governed_cases = count(rng, 1, 2000);
  g.interventions = count(rng, 0, g.governed_cases);
  g.experts_total = count(rng, 1, 30);
  g.experts_involved = count(rng, 0, g.experts_total);
  g.stages_total = count(rng, 1, 20);
  g.stages_with_experts = count(rng, 0, g.stages_total);
  const auto series = count(rng, 0, 6);
  for (std::uint64_t i = 0; i < series; ++i) g.accuracy_series.push_back(uniform(rng));
  g.assumptions_required = count(rng, 0, 12);
  g.assumptions_disclosed = count(rng, 0, g.assumptions_required);
  g.role_relations_total = count(rng, 1, 30);
  g.role_relations_separated = count(rng, 0, g.role_relations_total);

  if (coin(rng, 0.7)) {
    m.sampling_inputs = SamplingInputs{count(rng, 0, 1000), count(rng, 1, 600), uniform(rng, 0.0, 0.5)};
  }
  return m;
}

/// Unnormalized weight config with strictly positive weights, every metric
/// enabled, so each component has at least one always-available metric.
inline stride::WeightConfig raw_weights(Rng& rng) {
  stride::WeightConfig cfg;
  for (auto& a : cfg.alpha) a = uniform(rng, 0.0, 2.0);
  for (auto& w : cfg.weights) w = uniform(rng, 0.05, 3.0);
  cfg.applicable.fill(true);
  cfg.ground_truth = {uniform(rng, 0.05, 1), uniform(rng, 0.05, 1), uniform(rng, 0.05, 1),
                      uniform(rng, 0.05, 1)};
  cfg.sampling = {uniform(rng, 0.05, 1), uniform(rng, 0.05, 1)};
  return cfg;
}

// ---------------------------------------------------------------------------
// Populations
// ---------------------------------------------------------------------------

/// Skewed synthetic report population covering numeric, categorical,
/// boolean and set-valued criteria.
inline std::vector<stride::sampling::PopulationRecord> population(std::size_t n, std::uint64_t seed) {
  using stride::sampling::PopulationRecord;
  Rng rng(seed);
  const std::vector<std::string> regions = {"asia", "europe", "north_america", "latin_america", "africa"};
  std::discrete_distribution<int> region_pick({40, 30, 20, 7, 3});
  const std::vector<std::string> industries = {"electronics", "energy", "finance", "retail",
                                               "materials", "health", "transport"};
  const std::vector<std::string> frameworks = {"GRI", "SASB", "TCFD", "CDP", "ISSB"};
  std::lognormal_distribution<double> pages(4.3, 0.6);
  std::gamma_distribution<double> revenue(2.0, 15.0);

  std::vector<PopulationRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PopulationRecord r;
    r.record_id = "rec-" + std::to_string(i);
    r.criteria["page_count"] = std::round(pages(rng));
    r.criteria["revenue_billions"] = revenue(rng);
    r.criteria["region"] = regions[region_pick(rng)];
    r.criteria["industry"] = industries[count(rng, 0, industries.size() - 1)];
    r.criteria["public"] = coin(rng, 0.8);
    std::set<std::string> fw;
    for (const auto& f : frameworks) {
      if (coin(rng, 0.35)) fw.insert(f);
    }
    r.criteria["frameworks"] = fw;
    out.push_back(std::move(r));
  }
  return out;
}

/// Records carrying only a categorical `group` criterion, `a` of them "A"
/// and `b` of them "B", in shuffled order.
inline std::vector<stride::sampling::PopulationRecord> two_category(std::size_t a, std::size_t b,
                                                                    std::uint64_t seed) {
  std::vector<std::string> labels(a, "A");
  labels.insert(labels.end(), b, "B");
  Rng rng(seed);
  std::shuffle(labels.begin(), labels.end(), rng);
  std::vector<stride::sampling::PopulationRecord> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    stride::sampling::PopulationRecord r;
    r.record_id = "r" + std::to_string(i);
    r.criteria["group"] = labels[i];
    out.push_back(std::move(r));
  }
  return out;
}

/// Random probability vector of length n; some entries zeroed when `sparse`.
inline std::vector<double> probability_vector(Rng& rng, std::size_t n, bool sparse) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) {
    v = (sparse && coin(rng, 0.3)) ? 0.0 : uniform(rng, 0.0, 1.0);
    total += v;
  }
  if (total == 0.0) {
    p[count(rng, 0, n - 1)] = 1.0;
    return p;
  }
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace gen

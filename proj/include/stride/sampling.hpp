#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stride/errors.hpp"

namespace stride::sampling {

// ---------------------------------------------------------------------------
// Criteria and records
// ---------------------------------------------------------------------------

enum class CriterionKind { Numeric, Categorical, Boolean, Set };

struct CriterionSpec {
  std::string_view name;
  CriterionKind kind;
  std::string_view family;  // "data_properties", "company_diversity", "domain_attributes"
};

/// The report-level criteria used to judge representativeness.
std::span<const CriterionSpec> criteria_table();

/// Kind of a criterion; names outside the table are categorical.
CriterionKind kind_of(std::string_view criterion);

using CriterionValue = std::variant<double, std::string, bool, std::set<std::string>>;

struct PopulationRecord {
  std::string record_id;
  std::map<std::string, CriterionValue, std::less<>> criteria;

  bool operator==(const PopulationRecord&) const = default;
};

/// Criteria present in every record, in table order followed by any extra
/// columns in lexical order.
std::vector<std::string> common_criteria(std::span<const PopulationRecord> records);

/// CSV with a header row. `record_id` is required; `frameworks` cells are
/// `;`-separated; `public` accepts true/false/1/0/yes/no.
std::vector<PopulationRecord> parse_population_csv(std::string_view text);

/// Either an array of `{record_id, criteria: {...}}` objects or an object
/// with a `records` array of the same.
std::vector<PopulationRecord> parse_population_json(std::string_view text);

// ---------------------------------------------------------------------------
// Distributions and divergence
// ---------------------------------------------------------------------------

struct Distribution {
  std::string criterion;
  std::vector<std::string> categories;
  Eigen::VectorXd probabilities;
};

/// Jensen-Shannon divergence in bits between two aligned probability vectors.
/// Terms with zero mass contribute zero.
template <typename DerivedP, typename DerivedQ>
double js_divergence(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
  eigen_assert(p.size() == q.size());
  double kl_p = 0.0;
  double kl_q = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p(i);
    const double qi = q(i);
    const double mi = 0.5 * (pi + qi);
    if (pi > 0.0) kl_p += pi * std::log2(pi / mi);
    if (qi > 0.0) kl_q += qi * std::log2(qi / mi);
  }
  // Rounding can leave a tiny negative residue for near-identical inputs.
  const double jsd = 0.5 * kl_p + 0.5 * kl_q;
  return jsd < 0.0 ? 0.0 : (jsd > 1.0 ? 1.0 : jsd);
}

/// Aligns the two category lists (union, missing categories padded with 0)
/// before computing the divergence.
double js_divergence(const Distribution& p, const Distribution& q);

/// Population standard deviation of the shares around their own mean.
template <typename Derived>
double representativeness_sigma(const Eigen::MatrixBase<Derived>& shares) {
  if (shares.size() == 0) throw ComputationError("representativeness_sigma: empty share vector");
  const double mean = shares.mean();
  return std::sqrt((shares.array() - mean).square().mean());
}

double representativeness_sigma(std::span<const double> shares);

/// Maps records to categories of one criterion. Numeric criteria are binned
/// with quantile breakpoints taken from the reference records, so samples of
/// a population share the population's categories.
class Stratifier {
 public:
  Stratifier(std::span<const PopulationRecord> reference, std::string criterion,
             std::size_t bins = 10);

  const std::string& criterion() const { return criterion_; }
  const std::vector<std::string>& categories() const { return categories_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  /// Category indices a record contributes (one, or several for set-valued
  /// criteria).
  std::vector<std::size_t> categorize(const PopulationRecord& record) const;

  Eigen::VectorXd counts(std::span<const PopulationRecord> records) const;

  Distribution distribution(std::span<const PopulationRecord> records) const;

 private:
  std::string criterion_;
  CriterionKind kind_;
  std::vector<double> breakpoints_;
  std::vector<std::string> categories_;
  std::map<std::string, std::size_t, std::less<>> category_index_;
};

inline constexpr std::size_t kDefaultBins = 10;

/// Relative frequencies of one criterion over `records`, numeric criteria
/// quantile-binned over the same records.
Distribution categorical_distribution(std::span<const PopulationRecord> records,
                                      std::string_view criterion, std::size_t bins = kDefaultBins);

// ---------------------------------------------------------------------------
// Saturation and subset selection
// ---------------------------------------------------------------------------

struct SaturationPoint {
  std::size_t sample_size = 0;
  double divergence = 0.0;
};

/// For each size, draws a seeded uniform sample without replacement and
/// measures its divergence from the population on `criterion`.
std::vector<SaturationPoint> saturation_curve(std::span<const PopulationRecord> population,
                                              std::string_view criterion,
                                              std::span<const std::size_t> sizes,
                                              std::uint64_t seed, std::size_t bins = kDefaultBins);

/// `sample_size,divergence` CSV.
std::string emit_curve_csv(std::span<const SaturationPoint> curve);

struct SelectionOptions {
  std::size_t bins = kDefaultBins;
  std::size_t max_swaps = 0;  // 0 means 10 * k
};

struct Selection {
  std::vector<std::string> record_ids;  // in population order
  double deviation = 0.0;               // sum over criteria of JSD to the population
  double initial_deviation = 0.0;       // same, for the seeded starting subset
  std::size_t swaps = 0;
};

/// Greedy swap search for a k-subset whose criterion distributions deviate
/// least from the population. Starts from a seeded random subset and accepts
/// any member/non-member swap that lowers the aggregate divergence.
Selection select_representative_sample(std::span<const PopulationRecord> population,
                                       std::size_t k, std::span<const std::string> criteria,
                                       std::uint64_t seed, const SelectionOptions& options = {});

}  // namespace stride::sampling

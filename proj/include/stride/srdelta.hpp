#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stride/errors.hpp"

namespace stride::delta {

/// Signed decimal with six fractional digits, stored as an integer count of
/// millionths. Adjustment arithmetic is exact in this representation.
class Points {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Points() = default;
  static constexpr Points from_micros(std::int64_t micros) { return Points(micros); }
  /// Rounds to the nearest millionth.
  static Points from_double(double value);

  constexpr std::int64_t micros() const { return micros_; }
  double to_double() const { return static_cast<double>(micros_) / kScale; }

  /// "+1.2", "-0.85", "0.0": explicit sign, trailing zeros trimmed.
  std::string to_string() const;

  constexpr Points operator+(Points o) const { return Points(micros_ + o.micros_); }
  constexpr Points operator-(Points o) const { return Points(micros_ - o.micros_); }
  constexpr Points& operator+=(Points o) {
    micros_ += o.micros_;
    return *this;
  }
  constexpr auto operator<=>(const Points&) const = default;

 private:
  constexpr explicit Points(std::int64_t micros) : micros_(micros) {}
  std::int64_t micros_ = 0;
};

struct AdjustmentInterval {
  Points lo;
  Points hi;

  Points width() const { return hi - lo; }
  /// "+1.2" when degenerate, otherwise "+0.1 to +0.7".
  std::string to_string() const;

  bool operator==(const AdjustmentInterval&) const = default;
};

// ---------------------------------------------------------------------------
// Rating records
// ---------------------------------------------------------------------------

struct IssueScore {
  double score = 0.0;  // midpoint when a range is given
  std::optional<std::pair<double, double>> score_range;
  double scale_min = 0.0;
  double scale_max = 10.0;
  std::string methodology_citation;

  bool operator==(const IssueScore&) const = default;
};

struct RatingRecord {
  std::string source_label;
  std::string period_start;  // YYYY-MM-DD
  std::string period_end;
  std::string overall_rating;  // opaque, e.g. "BB"
  std::map<std::string, IssueScore> issue_scores;

  bool operator==(const RatingRecord&) const = default;
};

std::vector<Violation> validate_rating_record(const RatingRecord& record);

RatingRecord parse_rating_record(std::string_view document);

struct IssueDiff {
  std::string issue_key;
  std::optional<IssueScore> baseline;
  std::optional<IssueScore> stride;
  std::optional<double> delta;  // stride - baseline, when both sides exist

  bool one_sided() const { return !baseline || !stride; }
};

/// One entry per issue key present in either record, in key order. Throws
/// ValidationError if a key is scored on different scales by the two records.
std::vector<IssueDiff> diff_ratings(const RatingRecord& baseline, const RatingRecord& stride);

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class DiscrepancyCategory {
  DefinitionAmbiguity,
  OverPenalization,
  UnderPenalization,
  OtherScoringError,
};

std::string_view to_string(DiscrepancyCategory c);
std::optional<DiscrepancyCategory> category_from_string(std::string_view name);

/// Expert judgment for one issue.
struct Annotation {
  DiscrepancyCategory category = DiscrepancyCategory::OtherScoringError;
  AdjustmentInterval adjustment;
  std::vector<std::string> evidence_refs;
  std::string narrative;
  std::string finding;
  std::string reference_definition;
  std::string analysis;
  std::string conclusion;
};

using AnnotationMap = std::map<std::string, Annotation>;

AnnotationMap parse_annotations(std::string_view document);

struct DiscrepancyItem {
  std::string issue_key;
  std::optional<IssueScore> baseline;
  std::optional<IssueScore> stride;
  std::optional<double> delta;
  DiscrepancyCategory category = DiscrepancyCategory::OtherScoringError;
  AdjustmentInterval adjustment;
  std::vector<std::string> evidence_refs;
  std::string narrative;
  std::string finding;
  std::string reference_definition;
  std::string analysis;
  std::string conclusion;
  bool annotated = false;
};

/// Merges expert annotations into the diff. Unannotated non-zero diffs become
/// `other_scoring_error` items with the degenerate adjustment [delta, delta];
/// unannotated one-sided keys are kept with a [0, 0] adjustment. Throws
/// ValidationError when an annotation names a key absent from the diff.
std::vector<DiscrepancyItem> attach_classification(std::span<const IssueDiff> diffs,
                                                   const AnnotationMap& annotations);

/// Endpoint-wise sum; [0, 0] for no items.
AdjustmentInterval net_adjustment(std::span<const DiscrepancyItem> items);

struct DeltaReport {
  std::vector<DiscrepancyItem> items;
  AdjustmentInterval net;
  std::string baseline_label;
  std::string baseline_overall;
  std::string stride_label;
  std::vector<std::string> notes;
};

/// Computes the net interval and attaches notes (mixed issue scales,
/// one-sided issues).
DeltaReport make_delta_report(std::vector<DiscrepancyItem> items, std::string baseline_label = {},
                              std::string baseline_overall = {}, std::string stride_label = {});

/// Runs the diff, classification and aggregation end to end.
DeltaReport analyze(const RatingRecord& baseline, const RatingRecord& stride,
                    const AnnotationMap& annotations);

enum class ReportFormat { Json, Markdown };

std::optional<ReportFormat> format_from_string(std::string_view name);

/// Deterministic serialization. The markdown form lays out each item as a
/// finding / reference definition / analysis / conclusion table.
std::string emit_delta_report(const DeltaReport& report, ReportFormat format);

}  // namespace stride::delta

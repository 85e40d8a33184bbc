#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "stride/scoring.hpp"

namespace stride {

struct RunRecord {
  std::string run_id;
  std::string timestamp;  // UTC, ISO 8601, time of first save
  std::string manifest_digest;
  std::string config_digest;
  StrideReport report;
};

/// Content-addressed directory of scored runs, one JSON file per run.
///
/// The run id is derived from the manifest digest, the config digest and the
/// report content, so saving the same run twice yields the same id and leaves
/// the first entry untouched. Entries are written with an atomic rename.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  /// `$STRIDE_STORE`, or `./.stride-runs` when unset.
  static std::filesystem::path default_root();

  static std::string run_id_for(const StrideReport& report);

  /// Returns the run id. Throws StoreError if an entry with the same id but
  /// different content already exists.
  std::string save(const StrideReport& report);

  /// Accepts the full id or a unique prefix of at least 8 characters.
  /// Throws NotFoundError or StoreError (digest mismatch, corrupt entry).
  RunRecord load(std::string_view run_id) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path entry_path(std::string_view run_id) const;
  std::string resolve(std::string_view run_id) const;

  std::filesystem::path root_;
};

}  // namespace stride

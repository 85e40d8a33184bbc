#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "stride/model.hpp"
#include "stride/scoring.hpp"

namespace stride {

/// Value of the `spec_version` field carried by every emitted JSON report.
inline constexpr std::string_view kReportSchemaVersion = "1.0";

// Manifests -----------------------------------------------------------------

/// Syntax and schema checks only; invariant violations are left for
/// `validate_manifest`.
DatasetManifest parse_manifest_unchecked(std::string_view document);

/// Full parse: throws SchemaError on malformed input and ValidationError when
/// the manifest breaks a domain invariant.
DatasetManifest parse_manifest(std::string_view document);

std::string emit_manifest(const DatasetManifest& manifest);

/// SHA-256 of the canonical (compact, key-sorted) manifest encoding.
std::string manifest_digest(const DatasetManifest& manifest);

// Weight configs ------------------------------------------------------------

/// Accepts the bare word `equal`, the JSON string "equal", or an object
/// (optionally with `"preset": "equal"` as a base). The result is validated
/// and renormalized.
WeightConfig parse_weight_config(std::string_view document);

std::string emit_weight_config(const WeightConfig& cfg);

std::string config_digest(const WeightConfig& cfg);

// Reports -------------------------------------------------------------------

/// Deterministic, full-precision JSON encoding of a report.
std::string emit_report(const StrideReport& report);

StrideReport parse_report(std::string_view document);

/// Human-readable breakdown with values shown to four decimals.
std::string explain_report(const StrideReport& report);

// Files ---------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);

/// Writes via a temporary sibling and an atomic rename.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace stride

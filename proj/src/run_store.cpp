#include "stride/run_store.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>

#include "json_reader.hpp"
#include "stride/digest.hpp"
#include "stride/io.hpp"

namespace stride {

using detail::Json;

namespace {

constexpr std::size_t kMinPrefix = 8;

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool is_hex_id(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

RunStore::RunStore(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path RunStore::default_root() {
  if (const char* env = std::getenv("STRIDE_STORE"); env && *env) return env;
  return ".stride-runs";
}

std::string RunStore::run_id_for(const StrideReport& report) {
  return sha256_hex(report.manifest_digest + ":" + report.config_digest + ":" +
                    sha256_hex(emit_report(report)));
}

std::filesystem::path RunStore::entry_path(std::string_view run_id) const {
  return root_ / (std::string(run_id) + ".json");
}

std::string RunStore::save(const StrideReport& report) {
  const std::string body = emit_report(report);
  const std::string report_digest = sha256_hex(body);
  const std::string id = run_id_for(report);
  const auto path = entry_path(id);

  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw StoreError("cannot create run store " + root_.string() + ": " + ec.message());

  if (std::filesystem::exists(path)) {
    const RunRecord existing = load(id);
    if (sha256_hex(emit_report(existing.report)) != report_digest) {
      throw StoreError("run " + id + " already stored with different content");
    }
    return id;
  }

  Json entry = {{"run_id", id},
                {"timestamp", utc_now()},
                {"manifest_digest", report.manifest_digest},
                {"config_digest", report.config_digest},
                {"report_digest", report_digest},
                {"report", Json::parse(body)}};
  write_text_file_atomic(path, entry.dump(2) + "\n");
  return id;
}

std::string RunStore::resolve(std::string_view run_id) const {
  if (!is_hex_id(run_id)) throw NotFoundError("no run with id '" + std::string(run_id) + "'");
  if (std::filesystem::exists(entry_path(run_id))) return std::string(run_id);
  if (run_id.size() < kMinPrefix || !std::filesystem::is_directory(root_)) {
    throw NotFoundError("no run with id '" + std::string(run_id) + "'");
  }
  std::string match;
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    const std::string stem = entry.path().stem().string();
    if (entry.path().extension() != ".json" || stem.rfind(run_id, 0) != 0) continue;
    if (!match.empty()) throw NotFoundError("run id prefix '" + std::string(run_id) + "' is ambiguous");
    match = stem;
  }
  if (match.empty()) throw NotFoundError("no run with id '" + std::string(run_id) + "'");
  return match;
}

RunRecord RunStore::load(std::string_view run_id) const {
  const std::string id = resolve(run_id);
  const std::string text = read_text_file(entry_path(id));

  RunRecord record;
  try {
    const Json entry = Json::parse(text);
    record.run_id = entry.at("run_id").get<std::string>();
    record.timestamp = entry.at("timestamp").get<std::string>();
    record.manifest_digest = entry.at("manifest_digest").get<std::string>();
    record.config_digest = entry.at("config_digest").get<std::string>();
    const std::string stored_digest = entry.at("report_digest").get<std::string>();
    record.report = parse_report(entry.at("report").dump());
    if (sha256_hex(emit_report(record.report)) != stored_digest) {
      throw StoreError("run " + id + ": report digest mismatch (corrupt entry)");
    }
  } catch (const Json::exception& e) {
    throw StoreError("run " + id + ": corrupt entry: " + e.what());
  } catch (const SchemaError& e) {
    throw StoreError("run " + id + ": corrupt entry: " + e.what());
  }
  if (record.run_id != id || run_id_for(record.report) != id) {
    throw StoreError("run " + id + ": id does not match stored content");
  }
  return record;
}

}  // namespace stride

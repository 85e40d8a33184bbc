#pragma once

// Internal helpers for reading typed fields out of nlohmann::json documents
// with JSON-pointer style paths in every error.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "stride/errors.hpp"

namespace stride::detail {

using Json = nlohmann::json;

/// Parses `text`, converting syntax errors into a SchemaError that names the
/// line and column of the failure.
inline Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (auto pos = msg.find("; "); pos != std::string::npos) msg = msg.substr(pos + 2);
    throw SchemaError("", std::string(what) + ": syntax error at line " + std::to_string(line) +
                              ", column " + std::to_string(column) + ": " + msg);
  }
}

class Reader {
 public:
  Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {}

  const Json& node() const { return node_; }
  const std::string& path() const { return path_; }

  std::string child_path(std::string_view key) const { return path_ + "/" + std::string(key); }

  bool has(std::string_view key) const {
    return node_.is_object() && node_.contains(key) && !node_.at(std::string(key)).is_null();
  }

  Reader object(std::string_view key) const {
    const Json& v = require(key);
    if (!v.is_object()) fail(key, "expected an object");
    return Reader(v, child_path(key));
  }

  std::optional<Reader> optional_object(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return object(key);
  }

  Reader array(std::string_view key) const {
    const Json& v = require(key);
    if (!v.is_array()) fail(key, "expected an array");
    return Reader(v, child_path(key));
  }

  Reader element(std::size_t i) const { return Reader(node_.at(i), path_ + "/" + std::to_string(i)); }

  std::size_t size() const { return node_.size(); }

  std::string string(std::string_view key) const {
    const Json& v = require(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::string string_or(std::string_view key, std::string fallback) const {
    return has(key) ? string(key) : std::move(fallback);
  }

  double number(std::string_view key) const {
    const Json& v = require(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "expected a finite number");
    return d;
  }

  double number_or(std::string_view key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  /// Integer field. Negative values are reported as schema errors since every
  /// count in the domain is a non-negative integer.
  std::uint64_t count(std::string_view key) const {
    const Json& v = require(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) fail(key, "expected a non-negative integer");
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 9.0e15) return static_cast<std::uint64_t>(d);
    }
    fail(key, "expected a non-negative integer");
  }

  std::int64_t integer(std::string_view key) const {
    const Json& v = require(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    fail(key, "expected an integer");
  }

  bool boolean(std::string_view key) const {
    const Json& v = require(key);
    if (!v.is_boolean()) fail(key, "expected a boolean");
    return v.get<bool>();
  }

  const Json& require(std::string_view key) const {
    if (!node_.is_object()) throw SchemaError(path_, "expected an object");
    auto it = node_.find(std::string(key));
    if (it == node_.end() || it->is_null()) fail(key, "required field is missing");
    return *it;
  }

  [[noreturn]] void fail(std::string_view key, const std::string& message) const {
    throw SchemaError(child_path(key), message);
  }

  [[noreturn]] void fail_here(const std::string& message) const {
    throw SchemaError(path_, message);
  }

 private:
  const Json& node_;
  std::string path_;
};

}  // namespace stride::detail

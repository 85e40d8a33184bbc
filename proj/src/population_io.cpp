#include <cerrno>
#include <cstdlib>

#include "json_reader.hpp"
#include "stride/sampling.hpp"

namespace stride::sampling {

namespace {

// Splits CSV text into rows of fields. Handles quoted fields with embedded
// commas, quotes ("") and newlines.
std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        field_started = false;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw SchemaError("", "population CSV: unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string trimmed(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> to_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<bool> to_boolean(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "True" || s == "TRUE") return true;
  if (s == "false" || s == "0" || s == "no" || s == "False" || s == "FALSE") return false;
  return std::nullopt;
}

CriterionValue convert_cell(const std::string& column, const std::string& raw,
                            const std::string& where) {
  const std::string cell = trimmed(raw);
  switch (kind_of(column)) {
    case CriterionKind::Numeric: {
      auto v = to_number(cell);
      if (!v || *v < 0.0) throw SchemaError(where, "expected a non-negative number, got '" + cell + "'");
      return *v;
    }
    case CriterionKind::Boolean: {
      auto v = to_boolean(cell);
      if (!v) throw SchemaError(where, "expected a boolean, got '" + cell + "'");
      return *v;
    }
    case CriterionKind::Set: {
      std::set<std::string> items;
      std::size_t start = 0;
      while (start <= cell.size()) {
        const auto stop = cell.find(';', start);
        const std::string item =
            trimmed(std::string_view(cell).substr(start, stop == std::string::npos ? std::string::npos
                                                                                  : stop - start));
        if (!item.empty()) items.insert(item);
        if (stop == std::string::npos) break;
        start = stop + 1;
      }
      return items;
    }
    case CriterionKind::Categorical:
      return cell;
  }
  return cell;
}

CriterionValue convert_json(const std::string& column, const detail::Json& v,
                            const std::string& where) {
  switch (kind_of(column)) {
    case CriterionKind::Numeric:
      if (!v.is_number() || v.get<double>() < 0.0) {
        throw SchemaError(where, "expected a non-negative number");
      }
      return v.get<double>();
    case CriterionKind::Boolean:
      if (!v.is_boolean()) throw SchemaError(where, "expected a boolean");
      return v.get<bool>();
    case CriterionKind::Set: {
      if (!v.is_array()) throw SchemaError(where, "expected an array of strings");
      std::set<std::string> items;
      for (const auto& item : v) {
        if (!item.is_string()) throw SchemaError(where, "expected an array of strings");
        items.insert(item.get<std::string>());
      }
      return items;
    }
    case CriterionKind::Categorical:
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      if (v.is_number()) return v.dump();
      throw SchemaError(where, "expected a string");
  }
  throw SchemaError(where, "unsupported value");
}

}  // namespace

std::vector<PopulationRecord> parse_population_csv(std::string_view text) {
  const auto rows = split_csv(text);
  if (rows.empty()) throw SchemaError("", "population CSV: missing header row");
  std::vector<std::string> header;
  for (const auto& h : rows.front()) header.push_back(trimmed(h));
  std::size_t id_column = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "record_id") id_column = i;
  }
  if (id_column == header.size()) throw SchemaError("", "population CSV: no record_id column");

  std::vector<PopulationRecord> records;
  std::set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string line = "line " + std::to_string(r + 1);
    if (row.size() != header.size()) {
      throw SchemaError(line, "expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(row.size()));
    }
    PopulationRecord rec;
    rec.record_id = trimmed(row[id_column]);
    if (rec.record_id.empty()) throw SchemaError(line, "empty record_id");
    if (!ids.insert(rec.record_id).second) {
      throw SchemaError(line, "duplicate record_id '" + rec.record_id + "'");
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == id_column) continue;
      rec.criteria.emplace(header[c], convert_cell(header[c], row[c], line + ", column " + header[c]));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<PopulationRecord> parse_population_json(std::string_view text) {
  const detail::Json root = detail::parse_json(text, "population");
  const detail::Json* list = &root;
  std::string base;
  if (root.is_object()) {
    if (!root.contains("records")) throw SchemaError("/records", "required field is missing");
    list = &root.at("records");
    base = "/records";
  }
  if (!list->is_array()) throw SchemaError(base, "expected an array of records");

  std::vector<PopulationRecord> records;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const detail::Reader r(list->at(i), base + "/" + std::to_string(i));
    PopulationRecord rec;
    rec.record_id = r.string("record_id");
    if (!ids.insert(rec.record_id).second) {
      r.fail("record_id", "duplicate record_id '" + rec.record_id + "'");
    }
    const detail::Reader crit = r.object("criteria");
    for (const auto& [key, value] : crit.node().items()) {
      rec.criteria.emplace(key, convert_json(key, value, crit.child_path(key)));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace stride::sampling

#include "mixprec/csv.hpp"

#include <charconv>
#include <cmath>

namespace mixprec {

namespace {

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

bool needs_quotes(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos || s.empty();
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_cell(const CsvCell& cell, const CsvColumn& col) {
  if (std::holds_alternative<std::monostate>(cell)) {
    if (col.kind == CsvKind::Text) throw SchemaMismatch("column '" + col.name + "': text cells cannot be empty");
    return {};
  }
  switch (col.kind) {
    case CsvKind::Integer:
      if (const auto* v = std::get_if<std::int64_t>(&cell)) return std::to_string(*v);
      break;
    case CsvKind::Real:
      if (const auto* v = std::get_if<double>(&cell)) return format_real(*v);
      break;
    case CsvKind::Text:
      if (const auto* v = std::get_if<std::string>(&cell)) return needs_quotes(*v) ? quote(*v) : *v;
      break;
    case CsvKind::Boolean:
      if (const auto* v = std::get_if<bool>(&cell)) return *v ? "true" : "false";
      break;
  }
  throw SchemaMismatch("column '" + col.name + "': cell type does not match schema");
}

/// Splits one CSV record starting at `pos`, honoring quotes; advances `pos`
/// past the record terminator.
std::vector<std::string> split_record(std::string_view text, std::size_t& pos, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field += '"';
          pos += 2;
          continue;
        }
        quoted = false;
        ++pos;
        continue;
      }
      field += c;
      ++pos;
      continue;
    }
    if (c == '"') {
      if (!field.empty()) throw SchemaMismatch("line " + std::to_string(line_no) + ": stray quote");
      quoted = true;
      was_quoted = true;
      ++pos;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
      ++pos;
    } else if (c == '\n' || c == '\r') {
      pos += (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ? 2 : 1;
      fields.push_back(std::move(field));
      return fields;
    } else {
      if (was_quoted) throw SchemaMismatch("line " + std::to_string(line_no) + ": text after closing quote");
      field += c;
      ++pos;
    }
  }
  if (quoted) throw SchemaMismatch("line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

CsvCell parse_cell(const std::string& s, const CsvColumn& col, std::size_t line_no) {
  const auto fail = [&]() -> CsvCell {
    throw SchemaMismatch("line " + std::to_string(line_no) + ", column '" + col.name + "': cannot parse '" + s + "'");
  };
  if (s.empty() && col.kind != CsvKind::Text) return std::monostate{};
  switch (col.kind) {
    case CsvKind::Integer: {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) return fail();
      return v;
    }
    case CsvKind::Real: {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) return fail();
      return v;
    }
    case CsvKind::Text:
      return s;
    case CsvKind::Boolean:
      if (s == "true") return true;
      if (s == "false") return false;
      return fail();
  }
  return fail();
}

}  // namespace

std::size_t CsvSchema::index_of(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == column) return i;
  }
  throw SchemaMismatch("schema '" + name + "' has no column '" + std::string(column) + "'");
}

const CsvSchema& CsvSchema::solve() {
  static const CsvSchema schema{"solve",
                                {{"mode", CsvKind::Text},
                                 {"n", CsvKind::Integer},
                                 {"nnz", CsvKind::Integer},
                                 {"backend", CsvKind::Text},
                                 {"iterations", CsvKind::Integer},
                                 {"converged", CsvKind::Boolean},
                                 {"final_residual", CsvKind::Real},
                                 {"a_norm_est", CsvKind::Real},
                                 {"factor_seconds", CsvKind::Real, true},
                                 {"total_seconds", CsvKind::Real, true}}};
  return schema;
}

const CsvSchema& CsvSchema::cond_sweep() {
  static const CsvSchema schema{"cond-sweep",
                                {{"kappa", CsvKind::Real},
                                 {"n", CsvKind::Integer},
                                 {"trials", CsvKind::Integer},
                                 {"mean_iters", CsvKind::Real},
                                 {"failure_rate", CsvKind::Real},
                                 {"predicted_iters", CsvKind::Integer}}};
  return schema;
}

const CsvSchema& CsvSchema::bench() {
  static const CsvSchema schema{"bench",
                                {{"n", CsvKind::Integer},
                                 {"dp_seconds", CsvKind::Real, true},
                                 {"sp_seconds", CsvKind::Real, true},
                                 {"mixed_seconds", CsvKind::Real, true},
                                 {"speedup_mixed", CsvKind::Real, true},
                                 {"iterations", CsvKind::Integer}}};
  return schema;
}

std::string write_csv(const std::vector<CsvRow>& rows, const CsvSchema& schema) {
  std::string out;
  for (std::size_t j = 0; j < schema.columns.size(); ++j) {
    if (j) out += ',';
    out += schema.columns[j].name;
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != schema.columns.size()) {
      throw SchemaMismatch("row has " + std::to_string(row.size()) + " cells, schema '" + schema.name + "' has " +
                           std::to_string(schema.columns.size()));
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_cell(row[j], schema.columns[j]);
    }
    out += '\n';
  }
  return out;
}

std::vector<CsvRow> parse_csv(std::string_view text, const CsvSchema& schema) {
  std::size_t pos = 0;
  std::size_t line_no = 1;
  if (text.empty()) throw SchemaMismatch("empty CSV: missing header");
  const auto header = split_record(text, pos, line_no);
  if (header.size() != schema.columns.size()) throw SchemaMismatch("header width does not match schema");
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] != schema.columns[j].name) {
      throw SchemaMismatch("header column " + std::to_string(j) + " is '" + header[j] + "', expected '" +
                           schema.columns[j].name + "'");
    }
  }
  std::vector<CsvRow> rows;
  while (pos < text.size()) {
    ++line_no;
    const auto fields = split_record(text, pos, line_no);
    if (fields.size() != schema.columns.size()) {
      throw SchemaMismatch("line " + std::to_string(line_no) + ": expected " + std::to_string(schema.columns.size()) +
                           " fields");
    }
    CsvRow row;
    row.reserve(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) row.push_back(parse_cell(fields[j], schema.columns[j], line_no));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mixprec

#pragma once

// Typed CSV tables for the CLI reports. Reals use the shortest decimal that
// round-trips; text cells are quoted only when needed.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mixprec/error.hpp"

namespace mixprec {

enum class CsvKind { Integer, Real, Text, Boolean };

struct CsvColumn {
  std::string name;
  CsvKind kind;
  bool timing = false;  // wall-clock column: excluded from byte-determinism
};

struct CsvSchema {
  std::string name;
  std::vector<CsvColumn> columns;

  std::size_t index_of(std::string_view column) const;

  static const CsvSchema& solve();
  static const CsvSchema& cond_sweep();
  static const CsvSchema& bench();
};

/// std::monostate is an empty cell (e.g. a prediction that does not exist).
using CsvCell = std::variant<std::monostate, std::int64_t, double, std::string, bool>;
using CsvRow = std::vector<CsvCell>;

/// Header line plus one line per row. Throws SchemaMismatch when a row's width
/// or cell types disagree with the schema.
std::string write_csv(const std::vector<CsvRow>& rows, const CsvSchema& schema);

/// Inverse of write_csv; the header must match the schema's column names.
std::vector<CsvRow> parse_csv(std::string_view text, const CsvSchema& schema);

}  // namespace mixprec

#pragma once

// MatrixMarket exchange format: coordinate and array layouts, real / integer /
// pattern fields, general / symmetric storage.

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "mixprec/core.hpp"

namespace mixprec {

struct MatrixMarketHeader {
  enum class Format { Coordinate, Array };
  enum class Field { Real, Integer, Pattern };
  enum class Symmetry { General, Symmetric };

  Format format = Format::Coordinate;
  Field field = Field::Real;
  Symmetry symmetry = Symmetry::General;
};

/// Parses "%%MatrixMarket matrix <format> <field> <symmetry>"; unsupported
/// combinations throw ParseError.
MatrixMarketHeader parse_banner(std::string_view line, std::size_t line_no = 1);

/// Coordinate files become CSR (1-based indices shifted, symmetric storage
/// expanded, duplicates summed); array files become dense column-major.
using ParsedMatrix = std::variant<CsrMatrix<High>, DenseMatrix<High>>;

ParsedMatrix parse_matrix_market(std::string_view text);
ParsedMatrix read_matrix_market(const std::filesystem::path& path);

std::string write_matrix_market(const CsrMatrix<High>& a);
std::string write_matrix_market(const DenseMatrix<High>& a);

/// Converts either parse result to the requested storage.
CsrMatrix<High> as_csr(ParsedMatrix m);
DenseMatrix<High> as_dense(ParsedMatrix m);

}  // namespace mixprec

#include "mixprec/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace mixprec {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::size_t parse_count(std::string_view tok, std::size_t line_no, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, std::string("invalid ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

double parse_real(std::string_view tok, std::size_t line_no) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line_no, "invalid value '" + std::string(tok) + "'");
  }
  return v;
}

double parse_integer_value(std::string_view tok, std::size_t line_no) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, "invalid integer value '" + std::string(tok) + "'");
  }
  return static_cast<double>(v);
}

/// Line cursor that skips %-comments and blank lines.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next_raw(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const std::size_t end = text_.find('\n', pos_);
    const std::size_t stop = end == std::string_view::npos ? text_.size() : end;
    line = text_.substr(pos_, stop - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = stop + 1;
    ++line_no_;
    return true;
  }

  bool next_data(std::string_view& line) {
    while (next_raw(line)) {
      if (blank(line) || line.front() == '%') continue;
      return true;
    }
    return false;
  }

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

MatrixMarketHeader parse_banner(std::string_view line, std::size_t line_no) {
  const auto tok = split_ws(line);
  if (tok.empty() || tok[0] != "%%MatrixMarket") throw ParseError(line_no, "missing %%MatrixMarket banner");
  if (tok.size() != 5) throw ParseError(line_no, "banner must have object, format, field and symmetry");
  if (lower(tok[1]) != "matrix") throw ParseError(line_no, "unsupported object '" + std::string(tok[1]) + "'");

  MatrixMarketHeader h;
  const std::string format = lower(tok[2]);
  if (format == "coordinate") {
    h.format = MatrixMarketHeader::Format::Coordinate;
  } else if (format == "array") {
    h.format = MatrixMarketHeader::Format::Array;
  } else {
    throw ParseError(line_no, "unsupported format '" + std::string(tok[2]) + "'");
  }

  const std::string field = lower(tok[3]);
  if (field == "real" || field == "double") {
    h.field = MatrixMarketHeader::Field::Real;
  } else if (field == "integer") {
    h.field = MatrixMarketHeader::Field::Integer;
  } else if (field == "pattern") {
    h.field = MatrixMarketHeader::Field::Pattern;
  } else {
    throw ParseError(line_no, "unsupported field '" + std::string(tok[3]) + "'");
  }

  const std::string symmetry = lower(tok[4]);
  if (symmetry == "general") {
    h.symmetry = MatrixMarketHeader::Symmetry::General;
  } else if (symmetry == "symmetric") {
    h.symmetry = MatrixMarketHeader::Symmetry::Symmetric;
  } else {
    throw ParseError(line_no, "unsupported symmetry '" + std::string(tok[4]) + "'");
  }

  if (h.format == MatrixMarketHeader::Format::Array && h.field == MatrixMarketHeader::Field::Pattern) {
    throw ParseError(line_no, "pattern field is only valid for coordinate format");
  }
  return h;
}

ParsedMatrix parse_matrix_market(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next_raw(line)) throw ParseError(1, "empty input");
  const MatrixMarketHeader h = parse_banner(line, reader.line_no());
  const bool symmetric = h.symmetry == MatrixMarketHeader::Symmetry::Symmetric;

  if (!reader.next_data(line)) throw ParseError(reader.line_no() + 1, "missing size line");
  const auto size_tok = split_ws(line);
  const std::size_t expect_size_tokens = h.format == MatrixMarketHeader::Format::Coordinate ? 3 : 2;
  if (size_tok.size() != expect_size_tokens) throw ParseError(reader.line_no(), "malformed size line");
  const std::size_t rows = parse_count(size_tok[0], reader.line_no(), "row count");
  const std::size_t cols = parse_count(size_tok[1], reader.line_no(), "column count");
  if (symmetric && rows != cols) throw ParseError(reader.line_no(), "symmetric matrix must be square");

  auto value_of = [&](std::string_view tok) {
    return h.field == MatrixMarketHeader::Field::Integer ? parse_integer_value(tok, reader.line_no())
                                                         : parse_real(tok, reader.line_no());
  };

  if (h.format == MatrixMarketHeader::Format::Coordinate) {
    const std::size_t nnz = parse_count(size_tok[2], reader.line_no(), "entry count");
    const std::size_t width = h.field == MatrixMarketHeader::Field::Pattern ? 2 : 3;
    std::vector<Triplet<double>> entries;
    entries.reserve(symmetric ? 2 * nnz : nnz);
    std::size_t seen = 0;
    while (reader.next_data(line)) {
      if (seen == nnz) throw ParseError(reader.line_no(), "more entries than declared");
      const auto tok = split_ws(line);
      if (tok.size() != width) throw ParseError(reader.line_no(), "expected " + std::to_string(width) + " fields");
      const std::size_t i = parse_count(tok[0], reader.line_no(), "row index");
      const std::size_t j = parse_count(tok[1], reader.line_no(), "column index");
      if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError(reader.line_no(), "index out of bounds");
      const double v = width == 3 ? value_of(tok[2]) : 1.0;
      if (symmetric && j > i) throw ParseError(reader.line_no(), "symmetric storage must hold the lower triangle");
      entries.push_back({i - 1, j - 1, v});
      if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
      ++seen;
    }
    if (seen != nnz) {
      throw ParseError(reader.line_no(), "expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen));
    }
    return CsrMatrix<double>::from_triplets(rows, cols, std::move(entries));
  }

  const std::size_t expected = symmetric ? rows * (rows + 1) / 2 : rows * cols;
  std::vector<double> data(rows * cols, 0.0);
  std::size_t seen = 0;
  std::size_t col = 0;
  std::size_t row = 0;
  while (reader.next_data(line)) {
    const auto tok = split_ws(line);
    if (tok.size() != 1) throw ParseError(reader.line_no(), "array entries hold one value per line");
    if (seen == expected) throw ParseError(reader.line_no(), "more entries than declared");
    const double v = value_of(tok[0]);
    data[col * rows + row] = v;
    if (symmetric) data[row * rows + col] = v;
    ++seen;
    if (++row == rows) {
      ++col;
      row = symmetric ? col : 0;
    }
  }
  if (seen != expected) {
    throw ParseError(reader.line_no(), "expected " + std::to_string(expected) + " entries, found " + std::to_string(seen));
  }
  return DenseMatrix<double>(rows, cols, std::move(data));
}

ParsedMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_market(buf.str());
}

std::string write_matrix_market(const CsrMatrix<High>& a) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(a.rows()) + " " + std::to_string(a.cols()) + " " + std::to_string(a.nnz()) + "\n";
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto va = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      out += std::to_string(i + 1) + " " + std::to_string(ci[k] + 1) + " " + format_real(va[k]) + "\n";
    }
  }
  return out;
}

std::string write_matrix_market(const DenseMatrix<High>& a) {
  std::string out = "%%MatrixMarket matrix array real general\n";
  out += std::to_string(a.rows()) + " " + std::to_string(a.cols()) + "\n";
  for (double v : a.data()) out += format_real(v) + "\n";
  return out;
}

CsrMatrix<High> as_csr(ParsedMatrix m) {
  if (auto* csr = std::get_if<CsrMatrix<High>>(&m)) return std::move(*csr);
  return CsrMatrix<High>::from_dense(std::get<DenseMatrix<High>>(m));
}

DenseMatrix<High> as_dense(ParsedMatrix m) {
  if (auto* dense = std::get_if<DenseMatrix<High>>(&m)) return std::move(*dense);
  return std::get<CsrMatrix<High>>(m).to_dense();
}

}  // namespace mixprec

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixprec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A stored entry or constructor argument broke a type invariant
/// (non-finite value, malformed CSR structure, ...).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class OverflowOnDemotion : public Error {
 public:
  OverflowOnDemotion(std::size_t index, double value)
      : Error("entry " + std::to_string(index) + " (" + std::to_string(value) +
              ") exceeds the low-precision range"),
        index_(index),
        value_(value) {}

  std::size_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t index_;
  double value_;
};

class SingularPivot : public Error {
 public:
  explicit SingularPivot(std::size_t column)
      : Error("zero pivot in column " + std::to_string(column)), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(std::size_t column)
      : Error("non-positive diagonal update in column " + std::to_string(column)),
        column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// The low-precision path cannot produce a solution (factorization failure or
/// demotion overflow); the caller should use the high-precision solver.
class FallbackRequired : public Error {
 public:
  using Error::Error;
};

/// Progressive Givens QR met an exactly zero rotated diagonal entry.
class RankDeficient : public Error {
 public:
  explicit RankDeficient(std::size_t column)
      : Error("rank deficient Hessenberg column " + std::to_string(column)), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownMatrixId : public Error {
 public:
  explicit UnknownMatrixId(int id) : Error("unknown matrix id " + std::to_string(id)) {}
};

}  // namespace mixprec

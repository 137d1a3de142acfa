#pragma once

#include <stdexcept>
#include <string>

namespace prv {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int { ok = 0, usage = 1, data = 2, numerical = 3 };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

/// Bad flags or conflicting options on the command line.
class UsageError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::usage; }
};

/// Anything wrong with the input data or with arguments relative to the data.
class DataError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::data; }
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, long row, long column)
      : DataError(what + " (row " + std::to_string(row) + ", column " +
                  std::to_string(column) + ")"),
        row_(row),
        column_(column) {}

  long row() const noexcept { return row_; }
  long column() const noexcept { return column_; }

 private:
  long row_;
  long column_;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

class IrregularGridError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateInputError : public DataError {
 public:
  using DataError::DataError;
};

class PreconditionError : public DataError {
 public:
  using DataError::DataError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::numerical; }
};

class NotPsdError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace prv

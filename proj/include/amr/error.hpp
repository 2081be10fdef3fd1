#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace amr {

enum class ErrorKind {
  EmptyVector,
  LengthMismatch,
  DegenerateInstance,
  RankDeficient,
  NonConvergence,
  IdenticalPredictors,
  EmptyModel,
  InsufficientData,
  ConstantTarget,
  ParseError,
  UnknownColumn,
  AllRowsRemoved,
  InvalidArgument,
  MissingPredictions,
  RowCountMismatch,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Every library failure is reported through this type. `index` carries the
// offending row, fold or line number when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

  // Re-raise with a fold/row index attached, keeping the original kind.
  [[noreturn]] void rethrow_with_index(std::size_t index,
                                       std::string_view what_index) const;

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

}  // namespace amr

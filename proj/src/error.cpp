#include "amr/error.hpp"

namespace amr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyVector: return "EmptyVector";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateInstance: return "DegenerateInstance";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::IdenticalPredictors: return "IdenticalPredictors";
    case ErrorKind::EmptyModel: return "EmptyModel";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::ConstantTarget: return "ConstantTarget";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::AllRowsRemoved: return "AllRowsRemoved";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MissingPredictions: return "MissingPredictions";
    case ErrorKind::RowCountMismatch: return "RowCountMismatch";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      index_(index) {}

void Error::rethrow_with_index(std::size_t index,
                               std::string_view what_index) const {
  std::string msg(what());
  // Strip our own "Kind: " prefix so it is not doubled.
  const auto prefix = std::string(to_string(kind_)) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  throw Error(kind_, msg + " (" + std::string(what_index) + " " +
                         std::to_string(index) + ")",
              index);
}

}  // namespace amr

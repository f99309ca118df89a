#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shintani {

// Machine-readable failure kinds.  The names below are the wire names used in
// CLI error JSON; keep them stable.
enum class ErrorKind {
  NegativeEntry,
  ZeroRow,
  ZeroColumn,
  SupportTooSmall,
  DimensionMismatch,
  EmptySubset,
  SubsetCapExceeded,
  InfeasibleInstance,
  OutsideConvergenceRegion,
  NonpositiveEpsilon,
  InvalidParameter,
  BadInput,
  InternalError,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::ZeroRow: return "ZeroRow";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
    case ErrorKind::SupportTooSmall: return "SupportTooSmall";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptySubset: return "EmptySubset";
    case ErrorKind::SubsetCapExceeded: return "SubsetCapExceeded";
    case ErrorKind::InfeasibleInstance: return "InfeasibleInstance";
    case ErrorKind::OutsideConvergenceRegion: return "OutsideConvergenceRegion";
    case ErrorKind::NonpositiveEpsilon: return "NonpositiveEpsilon";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::BadInput: return "BadInput";
    case ErrorKind::InternalError: return "InternalError";
  }
  return "InternalError";
}

// All library failures are reported through this exception.  `indices` carries
// the structured payload (1-based row/column numbers, violating subsets, ...);
// its meaning depends on the kind and is documented at the throw site.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::vector<int> indices = {})
      : std::runtime_error(std::move(message)),
        kind_(kind),
        indices_(std::move(indices)) {}

  ErrorKind kind() const { return kind_; }
  const std::vector<int>& indices() const { return indices_; }
  const char* kind_name() const { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
  std::vector<int> indices_;
};

}  // namespace shintani

#pragma once

#include <stdexcept>
#include <string>

namespace densedex {

// Data and format problems: bad input files, mismatched dimensions,
// out-of-range arguments. The CLI maps these to exit code 2.
enum class ErrKind {
  Parse,
  Utf8,
  DuplicateId,
  DimMismatch,
  BadMagic,
  BadVersion,
  BadChecksum,
  Truncated,
  Io,
  BadArgument,
  Numeric,
  Empty,
};

class DataError : public std::runtime_error {
 public:
  DataError(ErrKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrKind kind() const { return kind_; }

 private:
  ErrKind kind_;
};

// Broken internal invariants. The CLI maps these to exit code 3.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace densedex

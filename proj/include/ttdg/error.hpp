#pragma once

#include <stdexcept>
#include <string>

namespace ttdg {

/// Error categories surfaced by the library and reported by the CLI.
enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  Parse,
  MeshInvariant,
  Causality,
  Scheduling,
  SingularMatrix,
  NotConverged,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ttdg

#pragma once

#include <stdexcept>
#include <string>

namespace lftc {

enum class ErrorKind {
  Format,            // bad magic / unsupported version
  Length,            // truncated or oversized payload
  Data,              // non-finite values, undefined math (zero-norm cosine)
  Shape,             // dimension mismatch
  Validation,        // type invariant violated
  Partition,         // segment partition has gaps or overlaps
  Parameter,         // hyper-parameter out of range
  Contract,          // precondition violated by the caller
  Lookup,            // unknown id
  InsufficientData,  // not enough samples for the operation
  Config,            // unusable generator configuration
  Io,                // filesystem failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace lftc

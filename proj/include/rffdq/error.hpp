#pragma once

#include <stdexcept>
#include <string>

namespace rffdq {

enum class ErrorKind {
  Config,    // malformed input, invalid arguments, unsupported configuration
  Capacity,  // a configured size cap would be exceeded
  Domain,    // mathematically undefined request (zero weight, non-integer lattice, ...)
  Numeric,   // factorization failure, aliasing, non-finite values
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace rffdq

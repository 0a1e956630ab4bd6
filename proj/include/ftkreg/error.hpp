#pragma once

#include <stdexcept>
#include <string>

namespace ftkreg {

/// Failure categories surfaced by the library. The C API maps these one to
/// one onto `ftkreg_status` codes.
enum class ErrorCode {
  InvalidArgument = 1,
  Io,
  Parse,
  GridTooCoarse,
  GridMismatch,
  NegativeArgument,
  EmptyNeighborhood,
  DegenerateBall,
  ZeroMissingness,
  DensityFloorHit,
  InsufficientData,
  SpecInvalid,
  EmptyInput,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace ftkreg

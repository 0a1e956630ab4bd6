#include "ftkreg/error.hpp"

namespace ftkreg {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::GridTooCoarse: return "grid_too_coarse";
    case ErrorCode::GridMismatch: return "grid_mismatch";
    case ErrorCode::NegativeArgument: return "negative_argument";
    case ErrorCode::EmptyNeighborhood: return "empty_neighborhood";
    case ErrorCode::DegenerateBall: return "degenerate_ball";
    case ErrorCode::ZeroMissingness: return "zero_missingness";
    case ErrorCode::DensityFloorHit: return "density_floor_hit";
    case ErrorCode::InsufficientData: return "insufficient_data";
    case ErrorCode::SpecInvalid: return "spec_invalid";
    case ErrorCode::EmptyInput: return "empty_input";
  }
  return "unknown";
}

}  // namespace ftkreg

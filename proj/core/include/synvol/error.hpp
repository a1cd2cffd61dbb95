#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace synvol {

enum class ErrorCode {
  io,         // missing or unwritable file
  format,     // malformed header, payload or annotation file
  range,      // parameter outside its valid range
  invariant,  // data violates a type invariant (duplicate id, out of bounds, ...)
  plan,       // tiling plan violated (uncovered voxel, patch too large)
  placement,  // synthetic scene could not be placed
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace synvol

#pragma once

#include <stdexcept>
#include <string>

namespace p1ac {

enum class ErrorCode {
  kDegenerateInput,          // point at infinity / on the principal plane
  kGrazingRay,               // ray parallel to the local plane
  kDegenerateDifferential,   // |m| too small to form the image-to-image Jacobian
  kUnrepresentableRotation,  // 180 degree rotation has no Cayley parameters
  kDegenerateConstraint,
  kEliminationSingular,
  kDegenerateSystem,
  kRankDeficient,
  kDegenerateConfiguration,
  kInsufficientData,
  kInvalidArgument,
  kIo,
  kFormat,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace p1ac

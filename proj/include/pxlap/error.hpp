#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pxl {

enum class ErrorCode {
  kInvalidArgument = 1,
  kOutsideCone = 2,
  kMeshMismatch = 3,
  kInadmissible = 4,
  kSyntax = 5,
  kConfig = 6,
  kNonConvergence = 7,
  kModelDefect = 8,
};

/// Exception carried by every failing core operation. The C API maps
/// `code()` one-to-one onto `pxl_status`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Expression parse/evaluation failure with the byte offset into the source.
class ExprError : public Error {
 public:
  ExprError(std::size_t offset, const std::string& what)
      : Error(ErrorCode::kSyntax,
              what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace pxl

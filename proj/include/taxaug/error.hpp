#pragma once

#include <stdexcept>
#include <string>

namespace taxaug {

enum class ErrorCode {
  parse,
  duplicate,
  unusable_dataset,
  stratification,
  range,
  geometry,
  format,
  data,
  shape,
  degenerate,
  neighborhood,
  cannot_oversample,
  numeric,
  missing_class,
  config,
  io,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the core library. The code survives the trip
/// through the C API, where it is mapped onto a status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace taxaug

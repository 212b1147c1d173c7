#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ged {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input. `position` is a 1-based line number or a 0-based
/// character offset, depending on the format being parsed.
class FormatError : public Error {
 public:
  FormatError(const std::string& source, std::size_t position,
              const std::string& message)
      : Error(source + ":" + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace ged

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chaoscope {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  NonFiniteState(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  explicit NonFiniteState(const std::string& what) : NonFiniteState(what, 0) {}

  // Iterate index or step number at which the non-finite value appeared.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

class MaxStepsExceeded : public Error {
 public:
  using Error::Error;
};

class SeparationUnderflow : public Error {
 public:
  using Error::Error;
};

class GridTooLarge : public Error {
 public:
  using Error::Error;
};

class EmptyImage : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ImageTooSmall : public Error {
 public:
  using Error::Error;
};

class DegenerateOrbit : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::string path)
      : Error(what + ": " + path), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace chaoscope

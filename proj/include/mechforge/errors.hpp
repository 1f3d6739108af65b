#ifndef MECHFORGE_ERRORS_HPP_
#define MECHFORGE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mechforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document; `path` is a JSON pointer-ish location.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Input that is well formed but outside what the constructions support.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// An operation was called on an environment that lacks what it needs.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A construction failed a self-check that should be impossible on valid input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mechforge

#endif  // MECHFORGE_ERRORS_HPP_

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psum {

/// Violated precondition or shape contract. Indicates a programming error.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input that exists but cannot be parsed. `position` is a 1-based line
/// number or a 0-based byte offset, depending on the format.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Missing or unreadable input (file, directory, corpus).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output location that cannot be created or written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model file with bad magic, bad checksum or inconsistent size.
class CorruptModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace psum

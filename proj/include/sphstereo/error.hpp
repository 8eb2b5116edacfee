#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sphstereo {

// Invalid argument values (out-of-range angles, mismatched grids, bad matrices).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed file contents. Carries the byte offset (or line number for text
// formats) where decoding stopped.
class ParseError : public std::runtime_error {
 public:
  enum class Unit { Byte, Line };

  ParseError(const std::string& what, std::size_t offset, Unit unit = Unit::Byte)
      : std::runtime_error(what + (unit == Unit::Line ? " (at line " : " (at byte ") +
                           std::to_string(offset) + ")"),
        message_(what),
        offset_(offset),
        unit_(unit) {}

  // The description without the location suffix.
  const std::string& message() const noexcept { return message_; }
  std::size_t offset() const noexcept { return offset_; }
  Unit unit() const noexcept { return unit_; }

 private:
  std::string message_;
  std::size_t offset_;
  Unit unit_;
};

// Bad configuration key or value. Always names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate evaluation (no pixels left to score).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sphstereo

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blockcut {

/// File could not be opened, read, or written.
class io_error : public std::runtime_error {
  public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file content; carries the 1-based line number.
class parse_error : public std::runtime_error {
  public:
    parse_error(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// A caller violated an operation's contract (bad arguments or state).
class domain_error : public std::runtime_error {
  public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace blockcut

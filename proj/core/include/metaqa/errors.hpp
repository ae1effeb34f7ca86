#pragma once

#include <stdexcept>
#include <string>

namespace metaqa {

// Unrecoverable input or configuration problem: unreadable file, format
// version mismatch, empty controlled subset, malformed-row ratio over the
// corpus limit. The CLI maps this to exit code 1.
class FatalError : public std::runtime_error {
 public:
  explicit FatalError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// Violated internal invariant; a bug rather than bad input.
// The CLI maps this to exit code 2.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what_arg) : std::logic_error(what_arg) {}
};

}  // namespace metaqa

#pragma once

#include <stdexcept>
#include <string>

namespace mmass {

// Raised when an operation is called outside its documented domain
// (r = 0, n <= 2r for intervals, alpha outside (0,1), ...).
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised on malformed input text: sample files, count CSVs, configs, specs.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw precondition_error(what);
}

}  // namespace mmass

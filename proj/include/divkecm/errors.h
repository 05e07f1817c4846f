#ifndef DIVKECM_ERRORS_H
#define DIVKECM_ERRORS_H

#include <stdexcept>
#include <string>

namespace divkecm {

// Out-of-range numeric parameter (noise level, probability, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Shapes or alphabets that do not fit together.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A device or protocol object used out of order.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace divkecm

#endif  // DIVKECM_ERRORS_H

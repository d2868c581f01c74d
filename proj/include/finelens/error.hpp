#pragma once

#include <stdexcept>
#include <string>

namespace finelens {

// Input data violates a documented invariant (bad record, bad file, bad matrix).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical precondition failed (rank deficiency, out-of-range hyperparameter).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace finelens

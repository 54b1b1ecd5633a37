#pragma once

#include <stdexcept>
#include <string>

namespace icb {

// Bad arguments: out-of-range indices, shape mismatches, malformed files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation refused because it would exceed its work guard.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A lemma or construction called outside the hypotheses it is stated under.
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace icb

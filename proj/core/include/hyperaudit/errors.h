#ifndef HYPERAUDIT_ERRORS_H_
#define HYPERAUDIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace hyperaudit {

// Malformed or inconsistent input data: files, manifests, configs, schema
// fingerprints. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed result broke a guaranteed property (e.g. Shapley additivity).
// The CLI maps this to exit code 3.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the subset-enumeration oracle when the forest uses too many
// distinct features to enumerate.
class OracleIntractableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hyperaudit

#endif  // HYPERAUDIT_ERRORS_H_

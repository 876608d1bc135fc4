#pragma once

#include <stdexcept>
#include <string>

namespace thermoshield {

// Invalid-input failures derive from std::invalid_argument or std::domain_error;
// the CLI maps both to exit code 2 and NonConvergence to exit code 3.

class NonDifferentiable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DegenerateLaw : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MeshMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateField : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, int iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

}  // namespace thermoshield

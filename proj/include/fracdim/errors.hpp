#pragma once

#include <stdexcept>
#include <string>

namespace fracdim {

// Base of every recoverable numerical or validation failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature missed its error target.
class NonConvergedQuadrature : public Error {
 public:
  NonConvergedQuadrature(const std::string& what, double error_estimate)
      : Error(what), error_estimate_(error_estimate) {}
  double error_estimate() const { return error_estimate_; }

 private:
  double error_estimate_;
};

class NoSampler : public Error {
 public:
  using Error::Error;
};

class MeshTooFine : public Error {
 public:
  using Error::Error;
};

class NetTooLarge : public Error {
 public:
  using Error::Error;
};

class DegenerateLadder : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class MismatchedInputs : public Error {
 public:
  using Error::Error;
};

}  // namespace fracdim

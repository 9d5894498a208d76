#pragma once

#include <stdexcept>
#include <string>

namespace cuspflow {

/// Base of every error the library throws.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (bad parameter, point outside D).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Coincident source and target in a singular kernel.
class SingularityError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// The boundary sampling cannot resolve a requested feature.
class ResolutionError : public Error {
  public:
    using Error::Error;
};

/// A boundary-integral matrix is singular or too badly conditioned.
class AssemblyError : public Error {
  public:
    using Error::Error;
};

/// Non-finite values or a failed numerical self-check.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Invalid run configuration or initial data.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Time step violates the CFL-style guard.
class StepSizeError : public Error {
  public:
    using Error::Error;
};

/// Simulation accuracy guard tripped (particles leaving the domain).
class AccuracyAbort : public Error {
  public:
    using Error::Error;
};

/// A sampled inequality of the blow-up argument failed.
class CertificateFailure : public Error {
  public:
    using Error::Error;
};

}  // namespace cuspflow

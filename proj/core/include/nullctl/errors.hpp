#pragma once

#include <stdexcept>
#include <string>

namespace nullctl {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or an invalid network specification.
class SpecError : public Error {
public:
  using Error::Error;
};

/// The fluid linear program has no feasible point.
class InfeasibleError : public Error {
public:
  using Error::Error;
};

/// An argument lies outside the domain of a map (e.g. sum(a) != sum(b) for G).
class DomainError : public Error {
public:
  using Error::Error;
};

/// The requested feature is outside what the library supports (e.g. N-SCP beyond 2x2).
class UnsupportedError : public Error {
public:
  using Error::Error;
};

/// The network has no simple cycle with e.m_c < 0.
class NotNullControllableError : public Error {
public:
  using Error::Error;
};

/// An integer head-count would overflow at the requested scale.
class OverflowError : public Error {
public:
  using Error::Error;
};

/// A balance identity failed during simulation. Carries a state dump.
class InvariantViolation : public Error {
public:
  using Error::Error;
};

}  // namespace nullctl

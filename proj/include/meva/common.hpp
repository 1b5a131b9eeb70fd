#pragma once

#include <stdexcept>
#include <string>

namespace meva {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidInput : public Error {
public:
  using Error::Error;
};

class EmptyBank : public Error {
public:
  using Error::Error;
};

class SingularCovariance : public Error {
public:
  using Error::Error;
};

class DegenerateRotation : public Error {
public:
  using Error::Error;
};

class FitFailed : public Error {
public:
  using Error::Error;
};

class NoDescent : public Error {
public:
  using Error::Error;
};

class DegenerateCase : public Error {
public:
  using Error::Error;
};

class MissingColumn : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

class InvalidConfig : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class SchemaMismatch : public Error {
public:
  using Error::Error;
};

}  // namespace meva

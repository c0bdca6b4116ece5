#pragma once

#include <stdexcept>
#include <string>

namespace bellcat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LabelCollision : Error {
  using Error::Error;
};

struct UnknownLabel : Error {
  using Error::Error;
};

struct InvalidPermutation : Error {
  using Error::Error;
};

struct NumericalInconsistency : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct PartitionError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct TooLargeToEnumerate : Error {
  using Error::Error;
};

struct TooLargeToMaterialize : Error {
  using Error::Error;
};

struct RegisterError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

} // namespace bellcat

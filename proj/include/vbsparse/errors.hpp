#pragma once

#include <stdexcept>
#include <string>

namespace vbsparse {

/// Base class for all vbsparse errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConstantColumn : Error {
  explicit ConstantColumn(int j)
      : Error("column " + std::to_string(j) + " has zero variance"), column(j) {}
  int column;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct InvalidSpec : Error {
  using Error::Error;
};

struct NonConvergence : Error {
  explicit NonConvergence(int max_iter)
      : Error("KKT tolerance not met after " + std::to_string(max_iter) + " sweeps"),
        max_iter(max_iter) {}
  int max_iter;
};

struct DegenerateFit : Error {
  using Error::Error;
};

struct SingularSubmatrix : Error {
  using Error::Error;
};

struct NumericalOverflow : Error {
  using Error::Error;
};

struct TooLarge : Error {
  using Error::Error;
};

struct InvalidLevel : Error {
  using Error::Error;
};

struct SizeOverCap : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct EmptyInput : Error {
  using Error::Error;
};

struct AllWeightsDegenerate : Error {
  using Error::Error;
};

}  // namespace vbsparse

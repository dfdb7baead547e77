#pragma once

#include <stdexcept>
#include <string>

namespace pointctl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PointOutsideMesh : public Error {
 public:
  using Error::Error;
};

class UnsupportedDegree : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// Raised by iterative solvers; `Breakdown` and `MaxIterations` below refine it.
class SolverError : public Error {
 public:
  using Error::Error;
};

class Breakdown : public SolverError {
 public:
  using SolverError::SolverError;
};

class MaxIterations : public SolverError {
 public:
  using SolverError::SolverError;
};

class InvalidProblem : public Error {
 public:
  using Error::Error;
};

}  // namespace pointctl

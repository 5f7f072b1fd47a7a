#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace nelson {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<Complex>;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

// Error hierarchy. Every module reports failures by throwing one of these;
// the CLI maps them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateDispersion : public Error {
 public:
  using Error::Error;
};

class StepSizeRejected : public Error {
 public:
  using Error::Error;
};

class SectorBasisUnsupported : public Error {
 public:
  using Error::Error;
};

class TruncationInsufficient : public Error {
 public:
  using Error::Error;
};

class KrylovBreakdown : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

}  // namespace nelson

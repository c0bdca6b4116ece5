#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace bellcat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Validity checks on states and operators (Hermiticity, PSD, trace).
inline constexpr double kValidityTol = 1e-10;

// Exact protocol algebra, which is exact up to rounding.
inline constexpr double kExactTol = 1e-12;

// Correlation-level quantities (probabilities, condition residues).
inline constexpr double kCorrTol = 1e-9;

inline constexpr std::size_t kDefaultDenseCap = 4096;

// Largest total dimension dense operations will materialize. Larger
// compositions must stay in branched form.
std::size_t dense_cap();
void set_dense_cap(std::size_t cap);

} // namespace bellcat

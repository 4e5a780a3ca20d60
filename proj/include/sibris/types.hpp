#ifndef SIBRIS_TYPES_HPP
#define SIBRIS_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sibris {

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using CVector = ComplexVector<double>;
using CMatrix = ComplexMatrix<double>;
using RVector = Eigen::VectorXd;

// Raised when a subproblem's convex program has no feasible point for the
// current values of the other blocks.
class SubproblemInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sibris

#endif  // SIBRIS_TYPES_HPP

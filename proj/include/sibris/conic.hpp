#ifndef SIBRIS_CONIC_HPP
#define SIBRIS_CONIC_HPP

#include <string_view>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sibris/types.hpp"

namespace sibris {

// Dense complex Hermitian matrix. The Hermitian property is a caller
// invariant; see is_hermitian().
using HermitianMatrix = CMatrix;

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double tol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <=
         tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

template <typename Scalar>
struct EigPair {
  typename Eigen::NumTraits<Scalar>::Real value;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector;
};

// Largest eigenvalue of a Hermitian matrix and a unit eigenvector for it.
// Ties go to whatever the (deterministic) self-adjoint solver returns.
template <typename Derived>
EigPair<typename Derived::Scalar> max_eigpair(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(x), Eigen::ComputeEigenvectors);
  const Eigen::Index top = x.rows() - 1;
  return {es.eigenvalues()(top), es.eigenvectors().col(top)};
}

// Tr(A B) for Hermitian A, B; real by construction.
template <typename DA, typename DB>
double trace_product(const Eigen::MatrixBase<DA>& a,
                     const Eigen::MatrixBase<DB>& b) {
  return (a.cwiseProduct(b.transpose())).sum().real();
}

// One term Tr(matrix * X_block) of a linear functional over a block-diagonal
// matrix variable.
struct BlockTerm {
  int block = 0;
  HermitianMatrix matrix;
};

// sum_t Tr(terms[t].matrix * X_{terms[t].block}) compared against rhs.
struct LinearForm {
  std::vector<BlockTerm> terms;
  double rhs = 0.0;
};

// maximize  sum_b Tr(C_b X_b)
// s.t.      equalities:    sum Tr(A X) == rhs
//           inequalities:  sum Tr(B X) <= rhs
//           X_b Hermitian PSD for every block b.
//
// A single-block problem is the plain dense form max Tr(CX), Tr(A_i X) = b_i,
// Tr(B_k X) <= c_k, X >= 0.
struct SdpProblem {
  std::vector<int> block_sizes;
  std::vector<BlockTerm> objective;
  std::vector<LinearForm> equalities;
  std::vector<LinearForm> inequalities;

  static SdpProblem single_block(const HermitianMatrix& c);
  void add_equality(const HermitianMatrix& a, double b);    // block 0
  void add_inequality(const HermitianMatrix& a, double c);  // block 0

  int dim() const;
  // Throws std::invalid_argument on shape or Hermitian violations.
  void validate() const;
};

enum class SdpStatus { Optimal, MaxIters, Infeasible };

std::string_view to_string(SdpStatus s);

// Solver iterate that can seed a later solve of a problem with the same block
// layout and constraint counts.
struct SdpWarmStart {
  Eigen::VectorXd z;
  Eigen::VectorXd u;
  double step = 1.0;
  double objective_scale = 1.0;
  bool empty() const { return z.size() == 0; }
};

struct SdpSolution {
  std::vector<HermitianMatrix> blocks;
  double objective_value = 0.0;
  // Largest violation of any constraint after each constraint row has been
  // scaled to unit Frobenius norm.
  double primal_residual = 0.0;
  // Magnitude of the most negative eigenvalue over all blocks, clamped at 0.
  double psd_residual = 0.0;
  SdpStatus status = SdpStatus::MaxIters;
  int iterations = 0;
  SdpWarmStart warm;

  // Block-diagonal assembly of all blocks.
  HermitianMatrix dense() const;
  const HermitianMatrix& X() const { return blocks.front(); }
};

struct SdpOptions {
  double tol = 1e-7;
  int max_iters = 20000;
};

// ADMM splitting between the affine constraint set (with slacks for the
// inequalities) and the product of PSD cones. Deterministic: the same inputs
// always produce bitwise-identical outputs.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {},
                      const SdpWarmStart* warm = nullptr);

inline SdpSolution solve_sdp(const SdpProblem& problem, double tol,
                             int max_iters) {
  return solve_sdp(problem, SdpOptions{tol, max_iters});
}

// Objective and constraint evaluation at an arbitrary block-diagonal point.
double evaluate_objective(const SdpProblem& problem,
                          const std::vector<HermitianMatrix>& blocks);
double evaluate_form(const LinearForm& form,
                     const std::vector<HermitianMatrix>& blocks);

}  // namespace sibris

#endif  // SIBRIS_CONIC_HPP

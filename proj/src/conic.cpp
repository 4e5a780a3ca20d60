#include "sibris/conic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sibris {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

// Real isometric coordinates of a Hermitian n x n matrix: the n diagonal
// entries followed by sqrt(2)*Re and sqrt(2)*Im of each strict upper entry.
// With this packing <svec(A), svec(B)> = Tr(A B).
template <typename Derived, typename Out>
void pack(const Eigen::MatrixBase<Derived>& h, Out&& out) {
  const Eigen::Index n = h.rows();
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i) out(idx++) = h(i, i).real();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out(idx++) = kSqrt2 * h(i, j).real();
      out(idx++) = kSqrt2 * h(i, j).imag();
    }
  }
}

template <typename In>
HermitianMatrix unpack(const In& in, Eigen::Index n) {
  HermitianMatrix h(n, n);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = Complex(in(idx++), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double re = in(idx++) / kSqrt2;
      const double im = in(idx++) / kSqrt2;
      h(i, j) = Complex(re, im);
      h(j, i) = Complex(re, -im);
    }
  }
  return h;
}

struct Layout {
  std::vector<Eigen::Index> offset;
  std::vector<Eigen::Index> size;
  Eigen::Index n_matrix = 0;  // packed length of all blocks

  explicit Layout(const std::vector<int>& blocks) {
    for (int b : blocks) {
      offset.push_back(n_matrix);
      size.push_back(b);
      n_matrix += static_cast<Eigen::Index>(b) * b;
    }
  }
};

Eigen::VectorXd pack_terms(const std::vector<BlockTerm>& terms,
                           const Layout& layout) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(layout.n_matrix);
  Eigen::VectorXd tmp;
  for (const auto& t : terms) {
    const auto b = static_cast<std::size_t>(t.block);
    const Eigen::Index len = layout.size[b] * layout.size[b];
    tmp.resize(len);
    pack(t.matrix, tmp);
    v.segment(layout.offset[b], len) += tmp;
  }
  return v;
}

// Projects every PSD block in place and returns the magnitude of the most
// negative eigenvalue seen before clamping.
void project_cone(Eigen::Ref<Eigen::VectorXd> x, const Layout& layout,
                  Eigen::Index n_slack) {
  for (std::size_t b = 0; b < layout.size.size(); ++b) {
    const Eigen::Index n = layout.size[b];
    auto seg = x.segment(layout.offset[b], n * n);
    if (n == 1) {
      seg(0) = std::max(seg(0), 0.0);
      continue;
    }
    const HermitianMatrix h = unpack(seg, n);
    Eigen::SelfAdjointEigenSolver<HermitianMatrix> es(h);
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const HermitianMatrix p =
        es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    pack(p, seg);
  }
  auto s = x.tail(n_slack);
  s = s.cwiseMax(0.0);
}

}  // namespace

SdpProblem SdpProblem::single_block(const HermitianMatrix& c) {
  SdpProblem p;
  p.block_sizes = {static_cast<int>(c.rows())};
  p.objective.push_back({0, c});
  return p;
}

void SdpProblem::add_equality(const HermitianMatrix& a, double b) {
  equalities.push_back({{{0, a}}, b});
}

void SdpProblem::add_inequality(const HermitianMatrix& a, double c) {
  inequalities.push_back({{{0, a}}, c});
}

int SdpProblem::dim() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
}

void SdpProblem::validate() const {
  if (block_sizes.empty()) throw std::invalid_argument("sdp: no blocks");
  for (int b : block_sizes)
    if (b <= 0) throw std::invalid_argument("sdp: block size must be positive");
  auto check = [&](const BlockTerm& t) {
    if (t.block < 0 || t.block >= static_cast<int>(block_sizes.size()))
      throw std::invalid_argument("sdp: term references unknown block");
    const int n = block_sizes[static_cast<std::size_t>(t.block)];
    if (t.matrix.rows() != n || t.matrix.cols() != n)
      throw std::invalid_argument("sdp: term dimension mismatch");
    if (!is_hermitian(t.matrix, 1e-10))
      throw std::invalid_argument("sdp: coefficient matrix not Hermitian");
  };
  for (const auto& t : objective) check(t);
  for (const auto& f : equalities)
    for (const auto& t : f.terms) check(t);
  for (const auto& f : inequalities)
    for (const auto& t : f.terms) check(t);
}

std::string_view to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal:
      return "optimal";
    case SdpStatus::MaxIters:
      return "max_iters";
    case SdpStatus::Infeasible:
      return "infeasible";
  }
  return "unknown";
}

HermitianMatrix SdpSolution::dense() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  HermitianMatrix x = HermitianMatrix::Zero(n, n);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    x.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return x;
}

double evaluate_objective(const SdpProblem& problem,
                          const std::vector<HermitianMatrix>& blocks) {
  double v = 0.0;
  for (const auto& t : problem.objective)
    v += trace_product(t.matrix, blocks[static_cast<std::size_t>(t.block)]);
  return v;
}

double evaluate_form(const LinearForm& form,
                     const std::vector<HermitianMatrix>& blocks) {
  double v = 0.0;
  for (const auto& t : form.terms)
    v += trace_product(t.matrix, blocks[static_cast<std::size_t>(t.block)]);
  return v;
}

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options,
                      const SdpWarmStart* warm) {
  problem.validate();
  if (!(options.tol > 0.0)) throw std::invalid_argument("sdp: tol must be > 0");

  const Layout layout(problem.block_sizes);
  const auto n_eq = static_cast<Eigen::Index>(problem.equalities.size());
  const auto n_in = static_cast<Eigen::Index>(problem.inequalities.size());
  const Eigen::Index m = n_eq + n_in;
  const Eigen::Index nx = layout.n_matrix;
  const Eigen::Index nt = nx + n_in;

  // Row-normalized affine system [A 0; G I] (x, s) = (b, h).
  Eigen::MatrixXd a_bar = Eigen::MatrixXd::Zero(m, nt);
  Eigen::VectorXd b_bar(m);
  Eigen::VectorXd row_scale(m);
  bool trivially_infeasible = false;
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool eq = i < n_eq;
    const LinearForm& f =
        eq ? problem.equalities[static_cast<std::size_t>(i)]
           : problem.inequalities[static_cast<std::size_t>(i - n_eq)];
    Eigen::VectorXd row = pack_terms(f.terms, layout);
    double nrm = row.norm();
    if (nrm == 0.0) {
      // 0 == rhs or 0 <= rhs; nothing to normalize.
      if ((eq && f.rhs != 0.0) || (!eq && f.rhs < 0.0))
        trivially_infeasible = true;
      nrm = 1.0;
    }
    row_scale(i) = nrm;
    a_bar.row(i).head(nx) = row.transpose() / nrm;
    if (!eq) a_bar(i, nx + (i - n_eq)) = 1.0;
    b_bar(i) = f.rhs / nrm;
  }

  Eigen::VectorXd c = Eigen::VectorXd::Zero(nt);
  c.head(nx) = pack_terms(problem.objective, layout);
  double c_scale = c.norm();
  if (c_scale == 0.0) c_scale = 1.0;
  c /= c_scale;

  // Pseudo-inverse of the Gram matrix; tolerates redundant rows.
  Eigen::MatrixXd gram_pinv = Eigen::MatrixXd::Zero(m, m);
  if (m > 0) {
    const Eigen::MatrixXd gram = a_bar * a_bar.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const double cut = 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
    Eigen::VectorXd inv = es.eigenvalues();
    for (Eigen::Index i = 0; i < m; ++i) inv(i) = inv(i) > cut ? 1.0 / inv(i) : 0.0;
    gram_pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  }

  auto project_affine = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    if (m == 0) return v;
    const Eigen::VectorXd r = a_bar * v - b_bar;
    return v - a_bar.transpose() * (gram_pinv * r);
  };

  auto violation = [&](const Eigen::VectorXd& z) {
    double worst = 0.0;
    if (m == 0) return worst;
    const Eigen::VectorXd ax = a_bar.leftCols(nx) * z.head(nx) - b_bar;
    for (Eigen::Index i = 0; i < m; ++i)
      worst = std::max(worst, i < n_eq ? std::abs(ax(i)) : std::max(ax(i), 0.0));
    return worst;
  };

  Eigen::VectorXd z = Eigen::VectorXd::Zero(nt);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(nt);
  double step = 1.0;
  if (warm != nullptr && !warm->empty() && warm->z.size() == nt &&
      warm->u.size() == nt) {
    z = warm->z;
    step = warm->step;
    // Dual iterates scale inversely with the objective normalization.
    u = warm->u * (warm->objective_scale / c_scale);
  }

  Eigen::VectorXd y(nt), z_prev(nt);
  SdpStatus status = SdpStatus::MaxIters;
  int iter = 0;
  double stagnation_ref = -1.0;
  constexpr int kCheckEvery = 10;
  constexpr int kBalanceEvery = 50;
  constexpr int kStagnationWindow = 500;

  if (trivially_infeasible) status = SdpStatus::Infeasible;

  while (status == SdpStatus::MaxIters && iter < options.max_iters) {
    ++iter;
    y = project_affine(z - u + c / step);
    z_prev = z;
    z = y + u;
    project_cone(z, layout, n_in);
    u += y - z;

    if (iter % kCheckEvery != 0) continue;
    const double primal = (y - z).norm();
    const double dual = step * (z - z_prev).norm();
    if (violation(z) <= options.tol && dual <= options.tol) {
      status = SdpStatus::Optimal;
      break;
    }
    if (iter % kBalanceEvery == 0) {
      if (primal > 10.0 * dual && step < 1e8) {
        step *= 2.0;
        u /= 2.0;
      } else if (dual > 10.0 * primal && step > 1e-8) {
        step /= 2.0;
        u *= 2.0;
      }
    }
    if (iter % kStagnationWindow == 0) {
      // A persistent nonzero gap between the affine set and the cone is the
      // ADMM signature of primal infeasibility.
      if (stagnation_ref > 0.0 && primal > 100.0 * options.tol &&
          std::abs(primal - stagnation_ref) <= 1e-3 * primal &&
          iter >= 4 * kStagnationWindow) {
        status = SdpStatus::Infeasible;
        break;
      }
      stagnation_ref = primal;
    }
  }

  SdpSolution sol;
  sol.status = status;
  sol.iterations = iter;
  sol.blocks.reserve(layout.size.size());
  double min_eig = 0.0;
  for (std::size_t b = 0; b < layout.size.size(); ++b) {
    const Eigen::Index n = layout.size[b];
    sol.blocks.push_back(unpack(z.segment(layout.offset[b], n * n), n));
    const double lo =
        Eigen::SelfAdjointEigenSolver<HermitianMatrix>(sol.blocks.back(),
                                                       Eigen::EigenvaluesOnly)
            .eigenvalues()(0);
    min_eig = std::min(min_eig, lo);
  }
  sol.psd_residual = -min_eig;
  sol.primal_residual = violation(z);
  sol.objective_value = evaluate_objective(problem, sol.blocks);
  sol.warm = {z, u, step, c_scale};
  return sol;
}

}  // namespace sibris

#include "bellcat/random.hpp"

#include <numeric>

namespace bellcat {

namespace {

Matrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      g(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
  }
  return g;
}

} // namespace

Matrix random_unitary(std::size_t d, Rng& rng) {
  const Matrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix the phase so the distribution is Haar.
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Complex diag = r(k, k);
    if (std::abs(diag) > 0) q.col(k) *= diag / std::abs(diag);
  }
  return q;
}

Vector random_pure(std::size_t d, Rng& rng) {
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(rng.gaussian(), rng.gaussian());
  v.normalize();
  return v;
}

Matrix random_density(std::size_t d, Rng& rng, std::size_t ancilla_dim) {
  if (ancilla_dim == 0) ancilla_dim = d;
  // Tracing the ancilla out of |psi><psi| gives G G^dag / tr for a Ginibre
  // block G of shape d x ancilla.
  Matrix g = ginibre(d, ancilla_dim, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return rho;
}

DensityMatrix random_state(LabelList labels, Rng& rng) {
  const std::size_t d = dims_product(labels);
  return make_density(std::move(labels), random_density(d, rng));
}

std::vector<Matrix> random_projective_povm(std::size_t d, std::size_t n_outcomes, Rng& rng) {
  Matrix g = ginibre(d, d, rng);
  Matrix h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  const Matrix vecs = solver.eigenvectors();

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t k = d; k > 1; --k) {
    std::swap(order[k - 1], order[rng.uniform_index(k)]);
  }

  std::vector<Matrix> povm(n_outcomes, Matrix::Zero(static_cast<Eigen::Index>(d),
                                                    static_cast<Eigen::Index>(d)));
  for (std::size_t k = 0; k < d; ++k) {
    const auto v = vecs.col(static_cast<Eigen::Index>(order[k]));
    povm[k % n_outcomes] += v * v.adjoint();
  }
  return povm;
}

} // namespace bellcat

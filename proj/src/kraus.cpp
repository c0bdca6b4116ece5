#include "bellcat/kraus.hpp"

#include "bellcat/errors.hpp"
#include "bellcat/qstate.hpp"

namespace bellcat {

double completeness_residue(const KrausMap& map) {
  const std::size_t din = dims_product(map.in_labels);
  Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(din), static_cast<Eigen::Index>(din));
  for (const auto& k : map.ops) sum += k.adjoint() * k;
  return (sum - identity_matrix(din)).cwiseAbs().maxCoeff();
}

Matrix apply_kraus(const KrausMap& map, const Matrix& rho) {
  const std::size_t dout = dims_product(map.out_labels);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(dout));
  for (const auto& k : map.ops) out += k * rho * k.adjoint();
  return out;
}

Matrix choi_operator(const std::vector<Matrix>& kraus_ops) {
  if (kraus_ops.empty()) throw DimensionError("Choi operator of an empty Kraus list");
  const Eigen::Index rows = kraus_ops.front().rows();
  const Eigen::Index cols = kraus_ops.front().cols();
  Matrix choi = Matrix::Zero(rows * cols, rows * cols);
  for (const auto& k : kraus_ops) {
    Vector v(rows * cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) v(r * cols + c) = k(r, c);
    }
    choi += v * v.adjoint();
  }
  return choi;
}

double choi_min_eigenvalue(const std::vector<Matrix>& kraus_ops) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(choi_operator(kraus_ops), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

} // namespace bellcat

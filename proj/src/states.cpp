#include "bellcat/states.hpp"

#include <cmath>
#include <limits>

#include "bellcat/errors.hpp"
#include "bellcat/random.hpp"

namespace bellcat {

DensityMatrix max_entangled(std::size_t d, const std::string& nameA, const std::string& nameB) {
  if (d < 2) throw DimensionError("maximally entangled states need local dimension >= 2");
  Vector phi = Vector::Zero(static_cast<Eigen::Index>(d * d));
  for (std::size_t i = 0; i < d; ++i) {
    phi(static_cast<Eigen::Index>(i * d + i)) = 1.0 / std::sqrt(static_cast<double>(d));
  }
  return make_density({quantum_label(nameA, d), quantum_label(nameB, d)}, phi * phi.adjoint());
}

DensityMatrix isotropic(const IsotropicSpec& spec) {
  if (spec.d < 2) throw DimensionError("isotropic states need local dimension >= 2");
  if (spec.visibility < 0.0 || spec.visibility > 1.0) {
    throw DimensionError("visibility must lie in [0, 1]");
  }
  const DensityMatrix phi = max_entangled(spec.d);
  const double d2 = static_cast<double>(spec.d * spec.d);
  Matrix data = spec.visibility * phi.data +
                ((1.0 - spec.visibility) / d2) * identity_matrix(spec.d * spec.d);
  return DensityMatrix{phi.labels, std::move(data)};
}

double isotropic_singlet_fraction(const IsotropicSpec& spec) {
  const double d2 = static_cast<double>(spec.d * spec.d);
  return spec.visibility + (1.0 - spec.visibility) / d2;
}

namespace {

// Overlap with (U x I)|phi+> as a quadratic form: the state (U x I)|phi+>
// is vec(U)/sqrt(d) in the row-major flattening, so the overlap is
// vec(U)^dag rho vec(U) / d and the ascent direction is rho vec(U).
double overlap_of(const Matrix& rho, const Matrix& u, std::size_t d) {
  Vector v(static_cast<Eigen::Index>(d * d));
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      v(static_cast<Eigen::Index>(k * d + i)) = u(static_cast<Eigen::Index>(k),
                                                  static_cast<Eigen::Index>(i));
    }
  }
  const Complex q = (v.adjoint() * rho * v)(0);
  return q.real() / static_cast<double>(d);
}

Matrix polar_unitary(const Matrix& g) {
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double ascend_from(const Matrix& rho, Matrix u, std::size_t d) {
  constexpr std::size_t kMaxIterations = 2000;
  constexpr double kOverlapTol = 1e-10;

  double f = overlap_of(rho, u, d);
  for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
    Vector v(static_cast<Eigen::Index>(d * d));
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        v(static_cast<Eigen::Index>(k * d + i)) = u(static_cast<Eigen::Index>(k),
                                                    static_cast<Eigen::Index>(i));
      }
    }
    const Vector w = rho * v;
    Matrix grad(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        grad(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
            w(static_cast<Eigen::Index>(k * d + i));
      }
    }
    if (grad.norm() < 1e-15) break; // flat landscape, any unitary is optimal
    u = polar_unitary(grad);
    const double next = overlap_of(rho, u, d);
    if (next - f < kOverlapTol) {
      f = std::max(f, next);
      break;
    }
    f = next;
  }
  return f;
}

} // namespace

double singlet_fraction(const DensityMatrix& rho, std::size_t restarts, std::uint64_t seed) {
  if (rho.labels.size() != 2 || rho.labels[0].dim != rho.labels[1].dim) {
    throw DimensionError("singlet fraction needs a bipartite d x d state");
  }
  const std::size_t d = rho.labels[0].dim;

  const Rng master(seed);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    Matrix u0;
    if (r == 0) {
      u0 = identity_matrix(d); // guarantees F >= <phi+|rho|phi+>
    } else {
      Rng rng = master.child(r);
      u0 = random_unitary(d, rng);
    }
    best = std::max(best, ascend_from(rho.data, u0, d));
  }
  return best;
}

bool singlet_fraction_threshold(const DensityMatrix& rho, std::size_t restarts,
                                std::uint64_t seed) {
  const double f = singlet_fraction(rho, restarts, seed); // validates the shape
  const double d = static_cast<double>(rho.labels[0].dim);
  return f > 1.0 / d + 1e-9;
}

} // namespace bellcat

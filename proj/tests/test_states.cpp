#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <bellcat/errors.hpp>
#include <bellcat/random.hpp>
#include <bellcat/states.hpp>

using namespace bellcat;

TEST_CASE("phi+ has maximally mixed marginals and unit purity") {
  for (std::size_t d : {2, 3, 4}) {
    const DensityMatrix phi = max_entangled(d);
    const DensityMatrix marginal = partial_trace(phi, {"A"});
    CHECK((marginal.data - identity_matrix(d) / static_cast<double>(d)).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK((phi.data * phi.data).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(max_entangled(1), DimensionError);
}

TEST_CASE("phi+ overlaps itself perfectly") {
  const DensityMatrix phi = max_entangled(2);
  const HermitianOperator projector{phi.labels, phi.data};
  CHECK(expectation(phi, projector) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("isotropic endpoints are the maximally mixed state and phi+") {
  const DensityMatrix at_zero = isotropic({2, 0.0});
  CHECK((at_zero.data - identity_matrix(4) / 4.0).cwiseAbs().maxCoeff() < 1e-15);
  const DensityMatrix at_one = isotropic({2, 1.0});
  CHECK((at_one.data - max_entangled(2).data).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("isotropic state at half visibility has the expected spectrum") {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(isotropic({2, 0.5}).data, Eigen::EigenvaluesOnly);
  std::vector<double> vals(eig.eigenvalues().data(), eig.eigenvalues().data() + 4);
  std::sort(vals.begin(), vals.end());
  CHECK(vals[0] == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(vals[1] == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(vals[2] == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(vals[3] == doctest::Approx(0.625).epsilon(1e-12));
}

TEST_CASE("isotropic states are valid across the visibility range") {
  for (double v : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    CHECK(validate(isotropic({2, v})).passed());
    CHECK(validate(isotropic({3, v})).passed());
  }
}

TEST_CASE("variational singlet fraction matches the analytic isotropic value") {
  for (double v : {0.0, 0.3, 0.5, 0.8, 1.0}) {
    const double expected = isotropic_singlet_fraction({2, v});
    CHECK(singlet_fraction(isotropic({2, v}), 8, 0) == doctest::Approx(expected).epsilon(1e-6));
  }
  // The headline values: F(1/2) = 5/8 and F(1/3) = 1/2.
  CHECK(singlet_fraction(isotropic({2, 0.5}), 8, 0) == doctest::Approx(0.625).epsilon(1e-9));
  CHECK(singlet_fraction(isotropic({2, 1.0 / 3.0}), 8, 0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("variational singlet fraction handles qutrits") {
  for (double v : {0.0, 0.5, 1.0}) {
    const double expected = isotropic_singlet_fraction({3, v});
    CHECK(singlet_fraction(isotropic({3, v}), 8, 0) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("singlet fraction of phi+ is one") {
  CHECK(singlet_fraction(max_entangled(2), 4, 0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("singlet fraction dominates the bare phi+ overlap") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = random_state({quantum_label("A", 2), quantum_label("B", 2)}, rng);
    const HermitianOperator phi{rho.labels, max_entangled(2).data};
    CHECK(singlet_fraction(rho, 6, trial) >= expectation(rho, phi) - 1e-10);
  }
}

TEST_CASE("singlet fraction is symmetric under exchanging the parties") {
  Rng rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const DensityMatrix rho = random_state({quantum_label("A", 2), quantum_label("B", 2)}, rng);
    const DensityMatrix flipped = swap_subsystems(rho, {"B", "A"});
    CHECK(singlet_fraction(rho, 8, 0) ==
          doctest::Approx(singlet_fraction(flipped, 8, 0)).epsilon(1e-6));
  }
}

TEST_CASE("singlet fraction rejects lopsided bipartitions") {
  Rng rng(7);
  const DensityMatrix bad = random_state({quantum_label("A", 2), quantum_label("B", 3)}, rng);
  CHECK_THROWS_AS(singlet_fraction(bad, 2, 0), DimensionError);
}

TEST_CASE("threshold flags activation candidates") {
  // F(I/4) = 1/4 < 1/2: no candidate.
  CHECK(!singlet_fraction_threshold(isotropic({2, 0.0})));
  // F(phi+) = 1 > 1/2.
  CHECK(singlet_fraction_threshold(max_entangled(2)));
  // V = 0.4 gives F = 0.55 > 0.5 even though the state satisfies CHSH.
  CHECK(singlet_fraction_threshold(isotropic({2, 0.4})));
  // At the crossing point F = 1/2 exactly; the strict margin rejects it.
  CHECK(!singlet_fraction_threshold(isotropic({2, 1.0 / 3.0})));
}

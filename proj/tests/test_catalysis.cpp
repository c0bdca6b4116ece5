#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <bellcat/catalysis.hpp>
#include <bellcat/errors.hpp>
#include <bellcat/kraus.hpp>
#include <bellcat/random.hpp>
#include <bellcat/states.hpp>

using namespace bellcat;

namespace {

CatalystSpec random_spec(std::size_t n, Rng& rng, bool pure_sigma = false) {
  CatalystSpec spec;
  spec.rho = random_state({quantum_label("A", 2), quantum_label("B", 2)}, rng);
  if (pure_sigma) {
    spec.sigmaA = basis_state(quantum_label("sA", 2), 0);
    spec.sigmaB = basis_state(quantum_label("sB", 2), 0);
  } else {
    spec.sigmaA = random_state({quantum_label("sA", 2)}, rng);
    spec.sigmaB = random_state({quantum_label("sB", 2)}, rng);
  }
  spec.n = n;
  return spec;
}

// SWAP of two equal-dimension subsystems, built by explicit basis exchange.
Matrix swap_matrix(std::size_t d) {
  Matrix s = Matrix::Zero(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d * d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      s(static_cast<Eigen::Index>(j * d + i), static_cast<Eigen::Index>(i * d + j)) = 1.0;
    }
  }
  return s;
}

} // namespace

TEST_CASE("two-copy catalyst is the even mixture of sigma[00] and rho[11]") {
  Rng rng(3);
  const CatalystSpec spec = random_spec(2, rng);
  const BranchedCqState cat = build_catalyst(spec);

  BranchedCqState expected;
  expected.labels = cat.labels;
  Branch b0;
  b0.prob = 0.5;
  b0.registers = {{"tRA", 0}, {"tRB", 0}};
  b0.factors = {{{"tA1"}, spec.sigmaA.data}, {{"tB1"}, spec.sigmaB.data}};
  Branch b1;
  b1.prob = 0.5;
  b1.registers = {{"tRA", 1}, {"tRB", 1}};
  b1.factors = {{{"tA1", "tB1"}, spec.rho.data}};
  expected.branches = {b0, b1};

  CHECK(branched_equal(cat, expected));
}

TEST_CASE("three-copy catalyst carries 0, 1 and 2 system pairs") {
  Rng rng(5);
  const CatalystSpec spec = random_spec(3, rng);
  const BranchedCqState cat = build_catalyst(spec);
  REQUIRE(cat.branches.size() == 3);

  for (std::size_t i = 0; i < 3; ++i) {
    const Branch& br = cat.branches[i];
    CHECK(br.prob == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(br.registers.at("tRA") == i);
    CHECK(br.registers.at("tRB") == i);
    std::size_t pairs = 0;
    for (const auto& f : br.factors) {
      if (f.labels.size() == 2) {
        ++pairs;
        CHECK((f.data - spec.rho.data).cwiseAbs().maxCoeff() == 0.0);
      }
    }
    CHECK(pairs == i);
  }
}

TEST_CASE("catalyst branch probabilities are uniform for n up to 6") {
  Rng rng(7);
  for (std::size_t n = 2; n <= 6; ++n) {
    const BranchedCqState cat = build_catalyst(random_spec(n, rng));
    REQUIRE(cat.branches.size() == n);
    for (const auto& br : cat.branches) {
      CHECK(br.prob == doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-15));
    }
  }
}

TEST_CASE("two-copy transform produces the expected pair of branches") {
  Rng rng(11);
  const CatalystSpec spec = random_spec(2, rng);
  const BranchedCqState global = catalytic_transform(spec);

  BranchedCqState expected;
  expected.labels = global.labels;
  Branch activated; // both copies delivered, catalyst reset
  activated.prob = 0.5;
  activated.registers = {{"RA", 0}, {"RB", 0}, {"tRA", 0}, {"tRB", 0}};
  activated.factors = {{{"A1", "B1"}, spec.rho.data},
                       {{"A2", "B2"}, spec.rho.data},
                       {{"tA1"}, spec.sigmaA.data},
                       {{"tB1"}, spec.sigmaB.data}};
  Branch loaded; // copy parked in the catalyst, sigma pairs delivered
  loaded.prob = 0.5;
  loaded.registers = {{"RA", 1}, {"RB", 1}, {"tRA", 1}, {"tRB", 1}};
  loaded.factors = {{{"A1"}, spec.sigmaA.data},
                    {{"B1"}, spec.sigmaB.data},
                    {{"A2"}, spec.sigmaA.data},
                    {{"B2"}, spec.sigmaB.data},
                    {{"tA1", "tB1"}, spec.rho.data}};
  expected.branches = {activated, loaded};

  CHECK(branched_equal(global, expected));
}

TEST_CASE("the catalyst marginal returns exactly to its initial state") {
  Rng rng(13);
  for (std::size_t n : {2, 3, 4}) {
    for (int trial = 0; trial < 3; ++trial) {
      const CatalystSpec spec = random_spec(n, rng);
      const BranchedCqState global = catalytic_transform(spec);
      const BranchedCqState marginal = catalyst_marginal(global, spec);
      CHECK(branched_equal(marginal, build_catalyst(spec)));
      CHECK(branched_difference(marginal, build_catalyst(spec)) <= 1e-12);
    }
  }
}

TEST_CASE("catalyst return holds trivially when rho equals sigma") {
  Rng rng(17);
  CatalystSpec spec = random_spec(3, rng);
  spec.rho = make_density(spec.rho.labels, kron(spec.sigmaA.data, spec.sigmaB.data));
  const BranchedCqState global = catalytic_transform(spec);
  CHECK(branched_equal(catalyst_marginal(global, spec), build_catalyst(spec)));
}

TEST_CASE("a perturbed branch probability breaks the catalytic equality") {
  Rng rng(19);
  const CatalystSpec spec = random_spec(2, rng);
  const BranchedCqState global = catalytic_transform(spec);
  BranchedCqState marginal = catalyst_marginal(global, spec);
  marginal.branches[0].prob += 1e-3;
  marginal.branches[1].prob -= 1e-3;
  CHECK(!branched_equal(marginal, build_catalyst(spec)));
  CHECK(branched_difference(marginal, build_catalyst(spec)) >= 1e-3 - 1e-12);
}

TEST_CASE("the system marginal obeys the two-branch output law") {
  Rng rng(23);
  for (std::size_t n : {2, 3, 4, 5, 6}) {
    const CatalystSpec spec = random_spec(n, rng);
    const BranchedCqState marginal = system_marginal(catalytic_transform(spec), spec);
    CHECK(branched_equal(marginal, expected_system_marginal(spec)));

    REQUIRE(marginal.branches.size() == 2);
    CHECK(marginal.branches[0].prob ==
          doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-15));
    CHECK(marginal.branches[1].prob ==
          doctest::Approx(static_cast<double>(n - 1) / static_cast<double>(n)).epsilon(1e-15));
    CHECK(marginal.branches[0].registers.at("RA") == 0);
    CHECK(marginal.branches[1].registers.at("RA") == 1);
  }
}

TEST_CASE("marginals reject states with foreign labels") {
  Rng rng(29);
  const CatalystSpec spec2 = random_spec(2, rng);
  const CatalystSpec spec3 = random_spec(3, rng);
  const BranchedCqState global3 = catalytic_transform(spec3);
  CHECK_THROWS_AS(system_marginal(global3, spec2), PartitionError);
}

TEST_CASE("degenerate rho equal to sigma leaves only the register flags distinct") {
  Rng rng(31);
  CatalystSpec spec = random_spec(3, rng);
  spec.rho = make_density(spec.rho.labels, kron(spec.sigmaA.data, spec.sigmaB.data));
  const BranchedCqState marginal = system_marginal(catalytic_transform(spec), spec);
  const DensityMatrix dense = to_dense(marginal);

  Matrix sigmas_a = Matrix::Identity(1, 1);
  Matrix sigmas_b = Matrix::Identity(1, 1);
  for (int k = 0; k < 3; ++k) {
    sigmas_a = kron(sigmas_a, spec.sigmaA.data);
    sigmas_b = kron(sigmas_b, spec.sigmaB.data);
  }
  Matrix direct = Matrix::Zero(dense.data.rows(), dense.data.cols());
  direct += (1.0 / 3.0) * kron(kron(kron(sigmas_a, basis_projector(2, 0)), sigmas_b),
                               basis_projector(2, 0));
  direct += (2.0 / 3.0) * kron(kron(kron(sigmas_a, basis_projector(2, 1)), sigmas_b),
                               basis_projector(2, 1));
  CHECK((dense.data - direct).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("dense form of a single-branch single-factor state is that factor") {
  Rng rng(37);
  const DensityMatrix rho = random_state({quantum_label("A", 2), quantum_label("B", 2)}, rng);
  BranchedCqState b;
  b.labels = rho.labels;
  Branch br;
  br.prob = 1.0;
  br.factors = {{{"A", "B"}, rho.data}};
  b.branches = {br};
  const DensityMatrix dense = to_dense(b);
  CHECK((dense.data - rho.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense two-copy catalyst is a 16-dimensional valid state") {
  Rng rng(41);
  const CatalystSpec spec = random_spec(2, rng);
  const DensityMatrix dense = to_dense(build_catalyst(spec));
  CHECK(dense.dim() == 16); // one qubit pair and two registers of dim 2
  CHECK(validate(dense).passed());
}

TEST_CASE("dense materialization respects the cap") {
  Rng rng(43);
  const CatalystSpec spec = random_spec(3, rng);
  const BranchedCqState global = catalytic_transform(spec);
  // 36864 total dimensions for n = 3 with qubit pairs.
  CHECK_THROWS_AS(to_dense(global), TooLargeToMaterialize);
}

TEST_CASE("dense partial trace over either side matches the branched marginals") {
  Rng rng(47);
  const CatalystSpec spec = random_spec(2, rng);
  const BranchedCqState global = catalytic_transform(spec);
  const DensityMatrix dense_global = to_dense(global);
  CHECK(dense_global.dim() == 1024);

  const DensityMatrix reduced = partial_trace(dense_global, {"A1", "A2", "RA", "B1", "B2", "RB"});
  const DensityMatrix direct = to_dense(system_marginal(global, spec));
  CHECK((reduced.data - direct.data).cwiseAbs().maxCoeff() < 1e-12);

  const DensityMatrix cat_reduced = partial_trace(dense_global, {"tA1", "tRA", "tB1", "tRB"});
  const DensityMatrix cat_direct = to_dense(catalyst_marginal(global, spec));
  CHECK((cat_reduced.data - cat_direct.data).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generic marginals can split a factor group") {
  Rng rng(49);
  const CatalystSpec spec = random_spec(2, rng);
  const BranchedCqState cat = build_catalyst(spec);
  const BranchedCqState half = branched_marginal(cat, {"tA1", "tRA", "tRB"});
  const DensityMatrix dense = to_dense(half);
  const DensityMatrix oracle = partial_trace(to_dense(cat), {"tA1", "tRA", "tRB"});
  CHECK((dense.data - oracle.data).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("label rebinding agrees with conjugation by swap unitaries") {
  Rng rng(53);
  const CatalystSpec spec = random_spec(2, rng);

  // Independent check of the kernel itself first.
  const DensityMatrix pair = random_state({quantum_label("X", 2), quantum_label("Y", 2)}, rng);
  const Matrix s2 = swap_matrix(2);
  CHECK((swap_subsystems(pair, {"Y", "X"}).data - s2 * pair.data * s2).cwiseAbs().maxCoeff() <
        1e-15);

  // Branch with register value 0: both parties swap their system into the
  // catalyst slot, so the physical unitary is SWAP_(A,tA1) x SWAP_(B,tB1).
  const LabelList labels{quantum_label("A", 2), quantum_label("B", 2), quantum_label("tA1", 2),
                         quantum_label("tB1", 2)};
  const DensityMatrix before =
      make_density(labels, kron(kron(spec.rho.data, spec.sigmaA.data), spec.sigmaB.data));

  const Matrix swap_a =
      embed_operator(HermitianOperator{{labels[0], labels[2]}, swap_matrix(2)}, labels);
  const Matrix swap_b =
      embed_operator(HermitianOperator{{labels[1], labels[3]}, swap_matrix(2)}, labels);
  const Matrix u = swap_a * swap_b;
  const Matrix physical = u * before.data * u.adjoint();

  // Rebinding instead moves the matrices: sigma onto (A, B), rho onto the
  // catalyst pair. Assemble as sA x sB x rho_(tA1,tB1) then reorder.
  const DensityMatrix rebound = swap_subsystems(
      make_density({labels[0], labels[1], labels[2], labels[3]},
                   kron(kron(spec.sigmaA.data, spec.sigmaB.data), spec.rho.data)),
      {"A", "B", "tA1", "tB1"});
  CHECK((physical - rebound.data).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("the transform passes the locality audit and a doctored state fails it") {
  Rng rng(59);
  const CatalystSpec spec = random_spec(2, rng);
  BranchedCqState global = catalytic_transform(spec);
  CHECK(audit_locality(global, spec).local);

  // Replace the per-party sigma factors by a cross-party pair not equal to
  // rho, which no local protocol could have produced.
  for (auto& br : global.branches) {
    for (std::size_t k = 0; k < br.factors.size(); ++k) {
      if (br.factors[k].labels == std::vector<std::string>{"A1"}) {
        Matrix joint = kron(br.factors[k].data, Matrix(0.5 * identity_matrix(2)));
        br.factors[k] = BranchFactor{{"A1", "B1"}, joint};
        for (std::size_t j = 0; j < br.factors.size(); ++j) {
          if (br.factors[j].labels == std::vector<std::string>{"B1"}) {
            br.factors.erase(br.factors.begin() + static_cast<std::ptrdiff_t>(j));
            break;
          }
        }
        break;
      }
    }
  }
  const auto audit = audit_locality(global, spec);
  CHECK(!audit.local);
  CHECK(!audit.detail.empty());
}

TEST_CASE("the output is correlated with the catalyst, not a product") {
  const CatalystSpec spec = make_catalyst_spec(max_entangled(2), 2);
  const BranchedCqState global = catalytic_transform(spec);
  const Matrix joint = to_dense(global).data;
  const Matrix product = kron(to_dense(system_marginal(global, spec)).data,
                              to_dense(catalyst_marginal(global, spec)).data);
  CHECK((joint - product).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("branch probabilities of the output sum to one") {
  Rng rng(61);
  for (std::size_t n : {2, 3, 4}) {
    const BranchedCqState global = catalytic_transform(random_spec(n, rng));
    double total = 0.0;
    for (const auto& br : global.branches) total += br.prob;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("the local Kraus channels are trace preserving") {
  Rng rng(67);
  for (std::size_t n : {2, 3}) {
    for (bool pure : {true, false}) {
      const CatalystSpec spec = random_spec(n, rng, pure);
      CHECK(completeness_residue(local_protocol_kraus(spec, Party::Alice)) < 1e-10);
      CHECK(completeness_residue(local_protocol_kraus(spec, Party::Bob)) < 1e-10);
    }
  }
}

TEST_CASE("the explicit local channels reproduce the branched transform") {
  Rng rng(71);
  for (bool pure : {true, false}) {
    const CatalystSpec spec = random_spec(2, rng, pure);
    const KrausMap channelA = local_protocol_kraus(spec, Party::Alice);
    const KrausMap channelB = local_protocol_kraus(spec, Party::Bob);

    // Dense input rho x omega, ordered (Alice inputs..., Bob inputs...).
    DensityMatrix omega = to_dense(build_catalyst(spec));
    DensityMatrix joint = tensor(spec.rho, omega);
    std::vector<std::string> in_order;
    for (const auto& l : channelA.in_labels) in_order.push_back(l.name);
    for (const auto& l : channelB.in_labels) in_order.push_back(l.name);
    const DensityMatrix input = swap_subsystems(joint, in_order);

    const std::size_t dout = dims_product(channelA.out_labels) *
                             dims_product(channelB.out_labels);
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(dout));
    for (const auto& ka : channelA.ops) {
      for (const auto& kb : channelB.ops) {
        const Matrix k = kron(ka, kb);
        out += k * input.data * k.adjoint();
      }
    }

    LabelList out_labels = channelA.out_labels;
    out_labels.insert(out_labels.end(), channelB.out_labels.begin(), channelB.out_labels.end());
    const DensityMatrix channel_result = make_density(out_labels, std::move(out));

    const BranchedCqState global = catalytic_transform(spec);
    const DensityMatrix expected =
        swap_subsystems(to_dense(global), label_names(out_labels));
    CHECK((channel_result.data - expected.data).cwiseAbs().maxCoeff() < 1e-12);
  }
}

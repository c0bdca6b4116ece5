#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <bellcat/catalysis.hpp>
#include <bellcat/errors.hpp>
#include <bellcat/instruments.hpp>
#include <bellcat/random.hpp>
#include <bellcat/serialize.hpp>
#include <bellcat/states.hpp>

using namespace bellcat;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("serialize_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("density matrices survive a JSON round trip exactly") {
  Rng rng(3);
  const DensityMatrix s = random_state(
      {quantum_label("A", 2), register_label("R", 3), quantum_label("B", 2)}, rng);
  const Json j = s;
  const auto back = j.get<DensityMatrix>();
  CHECK(back.labels == s.labels);
  CHECK((back.data - s.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("density matrices survive a file round trip within 1e-15") {
  Rng rng(5);
  const DensityMatrix s = random_state({quantum_label("A", 4)}, rng);
  TempFile file("state.json");
  save_json_file(file.path, Json(s));
  const auto back = load_json_file(file.path).get<DensityMatrix>();
  CHECK((back.data - s.data).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("label kinds are preserved and unknown kinds rejected") {
  const Json good{{"name", "R"}, {"dim", 4}, {"kind", "classical-register"}};
  CHECK(good.get<SubsystemLabel>().kind == SubsystemKind::ClassicalRegister);
  const Json bad{{"name", "R"}, {"dim", 4}, {"kind", "qutrit"}};
  CHECK_THROWS_AS(bad.get<SubsystemLabel>(), ParseError);
}

TEST_CASE("state deserialization rejects mismatched data length") {
  Json j = Json(max_entangled(2));
  j["data"].erase(0);
  CHECK_THROWS_AS(j.get<DensityMatrix>(), ParseError);
}

TEST_CASE("the CHSH functional survives a round trip") {
  const BellFunctional f = chsh();
  const auto back = Json(f).get<BellFunctional>();
  CHECK(back.nX == 2);
  CHECK(back.coeffs == f.coeffs);
}

TEST_CASE("assemblages round trip through JSON") {
  Rng rng(7);
  MeasurementAssemblage m{{quantum_label("A", 2)}, {}};
  for (int x = 0; x < 2; ++x) m.povms.push_back(random_projective_povm(2, 2, rng));
  const auto back = Json(m).get<MeasurementAssemblage>();
  REQUIRE(back.povms.size() == 2);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t a = 0; a < 2; ++a) {
      CHECK((back.povms[x][a] - m.povms[x][a]).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("branched states round trip in canonical form") {
  Rng rng(11);
  CatalystSpec spec;
  spec.rho = random_state({quantum_label("A", 2), quantum_label("B", 2)}, rng);
  spec.sigmaA = random_state({quantum_label("sA", 2)}, rng);
  spec.sigmaB = random_state({quantum_label("sB", 2)}, rng);
  spec.n = 3;
  const BranchedCqState cat = build_catalyst(spec);
  const auto back = Json(cat).get<BranchedCqState>();
  CHECK(branched_equal(back, cat, 0.0));
}

TEST_CASE("branched deserialization validates the partition") {
  const CatalystSpec spec = make_catalyst_spec(max_entangled(2), 2);
  Json j = Json(build_catalyst(spec));
  j["branches"][0]["factors"] = Json::array(); // quantum labels left uncovered
  CHECK_THROWS_AS(j.get<BranchedCqState>(), PartitionError);
}

TEST_CASE("instruments with rectangular Kraus operators round trip") {
  const CatalystSpec spec = make_catalyst_spec(max_entangled(2), 2);
  const KrausMap channel = local_protocol_kraus(spec, Party::Alice);

  QuantumInstrument inst;
  inst.in_labels = channel.in_labels;
  inst.out_labels = channel.out_labels;
  inst.arms = {{channel.ops}};
  const auto back = Json(inst).get<QuantumInstrument>();
  REQUIRE(back.arms.size() == 1);
  REQUIRE(back.arms[0][0].size() == channel.ops.size());
  for (std::size_t k = 0; k < channel.ops.size(); ++k) {
    CHECK((back.arms[0][0][k] - channel.ops[k]).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(instrument_completeness_residue(back) < 1e-10);
}

TEST_CASE("instrument scenarios default to uniform inputs") {
  Rng rng(13);
  InstrumentScenario scenario;
  scenario.rho = max_entangled(2);
  scenario.omega = tensor(random_state({quantum_label("CA", 2)}, rng),
                          random_state({quantum_label("CB", 2)}, rng));
  QuantumInstrument trivial;
  trivial.in_labels = {scenario.rho.labels[0], scenario.omega.labels[0]};
  trivial.out_labels = trivial.in_labels;
  trivial.arms = {{{identity_matrix(4)}}, {{identity_matrix(4)}}};
  scenario.instA = trivial;
  QuantumInstrument trivialB = trivial;
  trivialB.in_labels = {scenario.rho.labels[1], scenario.omega.labels[1]};
  trivialB.out_labels = trivialB.in_labels;
  scenario.instB = trivialB;

  Json j = scenario;
  CHECK(!j.contains("pX"));
  const auto back = j.get<InstrumentScenario>();
  CHECK(back.inputs.pX == std::vector<double>{0.5, 0.5});

  j["pX"] = {0.25, 0.75};
  CHECK(j.get<InstrumentScenario>().inputs.pX == std::vector<double>{0.25, 0.75});

  j["pX"] = {0.25, 0.25};
  CHECK_THROWS_AS(j.get<InstrumentScenario>(), ShapeError);
}

TEST_CASE("malformed files raise ParseError with a byte position") {
  TempFile file("broken.json");
  {
    std::ofstream out(file.path);
    out << "{ \"labels\": [ }";
  }
  try {
    load_json_file(file.path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  CHECK_THROWS_AS(load_json_file("does_not_exist_9731.json"), ParseError);
}

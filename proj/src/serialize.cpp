#include "bellcat/serialize.hpp"

#include <fstream>

#include "bellcat/errors.hpp"

namespace bellcat {

Json matrix_to_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      data.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    }
  }
  return data;
}

Matrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows * cols) {
    throw ParseError("matrix data has " + std::to_string(j.size()) + " entries, expected " +
                     std::to_string(rows * cols));
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c, ++i) {
      const Json& e = j.at(i);
      if (!e.is_array() || e.size() != 2) {
        throw ParseError("matrix entry " + std::to_string(i) + " is not a [re, im] pair");
      }
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

Json rect_matrix_to_json(const Matrix& m) {
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", matrix_to_json(m)}};
}

Matrix rect_matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  return matrix_from_json(j.at("data"), rows, cols);
}

void to_json(Json& j, const SubsystemLabel& label) {
  j = Json{{"name", label.name},
           {"dim", label.dim},
           {"kind", label.kind == SubsystemKind::Quantum ? "quantum" : "classical-register"}};
}

void from_json(const Json& j, SubsystemLabel& label) {
  j.at("name").get_to(label.name);
  j.at("dim").get_to(label.dim);
  const auto kind = j.value("kind", std::string("quantum"));
  if (kind == "quantum") {
    label.kind = SubsystemKind::Quantum;
  } else if (kind == "classical-register") {
    label.kind = SubsystemKind::ClassicalRegister;
  } else {
    throw ParseError("unknown subsystem kind '" + kind + "'");
  }
}

void to_json(Json& j, const DensityMatrix& s) {
  j = Json{{"labels", s.labels}, {"data", matrix_to_json(s.data)}};
}

void from_json(const Json& j, DensityMatrix& s) {
  LabelList labels = j.at("labels").get<LabelList>();
  const std::size_t d = dims_product(labels);
  Matrix data = matrix_from_json(j.at("data"), d, d);
  s = make_density(std::move(labels), std::move(data));
}

void to_json(Json& j, const BellFunctional& f) {
  Json coeffs = Json::array();
  for (std::size_t x = 0; x < f.nX; ++x) {
    Json jy = Json::array();
    for (std::size_t y = 0; y < f.nY; ++y) {
      Json ja = Json::array();
      for (std::size_t a = 0; a < f.nA; ++a) {
        Json jb = Json::array();
        for (std::size_t b = 0; b < f.nB; ++b) jb.push_back(f.at(x, y, a, b));
        ja.push_back(std::move(jb));
      }
      jy.push_back(std::move(ja));
    }
    coeffs.push_back(std::move(jy));
  }
  j = Json{{"nX", f.nX}, {"nY", f.nY}, {"nA", f.nA}, {"nB", f.nB}, {"coeffs", std::move(coeffs)}};
}

void from_json(const Json& j, BellFunctional& f) {
  f = BellFunctional::zeros(j.at("nX").get<std::size_t>(), j.at("nY").get<std::size_t>(),
                            j.at("nA").get<std::size_t>(), j.at("nB").get<std::size_t>());
  const Json& coeffs = j.at("coeffs");
  for (std::size_t x = 0; x < f.nX; ++x) {
    for (std::size_t y = 0; y < f.nY; ++y) {
      for (std::size_t a = 0; a < f.nA; ++a) {
        for (std::size_t b = 0; b < f.nB; ++b) {
          f.at(x, y, a, b) = coeffs.at(x).at(y).at(a).at(b).get<double>();
        }
      }
    }
  }
}

void to_json(Json& j, const MeasurementAssemblage& m) {
  Json povms = Json::array();
  for (const auto& per_input : m.povms) {
    Json list = Json::array();
    for (const auto& op : per_input) list.push_back(matrix_to_json(op));
    povms.push_back(std::move(list));
  }
  j = Json{{"labels", m.labels}, {"povms", std::move(povms)}};
}

void from_json(const Json& j, MeasurementAssemblage& m) {
  m.labels = j.at("labels").get<LabelList>();
  const std::size_t d = dims_product(m.labels);
  m.povms.clear();
  for (const auto& per_input : j.at("povms")) {
    std::vector<Matrix> ops;
    for (const auto& op : per_input) ops.push_back(matrix_from_json(op, d, d));
    m.povms.push_back(std::move(ops));
  }
}

void to_json(Json& j, const BranchedCqState& b) {
  Json branches = Json::array();
  for (const auto& br : b.branches) {
    Json factors = Json::array();
    for (const auto& f : br.factors) {
      factors.push_back(Json{{"labels", f.labels}, {"data", matrix_to_json(f.data)}});
    }
    branches.push_back(
        Json{{"prob", br.prob}, {"registers", br.registers}, {"factors", std::move(factors)}});
  }
  j = Json{{"labels", b.labels}, {"branches", std::move(branches)}};
}

void from_json(const Json& j, BranchedCqState& b) {
  b.labels = j.at("labels").get<LabelList>();
  b.branches.clear();
  for (const auto& jb : j.at("branches")) {
    Branch br;
    jb.at("prob").get_to(br.prob);
    jb.at("registers").get_to(br.registers);
    for (const auto& jf : jb.at("factors")) {
      BranchFactor f;
      jf.at("labels").get_to(f.labels);
      std::size_t dim = 1;
      for (const auto& name : f.labels) {
        const auto pos = find_label(b.labels, name);
        if (!pos) throw ParseError("factor references unknown label '" + name + "'");
        dim *= b.labels[*pos].dim;
      }
      f.data = matrix_from_json(jf.at("data"), dim, dim);
      br.factors.push_back(std::move(f));
    }
    b.branches.push_back(std::move(br));
  }
  validate_branched(b);
}

void to_json(Json& j, const QuantumInstrument& inst) {
  Json arms = Json::array();
  for (const auto& per_input : inst.arms) {
    Json outcomes = Json::array();
    for (const auto& arm : per_input) {
      Json ops = Json::array();
      for (const auto& k : arm) ops.push_back(rect_matrix_to_json(k));
      outcomes.push_back(std::move(ops));
    }
    arms.push_back(std::move(outcomes));
  }
  j = Json{{"inLabels", inst.in_labels}, {"outLabels", inst.out_labels}, {"arms", std::move(arms)}};
}

void from_json(const Json& j, QuantumInstrument& inst) {
  inst.in_labels = j.at("inLabels").get<LabelList>();
  inst.out_labels = j.at("outLabels").get<LabelList>();
  inst.arms.clear();
  const std::size_t din = dims_product(inst.in_labels);
  const std::size_t dout = dims_product(inst.out_labels);
  for (const auto& per_input : j.at("arms")) {
    std::vector<std::vector<Matrix>> outcomes;
    for (const auto& arm : per_input) {
      std::vector<Matrix> ops;
      for (const auto& k : arm) {
        Matrix m = rect_matrix_from_json(k);
        if (static_cast<std::size_t>(m.rows()) != dout ||
            static_cast<std::size_t>(m.cols()) != din) {
          throw ParseError("Kraus operator shape does not match the instrument labels");
        }
        ops.push_back(std::move(m));
      }
      outcomes.push_back(std::move(ops));
    }
    inst.arms.push_back(std::move(outcomes));
  }
}

void to_json(Json& j, const InstrumentScenario& s) {
  j = Json{{"rho", s.rho}, {"omega", s.omega}, {"instA", s.instA}, {"instB", s.instB}};
  if (!s.inputs.pX.empty()) j["pX"] = s.inputs.pX;
  if (!s.inputs.pY.empty()) j["pY"] = s.inputs.pY;
}

void from_json(const Json& j, InstrumentScenario& s) {
  j.at("rho").get_to(s.rho);
  j.at("omega").get_to(s.omega);
  j.at("instA").get_to(s.instA);
  j.at("instB").get_to(s.instB);
  s.inputs = InputDistribution::uniform(s.instA.n_inputs(), s.instB.n_inputs());
  if (j.contains("pX")) j.at("pX").get_to(s.inputs.pX);
  if (j.contains("pY")) j.at("pY").get_to(s.inputs.pY);
  validate_distribution(s.inputs);
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError("parse error in '" + path + "' at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

} // namespace bellcat

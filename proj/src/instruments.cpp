#include "bellcat/instruments.hpp"

#include <algorithm>
#include <cmath>

#include "bellcat/errors.hpp"

namespace bellcat {

namespace {

constexpr double kResolvableProb = 1e-12;

} // namespace

double instrument_completeness_residue(const QuantumInstrument& inst) {
  const std::size_t din = dims_product(inst.in_labels);
  double worst = 0.0;
  for (const auto& arm_list : inst.arms) {
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(din), static_cast<Eigen::Index>(din));
    for (const auto& arm : arm_list) {
      for (const auto& k : arm) sum += k.adjoint() * k;
    }
    worst = std::max(worst, (sum - identity_matrix(din)).cwiseAbs().maxCoeff());
  }
  return worst;
}

CorrelationTable CqOutcome::probabilities() const {
  CorrelationTable t = CorrelationTable::zeros(nX, nY, nA, nB);
  for (std::size_t x = 0; x < nX; ++x) {
    for (std::size_t y = 0; y < nY; ++y) {
      for (std::size_t a = 0; a < nA; ++a) {
        for (std::size_t b = 0; b < nB; ++b) t.at(x, y, a, b) = at(x, y, a, b).prob;
      }
    }
  }
  return t;
}

InputDistribution InputDistribution::uniform(std::size_t nX, std::size_t nY) {
  InputDistribution d;
  d.pX.assign(nX, 1.0 / static_cast<double>(nX));
  d.pY.assign(nY, 1.0 / static_cast<double>(nY));
  return d;
}

void validate_distribution(const InputDistribution& d) {
  for (const auto* v : {&d.pX, &d.pY}) {
    double sum = 0.0;
    for (double p : *v) {
      if (p < 0.0) throw ShapeError("input probabilities must be nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kExactTol) {
      throw ShapeError("input probabilities sum to " + std::to_string(sum));
    }
  }
}

CqOutcome apply_instruments(const DensityMatrix& rho, const DensityMatrix& omega,
                            const QuantumInstrument& instA, const QuantumInstrument& instB) {
  for (const auto& l : instA.in_labels) {
    if (find_label(instB.in_labels, l.name)) {
      throw PartitionError("instruments overlap on label '" + l.name + "'");
    }
  }

  const DensityMatrix joint = tensor(rho, omega);
  if (instA.in_labels.size() + instB.in_labels.size() != joint.labels.size()) {
    throw PartitionError("instruments do not cover system and catalyst");
  }
  std::vector<std::string> order;
  for (const auto& l : instA.in_labels) order.push_back(l.name);
  for (const auto& l : instB.in_labels) order.push_back(l.name);
  for (const auto& name : order) {
    if (!find_label(joint.labels, name)) {
      throw PartitionError("instrument label '" + name + "' is not part of system x catalyst");
    }
  }
  const DensityMatrix input = swap_subsystems(joint, order);

  CqOutcome out;
  out.catalyst_labels = instA.out_labels;
  out.catalyst_labels.insert(out.catalyst_labels.end(), instB.out_labels.begin(),
                             instB.out_labels.end());
  out.nX = instA.n_inputs();
  out.nY = instB.n_inputs();
  out.nA = instA.n_outcomes();
  out.nB = instB.n_outcomes();
  out.cells.resize(out.nX * out.nY * out.nA * out.nB);

  const std::size_t dout = dims_product(out.catalyst_labels);
  for (std::size_t x = 0; x < out.nX; ++x) {
    for (std::size_t y = 0; y < out.nY; ++y) {
      for (std::size_t a = 0; a < out.nA; ++a) {
        for (std::size_t b = 0; b < out.nB; ++b) {
          Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(dout),
                                    static_cast<Eigen::Index>(dout));
          for (const auto& ka : instA.arms[x][a]) {
            for (const auto& kb : instB.arms[y][b]) {
              const Matrix k = kron(ka, kb);
              acc += k * input.data * k.adjoint();
            }
          }
          const Complex tr = acc.trace();
          if (std::abs(tr.imag()) > kCorrTol) {
            throw NumericalInconsistency("instrument output has imaginary weight");
          }
          CqCell& cell = out.at(x, y, a, b);
          cell.prob = tr.real();
          // Subnormalized output is kept raw when the probability is too
          // small to divide by.
          cell.post_catalyst = cell.prob > kResolvableProb ? Matrix(acc / cell.prob)
                                                           : std::move(acc);
        }
      }
    }
  }
  return out;
}

namespace {

Matrix omega_in_outcome_order(const CqOutcome& out, const DensityMatrix& omega) {
  if (omega.labels.size() != out.catalyst_labels.size()) {
    throw PartitionError("catalyst labels of outcome and omega differ");
  }
  std::vector<std::string> order = label_names(out.catalyst_labels);
  return swap_subsystems(omega, order).data;
}

} // namespace

ConditionReport check_c1(const CqOutcome& out, const DensityMatrix& omega, double tol) {
  const Matrix ref = omega_in_outcome_order(out, omega);
  ConditionReport report;
  report.condition = "c1";
  for (std::size_t x = 0; x < out.nX; ++x) {
    for (std::size_t y = 0; y < out.nY; ++y) {
      for (std::size_t a = 0; a < out.nA; ++a) {
        for (std::size_t b = 0; b < out.nB; ++b) {
          const CqCell& cell = out.at(x, y, a, b);
          if (cell.prob <= kResolvableProb) continue;
          const double residue = (cell.post_catalyst - ref).cwiseAbs().maxCoeff();
          if (residue > report.worst_residue) {
            report.worst_residue = residue;
            report.x = x;
            report.y = y;
            report.a = a;
            report.b = b;
          }
        }
      }
    }
  }
  report.passed = report.worst_residue <= tol;
  return report;
}

ConditionReport check_c2(const CqOutcome& out, const DensityMatrix& omega, double tol) {
  const Matrix ref = omega_in_outcome_order(out, omega);
  ConditionReport report;
  report.condition = "c2";
  for (std::size_t x = 0; x < out.nX; ++x) {
    for (std::size_t y = 0; y < out.nY; ++y) {
      Matrix avg = Matrix::Zero(ref.rows(), ref.cols());
      for (std::size_t a = 0; a < out.nA; ++a) {
        for (std::size_t b = 0; b < out.nB; ++b) {
          const CqCell& cell = out.at(x, y, a, b);
          avg += cell.prob > kResolvableProb ? Matrix(cell.prob * cell.post_catalyst)
                                             : cell.post_catalyst;
        }
      }
      const double residue = (avg - ref).cwiseAbs().maxCoeff();
      if (residue > report.worst_residue) {
        report.worst_residue = residue;
        report.x = x;
        report.y = y;
      }
    }
  }
  report.passed = report.worst_residue <= tol;
  return report;
}

ConditionReport check_c3(const CqOutcome& out, const DensityMatrix& omega,
                         const InputDistribution& d, double tol) {
  validate_distribution(d);
  if (d.pX.size() != out.nX || d.pY.size() != out.nY) {
    throw ShapeError("input distribution does not match the instrument inputs");
  }
  const Matrix ref = omega_in_outcome_order(out, omega);
  ConditionReport report;
  report.condition = "c3";
  Matrix avg = Matrix::Zero(ref.rows(), ref.cols());
  for (std::size_t x = 0; x < out.nX; ++x) {
    for (std::size_t y = 0; y < out.nY; ++y) {
      for (std::size_t a = 0; a < out.nA; ++a) {
        for (std::size_t b = 0; b < out.nB; ++b) {
          const CqCell& cell = out.at(x, y, a, b);
          const Matrix weighted = cell.prob > kResolvableProb
                                      ? Matrix(cell.prob * cell.post_catalyst)
                                      : cell.post_catalyst;
          avg += d.pX[x] * d.pY[y] * weighted;
        }
      }
    }
  }
  report.worst_residue = (avg - ref).cwiseAbs().maxCoeff();
  report.passed = report.worst_residue <= tol;
  return report;
}

std::pair<QuantumInstrument, QuantumInstrument> embed_b_into_c2(const KrausMap& transformA,
                                                                const KrausMap& transformB,
                                                                const MeasurementAssemblage& mA,
                                                                const MeasurementAssemblage& mB) {
  auto embed_party = [](const KrausMap& transform, const MeasurementAssemblage& m) {
    for (const auto& l : m.labels) {
      const auto pos = find_label(transform.out_labels, l.name);
      if (!pos || transform.out_labels[*pos].dim != l.dim) {
        throw PartitionError("measurement label '" + l.name +
                             "' is not an output of the transform");
      }
    }

    LabelList kept;
    for (const auto& l : transform.out_labels) {
      if (!find_label(m.labels, l.name)) kept.push_back(l);
    }

    // Reorder the transform output as (measured..., kept...).
    std::vector<std::size_t> aligned;
    for (const auto& l : m.labels) aligned.push_back(*find_label(transform.out_labels, l.name));
    for (const auto& l : kept) aligned.push_back(*find_label(transform.out_labels, l.name));
    const Matrix p = subsystem_permutation_matrix(label_dims(transform.out_labels), aligned);

    std::vector<Matrix> reordered;
    reordered.reserve(transform.ops.size());
    for (const auto& k : transform.ops) reordered.push_back(p * k);

    const std::size_t d_meas = dims_product(m.labels);
    const std::size_t d_kept = dims_product(kept);

    QuantumInstrument inst;
    inst.in_labels = transform.in_labels;
    inst.out_labels = kept;
    inst.arms.resize(m.n_inputs());
    for (std::size_t x = 0; x < m.n_inputs(); ++x) {
      inst.arms[x].resize(m.n_outcomes());
      for (std::size_t a = 0; a < m.n_outcomes(); ++a) {
        const Matrix root = psd_sqrt(m.povms[x][a]);
        for (const auto& k : reordered) {
          // Measure-and-discard: project with sqrt(M), then read out each
          // basis row of the measured block.
          const Matrix full = kron(root, identity_matrix(d_kept)) * k;
          for (std::size_t row = 0; row < d_meas; ++row) {
            Matrix arm = full.middleRows(static_cast<Eigen::Index>(row * d_kept),
                                         static_cast<Eigen::Index>(d_kept));
            if (arm.squaredNorm() > 1e-24) inst.arms[x][a].push_back(std::move(arm));
          }
        }
      }
    }
    return inst;
  };

  return {embed_party(transformA, mA), embed_party(transformB, mB)};
}

} // namespace bellcat

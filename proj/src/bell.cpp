#include "bellcat/bell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bellcat/errors.hpp"
#include "bellcat/random.hpp"

namespace bellcat {

BellFunctional BellFunctional::zeros(std::size_t nX, std::size_t nY, std::size_t nA,
                                     std::size_t nB) {
  if (nX == 0 || nY == 0 || nA == 0 || nB == 0) {
    throw ShapeError("functional dimensions must be positive");
  }
  BellFunctional f;
  f.nX = nX;
  f.nY = nY;
  f.nA = nA;
  f.nB = nB;
  f.coeffs.assign(nX * nY * nA * nB, 0.0);
  return f;
}

BellFunctional chsh() {
  BellFunctional f = BellFunctional::zeros(2, 2, 2, 2);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) {
      const double sign = (x == 1 && y == 1) ? -1.0 : 1.0;
      for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
          f.at(x, y, a, b) = sign * (((a + b) % 2 == 0) ? 1.0 : -1.0);
        }
      }
    }
  }
  return f;
}

CorrelationTable CorrelationTable::zeros(std::size_t nX, std::size_t nY, std::size_t nA,
                                         std::size_t nB) {
  CorrelationTable t;
  t.nX = nX;
  t.nY = nY;
  t.nA = nA;
  t.nB = nB;
  t.p.assign(nX * nY * nA * nB, 0.0);
  return t;
}

TableResiduals table_residuals(const CorrelationTable& t) {
  TableResiduals r;
  for (double v : t.p) {
    r.range = std::max(r.range, std::max(-v, v - 1.0));
  }
  r.range = std::max(r.range, 0.0);

  for (std::size_t x = 0; x < t.nX; ++x) {
    for (std::size_t y = 0; y < t.nY; ++y) {
      double sum = 0.0;
      for (std::size_t a = 0; a < t.nA; ++a) {
        for (std::size_t b = 0; b < t.nB; ++b) sum += t.at(x, y, a, b);
      }
      r.normalization = std::max(r.normalization, std::abs(sum - 1.0));
    }
  }

  // Alice's marginal must not depend on y, and Bob's not on x.
  for (std::size_t x = 0; x < t.nX; ++x) {
    for (std::size_t a = 0; a < t.nA; ++a) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t y = 0; y < t.nY; ++y) {
        double m = 0.0;
        for (std::size_t b = 0; b < t.nB; ++b) m += t.at(x, y, a, b);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      r.no_signaling = std::max(r.no_signaling, hi - lo);
    }
  }
  for (std::size_t y = 0; y < t.nY; ++y) {
    for (std::size_t b = 0; b < t.nB; ++b) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t x = 0; x < t.nX; ++x) {
        double m = 0.0;
        for (std::size_t a = 0; a < t.nA; ++a) m += t.at(x, y, a, b);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      r.no_signaling = std::max(r.no_signaling, hi - lo);
    }
  }
  return r;
}

double assemblage_residue(const MeasurementAssemblage& m) {
  const std::size_t d = dims_product(m.labels);
  double residue = 0.0;
  for (const auto& povm : m.povms) {
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (const auto& op : povm) {
      sum += op;
      Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (op + op.adjoint()),
                                                   Eigen::EigenvaluesOnly);
      residue = std::max(residue, -solver.eigenvalues().minCoeff());
      residue = std::max(residue, (op - op.adjoint()).cwiseAbs().maxCoeff());
    }
    residue = std::max(residue, (sum - identity_matrix(d)).cwiseAbs().maxCoeff());
  }
  return residue;
}

CorrelationTable correlations(const DensityMatrix& state, const MeasurementAssemblage& mA,
                              const MeasurementAssemblage& mB) {
  for (const auto& la : mA.labels) {
    if (find_label(mB.labels, la.name)) {
      throw PartitionError("parties overlap on label '" + la.name + "'");
    }
  }
  if (mA.labels.size() + mB.labels.size() != state.labels.size()) {
    throw PartitionError("measurements do not cover the state");
  }
  for (const auto& l : state.labels) {
    if (!find_label(mA.labels, l.name) && !find_label(mB.labels, l.name)) {
      throw PartitionError("state label '" + l.name + "' is measured by neither party");
    }
  }

  LabelList joint = mA.labels;
  joint.insert(joint.end(), mB.labels.begin(), mB.labels.end());

  CorrelationTable t =
      CorrelationTable::zeros(mA.n_inputs(), mB.n_inputs(), mA.n_outcomes(), mB.n_outcomes());
  for (std::size_t x = 0; x < t.nX; ++x) {
    for (std::size_t y = 0; y < t.nY; ++y) {
      for (std::size_t a = 0; a < t.nA; ++a) {
        for (std::size_t b = 0; b < t.nB; ++b) {
          const HermitianOperator op{joint, kron(mA.povms[x][a], mB.povms[y][b])};
          t.at(x, y, a, b) = expectation(state, op);
        }
      }
    }
  }

  const auto res = table_residuals(t);
  if (!res.passed()) {
    throw NumericalInconsistency("correlation table violates its invariants (range " +
                                 std::to_string(res.range) + ", normalization " +
                                 std::to_string(res.normalization) + ", signaling " +
                                 std::to_string(res.no_signaling) + ")");
  }
  return t;
}

CorrelationTable correlations(const DeterministicStrategy& s, std::size_t nX, std::size_t nY,
                              std::size_t nA, std::size_t nB) {
  CorrelationTable t = CorrelationTable::zeros(nX, nY, nA, nB);
  for (std::size_t x = 0; x < nX; ++x) {
    for (std::size_t y = 0; y < nY; ++y) {
      t.at(x, y, s.alice[x], s.bob[y]) = 1.0;
    }
  }
  return t;
}

CorrelationTable correlations(const LhvModel& m, std::size_t nX, std::size_t nY, std::size_t nA,
                              std::size_t nB) {
  if (m.weights.size() != m.strategies.size()) {
    throw ShapeError("model weights and strategies differ in length");
  }
  CorrelationTable t = CorrelationTable::zeros(nX, nY, nA, nB);
  for (std::size_t k = 0; k < m.weights.size(); ++k) {
    const auto& s = m.strategies[k];
    for (std::size_t x = 0; x < nX; ++x) {
      for (std::size_t y = 0; y < nY; ++y) {
        t.at(x, y, s.alice[x], s.bob[y]) += m.weights[k];
      }
    }
  }
  return t;
}

double bell_score(const BellFunctional& f, const CorrelationTable& p) {
  if (f.nX != p.nX || f.nY != p.nY || f.nA != p.nA || f.nB != p.nB) {
    throw ShapeError("functional and table shapes differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) s += f.coeffs[i] * p.p[i];
  return s;
}

LocalBoundResult local_bound(const BellFunctional& f) {
  const double count = std::pow(static_cast<double>(f.nA), static_cast<double>(f.nX)) *
                       std::pow(static_cast<double>(f.nB), static_cast<double>(f.nY));
  if (count > 1e7) {
    throw TooLargeToEnumerate("deterministic strategy count " + std::to_string(count) +
                              " exceeds the enumeration guard");
  }

  const auto n_alice = static_cast<std::size_t>(std::llround(
      std::pow(static_cast<double>(f.nA), static_cast<double>(f.nX))));
  const auto n_bob = static_cast<std::size_t>(std::llround(
      std::pow(static_cast<double>(f.nB), static_cast<double>(f.nY))));

  // Decodes flat strategy ids with the leftmost input most significant, so
  // scanning ids in order visits strategies lexicographically; replacing only
  // on strict improvement then keeps the lexicographically smallest argmax.
  auto decode = [](std::size_t id, std::size_t inputs, std::size_t outcomes) {
    std::vector<std::size_t> map(inputs, 0);
    for (std::size_t k = inputs; k-- > 0;) {
      map[k] = id % outcomes;
      id /= outcomes;
    }
    return map;
  };

  LocalBoundResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t ia = 0; ia < n_alice; ++ia) {
    const auto alice = decode(ia, f.nX, f.nA);
    for (std::size_t ib = 0; ib < n_bob; ++ib) {
      const auto bob = decode(ib, f.nY, f.nB);
      double s = 0.0;
      for (std::size_t x = 0; x < f.nX; ++x) {
        for (std::size_t y = 0; y < f.nY; ++y) s += f.at(x, y, alice[x], bob[y]);
      }
      if (s > best.value) {
        best.value = s;
        best.argmax = DeterministicStrategy{alice, bob};
      }
    }
  }
  return best;
}

double chsh_two_qubit_max(const DensityMatrix& state) {
  if (state.labels.size() != 2 || state.labels[0].dim != 2 || state.labels[1].dim != 2) {
    throw DimensionError("the correlation-matrix criterion needs a 2x2 bipartite state");
  }
  const Matrix paulis[3] = {pauli_x(), pauli_y(), pauli_z()};
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const HermitianOperator op{state.labels, kron(paulis[i], paulis[j])};
      t(i, j) = expectation(state, op);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(t.transpose() * t, Eigen::EigenvaluesOnly);
  const auto ev = solver.eigenvalues();
  return 2.0 * std::sqrt(std::max(0.0, ev(2) + ev(1)));
}

// ---------------------------------------------------------------------------
// See-saw

namespace {

Matrix nonneg_eigenspace_projector(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (h + h.adjoint()));
  const auto& vals = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();
  Matrix p = Matrix::Zero(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    // Zero eigenvalues land in the accept projector.
    if (vals(k) >= 0.0) p += vecs.col(k) * vecs.col(k).adjoint();
  }
  return p;
}

// Replaces each POVM by the exact maximizer of sum_a tr[M_a F_a]. Two
// outcomes resolve in closed form; more outcomes are improved by exact
// pairwise resplits, which is monotone as well.
void update_povm(std::vector<Matrix>& povm, const std::vector<Matrix>& effective) {
  const auto n = povm.size();
  const Eigen::Index d = effective.front().rows();
  if (n == 2) {
    const Matrix p = nonneg_eigenspace_projector(effective[0] - effective[1]);
    povm[0] = p;
    povm[1] = Matrix::Identity(d, d) - p;
    return;
  }
  for (std::size_t a1 = 0; a1 < n; ++a1) {
    for (std::size_t a2 = a1 + 1; a2 < n; ++a2) {
      const Matrix s = povm[a1] + povm[a2];
      const Matrix root = psd_sqrt(s);
      const Matrix q = nonneg_eigenspace_projector(root * (effective[a1] - effective[a2]) * root);
      povm[a1] = root * q * root;
      povm[a2] = s - povm[a1];
    }
  }
}

struct PartyContext {
  LabelList labels;                // in state order
  std::vector<std::size_t> keep;   // positions within the state
  std::size_t dim = 1;
};

PartyContext party_context(const DensityMatrix& state, const std::vector<std::string>& names) {
  PartyContext ctx;
  for (std::size_t k = 0; k < state.labels.size(); ++k) {
    if (std::find(names.begin(), names.end(), state.labels[k].name) != names.end()) {
      ctx.labels.push_back(state.labels[k]);
      ctx.keep.push_back(k);
      ctx.dim *= state.labels[k].dim;
    }
  }
  if (ctx.labels.size() != names.size()) {
    throw PartitionError("party labels are not a subset of the state labels");
  }
  return ctx;
}

} // namespace

SeesawResult seesaw_optimize(const BellFunctional& f, const DensityMatrix& state,
                             const std::vector<std::string>& labelsA,
                             const std::vector<std::string>& labelsB, std::size_t restarts,
                             std::uint64_t seed) {
  const auto ctxA = party_context(state, labelsA);
  const auto ctxB = party_context(state, labelsB);
  if (ctxA.labels.size() + ctxB.labels.size() != state.labels.size()) {
    throw PartitionError("party labels must cover the state");
  }
  for (const auto& n : labelsA) {
    if (std::find(labelsB.begin(), labelsB.end(), n) != labelsB.end()) {
      throw PartitionError("parties overlap on label '" + n + "'");
    }
  }

  const auto dims = label_dims(state.labels);

  // Effective operator on the other party for one POVM element.
  auto reduced = [&](const Matrix& element, const LabelList& on, const PartyContext& keep) {
    const Matrix emb = embed_operator(HermitianOperator{on, element}, state.labels);
    const Matrix r = partial_trace_matrix(emb * state.data, dims, keep.keep);
    return Matrix(0.5 * (r + r.adjoint()));
  };

  constexpr std::size_t kMaxIterations = 500;
  constexpr double kImprovementTol = 1e-9;

  const Rng master(seed);
  SeesawResult best;
  best.score = -std::numeric_limits<double>::infinity();

  for (std::size_t restart = 0; restart < restarts; ++restart) {
    Rng rng = master.child(restart);

    std::vector<std::vector<Matrix>> povmsA(f.nX), povmsB(f.nY);
    for (std::size_t y = 0; y < f.nY; ++y) {
      if (restart == 0) {
        // Deterministic start: guarantees the search also visits the
        // degenerate fixed point that realizes the best classical strategy,
        // which random spin inits can miss on symmetric states.
        povmsB[y].assign(f.nB, Matrix::Zero(static_cast<Eigen::Index>(ctxB.dim),
                                            static_cast<Eigen::Index>(ctxB.dim)));
        povmsB[y][0] = identity_matrix(ctxB.dim);
      } else {
        povmsB[y] = random_projective_povm(ctxB.dim, f.nB, rng);
      }
    }
    for (std::size_t x = 0; x < f.nX; ++x) {
      povmsA[x].assign(f.nA, Matrix::Zero(static_cast<Eigen::Index>(ctxA.dim),
                                          static_cast<Eigen::Index>(ctxA.dim)));
      povmsA[x][0] = identity_matrix(ctxA.dim);
    }

    double last = -std::numeric_limits<double>::infinity();
    bool converged = false;
    std::size_t iterations = 0;

    for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
      iterations = iter + 1;

      // Alice against fixed Bob.
      std::vector<std::vector<Matrix>> redB(f.nY, std::vector<Matrix>(f.nB));
      for (std::size_t y = 0; y < f.nY; ++y) {
        for (std::size_t b = 0; b < f.nB; ++b) {
          redB[y][b] = reduced(povmsB[y][b], ctxB.labels, ctxA);
        }
      }
      double half = 0.0;
      for (std::size_t x = 0; x < f.nX; ++x) {
        std::vector<Matrix> effective(f.nA, Matrix::Zero(static_cast<Eigen::Index>(ctxA.dim),
                                                         static_cast<Eigen::Index>(ctxA.dim)));
        for (std::size_t a = 0; a < f.nA; ++a) {
          for (std::size_t y = 0; y < f.nY; ++y) {
            for (std::size_t b = 0; b < f.nB; ++b) {
              effective[a] += f.at(x, y, a, b) * redB[y][b];
            }
          }
        }
        update_povm(povmsA[x], effective);
        for (std::size_t a = 0; a < f.nA; ++a) {
          half += (povmsA[x][a].cwiseProduct(effective[a].transpose())).sum().real();
        }
      }
      if (half < last - kImprovementTol) {
        throw NumericalInconsistency("see-saw score decreased from " + std::to_string(last) +
                                     " to " + std::to_string(half));
      }

      // Bob against fixed Alice.
      std::vector<std::vector<Matrix>> redA(f.nX, std::vector<Matrix>(f.nA));
      for (std::size_t x = 0; x < f.nX; ++x) {
        for (std::size_t a = 0; a < f.nA; ++a) {
          redA[x][a] = reduced(povmsA[x][a], ctxA.labels, ctxB);
        }
      }
      double full = 0.0;
      for (std::size_t y = 0; y < f.nY; ++y) {
        std::vector<Matrix> effective(f.nB, Matrix::Zero(static_cast<Eigen::Index>(ctxB.dim),
                                                         static_cast<Eigen::Index>(ctxB.dim)));
        for (std::size_t b = 0; b < f.nB; ++b) {
          for (std::size_t x = 0; x < f.nX; ++x) {
            for (std::size_t a = 0; a < f.nA; ++a) {
              effective[b] += f.at(x, y, a, b) * redA[x][a];
            }
          }
        }
        update_povm(povmsB[y], effective);
        for (std::size_t b = 0; b < f.nB; ++b) {
          full += (povmsB[y][b].cwiseProduct(effective[b].transpose())).sum().real();
        }
      }
      if (full < half - kImprovementTol) {
        throw NumericalInconsistency("see-saw score decreased within an iteration");
      }

      if (full - last < kImprovementTol && iter > 0) {
        last = full;
        converged = true;
        break;
      }
      last = full;
    }

    MeasurementAssemblage mA{ctxA.labels, povmsA};
    MeasurementAssemblage mB{ctxB.labels, povmsB};
    // Certify: the reported score is the one the returned measurements achieve.
    const double certified = bell_score(f, correlations(state, mA, mB));
    best.restart_scores.push_back(certified);
    if (certified > best.score) {
      best.score = certified;
      best.alice = std::move(mA);
      best.bob = std::move(mB);
      best.converged = converged;
      best.iterations = iterations;
    }
  }
  return best;
}

std::pair<MeasurementAssemblage, MeasurementAssemblage> lemma2_strategy(
    const BellFunctional& f, const MeasurementAssemblage& mXiA, const MeasurementAssemblage& mXiB,
    const DeterministicStrategy& argmax_local, const SubsystemLabel& registerA,
    const SubsystemLabel& registerB) {
  for (const auto& reg : {registerA, registerB}) {
    if (reg.kind != SubsystemKind::ClassicalRegister) {
      throw RegisterError("label '" + reg.name + "' is not a classical register");
    }
    if (reg.dim < 2) {
      throw RegisterError("register '" + reg.name + "' needs at least two values");
    }
  }
  if (mXiA.n_inputs() != f.nX || mXiB.n_inputs() != f.nY || mXiA.n_outcomes() != f.nA ||
      mXiB.n_outcomes() != f.nB) {
    throw ShapeError("xi measurements do not match the functional shape");
  }
  if (argmax_local.alice.size() != f.nX || argmax_local.bob.size() != f.nY) {
    throw ShapeError("deterministic strategy does not match the functional shape");
  }

  // On register value 0 the party measures xi; on any other value it outputs
  // the deterministic response, as an identity/zero POVM element.
  auto conditioned = [](const MeasurementAssemblage& base, const SubsystemLabel& reg,
                        const std::vector<std::size_t>& response) {
    const std::size_t d_base = dims_product(base.labels);
    const Matrix p0 = basis_projector(reg.dim, 0);
    const Matrix rest = identity_matrix(reg.dim) - p0;

    MeasurementAssemblage out;
    out.labels = base.labels;
    out.labels.push_back(reg);
    out.povms.resize(base.n_inputs());
    for (std::size_t x = 0; x < base.n_inputs(); ++x) {
      out.povms[x].resize(base.n_outcomes());
      for (std::size_t a = 0; a < base.n_outcomes(); ++a) {
        Matrix op = kron(base.povms[x][a], p0);
        if (a == response[x]) op += kron(identity_matrix(d_base), rest);
        out.povms[x][a] = std::move(op);
      }
    }
    return out;
  };

  return {conditioned(mXiA, registerA, argmax_local.alice),
          conditioned(mXiB, registerB, argmax_local.bob)};
}

} // namespace bellcat

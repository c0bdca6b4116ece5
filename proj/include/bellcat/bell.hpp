#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bellcat/qstate.hpp"
#include "bellcat/types.hpp"

namespace bellcat {

/// Linear functional S = sum_xyab B[x][y][a][b] p(ab|xy).
struct BellFunctional {
  std::size_t nX = 0, nY = 0, nA = 0, nB = 0;
  std::vector<double> coeffs; // x-major, then y, a, b

  static BellFunctional zeros(std::size_t nX, std::size_t nY, std::size_t nA, std::size_t nB);

  double& at(std::size_t x, std::size_t y, std::size_t a, std::size_t b) {
    return coeffs[((x * nY + y) * nA + a) * nB + b];
  }
  double at(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
    return coeffs[((x * nY + y) * nA + a) * nB + b];
  }
};

/// CHSH in the correlator convention: B[x][y][a][b] = (-1)^(a+b+xy),
/// local bound 2, quantum maximum 2*sqrt(2).
BellFunctional chsh();

struct DeterministicStrategy {
  std::vector<std::size_t> alice; // x -> a
  std::vector<std::size_t> bob;   // y -> b

  bool operator==(const DeterministicStrategy&) const = default;
};

struct LhvModel {
  std::vector<double> weights;
  std::vector<DeterministicStrategy> strategies;
};

struct CorrelationTable {
  std::size_t nX = 0, nY = 0, nA = 0, nB = 0;
  std::vector<double> p;

  static CorrelationTable zeros(std::size_t nX, std::size_t nY, std::size_t nA, std::size_t nB);

  double& at(std::size_t x, std::size_t y, std::size_t a, std::size_t b) {
    return p[((x * nY + y) * nA + a) * nB + b];
  }
  double at(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
    return p[((x * nY + y) * nA + a) * nB + b];
  }
};

struct TableResiduals {
  double range = 0.0;         // distance of any entry from [0, 1]
  double normalization = 0.0; // worst |sum_ab p - 1| over (x, y)
  double no_signaling = 0.0;  // worst marginal drift across the other input

  bool passed() const {
    return range <= kValidityTol && normalization <= kCorrTol && no_signaling <= kCorrTol;
  }
};

TableResiduals table_residuals(const CorrelationTable& t);

/// Per-input POVMs for one party, possibly register-conditioned.
struct MeasurementAssemblage {
  LabelList labels;
  std::vector<std::vector<Matrix>> povms; // [input][outcome]

  std::size_t n_inputs() const { return povms.size(); }
  std::size_t n_outcomes() const { return povms.empty() ? 0 : povms.front().size(); }
};

/// Worst violation of PSD / completeness over all inputs.
double assemblage_residue(const MeasurementAssemblage& m);

CorrelationTable correlations(const DensityMatrix& state, const MeasurementAssemblage& mA,
                              const MeasurementAssemblage& mB);

CorrelationTable correlations(const DeterministicStrategy& s, std::size_t nX, std::size_t nY,
                              std::size_t nA, std::size_t nB);

CorrelationTable correlations(const LhvModel& m, std::size_t nX, std::size_t nY, std::size_t nA,
                              std::size_t nB);

double bell_score(const BellFunctional& f, const CorrelationTable& p);

struct LocalBoundResult {
  double value = 0.0;
  DeterministicStrategy argmax;
};

/// Exact maximum over deterministic strategies by enumeration; deterministic
/// points are the extreme points of the LHV set, so this is the local bound.
/// Ties break to the lexicographically smallest (alice, bob) strategy.
LocalBoundResult local_bound(const BellFunctional& f);

/// Maximum CHSH score of a two-qubit state over projective measurements:
/// 2*sqrt(t1 + t2) with t1 >= t2 the largest eigenvalues of T^T T, where
/// T_ij = tr[state (sigma_i x sigma_j)].
double chsh_two_qubit_max(const DensityMatrix& state);

struct SeesawResult {
  double score = 0.0;
  MeasurementAssemblage alice;
  MeasurementAssemblage bob;
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> restart_scores;
};

/// Alternating POVM optimization of a Bell score. The returned score is
/// recomputed from the returned measurements, so it is a certified lower
/// bound on the state's maximum for f.
SeesawResult seesaw_optimize(const BellFunctional& f, const DensityMatrix& state,
                             const std::vector<std::string>& labelsA,
                             const std::vector<std::string>& labelsB, std::size_t restarts,
                             std::uint64_t seed);

/// Register-conditioned strategies: on register value 0 each party applies
/// its xi measurement; on any other value it deterministically answers with
/// the local-bound strategy, realized as identity/zero POVM elements.
std::pair<MeasurementAssemblage, MeasurementAssemblage> lemma2_strategy(
    const BellFunctional& f, const MeasurementAssemblage& mXiA, const MeasurementAssemblage& mXiB,
    const DeterministicStrategy& argmax_local, const SubsystemLabel& registerA,
    const SubsystemLabel& registerB);

} // namespace bellcat

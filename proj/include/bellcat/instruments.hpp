#pragma once

#include <string>
#include <vector>

#include "bellcat/bell.hpp"
#include "bellcat/kraus.hpp"
#include "bellcat/qstate.hpp"
#include "bellcat/types.hpp"

namespace bellcat {

/// Per classical input x, a list over outcomes a of completely positive maps
/// in Kraus form whose sum is trace preserving.
struct QuantumInstrument {
  LabelList in_labels;
  LabelList out_labels;
  std::vector<std::vector<std::vector<Matrix>>> arms; // [input][outcome][kraus]

  std::size_t n_inputs() const { return arms.size(); }
  std::size_t n_outcomes() const { return arms.empty() ? 0 : arms.front().size(); }
};

/// Worst per-input completeness residue |sum_a sum_k K^dag K - I|.
double instrument_completeness_residue(const QuantumInstrument& inst);

struct CqCell {
  double prob = 0.0;
  Matrix post_catalyst; // normalized when prob is resolvable
};

/// Classical-quantum output of a pair of instruments: for each (x, y) a
/// table over (a, b) of outcome probability and post-measurement catalyst.
struct CqOutcome {
  LabelList catalyst_labels;
  std::size_t nX = 0, nY = 0, nA = 0, nB = 0;
  std::vector<CqCell> cells;

  CqCell& at(std::size_t x, std::size_t y, std::size_t a, std::size_t b) {
    return cells[((x * nY + y) * nA + a) * nB + b];
  }
  const CqCell& at(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
    return cells[((x * nY + y) * nA + a) * nB + b];
  }

  CorrelationTable probabilities() const;
};

struct InputDistribution {
  std::vector<double> pX;
  std::vector<double> pY;

  static InputDistribution uniform(std::size_t nX, std::size_t nY);
};

void validate_distribution(const InputDistribution& d);

struct ConditionReport {
  std::string condition;
  bool passed = false;
  double worst_residue = 0.0;
  // Cell where the worst residue occurred; a and b are meaningful for c1 only.
  std::size_t x = 0, y = 0, a = 0, b = 0;
};

/// Runs both instruments on rho x omega for every (x, y, a, b):
/// p(ab|xy) w^(a,b,x,y) = (I^(a|x) x I^(b|y))[rho x omega].
CqOutcome apply_instruments(const DensityMatrix& rho, const DensityMatrix& omega,
                            const QuantumInstrument& instA, const QuantumInstrument& instB);

/// Catalyst unchanged for every input and outcome with resolvable
/// probability (p > 1e-12).
ConditionReport check_c1(const CqOutcome& out, const DensityMatrix& omega, double tol = kCorrTol);

/// Catalyst unchanged on average over outcomes, for every input pair.
ConditionReport check_c2(const CqOutcome& out, const DensityMatrix& omega, double tol = kCorrTol);

/// Catalyst unchanged on average over outcomes and sampled inputs.
ConditionReport check_c3(const CqOutcome& out, const DensityMatrix& omega,
                         const InputDistribution& d, double tol = kCorrTol);

/// Interprets a state-transformation scenario as instruments: each arm is
/// (measure a|x on the transformed system output, discarding it) composed
/// with the party's CPTP transform, keeping the catalyst labels.
std::pair<QuantumInstrument, QuantumInstrument> embed_b_into_c2(const KrausMap& transformA,
                                                                const KrausMap& transformB,
                                                                const MeasurementAssemblage& mA,
                                                                const MeasurementAssemblage& mB);

} // namespace bellcat

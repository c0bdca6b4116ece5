#pragma once

#include <map>
#include <string>
#include <vector>

#include "bellcat/kraus.hpp"
#include "bellcat/qstate.hpp"
#include "bellcat/types.hpp"

namespace bellcat {

/// One product factor of a branch: a state on a group of quantum labels.
struct BranchFactor {
  std::vector<std::string> labels;
  Matrix data;
};

/// One branch of a classical-quantum mixture: definite register values and a
/// product of quantum factors.
struct Branch {
  double prob = 0.0;
  std::map<std::string, std::size_t> registers;
  std::vector<BranchFactor> factors;
};

/// Classical-quantum state as a probability-weighted list of branches. This
/// representation stays polynomial in the copy number where the dense matrix
/// would be exponential.
struct BranchedCqState {
  LabelList labels; // label universe, fixed order
  std::vector<Branch> branches;
};

/// Structural validity: probabilities sum to one, factor groups partition the
/// quantum labels, registers cover exactly the classical labels.
void validate_branched(const BranchedCqState& b);

/// Sorts factor groups by label position, orders branches by register
/// assignment, and merges branches with identical register values.
BranchedCqState canonicalize(const BranchedCqState& b);

/// Canonical-form equality with elementwise factor tolerance.
bool branched_equal(const BranchedCqState& a, const BranchedCqState& b, double tol = kExactTol);

/// Worst mismatch between canonical forms; +inf on structural mismatch.
double branched_difference(const BranchedCqState& a, const BranchedCqState& b);

/// Inputs of the catalytic protocol: system state rho_AB, a product state
/// sigma_A x sigma_B, and the copy number n.
struct CatalystSpec {
  DensityMatrix rho;    // bipartite, labels (A, B)
  DensityMatrix sigmaA; // single subsystem, dim matching A
  DensityMatrix sigmaB; // single subsystem, dim matching B
  std::size_t n = 2;

  std::size_t dimA() const { return rho.labels[0].dim; }
  std::size_t dimB() const { return rho.labels[1].dim; }
};

/// Spec with sigma defaulting to |0><0| x |0><0|.
CatalystSpec make_catalyst_spec(DensityMatrix rho, std::size_t n);

void validate_spec(const CatalystSpec& spec);

/// The catalyst: a uniform mixture over register value i of i system pairs
/// next to n-1-i sigma pairs, with both register copies reading i.
BranchedCqState build_catalyst(const CatalystSpec& spec);

/// Executes the local protocol on rho x catalyst, branch by branch. Swaps
/// are label rebindings; the output carries labels
/// A1..An RA B1..Bn RB tA1..tA(n-1) tRA tB1..tB(n-1) tRB.
BranchedCqState catalytic_transform(const CatalystSpec& spec);

/// Marginal on the output system labels; equals
/// (1/n) rho^n x [00] + ((n-1)/n) sigma^n x [11] after canonicalization.
BranchedCqState system_marginal(const BranchedCqState& global, const CatalystSpec& spec);

/// Marginal on the catalyst labels; must equal build_catalyst(spec) exactly.
BranchedCqState catalyst_marginal(const BranchedCqState& global, const CatalystSpec& spec);

/// Generic marginal: keeps the named labels, dropping factors and registers
/// on the complement.
BranchedCqState branched_marginal(const BranchedCqState& b, const std::vector<std::string>& keep);

/// Dense materialization in label-universe order; refuses above the cap.
DensityMatrix to_dense(const BranchedCqState& b);

/// Closed forms used as oracles by the verification commands.
BranchedCqState expected_system_marginal(const CatalystSpec& spec);

struct LocalityAudit {
  bool local = true;
  std::string detail;
};

/// Checks that no branch contains a factor spanning both parties other than
/// a group inherited intact from rho. Local operations cannot create such
/// cross-party factors, so this witnesses the protocol's locality.
LocalityAudit audit_locality(const BranchedCqState& global, const CatalystSpec& spec);

enum class Party { Alice, Bob };

/// The protocol as an explicit party-local CPTP map in Kraus form, mapping
/// (system, catalyst half) to (output copies, output register, catalyst
/// half). Used to embed the state transformation into instrument scenarios.
KrausMap local_protocol_kraus(const CatalystSpec& spec, Party party);

} // namespace bellcat

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bellcat/labels.hpp"
#include "bellcat/types.hpp"

namespace bellcat {

/// Density matrix over an ordered list of labeled subsystems. The matrix is
/// D x D with D the product of the subsystem dimensions; the leftmost label
/// is the most significant mixed-radix digit of the row/column index.
struct DensityMatrix {
  LabelList labels;
  Matrix data;

  std::size_t dim() const { return static_cast<std::size_t>(data.rows()); }
};

/// Hermitian operator with the same labeling scheme; no trace or positivity
/// constraint.
struct HermitianOperator {
  LabelList labels;
  Matrix data;
};

struct ValidationReport {
  double hermiticity_residue = 0.0;
  double min_eigenvalue = 0.0;
  double trace_residue = 0.0;
  // Worst off-diagonal magnitude in any classical-register slot.
  double register_diagonality_residue = 0.0;
  std::map<std::string, double> register_residues;

  bool hermitian() const { return hermiticity_residue <= kValidityTol; }
  bool positive() const { return min_eigenvalue >= -kValidityTol; }
  bool unit_trace() const { return trace_residue <= kValidityTol; }
  bool registers_diagonal() const { return register_diagonality_residue <= kValidityTol; }
  bool passed() const {
    return hermitian() && positive() && unit_trace() && registers_diagonal();
  }
};

// ---------------------------------------------------------------------------
// Construction helpers

DensityMatrix make_density(LabelList labels, Matrix data);

HermitianOperator make_operator(LabelList labels, Matrix data);

/// Computational-basis state |value><value| on a single subsystem.
DensityMatrix basis_state(SubsystemLabel label, std::size_t value);

/// Maximally mixed state on the given subsystems.
DensityMatrix maximally_mixed(LabelList labels);

HermitianOperator identity_operator(LabelList labels);

Matrix identity_matrix(std::size_t d);
Matrix basis_projector(std::size_t d, std::size_t value);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

// ---------------------------------------------------------------------------
// Dense kernels (label-free). These operate on raw matrices plus a dimension
// list and back every labeled operation.

Matrix kron(const Matrix& a, const Matrix& b);

/// Reorders subsystems: output slot k holds input subsystem perm[k].
Matrix permute_subsystems(const Matrix& m, const std::vector<std::size_t>& dims,
                          const std::vector<std::size_t>& perm);

/// One-sided basis permutation P with P|i_actual> = |i_aligned>, where the
/// aligned digit k is the actual digit perm[k].
Matrix subsystem_permutation_matrix(const std::vector<std::size_t>& dims,
                                    const std::vector<std::size_t>& perm);

/// Hermitian square root with negative eigenvalues clipped to zero.
Matrix psd_sqrt(const Matrix& h);

/// Traces out every subsystem not listed in keep (positions, ascending).
Matrix partial_trace_matrix(const Matrix& m, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep);

// ---------------------------------------------------------------------------
// Labeled operations

/// Kronecker product; label lists are concatenated. Throws LabelCollision on
/// duplicate names.
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Marginal on the named subsystems, kept in their original order.
DensityMatrix partial_trace(const DensityMatrix& s, const std::vector<std::string>& keep);

/// Unitary relabeling to the given label-name order.
DensityMatrix swap_subsystems(const DensityMatrix& s, const std::vector<std::string>& new_order);

/// Embeds op into the label space of target_labels (identity on missing
/// subsystems) and reorders it to match.
Matrix embed_operator(const HermitianOperator& op, const LabelList& target_labels);

/// tr[s * embed(o)]; the imaginary residue is checked and discarded.
double expectation(const DensityMatrix& s, const HermitianOperator& o);

ValidationReport validate(const DensityMatrix& s);

/// Probability-weighted sum of states sharing one label list.
DensityMatrix mix(const std::vector<std::pair<double, DensityMatrix>>& parts);

/// Same state, new label names (dims and kinds must match positionally).
DensityMatrix with_labels(const DensityMatrix& s, LabelList labels);

} // namespace bellcat

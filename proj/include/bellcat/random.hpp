#pragma once

#include "bellcat/qstate.hpp"
#include "bellcat/rng.hpp"
#include "bellcat/types.hpp"

namespace bellcat {

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
Matrix random_unitary(std::size_t d, Rng& rng);

/// Normalized Gaussian pure state.
Vector random_pure(std::size_t d, Rng& rng);

/// Mixed state obtained by tracing an ancilla out of a random pure state on
/// d * ancilla_dim. ancilla_dim = d gives the standard full-rank ensemble.
Matrix random_density(std::size_t d, Rng& rng, std::size_t ancilla_dim = 0);

DensityMatrix random_state(LabelList labels, Rng& rng);

/// Projective POVM from the eigenbasis of a Gaussian Hermitian matrix,
/// eigenvectors dealt round-robin over the outcomes after a random shuffle.
std::vector<Matrix> random_projective_povm(std::size_t d, std::size_t n_outcomes, Rng& rng);

} // namespace bellcat

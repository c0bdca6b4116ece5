#pragma once

#include <cstdint>
#include <string>

#include "bellcat/qstate.hpp"
#include "bellcat/types.hpp"

namespace bellcat {

/// |phi+><phi+| with |phi+> = (1/sqrt(d)) sum_i |ii>, labels (A, B).
DensityMatrix max_entangled(std::size_t d, const std::string& nameA = "A",
                            const std::string& nameB = "B");

struct IsotropicSpec {
  std::size_t d = 2;
  double visibility = 1.0;
};

/// V |phi+><phi+| + (1-V) I/d^2.
DensityMatrix isotropic(const IsotropicSpec& spec);

/// Analytic singlet fraction of the isotropic state, V + (1-V)/d^2.
double isotropic_singlet_fraction(const IsotropicSpec& spec);

/// Largest overlap of rho with a maximally entangled state, maximized over
/// (U x I)|phi+> by polar-decomposition ascent with seeded restarts. Restart
/// zero always starts from U = I, so the result never falls below
/// <phi+|rho|phi+>.
double singlet_fraction(const DensityMatrix& rho, std::size_t restarts = 16,
                        std::uint64_t seed = 0);

/// True when the singlet fraction clears 1/d, the many-copy activation
/// threshold that marks the state as a catalytic-activation candidate.
bool singlet_fraction_threshold(const DensityMatrix& rho, std::size_t restarts = 16,
                                std::uint64_t seed = 0);

} // namespace bellcat

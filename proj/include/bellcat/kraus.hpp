#pragma once

#include <vector>

#include "bellcat/labels.hpp"
#include "bellcat/types.hpp"

namespace bellcat {

/// Completely positive map in Kraus form between labeled spaces. Operators
/// are dim(out_labels) x dim(in_labels).
struct KrausMap {
  LabelList in_labels;
  LabelList out_labels;
  std::vector<Matrix> ops;
};

/// max |sum_k K^dag K - I| elementwise; zero for a trace-preserving map.
double completeness_residue(const KrausMap& map);

/// sum_k K rho K^dag.
Matrix apply_kraus(const KrausMap& map, const Matrix& rho);

/// Choi operator sum_k vec(K) vec(K)^dag (row-major vec). PSD for any Kraus
/// list; exposed as a debug check for maps assembled by composition.
Matrix choi_operator(const std::vector<Matrix>& kraus_ops);

double choi_min_eigenvalue(const std::vector<Matrix>& kraus_ops);

} // namespace bellcat

#include "bellcat/qstate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

#include "bellcat/errors.hpp"

namespace bellcat {

namespace {

std::atomic<std::size_t> g_dense_cap{kDefaultDenseCap};

void require_within_cap(std::size_t dim, const char* what) {
  if (dim > dense_cap()) {
    throw TooLargeToMaterialize(std::string(what) + ": dimension " + std::to_string(dim) +
                                " exceeds dense cap " + std::to_string(dense_cap()));
  }
}

// Subsystem strides for the leftmost-most-significant convention.
std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) {
    s[k - 1] = s[k] * dims[k];
  }
  return s;
}

} // namespace

std::size_t dense_cap() { return g_dense_cap.load(std::memory_order_relaxed); }

void set_dense_cap(std::size_t cap) { g_dense_cap.store(cap, std::memory_order_relaxed); }

// ---------------------------------------------------------------------------
// Construction

DensityMatrix make_density(LabelList labels, Matrix data) {
  require_unique_names(labels);
  const auto d = static_cast<Eigen::Index>(dims_product(labels));
  if (data.rows() != d || data.cols() != d) {
    throw DimensionError("state matrix is " + std::to_string(data.rows()) + "x" +
                         std::to_string(data.cols()) + " but labels give dimension " +
                         std::to_string(d));
  }
  return DensityMatrix{std::move(labels), std::move(data)};
}

HermitianOperator make_operator(LabelList labels, Matrix data) {
  require_unique_names(labels);
  const auto d = static_cast<Eigen::Index>(dims_product(labels));
  if (data.rows() != d || data.cols() != d) {
    throw DimensionError("operator matrix does not match label dimensions");
  }
  return HermitianOperator{std::move(labels), std::move(data)};
}

DensityMatrix basis_state(SubsystemLabel label, std::size_t value) {
  if (value >= label.dim) {
    throw DimensionError("basis value " + std::to_string(value) + " out of range for dim " +
                         std::to_string(label.dim));
  }
  Matrix m = basis_projector(label.dim, value);
  return DensityMatrix{{std::move(label)}, std::move(m)};
}

DensityMatrix maximally_mixed(LabelList labels) {
  const std::size_t d = dims_product(labels);
  return make_density(std::move(labels), identity_matrix(d) / static_cast<double>(d));
}

HermitianOperator identity_operator(LabelList labels) {
  const std::size_t d = dims_product(labels);
  return make_operator(std::move(labels), identity_matrix(d));
}

Matrix identity_matrix(std::size_t d) {
  return Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

Matrix basis_projector(std::size_t d, std::size_t value) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  m(static_cast<Eigen::Index>(value), static_cast<Eigen::Index>(value)) = 1.0;
  return m;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// ---------------------------------------------------------------------------
// Kernels

Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

Matrix permute_subsystems(const Matrix& m, const std::vector<std::size_t>& dims,
                          const std::vector<std::size_t>& perm) {
  if (perm.size() != dims.size()) {
    throw InvalidPermutation("permutation length does not match subsystem count");
  }
  std::vector<bool> seen(dims.size(), false);
  for (std::size_t p : perm) {
    if (p >= dims.size() || seen[p]) throw InvalidPermutation("not a permutation");
    seen[p] = true;
  }

  const std::size_t d = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                        std::multiplies<>());
  const auto in_strides = strides_of(dims);

  std::vector<std::size_t> out_dims(dims.size());
  for (std::size_t k = 0; k < perm.size(); ++k) out_dims[k] = dims[perm[k]];
  const auto out_strides = strides_of(out_dims);

  // map[g] = flat index of g after reordering the digits
  std::vector<std::size_t> map(d);
  std::vector<std::size_t> digits(dims.size(), 0);
  for (std::size_t g = 0; g < d; ++g) {
    std::size_t rest = g;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      digits[k] = rest / in_strides[k];
      rest %= in_strides[k];
    }
    std::size_t out = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) {
      out += digits[perm[k]] * out_strides[k];
    }
    map[g] = out;
  }

  Matrix result(m.rows(), m.cols());
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      result(static_cast<Eigen::Index>(map[r]), static_cast<Eigen::Index>(map[c])) =
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return result;
}

Matrix subsystem_permutation_matrix(const std::vector<std::size_t>& dims,
                                    const std::vector<std::size_t>& perm) {
  if (perm.size() != dims.size()) {
    throw InvalidPermutation("permutation length does not match subsystem count");
  }
  const std::size_t d = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                        std::multiplies<>());
  const auto in_strides = strides_of(dims);

  std::vector<std::size_t> out_dims(dims.size());
  for (std::size_t k = 0; k < perm.size(); ++k) out_dims[k] = dims[perm[k]];
  const auto out_strides = strides_of(out_dims);

  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::vector<std::size_t> digits(dims.size(), 0);
  for (std::size_t g = 0; g < d; ++g) {
    std::size_t rest = g;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      digits[k] = rest / in_strides[k];
      rest %= in_strides[k];
    }
    std::size_t out = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) out += digits[perm[k]] * out_strides[k];
    p(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(g)) = 1.0;
  }
  return p;
}

Matrix psd_sqrt(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (h + h.adjoint()));
  Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0);
  return solver.eigenvectors() * vals.cwiseSqrt().asDiagonal() * solver.eigenvectors().adjoint();
}

Matrix partial_trace_matrix(const Matrix& m, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep) {
  const auto strides = strides_of(dims);

  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (std::find(keep.begin(), keep.end(), k) == keep.end()) traced.push_back(k);
  }

  std::size_t dk = 1, dt = 1;
  for (std::size_t k : keep) dk *= dims[k];
  for (std::size_t k : traced) dt *= dims[k];

  // Offsets of every kept and traced digit combination into the flat index.
  auto offsets_of = [&](const std::vector<std::size_t>& subsys, std::size_t count) {
    std::vector<std::size_t> offs(count, 0);
    std::vector<std::size_t> digits(subsys.size(), 0);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t off = 0;
      for (std::size_t k = 0; k < subsys.size(); ++k) off += digits[k] * strides[subsys[k]];
      offs[i] = off;
      for (std::size_t k = subsys.size(); k-- > 0;) {
        if (++digits[k] < dims[subsys[k]]) break;
        digits[k] = 0;
      }
    }
    return offs;
  };

  const auto keep_offs = offsets_of(keep, dk);
  const auto traced_offs = offsets_of(traced, dt);

  Matrix result = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t r = 0; r < dk; ++r) {
    for (std::size_t c = 0; c < dk; ++c) {
      Complex sum = 0.0;
      for (std::size_t t = 0; t < dt; ++t) {
        sum += m(static_cast<Eigen::Index>(keep_offs[r] + traced_offs[t]),
                 static_cast<Eigen::Index>(keep_offs[c] + traced_offs[t]));
      }
      result(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Labeled operations

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  LabelList labels = a.labels;
  labels.insert(labels.end(), b.labels.begin(), b.labels.end());
  require_unique_names(labels);
  require_within_cap(dims_product(labels), "tensor");
  return DensityMatrix{std::move(labels), kron(a.data, b.data)};
}

DensityMatrix partial_trace(const DensityMatrix& s, const std::vector<std::string>& keep) {
  std::vector<std::size_t> keep_pos;
  for (const auto& name : keep) {
    auto pos = find_label(s.labels, name);
    if (!pos) throw UnknownLabel("no subsystem named '" + name + "'");
    keep_pos.push_back(*pos);
  }
  std::sort(keep_pos.begin(), keep_pos.end());
  keep_pos.erase(std::unique(keep_pos.begin(), keep_pos.end()), keep_pos.end());

  LabelList labels;
  for (std::size_t k : keep_pos) labels.push_back(s.labels[k]);
  return DensityMatrix{std::move(labels), partial_trace_matrix(s.data, label_dims(s.labels), keep_pos)};
}

DensityMatrix swap_subsystems(const DensityMatrix& s, const std::vector<std::string>& new_order) {
  if (new_order.size() != s.labels.size()) {
    throw InvalidPermutation("label order has wrong length");
  }
  std::vector<std::size_t> perm;
  std::vector<bool> used(s.labels.size(), false);
  for (const auto& name : new_order) {
    auto pos = find_label(s.labels, name);
    if (!pos || used[*pos]) {
      throw InvalidPermutation("'" + name + "' is not a fresh label of the state");
    }
    used[*pos] = true;
    perm.push_back(*pos);
  }

  LabelList labels;
  for (std::size_t k : perm) labels.push_back(s.labels[k]);
  return DensityMatrix{std::move(labels), permute_subsystems(s.data, label_dims(s.labels), perm)};
}

Matrix embed_operator(const HermitianOperator& op, const LabelList& target_labels) {
  LabelList missing;
  for (const auto& l : target_labels) {
    auto pos = find_label(op.labels, l.name);
    if (pos) {
      if (op.labels[*pos].dim != l.dim) {
        throw DimensionError("label '" + l.name + "' has dim " +
                             std::to_string(op.labels[*pos].dim) + " on the operator but " +
                             std::to_string(l.dim) + " on the target");
      }
    } else {
      missing.push_back(l);
    }
  }
  for (const auto& l : op.labels) {
    if (!find_label(target_labels, l.name)) {
      throw UnknownLabel("operator label '" + l.name + "' not present on the target system");
    }
  }

  LabelList ext_labels = op.labels;
  ext_labels.insert(ext_labels.end(), missing.begin(), missing.end());
  Matrix ext = kron(op.data, identity_matrix(dims_product(missing)));

  std::vector<std::size_t> perm;
  for (const auto& l : target_labels) perm.push_back(*find_label(ext_labels, l.name));
  return permute_subsystems(ext, label_dims(ext_labels), perm);
}

double expectation(const DensityMatrix& s, const HermitianOperator& o) {
  const Matrix emb = embed_operator(o, s.labels);
  // tr[s * emb] without forming the product.
  const Complex value = s.data.cwiseProduct(emb.transpose()).sum();
  if (std::abs(value.imag()) > 1e-8) {
    throw NumericalInconsistency("expectation value has imaginary part " +
                                 std::to_string(value.imag()));
  }
  return value.real();
}

ValidationReport validate(const DensityMatrix& s) {
  ValidationReport report;
  report.hermiticity_residue = (s.data - s.data.adjoint()).cwiseAbs().maxCoeff();
  report.trace_residue = std::abs(s.data.trace() - Complex(1.0));

  const Matrix herm = 0.5 * (s.data + s.data.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();

  // Classical registers must be block-diagonal in their basis: any entry
  // whose row and column digits differ on a register label must vanish.
  const auto dims = label_dims(s.labels);
  const std::size_t d = s.dim();
  for (std::size_t k = 0; k < s.labels.size(); ++k) {
    if (s.labels[k].kind != SubsystemKind::ClassicalRegister) continue;
    double residue = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      const auto rd = unflatten_index(r, dims);
      for (std::size_t c = 0; c < d; ++c) {
        const auto cd = unflatten_index(c, dims);
        if (rd[k] != cd[k]) {
          residue = std::max(residue, std::abs(s.data(static_cast<Eigen::Index>(r),
                                                      static_cast<Eigen::Index>(c))));
        }
      }
    }
    report.register_residues[s.labels[k].name] = residue;
    report.register_diagonality_residue = std::max(report.register_diagonality_residue, residue);
  }
  return report;
}

DensityMatrix mix(const std::vector<std::pair<double, DensityMatrix>>& parts) {
  if (parts.empty()) throw DimensionError("mix of zero states");
  Matrix acc = parts.front().first * parts.front().second.data;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (label_names(parts[i].second.labels) != label_names(parts.front().second.labels)) {
      throw PartitionError("mix requires identical label lists");
    }
    acc += parts[i].first * parts[i].second.data;
  }
  return DensityMatrix{parts.front().second.labels, std::move(acc)};
}

DensityMatrix with_labels(const DensityMatrix& s, LabelList labels) {
  if (labels.size() != s.labels.size()) throw DimensionError("relabeling changes arity");
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k].dim != s.labels[k].dim) {
      throw DimensionError("relabeling changes dimension of slot " + std::to_string(k));
    }
  }
  require_unique_names(labels);
  return DensityMatrix{std::move(labels), s.data};
}

} // namespace bellcat

#include "bellcat/catalysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "bellcat/errors.hpp"

namespace bellcat {

namespace {

constexpr double kFactorMatchTol = 1e-14;

std::string copy_name(const std::string& stem, std::size_t k) {
  return stem + std::to_string(k);
}

LabelList system_labels(const CatalystSpec& spec) {
  LabelList labels;
  for (std::size_t k = 1; k <= spec.n; ++k) labels.push_back(quantum_label(copy_name("A", k), spec.dimA()));
  labels.push_back(register_label("RA", 2));
  for (std::size_t k = 1; k <= spec.n; ++k) labels.push_back(quantum_label(copy_name("B", k), spec.dimB()));
  labels.push_back(register_label("RB", 2));
  return labels;
}

LabelList catalyst_labels(const CatalystSpec& spec) {
  LabelList labels;
  for (std::size_t k = 1; k + 1 <= spec.n; ++k) labels.push_back(quantum_label(copy_name("tA", k), spec.dimA()));
  labels.push_back(register_label("tRA", spec.n));
  for (std::size_t k = 1; k + 1 <= spec.n; ++k) labels.push_back(quantum_label(copy_name("tB", k), spec.dimB()));
  labels.push_back(register_label("tRB", spec.n));
  return labels;
}

LabelList global_labels(const CatalystSpec& spec) {
  LabelList labels = system_labels(spec);
  const LabelList cat = catalyst_labels(spec);
  labels.insert(labels.end(), cat.begin(), cat.end());
  return labels;
}

BranchFactor rho_pair(const CatalystSpec& spec, const std::string& a, const std::string& b) {
  return BranchFactor{{a, b}, spec.rho.data};
}

std::size_t position_of(const LabelList& universe, const std::string& name) {
  auto pos = find_label(universe, name);
  if (!pos) throw UnknownLabel("branch references unknown label '" + name + "'");
  return *pos;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  return (a - b).cwiseAbs().maxCoeff();
}

// Register assignment as a tuple in universe order, for sorting and merging.
std::vector<std::size_t> register_tuple(const LabelList& universe, const Branch& br) {
  std::vector<std::size_t> values;
  for (const auto& l : universe) {
    if (l.kind == SubsystemKind::ClassicalRegister) {
      values.push_back(br.registers.at(l.name));
    }
  }
  return values;
}

// Dense matrix of a branch's full quantum part, labels in universe order.
Matrix densify_quantum(const LabelList& universe, const Branch& br) {
  std::vector<std::string> assembled;
  Matrix acc = Matrix::Identity(1, 1);
  for (const auto& f : br.factors) {
    acc = kron(acc, f.data);
    assembled.insert(assembled.end(), f.labels.begin(), f.labels.end());
  }
  LabelList assembled_labels;
  for (const auto& name : assembled) assembled_labels.push_back(universe[position_of(universe, name)]);

  std::vector<std::size_t> perm;
  LabelList target;
  for (const auto& l : universe) {
    if (l.kind == SubsystemKind::Quantum) target.push_back(l);
  }
  for (const auto& l : target) {
    auto pos = find_label(assembled_labels, l.name);
    if (!pos) throw PartitionError("factors do not cover quantum label '" + l.name + "'");
    perm.push_back(*pos);
  }
  return permute_subsystems(acc, label_dims(assembled_labels), perm);
}

Branch merge_pair(const LabelList& universe, const Branch& lhs, const Branch& rhs) {
  Branch merged = lhs;
  merged.prob = lhs.prob + rhs.prob;
  if (merged.prob <= 0.0) return merged;

  const double wl = lhs.prob / merged.prob;
  const double wr = rhs.prob / merged.prob;

  bool same_partition = lhs.factors.size() == rhs.factors.size();
  if (same_partition) {
    for (std::size_t k = 0; k < lhs.factors.size(); ++k) {
      if (lhs.factors[k].labels != rhs.factors[k].labels) {
        same_partition = false;
        break;
      }
    }
  }

  if (same_partition) {
    std::vector<std::size_t> differing;
    for (std::size_t k = 0; k < lhs.factors.size(); ++k) {
      if (max_abs_diff(lhs.factors[k].data, rhs.factors[k].data) > kFactorMatchTol) {
        differing.push_back(k);
      }
    }
    // A factor-wise mixture is exact only when at most one group differs.
    if (differing.size() <= 1) {
      for (std::size_t k : differing) {
        merged.factors[k].data = wl * lhs.factors[k].data + wr * rhs.factors[k].data;
      }
      return merged;
    }
  }

  // Fall back to a single dense factor over all quantum labels.
  std::vector<std::string> quantum_names;
  std::size_t dim = 1;
  for (const auto& l : universe) {
    if (l.kind == SubsystemKind::Quantum) {
      quantum_names.push_back(l.name);
      dim *= l.dim;
    }
  }
  if (dim > dense_cap()) {
    throw TooLargeToMaterialize("merging branches with unlike factors needs dimension " +
                                std::to_string(dim) + " above the dense cap");
  }
  Matrix mixed = wl * densify_quantum(universe, lhs) + wr * densify_quantum(universe, rhs);
  merged.factors = {BranchFactor{std::move(quantum_names), std::move(mixed)}};
  return merged;
}

} // namespace

void validate_branched(const BranchedCqState& b) {
  require_unique_names(b.labels);

  std::set<std::string> quantum, classical;
  for (const auto& l : b.labels) {
    (l.kind == SubsystemKind::Quantum ? quantum : classical).insert(l.name);
  }

  double total = 0.0;
  for (const auto& br : b.branches) {
    if (br.prob < -kExactTol) throw DimensionError("negative branch probability");
    total += br.prob;

    std::set<std::string> covered;
    for (const auto& f : br.factors) {
      std::size_t dim = 1;
      for (const auto& name : f.labels) {
        const auto pos = position_of(b.labels, name);
        if (b.labels[pos].kind != SubsystemKind::Quantum) {
          throw PartitionError("factor group contains classical label '" + name + "'");
        }
        if (!covered.insert(name).second) {
          throw PartitionError("label '" + name + "' appears in two factor groups");
        }
        dim *= b.labels[pos].dim;
      }
      if (static_cast<std::size_t>(f.data.rows()) != dim ||
          static_cast<std::size_t>(f.data.cols()) != dim) {
        throw DimensionError("factor matrix does not match its label group dimension");
      }
    }
    if (covered.size() != quantum.size()) {
      throw PartitionError("factor groups do not partition the quantum labels");
    }

    for (const auto& [name, value] : br.registers) {
      const auto pos = position_of(b.labels, name);
      if (b.labels[pos].kind != SubsystemKind::ClassicalRegister) {
        throw RegisterError("register assignment on quantum label '" + name + "'");
      }
      if (value >= b.labels[pos].dim) {
        throw RegisterError("register '" + name + "' value out of range");
      }
    }
    if (br.registers.size() != classical.size()) {
      throw RegisterError("register map does not cover the classical labels");
    }
  }
  if (std::abs(total - 1.0) > kExactTol) {
    throw DimensionError("branch probabilities sum to " + std::to_string(total));
  }
}

BranchedCqState canonicalize(const BranchedCqState& b) {
  BranchedCqState out;
  out.labels = b.labels;
  out.branches = b.branches;

  // Normalize each branch: universe order inside groups, groups sorted by
  // first-label position.
  for (auto& br : out.branches) {
    for (auto& f : br.factors) {
      std::vector<std::size_t> positions;
      for (const auto& name : f.labels) positions.push_back(position_of(b.labels, name));
      std::vector<std::size_t> order(f.labels.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::sort(order.begin(), order.end(),
                [&](std::size_t l, std::size_t r) { return positions[l] < positions[r]; });

      bool sorted = true;
      for (std::size_t k = 0; k < order.size(); ++k) sorted = sorted && order[k] == k;
      if (!sorted) {
        std::vector<std::size_t> dims;
        for (const auto& name : f.labels) dims.push_back(b.labels[position_of(b.labels, name)].dim);
        f.data = permute_subsystems(f.data, dims, order);
        std::vector<std::string> names;
        for (std::size_t k : order) names.push_back(f.labels[k]);
        f.labels = std::move(names);
      }
    }
    std::sort(br.factors.begin(), br.factors.end(), [&](const BranchFactor& l, const BranchFactor& r) {
      return position_of(b.labels, l.labels.front()) < position_of(b.labels, r.labels.front());
    });
  }

  std::sort(out.branches.begin(), out.branches.end(), [&](const Branch& l, const Branch& r) {
    return register_tuple(b.labels, l) < register_tuple(b.labels, r);
  });

  std::vector<Branch> merged;
  for (auto& br : out.branches) {
    if (!merged.empty() &&
        register_tuple(b.labels, merged.back()) == register_tuple(b.labels, br)) {
      merged.back() = merge_pair(b.labels, merged.back(), br);
    } else {
      merged.push_back(std::move(br));
    }
  }
  out.branches = std::move(merged);
  return out;
}

double branched_difference(const BranchedCqState& a, const BranchedCqState& b) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a.labels != b.labels) return kInf;

  const BranchedCqState ca = canonicalize(a);
  const BranchedCqState cb = canonicalize(b);
  if (ca.branches.size() != cb.branches.size()) return kInf;

  double worst = 0.0;
  for (std::size_t i = 0; i < ca.branches.size(); ++i) {
    const Branch& l = ca.branches[i];
    const Branch& r = cb.branches[i];
    if (l.registers != r.registers) return kInf;
    if (l.factors.size() != r.factors.size()) return kInf;
    worst = std::max(worst, std::abs(l.prob - r.prob));
    for (std::size_t k = 0; k < l.factors.size(); ++k) {
      if (l.factors[k].labels != r.factors[k].labels) return kInf;
      worst = std::max(worst, max_abs_diff(l.factors[k].data, r.factors[k].data));
    }
  }
  return worst;
}

bool branched_equal(const BranchedCqState& a, const BranchedCqState& b, double tol) {
  return branched_difference(a, b) <= tol;
}

CatalystSpec make_catalyst_spec(DensityMatrix rho, std::size_t n) {
  if (rho.labels.size() != 2) throw DimensionError("the system state must be bipartite");
  DensityMatrix sigmaA = basis_state(quantum_label("sA", rho.labels[0].dim), 0);
  DensityMatrix sigmaB = basis_state(quantum_label("sB", rho.labels[1].dim), 0);
  CatalystSpec spec{std::move(rho), std::move(sigmaA), std::move(sigmaB), n};
  validate_spec(spec);
  return spec;
}

void validate_spec(const CatalystSpec& spec) {
  if (spec.n < 2) throw DimensionError("the protocol needs copy number n >= 2");
  if (spec.rho.labels.size() != 2) throw DimensionError("the system state must be bipartite");
  if (spec.sigmaA.labels.size() != 1 || spec.sigmaB.labels.size() != 1) {
    throw DimensionError("sigma must be given as two single-party factors");
  }
  if (spec.sigmaA.labels[0].dim != spec.dimA() || spec.sigmaB.labels[0].dim != spec.dimB()) {
    throw DimensionError("sigma factor dimensions do not match the system state");
  }
}

BranchedCqState build_catalyst(const CatalystSpec& spec) {
  validate_spec(spec);
  BranchedCqState cat;
  cat.labels = catalyst_labels(spec);

  const double w = 1.0 / static_cast<double>(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    Branch br;
    br.prob = w;
    br.registers = {{"tRA", i}, {"tRB", i}};
    for (std::size_t k = 1; k <= i; ++k) {
      br.factors.push_back(rho_pair(spec, copy_name("tA", k), copy_name("tB", k)));
    }
    for (std::size_t k = i + 1; k + 1 <= spec.n; ++k) {
      br.factors.push_back(BranchFactor{{copy_name("tA", k)}, spec.sigmaA.data});
      br.factors.push_back(BranchFactor{{copy_name("tB", k)}, spec.sigmaB.data});
    }
    cat.branches.push_back(std::move(br));
  }
  cat = canonicalize(cat);
  validate_branched(cat);
  return cat;
}

BranchedCqState catalytic_transform(const CatalystSpec& spec) {
  validate_spec(spec);
  BranchedCqState global;
  global.labels = global_labels(spec);

  const double w = 1.0 / static_cast<double>(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    Branch br;
    br.prob = w;
    if (i == spec.n - 1) {
      // All n copies are present: move them to the output, reset everything.
      br.registers = {{"RA", 0}, {"RB", 0}, {"tRA", 0}, {"tRB", 0}};
      for (std::size_t k = 1; k <= spec.n; ++k) {
        br.factors.push_back(rho_pair(spec, copy_name("A", k), copy_name("B", k)));
      }
      for (std::size_t k = 1; k + 1 <= spec.n; ++k) {
        br.factors.push_back(BranchFactor{{copy_name("tA", k)}, spec.sigmaA.data});
        br.factors.push_back(BranchFactor{{copy_name("tB", k)}, spec.sigmaB.data});
      }
    } else {
      // Feed the fresh copy into catalyst slot i+1 and emit sigma copies.
      br.registers = {{"RA", 1}, {"RB", 1}, {"tRA", i + 1}, {"tRB", i + 1}};
      for (std::size_t k = 1; k <= spec.n; ++k) {
        br.factors.push_back(BranchFactor{{copy_name("A", k)}, spec.sigmaA.data});
        br.factors.push_back(BranchFactor{{copy_name("B", k)}, spec.sigmaB.data});
      }
      for (std::size_t k = 1; k <= i + 1; ++k) {
        br.factors.push_back(rho_pair(spec, copy_name("tA", k), copy_name("tB", k)));
      }
      for (std::size_t k = i + 2; k + 1 <= spec.n; ++k) {
        br.factors.push_back(BranchFactor{{copy_name("tA", k)}, spec.sigmaA.data});
        br.factors.push_back(BranchFactor{{copy_name("tB", k)}, spec.sigmaB.data});
      }
    }
    global.branches.push_back(std::move(br));
  }

  global = canonicalize(global);
  validate_branched(global);
  const LocalityAudit audit = audit_locality(global, spec);
  if (!audit.local) {
    throw PartitionError("transform produced a nonlocal branch: " + audit.detail);
  }
  return global;
}

BranchedCqState branched_marginal(const BranchedCqState& b, const std::vector<std::string>& keep) {
  BranchedCqState out;
  for (const auto& l : b.labels) {
    if (std::find(keep.begin(), keep.end(), l.name) != keep.end()) out.labels.push_back(l);
  }
  for (const auto& name : keep) {
    if (!find_label(b.labels, name)) throw UnknownLabel("no subsystem named '" + name + "'");
  }

  for (const auto& br : b.branches) {
    Branch m;
    m.prob = br.prob;
    for (const auto& [name, value] : br.registers) {
      if (find_label(out.labels, name)) m.registers.emplace(name, value);
    }
    for (const auto& f : br.factors) {
      std::vector<std::size_t> kept_positions;
      std::vector<std::string> kept_names;
      for (std::size_t k = 0; k < f.labels.size(); ++k) {
        if (find_label(out.labels, f.labels[k])) {
          kept_positions.push_back(k);
          kept_names.push_back(f.labels[k]);
        }
      }
      if (kept_names.empty()) continue; // unit-trace factor drops out entirely
      if (kept_names.size() == f.labels.size()) {
        m.factors.push_back(f);
      } else {
        std::vector<std::size_t> dims;
        for (const auto& name : f.labels) dims.push_back(b.labels[position_of(b.labels, name)].dim);
        m.factors.push_back(
            BranchFactor{kept_names, partial_trace_matrix(f.data, dims, kept_positions)});
      }
    }
    out.branches.push_back(std::move(m));
  }
  out = canonicalize(out);
  validate_branched(out);
  return out;
}

BranchedCqState system_marginal(const BranchedCqState& global, const CatalystSpec& spec) {
  if (global.labels != global_labels(spec)) {
    throw PartitionError("state does not carry the labels of the catalytic transform output");
  }
  return branched_marginal(global, label_names(system_labels(spec)));
}

BranchedCqState catalyst_marginal(const BranchedCqState& global, const CatalystSpec& spec) {
  if (global.labels != global_labels(spec)) {
    throw PartitionError("state does not carry the labels of the catalytic transform output");
  }
  return branched_marginal(global, label_names(catalyst_labels(spec)));
}

BranchedCqState expected_system_marginal(const CatalystSpec& spec) {
  BranchedCqState out;
  out.labels = system_labels(spec);

  Branch activated;
  activated.prob = 1.0 / static_cast<double>(spec.n);
  activated.registers = {{"RA", 0}, {"RB", 0}};
  for (std::size_t k = 1; k <= spec.n; ++k) {
    activated.factors.push_back(rho_pair(spec, copy_name("A", k), copy_name("B", k)));
  }

  Branch idle;
  idle.prob = static_cast<double>(spec.n - 1) / static_cast<double>(spec.n);
  idle.registers = {{"RA", 1}, {"RB", 1}};
  for (std::size_t k = 1; k <= spec.n; ++k) {
    idle.factors.push_back(BranchFactor{{copy_name("A", k)}, spec.sigmaA.data});
    idle.factors.push_back(BranchFactor{{copy_name("B", k)}, spec.sigmaB.data});
  }

  out.branches = {std::move(activated), std::move(idle)};
  out = canonicalize(out);
  validate_branched(out);
  return out;
}

DensityMatrix to_dense(const BranchedCqState& b) {
  validate_branched(b);
  const std::size_t d = dims_product(b.labels);
  if (d > dense_cap()) {
    throw TooLargeToMaterialize("dense form has dimension " + std::to_string(d) +
                                ", above the cap " + std::to_string(dense_cap()));
  }

  Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (const auto& br : b.branches) {
    Matrix part = Matrix::Identity(1, 1);
    LabelList assembled;
    for (const auto& f : br.factors) {
      part = kron(part, f.data);
      for (const auto& name : f.labels) assembled.push_back(b.labels[position_of(b.labels, name)]);
    }
    for (const auto& l : b.labels) {
      if (l.kind == SubsystemKind::ClassicalRegister) {
        part = kron(part, basis_projector(l.dim, br.registers.at(l.name)));
        assembled.push_back(l);
      }
    }
    std::vector<std::size_t> perm;
    for (const auto& l : b.labels) perm.push_back(*find_label(assembled, l.name));
    acc += br.prob * permute_subsystems(part, label_dims(assembled), perm);
  }
  return DensityMatrix{b.labels, std::move(acc)};
}

LocalityAudit audit_locality(const BranchedCqState& global, const CatalystSpec& spec) {
  std::set<std::string> alice, bob;
  for (std::size_t k = 1; k <= spec.n; ++k) {
    alice.insert(copy_name("A", k));
    bob.insert(copy_name("B", k));
  }
  for (std::size_t k = 1; k + 1 <= spec.n; ++k) {
    alice.insert(copy_name("tA", k));
    bob.insert(copy_name("tB", k));
  }
  alice.insert("RA");
  alice.insert("tRA");
  bob.insert("RB");
  bob.insert("tRB");

  for (std::size_t i = 0; i < global.branches.size(); ++i) {
    for (const auto& f : global.branches[i].factors) {
      bool on_alice = false, on_bob = false;
      for (const auto& name : f.labels) {
        on_alice = on_alice || alice.count(name) > 0;
        on_bob = on_bob || bob.count(name) > 0;
      }
      if (on_alice && on_bob) {
        // Cross-party factors can only be inherited, never created locally.
        if (f.labels.size() != 2 || max_abs_diff(f.data, spec.rho.data) > kExactTol) {
          LocalityAudit audit;
          audit.local = false;
          audit.detail = "branch " + std::to_string(i) + " holds a cross-party factor on (" +
                         f.labels.front() + ", " + f.labels.back() +
                         ") that is not the input system state";
          return audit;
        }
      }
    }
  }
  return LocalityAudit{};
}

// ---------------------------------------------------------------------------
// The protocol as an explicit local channel

KrausMap local_protocol_kraus(const CatalystSpec& spec, Party party) {
  validate_spec(spec);
  const bool is_alice = party == Party::Alice;
  const std::size_t d = is_alice ? spec.dimA() : spec.dimB();
  const std::string stem = is_alice ? "A" : "B";
  const std::string tstem = is_alice ? "tA" : "tB";
  const std::string reg = is_alice ? "RA" : "RB";
  const std::string treg = is_alice ? "tRA" : "tRB";
  const DensityMatrix& sigma = is_alice ? spec.sigmaA : spec.sigmaB;
  const SubsystemLabel system = is_alice ? spec.rho.labels[0] : spec.rho.labels[1];
  const std::size_t n = spec.n;

  KrausMap map;
  map.in_labels.push_back(system);
  for (std::size_t k = 1; k + 1 <= n; ++k) map.in_labels.push_back(quantum_label(copy_name(tstem, k), d));
  map.in_labels.push_back(register_label(treg, n));

  for (std::size_t k = 1; k <= n; ++k) map.out_labels.push_back(quantum_label(copy_name(stem, k), d));
  map.out_labels.push_back(register_label(reg, 2));
  for (std::size_t k = 1; k + 1 <= n; ++k) map.out_labels.push_back(quantum_label(copy_name(tstem, k), d));
  map.out_labels.push_back(register_label(treg, n));

  // Spectral form of sigma, for preparing fresh copies in Kraus form.
  Eigen::SelfAdjointEigenSolver<Matrix> sigma_eig(0.5 * (sigma.data + sigma.data.adjoint()));
  std::vector<std::pair<double, Vector>> sigma_terms;
  for (Eigen::Index k = 0; k < sigma_eig.eigenvalues().size(); ++k) {
    if (sigma_eig.eigenvalues()(k) > 1e-14) {
      sigma_terms.emplace_back(sigma_eig.eigenvalues()(k), sigma_eig.eigenvectors().col(k));
    }
  }

  const std::size_t dn = [&] {
    std::size_t v = 1;
    for (std::size_t k = 0; k < n; ++k) v *= d;
    return v;
  }();

  auto basis_column = [&](std::size_t dim, std::size_t v) {
    Matrix e = Matrix::Zero(static_cast<Eigen::Index>(dim), 1);
    e(static_cast<Eigen::Index>(v), 0) = 1.0;
    return e;
  };
  auto transition = [&](std::size_t dim, std::size_t to, std::size_t from) {
    Matrix t = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    t(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from)) = 1.0;
    return t;
  };

  // Register value n-1: route the n carried copies to the output, prepare a
  // fresh sigma^(n-1) catalyst, reset both registers.
  {
    std::vector<std::size_t> sel(n - 1, 0);
    for (;;) {
      double weight = 1.0;
      Matrix k = Matrix::Identity(static_cast<Eigen::Index>(dn), static_cast<Eigen::Index>(dn));
      k = kron(k, basis_column(2, 0));
      for (std::size_t slot = 0; slot + 1 < n; ++slot) {
        weight *= sigma_terms[sel[slot]].first;
        k = kron(k, Matrix(sigma_terms[sel[slot]].second));
      }
      k = kron(k, transition(n, 0, n - 1));
      map.ops.push_back(std::sqrt(weight) * k);

      std::size_t slot = n - 1;
      while (slot-- > 0) {
        if (++sel[slot] < sigma_terms.size()) break;
        sel[slot] = 0;
        if (slot == 0) goto done_full;
      }
    }
  done_full:;
  }

  // Register value i <= n-2: prepare sigma^n on the output with register 1,
  // park the incoming copy in catalyst slot i+1 (discarding that slot's old
  // sigma), advance the catalyst register to i+1.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Aligned column order: catalyst slots feeding the kept positions, the
    // incoming system feeding slot i+1, the register, then the discarded slot.
    std::vector<std::size_t> aligned; // positions within in_labels
    for (std::size_t k = 1; k <= i; ++k) aligned.push_back(k);
    aligned.push_back(0);
    for (std::size_t k = i + 2; k + 1 <= n; ++k) aligned.push_back(k);
    aligned.push_back(n);     // treg sits after the n-1 catalyst slots
    aligned.push_back(i + 1); // discarded tA_(i+1)

    const Matrix p_in = subsystem_permutation_matrix(label_dims(map.in_labels), aligned);

    std::vector<std::size_t> sel(n, 0);
    for (;;) {
      double weight = 1.0;
      Matrix k = Matrix::Identity(1, 1);
      for (std::size_t slot = 0; slot < n; ++slot) {
        weight *= sigma_terms[sel[slot]].first;
        k = kron(k, Matrix(sigma_terms[sel[slot]].second));
      }
      k = kron(k, basis_column(2, 1));
      k = kron(k, identity_matrix(dn / d)); // kept catalyst slots plus routed copy
      k = kron(k, transition(n, i + 1, i));
      for (std::size_t t = 0; t < d; ++t) {
        Matrix discard = basis_column(d, t).adjoint();
        map.ops.push_back(std::sqrt(weight) * kron(k, discard) * p_in);
      }

      std::size_t slot = n;
      while (slot-- > 0) {
        if (++sel[slot] < sigma_terms.size()) break;
        sel[slot] = 0;
        if (slot == 0) goto done_branch;
      }
    }
  done_branch:;
  }

  return map;
}

} // namespace bellcat

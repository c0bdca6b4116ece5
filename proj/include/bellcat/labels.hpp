#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bellcat/errors.hpp"

namespace bellcat {

enum class SubsystemKind { Quantum, ClassicalRegister };

/// A named tensor factor of a composite system. Classical registers are
/// ordinary subsystems that must stay basis-diagonal.
struct SubsystemLabel {
  std::string name;
  std::size_t dim = 0;
  SubsystemKind kind = SubsystemKind::Quantum;

  bool operator==(const SubsystemLabel&) const = default;
};

using LabelList = std::vector<SubsystemLabel>;

inline SubsystemLabel quantum_label(std::string name, std::size_t dim) {
  return SubsystemLabel{std::move(name), dim, SubsystemKind::Quantum};
}

inline SubsystemLabel register_label(std::string name, std::size_t dim) {
  return SubsystemLabel{std::move(name), dim, SubsystemKind::ClassicalRegister};
}

std::size_t dims_product(const LabelList& labels);

std::optional<std::size_t> find_label(const LabelList& labels, const std::string& name);

/// Throws LabelCollision if two labels share a name.
void require_unique_names(const LabelList& labels);

std::vector<std::size_t> label_dims(const LabelList& labels);

std::vector<std::string> label_names(const LabelList& labels);

// Mixed-radix flattening. The leftmost subsystem is the most significant
// digit; every module shares this convention.
std::size_t flatten_index(const std::vector<std::size_t>& digits,
                          const std::vector<std::size_t>& dims);

std::vector<std::size_t> unflatten_index(std::size_t flat,
                                         const std::vector<std::size_t>& dims);

} // namespace bellcat

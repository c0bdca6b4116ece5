#include "bellcat/labels.hpp"

#include <unordered_set>

namespace bellcat {

std::size_t dims_product(const LabelList& labels) {
  std::size_t d = 1;
  for (const auto& l : labels) d *= l.dim;
  return d;
}

std::optional<std::size_t> find_label(const LabelList& labels, const std::string& name) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].name == name) return i;
  }
  return std::nullopt;
}

void require_unique_names(const LabelList& labels) {
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l.name).second) {
      throw LabelCollision("duplicate subsystem label '" + l.name + "'");
    }
  }
}

std::vector<std::size_t> label_dims(const LabelList& labels) {
  std::vector<std::size_t> dims;
  dims.reserve(labels.size());
  for (const auto& l : labels) dims.push_back(l.dim);
  return dims;
}

std::vector<std::string> label_names(const LabelList& labels) {
  std::vector<std::string> names;
  names.reserve(labels.size());
  for (const auto& l : labels) names.push_back(l.name);
  return names;
}

std::size_t flatten_index(const std::vector<std::size_t>& digits,
                          const std::vector<std::size_t>& dims) {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    flat = flat * dims[k] + digits[k];
  }
  return flat;
}

std::vector<std::size_t> unflatten_index(std::size_t flat, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> digits(dims.size(), 0);
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = flat % dims[k];
    flat /= dims[k];
  }
  return digits;
}

} // namespace bellcat

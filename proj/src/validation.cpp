#include "narrativeforge/validation.hpp"

namespace narrativeforge {

bool ValidationReport::has(ViolationKind kind) const {
  for (const auto& v : violations)
    if (v.kind == kind) return true;
  return false;
}

std::vector<std::string> ValidationReport::messages() const {
  std::vector<std::string> out;
  out.reserve(violations.size());
  for (const auto& v : violations) out.push_back(v.message);
  return out;
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.message;
  }
  return out;
}

void ValidationReport::merge(const ValidationReport& other) {
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

}  // namespace narrativeforge

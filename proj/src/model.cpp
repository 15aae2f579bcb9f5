#include "seqlat/model.hpp"

#include <set>

namespace seqlat {

std::optional<std::size_t> Sequence::injection_index() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].anomalous()) return i;
  }
  return std::nullopt;
}

std::optional<std::string> Sequence::kind() const {
  if (auto inj = injection_index()) return points[*inj].kind;
  return std::nullopt;
}

std::vector<Label> Sequence::labels() const {
  std::vector<Label> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.label);
  return out;
}

std::size_t Dataset::point_count() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.size();
  return n;
}

std::size_t Dataset::anomalous_point_count() const {
  std::size_t n = 0;
  for (const auto& s : sequences) {
    for (const auto& p : s.points) n += p.anomalous() ? 1 : 0;
  }
  return n;
}

const Sequence* Dataset::find(const std::string& id) const {
  for (const auto& s : sequences) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::vector<std::string> Dataset::column_names() const {
  if (!feature_names.empty()) return feature_names;
  std::vector<std::string> names;
  names.reserve(arity);
  for (std::size_t j = 0; j < arity; ++j) names.push_back("f" + std::to_string(j));
  return names;
}

ValidationResult validate_sequence(const Sequence& seq) {
  ValidationResult r;
  if (seq.points.empty()) {
    r.violations.push_back("empty sequence");
    return r;
  }
  const auto arity = seq.points.front().features.size();
  std::optional<std::size_t> injection;
  for (std::size_t i = 0; i < seq.points.size(); ++i) {
    const auto& p = seq.points[i];
    if (i > 0 && !(p.timestamp > seq.points[i - 1].timestamp)) {
      r.violations.push_back("timestamp not increasing at index " + std::to_string(i));
      break;
    }
    if (p.features.size() != arity) {
      r.violations.push_back("arity mismatch at index " + std::to_string(i));
      break;
    }
    if (p.anomalous() != p.kind.has_value()) {
      r.violations.push_back(p.anomalous() ? "anomalous point without kind at index " + std::to_string(i)
                                           : "normal point with kind at index " + std::to_string(i));
      break;
    }
    if (p.anomalous()) {
      if (!injection) {
        injection = i;
      } else if (p.kind != seq.points[i - 1].kind) {
        r.warnings.push_back("anomaly kind changes at index " + std::to_string(i));
      }
    } else if (injection) {
      r.violations.push_back("normal after injection at index " + std::to_string(i));
      break;
    }
  }
  if (r.ok() && injection && *injection == 0) {
    r.warnings.push_back("sequence has no normal prefix");
  }
  return r;
}

ValidationResult validate_dataset(const Dataset& ds) {
  ValidationResult r;
  std::set<std::string> seen;
  for (const auto& s : ds.sequences) {
    if (!seen.insert(s.id).second) r.violations.push_back(s.id + ": duplicate sequence id");
    if (!s.points.empty() && s.points.front().features.size() != ds.arity) {
      r.violations.push_back(s.id + ": arity " + std::to_string(s.points.front().features.size()) +
                             " differs from dataset arity " + std::to_string(ds.arity));
    }
    auto v = validate_sequence(s);
    for (auto& m : v.violations) r.violations.push_back(s.id + ": " + m);
    for (auto& m : v.warnings) r.warnings.push_back(s.id + ": " + m);
  }
  return r;
}

}  // namespace seqlat

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "resolve/error.hpp"

namespace resolve {

inline constexpr std::size_t kMaxVars = 64;

inline bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  };
  auto tail = [&](char c) {
    return head(c) || (c >= '0' && c <= '9') || c == '[' || c == ']' || c == '\'';
  };
  if (!head(s.front())) return false;
  for (char c : s.substr(1))
    if (!tail(c)) return false;
  return true;
}

/// Ordered, immutable list of variable names. Order defines the variable
/// precedence of every monomial order built on top of it.
class VarRegistry {
 public:
  explicit VarRegistry(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() > kMaxVars)
      throw std::invalid_argument("too many variables (max " + std::to_string(kMaxVars) + ")");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!valid_identifier(names_[i]))
        throw std::invalid_argument("invalid variable name '" + names_[i] + "'");
      if (!index_.emplace(names_[i], i).second)
        throw std::invalid_argument("duplicate variable name '" + names_[i] + "'");
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<std::size_t> find(std::string_view n) const {
    auto it = index_.find(std::string(n));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t index(std::string_view n) const {
    if (auto i = find(n)) return *i;
    throw UnknownVariable(std::string(n));
  }
  bool contains(std::string_view n) const { return find(n).has_value(); }

  bool operator==(const VarRegistry& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

using Registry = std::shared_ptr<const VarRegistry>;

inline Registry make_registry(std::vector<std::string> names) {
  return std::make_shared<const VarRegistry>(std::move(names));
}

inline bool same_registry(const Registry& a, const Registry& b) {
  return a == b || (a && b && *a == *b);
}

// Registry `base` followed by `extra` names (all must be fresh).
inline Registry extend_registry(const Registry& base, const std::vector<std::string>& extra) {
  auto names = base->names();
  names.insert(names.end(), extra.begin(), extra.end());
  return make_registry(std::move(names));
}

// A name not present in `reg`, derived from `stem`.
inline std::string fresh_name(const VarRegistry& reg, const std::string& stem) {
  if (!reg.contains(stem)) return stem;
  for (int i = 1;; ++i) {
    std::string cand = stem + "'" + std::to_string(i);
    if (!reg.contains(cand)) return cand;
  }
}

}  // namespace resolve

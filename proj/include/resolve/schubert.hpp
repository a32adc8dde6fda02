#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "resolve/ideal.hpp"
#include "resolve/parse.hpp"
#include "resolve/polymatrix.hpp"

namespace resolve::schubert {

/// Standard symplectic frame of Z_p^{2g}: J = [[0,K],[-K,0]] with K the
/// antidiagonal permutation, and Pi with Pi e_j = e_{j+1}, Pi e_{2g} = p e_1.
struct SymplecticFrame {
  int g = 0;
  Registry reg;  // contains the uniformiser "p"
  PolyMatrix K, J, Pi;
};

inline SymplecticFrame frame(int g, Registry reg = make_registry({"p"})) {
  if (g < 1) throw std::invalid_argument("genus must be positive");
  const std::size_t n = static_cast<std::size_t>(g);
  SymplecticFrame f{g, reg, PolyMatrix(reg, n, n), PolyMatrix(reg, 2 * n, 2 * n), PolyMatrix(reg, 2 * n, 2 * n)};
  auto one = Polynomial::constant(reg, 1);
  for (std::size_t i = 0; i < n; ++i) {
    f.K(i, n - 1 - i) = one;
    f.J(i, 2 * n - 1 - i) = one;
    f.J(n + i, n - 1 - i) = -one;
  }
  for (std::size_t i = 1; i < 2 * n; ++i) f.Pi(i, i - 1) = one;
  f.Pi(0, 2 * n - 1) = Polynomial::variable(reg, "p");
  return f;
}

/// Sorted g-element subset of {1..2g} (1-based, as in the notation).
using IsotropicSubset = std::vector<int>;

inline bool is_isotropic(const IsotropicSubset& s, int g) {
  if (static_cast<int>(s.size()) != g) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 1 || s[i] > 2 * g) return false;
    if (i && s[i] <= s[i - 1]) return false;
  }
  for (int x : s)
    if (std::binary_search(s.begin(), s.end(), 2 * g + 1 - x)) return false;
  return true;
}

inline std::vector<IsotropicSubset> enumerate_isotropic(int g) {
  if (g < 1) throw std::invalid_argument("genus must be positive");
  std::vector<IsotropicSubset> out;
  for (auto& c : combinations(static_cast<std::size_t>(2 * g), static_cast<std::size_t>(g))) {
    IsotropicSubset s;
    for (auto i : c) s.push_back(static_cast<int>(i) + 1);
    if (is_isotropic(s, g)) out.push_back(s);
  }
  return out;
}

inline int dimension(const IsotropicSubset& s, int g) {
  int r = 0, sum = 0;
  for (int x : s)
    if (x <= g) {
      ++r;
      sum += x;
    }
  return r * (g + 1) - sum;
}

// True iff L_t is contained in L_s.
inline bool bruhat_leq(const IsotropicSubset& s, const IsotropicSubset& t) {
  if (s.size() != t.size()) throw std::invalid_argument("subsets of different genus");
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] > t[i]) return false;
  return true;
}

inline std::string label(const IsotropicSubset& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

struct SchubertPoset {
  int g = 0;
  std::vector<IsotropicSubset> nodes;
  // (smaller, larger) variety: L_first is a divisor in L_second.
  std::vector<std::pair<IsotropicSubset, IsotropicSubset>> covers;
};

inline SchubertPoset hasse(int g) {
  SchubertPoset p{g, enumerate_isotropic(g), {}};
  // Diagram order: increasing dimension, then lexicographically decreasing.
  std::stable_sort(p.nodes.begin(), p.nodes.end(), [&](const IsotropicSubset& a, const IsotropicSubset& b) {
    int da = dimension(a, g), db = dimension(b, g);
    if (da != db) return da < db;
    return a > b;
  });
  for (auto& small : p.nodes)
    for (auto& large : p.nodes)
      if (bruhat_leq(large, small) && dimension(large, g) == dimension(small, g) + 1) p.covers.push_back({small, large});
  return p;
}

inline std::string to_dot(const SchubertPoset& p) {
  std::ostringstream os;
  os << "digraph schubert_g" << p.g << " {\n  rankdir=LR;\n";
  for (auto& s : p.nodes) os << "  \"" << label(s) << "\" [label=\"" << label(s) << "\\ndim " << dimension(s, p.g) << "\"];\n";
  for (auto& [a, b] : p.covers) os << "  \"" << label(a) << "\" -> \"" << label(b) << "\";\n";
  os << "}\n";
  return os.str();
}

inline nlohmann::json to_json(const SchubertPoset& p) {
  nlohmann::json j;
  j["g"] = p.g;
  j["nodes"] = nlohmann::json::array();
  for (auto& s : p.nodes) j["nodes"].push_back({{"label", label(s)}, {"elems", s}, {"dimension", dimension(s, p.g)}});
  j["edges"] = nlohmann::json::array();
  for (auto& [a, b] : p.covers) j["edges"].push_back({{"from", label(a)}, {"to", label(b)}});
  return j;
}

/// Coordinates of the big cell: upper triangle of the symmetric matrix A
/// followed by p.
inline Registry big_cell_registry(int g) {
  std::vector<std::string> names;
  for (int i = 1; i <= g; ++i)
    for (int j = i; j <= g; ++j) names.push_back("a" + std::to_string(i) + std::to_string(j));
  names.push_back("p");
  return make_registry(names);
}

inline PolyMatrix symmetric_matrix(int g, const Registry& reg, const std::string& suffix = "") {
  const std::size_t n = static_cast<std::size_t>(g);
  PolyMatrix a(reg, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t lo = std::min(i, j) + 1, hi = std::max(i, j) + 1;
      a(i, j) = Polynomial::variable(reg, "a" + std::to_string(lo) + std::to_string(hi) + suffix);
    }
  return a;
}

/// Ideal of the trace of L_S on the big cell, for g <= 3. L_S lies in the
/// special fibre, so p is always among the generators. For g = 2 and
/// g = 1 the tables are the sub-diagrams through the smaller Grassmannians.
inline Ideal big_cell_ideal(int g, const IsotropicSubset& s) {
  if (g < 1 || g > 3) throw std::invalid_argument("big-cell ideals are tabulated for g <= 3 only");
  if (!is_isotropic(s, g)) throw std::invalid_argument("not an isotropic subset: " + label(s));
  Registry reg = big_cell_registry(g);
  PolyMatrix A = symmetric_matrix(g, reg);
  auto v = [&](const char* n) { return Polynomial::variable(reg, n); };
  std::vector<Polynomial> gens;
  auto all_a = [&]() {
    for (std::size_t k = 0; k + 1 < reg->size(); ++k) gens.push_back(Polynomial::variable(reg, k));
  };
  auto cofactors = [&]() {
    for (auto& r : combinations(3, 2))
      for (auto& c : combinations(3, 2))
        if (r <= c) gens.push_back(A.minor(r, c));
  };
  const std::string key = label(s);
  if (g == 3) {
    if (key == "{4,5,6}") {
      all_a();
    } else if (key == "{3,5,6}") {
      for (auto n : {"a11", "a12", "a13", "a22", "a23"}) gens.push_back(v(n));
    } else if (key == "{2,4,6}") {
      gens = {v("p"), v("a22") * v("a33") - v("a23").pow(2), v("a11"), v("a12"), v("a13")};
    } else if (key == "{2,3,6}") {
      gens = {v("a11"), v("a12"), v("a13")};
    } else if (key == "{1,4,5}") {
      cofactors();
    } else if (key == "{1,3,5}") {
      // Cofactors of the last column: 2x2 minors of the first two columns.
      for (auto& r : combinations(3, 2)) gens.push_back(A.minor(r, {0, 1}));
    } else if (key == "{1,2,4}") {
      gens = {A.det()};
    } else if (key != "{1,2,3}") {
      throw std::invalid_argument("no tabulated ideal for " + key);
    }
  } else if (g == 2) {
    if (key == "{3,4}") {
      all_a();
    } else if (key == "{2,4}") {
      gens = {v("a11"), v("a12")};
    } else if (key == "{1,3}") {
      gens = {v("p"), v("a11") * v("a22") - v("a12").pow(2)};
    } else if (key != "{1,2}") {
      throw std::invalid_argument("no tabulated ideal for " + key);
    }
  } else {
    if (key == "{2}") gens = {v("a11")};
  }
  if (std::find(gens.begin(), gens.end(), v("p")) == gens.end()) gens.push_back(v("p"));
  return Ideal{reg, gens};
}

}  // namespace resolve::schubert

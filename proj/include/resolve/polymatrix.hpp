#pragma once

#include <map>
#include <string>
#include <vector>

#include "resolve/parse.hpp"
#include "resolve/polynomial.hpp"

namespace resolve {

/// Dense matrix of polynomials over one registry.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(Registry reg, std::size_t rows, std::size_t cols)
      : reg_(std::move(reg)), rows_(rows), cols_(cols), data_(rows * cols, Polynomial(reg_)) {}

  static PolyMatrix identity(Registry reg, std::size_t n) {
    PolyMatrix m(reg, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Polynomial::constant(reg, 1);
    return m;
  }

  static PolyMatrix parse(const std::vector<std::vector<std::string>>& rows, const Registry& reg) {
    std::size_t c = rows.empty() ? 0 : rows[0].size();
    PolyMatrix m(reg, rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != c) throw std::invalid_argument("ragged matrix");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = parse_polynomial(rows[i][j], reg);
    }
    return m;
  }

  const Registry& registry() const { return reg_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Polynomial& operator()(std::size_t i, std::size_t j) { return data_.at(i * cols_ + j); }
  const Polynomial& operator()(std::size_t i, std::size_t j) const { return data_.at(i * cols_ + j); }

  bool operator==(const PolyMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  PolyMatrix operator*(const PolyMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix dimension mismatch");
    PolyMatrix r(reg_, rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < o.cols_; ++j) {
        Polynomial s(reg_);
        for (std::size_t k = 0; k < cols_; ++k)
          if (!(*this)(i, k).is_zero() && !o(k, j).is_zero()) s += (*this)(i, k) * o(k, j);
        r(i, j) = std::move(s);
      }
    return r;
  }

  PolyMatrix transpose() const {
    PolyMatrix r(reg_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  PolyMatrix submatrix(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
    PolyMatrix r(reg_, rs.size(), cs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < cs.size(); ++j) r(i, j) = (*this)(rs.at(i), cs.at(j));
    return r;
  }

  // Vertical concatenation.
  PolyMatrix stack(const PolyMatrix& below) const {
    if (cols_ != below.cols_) throw std::invalid_argument("column count mismatch");
    PolyMatrix r(reg_, rows_ + below.rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
    for (std::size_t i = 0; i < below.rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(rows_ + i, j) = below(i, j);
    return r;
  }

  PolyMatrix map(const std::function<Polynomial(const Polynomial&)>& f, Registry target) const {
    PolyMatrix r(target, rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = f(data_[k]);
    return r;
  }

  bool all_constant() const {
    for (auto& p : data_)
      if (!p.is_constant()) return false;
    return true;
  }

  // Cofactor expansion along rows, memoised over the set of used columns.
  Polynomial det_cofactor() const {
    require_square();
    if (rows_ == 0) return Polynomial::constant(reg_, 1);
    if (rows_ > 20) throw std::invalid_argument("cofactor expansion limited to 20x20");
    std::map<std::uint32_t, Polynomial> memo;
    std::function<Polynomial(std::size_t, std::uint32_t)> rec = [&](std::size_t row,
                                                                    std::uint32_t used) -> Polynomial {
      if (row == rows_) return Polynomial::constant(reg_, 1);
      auto it = memo.find(used);
      if (it != memo.end()) return it->second;
      Polynomial acc(reg_);
      int sign = 1;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (used & (1u << j)) continue;
        const Polynomial& e = (*this)(row, j);
        if (!e.is_zero()) {
          Polynomial sub = rec(row + 1, used | (1u << j));
          if (!sub.is_zero()) {
            Polynomial t = e * sub;
            if (sign > 0)
              acc += t;
            else
              acc -= t;
          }
        }
        sign = -sign;
      }
      memo.emplace(used, acc);
      return acc;
    };
    return rec(0, 0);
  }

  // Fraction-free Gaussian elimination; every division is exact.
  Polynomial det_bareiss() const {
    require_square();
    const std::size_t n = rows_;
    if (n == 0) return Polynomial::constant(reg_, 1);
    std::vector<Polynomial> a = data_;
    auto at = [&](std::size_t i, std::size_t j) -> Polynomial& { return a[i * n + j]; };
    Polynomial prev = Polynomial::constant(reg_, 1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (at(k, k).is_zero()) {
        std::size_t p = k + 1;
        while (p < n && at(p, k).is_zero()) ++p;
        if (p == n) return Polynomial(reg_);
        for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
        sign = -sign;
      }
      for (std::size_t i = k + 1; i < n; ++i)
        for (std::size_t j = k + 1; j < n; ++j) {
          Polynomial num = at(i, j) * at(k, k) - at(i, k) * at(k, j);
          auto q = num.exact_divide(prev);
          if (!q) throw std::logic_error("Bareiss division not exact");
          at(i, j) = std::move(*q);
        }
      prev = at(k, k);
    }
    Polynomial d = at(n - 1, n - 1);
    return sign > 0 ? d : -d;
  }

  // Cofactor expansion for small symbolic matrices, Bareiss otherwise.
  Polynomial det() const {
    require_square();
    if (rows_ <= 6 && !all_constant()) return det_cofactor();
    return det_bareiss();
  }

  Polynomial minor(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
    return submatrix(rs, cs).det();
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < rows_; ++i) {
      s += i ? ", [" : "[";
      for (std::size_t j = 0; j < cols_; ++j) s += (j ? ", " : "") + (*this)(i, j).to_string();
      s += "]";
    }
    return s + "]";
  }

 private:
  void require_square() const {
    if (rows_ != cols_)
      throw NotSquare("determinant of non-square " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                      " matrix");
  }

  Registry reg_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Polynomial> data_;
};

// Jacobian d(polys)/d(vars), one row per polynomial.
inline PolyMatrix jacobian(const std::vector<Polynomial>& polys, const std::vector<std::size_t>& vars,
                           const Registry& reg) {
  PolyMatrix j(reg, polys.size(), vars.size());
  for (std::size_t r = 0; r < polys.size(); ++r)
    for (std::size_t c = 0; c < vars.size(); ++c) j(r, c) = polys[r].derivative(vars[c]);
  return j;
}

// All k-element subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

}  // namespace resolve

#include "relupoly/linalg.hpp"

#include <algorithm>

namespace relupoly {

RatMat RatMat::identity(std::size_t n) {
  RatMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RatMat RatMat::from_rows(const std::vector<RatVec>& rows) {
  if (rows.empty()) return RatMat(0, 0);
  RatMat m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw InternalError("from_rows: ragged input");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

RatVec RatMat::row(std::size_t i) const {
  RatVec v(cols_);
  for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
  return v;
}

RatVec RatMat::col(std::size_t j) const {
  RatVec v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void RatMat::set_row(std::size_t i, const RatVec& v) {
  if (v.size() != cols_) throw InternalError("set_row: size mismatch");
  for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
}

void RatMat::set_col(std::size_t j, const RatVec& v) {
  if (v.size() != rows_) throw InternalError("set_col: size mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

RatMat RatMat::transposed() const {
  RatMat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RatMat RatMat::operator*(const RatMat& rhs) const {
  if (cols_ != rhs.rows_) throw InternalError("matmul: size mismatch");
  RatMat r(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rat& a = (*this)(i, k);
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) r(i, j) += a * rhs(k, j);
    }
  return r;
}

RatVec RatMat::operator*(const RatVec& v) const {
  if (cols_ != v.size()) throw InternalError("matvec: size mismatch");
  RatVec r(rows_, Rat(0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
  return r;
}

RatMat RatMat::operator+(const RatMat& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw InternalError("matadd: size mismatch");
  RatMat r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + rhs.data_[i];
  return r;
}

RatMat RatMat::operator-(const RatMat& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw InternalError("matsub: size mismatch");
  RatMat r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - rhs.data_[i];
  return r;
}

RatMat RatMat::scaled(const Rat& s) const {
  RatMat r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = s * data_[i];
  return r;
}

bool RatMat::is_zero() const {
  for (const auto& q : data_)
    if (sgn(q) != 0) return false;
  return true;
}

int exact_rank(const RatMat& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  if (rows == 0 || cols == 0) return 0;
  // Clear denominators rowwise, then run integer Bareiss elimination.
  std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    mpz_class lcm(1);
    for (std::size_t j = 0; j < cols; ++j)
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), m(i, j).get_den().get_mpz_t());
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = m(i, j).get_num() * (lcm / m(i, j).get_den());
  }
  mpz_class prev(1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  return static_cast<int>(r);
}

std::vector<std::size_t> rref_in_place(RatMat& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t piv = r;
    while (piv < m.rows() && sgn(m(piv, c)) == 0) ++piv;
    if (piv == m.rows()) continue;
    if (piv != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(r, j));
    Rat inv = Rat(1) / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || sgn(m(i, c)) == 0) continue;
      Rat f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<RatVec> null_space(const RatMat& m) {
  RatMat r = m;
  auto pivots = rref_in_place(r);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<RatVec> basis;
  for (std::size_t free_c = 0; free_c < m.cols(); ++free_c) {
    if (is_pivot[free_c]) continue;
    RatVec v(m.cols(), Rat(0));
    v[free_c] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -r(k, free_c);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<RatVec> row_space_basis(const RatMat& m) {
  RatMat r = m;
  auto pivots = rref_in_place(r);
  std::vector<RatVec> basis;
  for (std::size_t k = 0; k < pivots.size(); ++k) basis.push_back(r.row(k));
  return basis;
}

std::optional<RatVec> solve_linear(const RatMat& m, const RatVec& b) {
  if (m.rows() != b.size()) throw InternalError("solve_linear: size mismatch");
  RatMat aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  auto pivots = rref_in_place(aug);
  for (auto c : pivots)
    if (c == m.cols()) return std::nullopt;  // pivot in the RHS column: inconsistent
  RatVec x(m.cols(), Rat(0));
  for (std::size_t k = 0; k < pivots.size(); ++k) x[pivots[k]] = aug(k, m.cols());
  return x;
}

RatMat projection_onto_span(const std::vector<RatVec>& basis) {
  if (basis.empty()) throw PreconditionViolation("projection_onto_span: empty basis");
  RatMat B = RatMat::from_rows(basis);
  RatMat G = B * B.transposed();
  auto Ginv = inverse(G);
  if (!Ginv) throw PreconditionViolation("projection_onto_span: basis not independent");
  return B.transposed() * (*Ginv) * B;
}

std::vector<std::pair<RatVec, RatVec>> rank_one_decomposition(const RatMat& m) {
  std::vector<std::pair<RatVec, RatVec>> terms;
  RatMat rem = m;
  while (!rem.is_zero()) {
    std::size_t pi = 0, pj = 0;
    bool found = false;
    for (std::size_t i = 0; i < rem.rows() && !found; ++i)
      for (std::size_t j = 0; j < rem.cols() && !found; ++j)
        if (sgn(rem(i, j)) != 0) {
          pi = i;
          pj = j;
          found = true;
        }
    RatVec c = rem.col(pj), r = rem.row(pi);
    Rat inv = Rat(1) / rem(pi, pj);
    for (auto& q : c) q *= inv;
    for (std::size_t i = 0; i < rem.rows(); ++i)
      for (std::size_t j = 0; j < rem.cols(); ++j) rem(i, j) -= c[i] * r[j];
    terms.emplace_back(std::move(c), std::move(r));
  }
  return terms;
}

std::optional<RatMat> inverse(const RatMat& m) {
  if (m.rows() != m.cols()) throw InternalError("inverse: not square");
  std::size_t n = m.rows();
  RatMat aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  auto pivots = rref_in_place(aug);
  if (pivots.size() != n || pivots.back() != n - 1) {
    for (std::size_t k = 0; k < pivots.size(); ++k)
      if (pivots[k] >= n) return std::nullopt;
    if (pivots.size() != n) return std::nullopt;
  }
  RatMat inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

}  // namespace relupoly

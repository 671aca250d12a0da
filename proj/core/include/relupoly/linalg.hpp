#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "relupoly/rational.hpp"

namespace relupoly {

// Dense rational matrix, row-major. Small sizes only; everything is exact.
class RatMat {
 public:
  RatMat() : rows_(0), cols_(0) {}
  RatMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Rat(0)) {}

  static RatMat identity(std::size_t n);
  static RatMat zero(std::size_t rows, std::size_t cols) { return RatMat(rows, cols); }
  static RatMat from_rows(const std::vector<RatVec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rat& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rat& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RatVec row(std::size_t i) const;
  RatVec col(std::size_t j) const;
  void set_row(std::size_t i, const RatVec& v);
  void set_col(std::size_t j, const RatVec& v);

  RatMat transposed() const;
  RatMat operator*(const RatMat& rhs) const;
  RatVec operator*(const RatVec& v) const;
  RatMat operator+(const RatMat& rhs) const;
  RatMat operator-(const RatMat& rhs) const;
  RatMat scaled(const Rat& s) const;
  bool operator==(const RatMat& rhs) const { return rows_ == rhs.rows_ && cols_ == rhs.cols_ && data_ == rhs.data_; }
  bool is_zero() const;

 private:
  std::size_t rows_, cols_;
  std::vector<Rat> data_;
};

// Rank over Q via fraction-free (Bareiss) elimination.
int exact_rank(const RatMat& m);

// Reduced row echelon form; returns pivot column indices.
std::vector<std::size_t> rref_in_place(RatMat& m);

// Basis of the null space {x : Mx = 0}, one vector per free column.
std::vector<RatVec> null_space(const RatMat& m);

// Basis of the row space (subset of reduced rows).
std::vector<RatVec> row_space_basis(const RatMat& m);

// Solves Mx = b exactly; nullopt if inconsistent. When underdetermined, free
// variables are set to zero.
std::optional<RatVec> solve_linear(const RatMat& m, const RatVec& b);

// Orthogonal projection matrix onto span(basis vectors), P = B^T (B B^T)^-1 B.
RatMat projection_onto_span(const std::vector<RatVec>& basis);

// Writes M as a sum of rank-one terms c_t * r_t^T; the number of terms is rank(M).
std::vector<std::pair<RatVec, RatVec>> rank_one_decomposition(const RatMat& m);

// Inverse of a square nonsingular matrix; nullopt if singular.
std::optional<RatMat> inverse(const RatMat& m);

}  // namespace relupoly

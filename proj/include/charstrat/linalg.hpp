#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "charstrat/field.hpp"

namespace charstrat {

using Vector = std::vector<Elem>;

// Dense row-major matrix over one field.
class Matrix {
 public:
  Matrix() = default;
  Matrix(Field field, std::size_t rows, std::size_t cols);

  static Matrix identity(Field field, std::size_t n);
  static Matrix from_rows(Field field, const std::vector<Vector>& rows, std::size_t cols = 0);
  static Matrix from_columns(Field field, std::size_t rows, const std::vector<Vector>& cols);
  static Matrix from_ints(Field field, const std::vector<std::vector<long long>>& rows);

  Field field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  const Elem& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, const Elem& v);

  Vector row(std::size_t r) const;
  Vector column(std::size_t c) const;

  Matrix transpose() const;
  Matrix operator*(const Matrix& o) const;
  Vector operator*(const Vector& v) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  friend bool operator==(const Matrix& a, const Matrix& b);

  bool is_zero() const;
  // Rows [r0, r0+nr) and columns [c0, c0+nc).
  Matrix block(std::size_t r0, std::size_t nr, std::size_t c0, std::size_t nc) const;
  std::string to_string() const;

 private:
  Field field_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Elem> data_;
};

struct RankProfile {
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_columns;
  // Basis of {v : Mv = 0}, one vector per non-pivot column.
  std::vector<Vector> kernel_basis;
  // (rows - rank) x rows, full row rank, annihilates M from the left.
  Matrix cokernel_projection;
};

RankProfile rank_profile(const Matrix& m);
std::size_t rank(const Matrix& m);
// Reduced row echelon form, pivots chosen as the first nonzero entry in column order.
Matrix rref(const Matrix& m, std::vector<std::size_t>* pivots = nullptr);
std::optional<Vector> solve_linear(const Matrix& a, const Vector& b);
std::optional<Matrix> inverse(const Matrix& m);

// Rank of a rows x cols matrix of encoded finite-field elements; destroys data.
std::size_t rank_raw(const FiniteOps& ops, std::uint32_t* data, std::size_t rows, std::size_t cols);

// Throws FieldMismatch unless every entry belongs to `field`.
void check_field(const Field& field, const Vector& v);

}  // namespace charstrat

#pragma once

#include <cstdint>
#include <vector>

#include "charstrat/poly.hpp"

namespace charstrat {

// rows x cols matrix of polynomials in a common set of variables.
using PolyMatrix = std::vector<std::vector<Polynomial>>;

struct IntrinsicDiff {
  Vector point;
  std::size_t corank = 0;
  Matrix kernel;           // source_dim x dimK, columns span ker alpha(x)
  Matrix cokernel_proj;    // dimC x target_dim, rows descend to a basis of coker alpha(x)
  std::vector<Matrix> tensor;  // one dimC x dimK matrix per source direction

  std::size_t dim_kernel() const { return kernel.cols(); }
  std::size_t dim_cokernel() const { return cokernel_proj.rows(); }
  // The tensor as a linear map T_X(x) -> Hom(K, C): (dimC*dimK) x n.
  Matrix as_linear_map() const;
};

// Bilinear map K x K -> C, stored as one dimK x dimK matrix per cokernel coordinate.
struct SecondDiff {
  IntrinsicDiff base;
  std::vector<Matrix> forms;

  // u -> B(u, .) as a (dimC*dimK) x dimK matrix.
  Matrix as_linear_map() const;
};

struct SymbolClass {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const SymbolClass& a, const SymbolClass& b) { return a.i == b.i && a.j == b.j; }
};

IntrinsicDiff intrinsic_differential_at(const PolyMatrix& alpha, const Vector& x);

// Caches the first and second partials of a map for repeated pointwise queries.
class PointClassifier {
 public:
  explicit PointClassifier(PolyMap f);

  const PolyMap& map() const { return f_; }
  Matrix jacobian_at(const Vector& x) const;
  std::vector<Matrix> hessian_at(const Vector& x) const;

  std::size_t corank(const Vector& x) const;
  IntrinsicDiff intrinsic(const Vector& x) const;
  SecondDiff second(const Vector& x) const;
  SymbolClass symbol(const Vector& x) const;
  bool bad_locus(const Vector& x) const;

 private:
  void check_point(const Vector& x) const;

  PolyMap f_;
  PolyMatrix jac_;
  std::vector<PolyMatrix> hess_;  // per component, upper triangle filled symmetrically
};

std::size_t corank_at(const PolyMap& f, const Vector& x);
SecondDiff second_intrinsic_differential_at(const PolyMap& f, const Vector& x);
SymbolClass symbol_at(const PolyMap& f, const Vector& x);
bool bad_locus_member(const PolyMap& f, const Vector& x);

// Exhaustive scan of all rational points of a finite field (q^n <= limit).
struct PointScan {
  std::uint64_t points = 0;
  std::uint64_t critical = 0;     // corank >= 1
  std::uint64_t bad = 0;          // corank >= 1 and in the bad locus
  std::vector<Vector> bad_points;
};

PointScan scan_critical_points(const PolyMap& f, std::uint64_t limit = std::uint64_t{1} << 24);

// Number of rational points of corank >= 1 for a map from the plane (n = 2),
// counted fiber by fiber through gcds of the maximal minors of the Jacobian.
std::uint64_t count_critical_points_plane(const PolyMap& f);

}  // namespace charstrat

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "charstrat/poly.hpp"

namespace charstrat {

// Finite-dimensional space of maps A^n -> A^r spanned by `basis`.
struct LinearSystem {
  Field field;
  std::size_t n = 0;
  std::size_t r = 0;
  std::vector<PolyMap> basis;

  LinearSystem() = default;
  LinearSystem(Field f, std::size_t n_, std::size_t r_, std::vector<PolyMap> b);

  std::size_t dim() const { return basis.size(); }

  // Maps with a single nonzero component equal to a monomial of degree <= d.
  static LinearSystem monomials(Field field, std::size_t n, std::size_t r, unsigned d);
  // "monomials(n,r,d)".
  static LinearSystem parse(Field field, std::string_view text);
};

// r * (1 + n + n(n+1)/2); diagonal coordinates kept in every characteristic.
std::size_t jet2_dimension(std::size_t n, std::size_t r);

// Coefficients of F(x0 + y) mod <y>^3, component by component, monomials in grevlex order.
Vector jet2_coordinates(const PolyMap& f, const Vector& x0);

struct SeparationAtPoint {
  Vector point;
  std::size_t rank = 0;
  bool surjective = false;
};

struct SeparationReport {
  std::size_t jet_dim = 0;
  std::size_t system_dim = 0;
  std::vector<SeparationAtPoint> points;
  bool separates = false;
};

SeparationReport separates_order2(const LinearSystem& w, const std::vector<Vector>& points);

// sum c_i basis_i, c_i uniform in the finite field or uniform integers in [-height, height] over Q.
PolyMap sample_member(const LinearSystem& w, std::uint64_t seed, long long height = 1);

}  // namespace charstrat

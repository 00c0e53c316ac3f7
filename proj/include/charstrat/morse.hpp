#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "charstrat/poly.hpp"

namespace charstrat {

// Substitution x_i -> images[i], taken modulo <x>^(N+1).
struct LocalAutomorphism {
  Field field;
  std::size_t nvars = 0;
  int N = 0;
  std::vector<Polynomial> images;
  std::size_t fixed_prefix = 0;

  static LocalAutomorphism identity(Field field, std::size_t nvars, int N, std::size_t fixed_prefix = 0);
  // Throws PreconditionViolated unless the invariants hold.
  static LocalAutomorphism from_images(Field field, std::size_t nvars, int N, std::vector<Polynomial> images,
                                       std::size_t fixed_prefix = 0);

  // phi(f) = f(images) mod <x>^(N+1).
  Polynomial apply(const Polynomial& f) const;
  TruncatedSeries apply(const TruncatedSeries& f) const;
  // a.then(b).apply(f) == b.apply(a.apply(f)).
  LocalAutomorphism then(const LocalAutomorphism& next) const;
  LocalAutomorphism inverse() const;
  Matrix linear_part() const;
  bool is_identity() const;
  void validate() const;
  std::vector<std::string> image_strings() const;
};

struct MilnorReport {
  bool certified = false;
  std::uint64_t mu = 0;
  // Smallest r >= 1 with <x>^r in jac(f); 0 when not certified.
  int r = 0;
  std::vector<Monomial> monomial_basis;
  int N_used = 0;
  // (N, dim k[x]/(jac(f) + <x>^N)) for every truncation examined.
  std::vector<std::pair<int, std::uint64_t>> dims;
};

MilnorReport milnor(const Polynomial& f, int N_max = 14);
// 2r; throws NotCertifiedFinite.
int determinacy_bound(const Polynomial& f, int N_max = 14);

struct QuadNormalForm {
  LocalAutomorphism phi;
  std::size_t rank = 0;
  bool extra_square = false;
  // phi(f) = q (+ x_{rank+1}^2 when extra_square) mod <x>^3.
  Polynomial q;
  // Characteristic != 2: the diagonal coefficients, each 1 or the fixed
  // non-square (finite fields) or a squarefree integer (Q).
  Vector coefficients;
  // Characteristic 2 over a field where the last pair x_{r-1} x_r keeps an
  // anisotropic part x_{r-1}^2 + c x_r^2.
  bool arf_term = false;
  // q is exactly sum x_i^2 (char != 2) or sum x_s x_{s+1} (char 2).
  bool closed_shape = true;
};

QuadNormalForm quad_normal_form(const Polynomial& f, int N);

struct MorseResult {
  LocalAutomorphism phi;
  Polynomial q;
  Polynomial h;
  std::size_t rank = 0;
  bool extra_square = false;
  bool arf_term = false;
  bool closed_shape = true;
  // The first `rank` fiber variables, as global indices.
  std::vector<std::size_t> q_vars;
};

// F in variables t_1..t_s (parameters, first) and x_1..x_m.
MorseResult morse_with_params(const Polynomial& F, std::size_t s, int N);

// phi with phi(g) = f mod <x>^(N+1), or nullopt if a solve fails.
std::optional<LocalAutomorphism> right_equiv_truncated(const Polynomial& f, const Polynomial& g, int N);

struct NormalFormReport {
  // Target coordinate order: reordering[l] is the original index of y_l.
  std::vector<std::size_t> reordering;
  // Values of the reordered components at x0.
  Vector constants;
  // New source coordinates as series in y = x - x0.
  std::vector<Polynomial> parameters;
  std::size_t j = 0;
  std::size_t rank = 0;
  Polynomial q;
  Polynomial h;
  // From the y-coordinates to the normal-form coordinates.
  LocalAutomorphism phi;
  int N = 0;
  bool extra_square = false;
  bool arf_term = false;
  bool verified = false;
};

NormalFormReport corank1_normal_form(const PolyMap& F, const Vector& x0, int N);

}  // namespace charstrat

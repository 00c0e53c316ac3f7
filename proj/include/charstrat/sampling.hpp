#pragma once

#include <cstddef>

#include "charstrat/morse.hpp"
#include "charstrat/poly.hpp"
#include "charstrat/rng.hpp"

namespace charstrat {

// Each monomial of degree in [lo, hi] is kept with probability `density`,
// with a uniformly random (height-bounded over Q) coefficient.
Polynomial random_polynomial(const Field& field, std::size_t nvars, unsigned lo, unsigned hi, double density, Rng& rng,
                             long long height = 3);

Matrix random_invertible(const Field& field, std::size_t n, Rng& rng);

// Map A^n -> A^r with Jacobian of rank `rk` at the origin: coordinate linear
// parts, random quadratic and sparse cubic terms, then random linear mixing of
// source and target.
PolyMap random_map_with_rank(const Field& field, std::size_t n, std::size_t r, std::size_t rk, Rng& rng);

// Random invertible linear part plus random terms of degree 2..N; the first
// `fixed_prefix` variables are left alone.
LocalAutomorphism random_automorphism(const Field& field, std::size_t nvars, int N, Rng& rng,
                                      std::size_t fixed_prefix = 0, double density = 0.3);

}  // namespace charstrat

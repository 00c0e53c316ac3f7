#include "charstrat/sampling.hpp"

namespace charstrat {

Polynomial random_polynomial(const Field& field, std::size_t nvars, unsigned lo, unsigned hi, double density, Rng& rng,
                             long long height) {
  std::vector<Term> terms;
  for (unsigned d = lo; d <= hi; ++d)
    for (const Monomial& m : Monomial::of_degree(nvars, d)) {
      if (rng.uniform() >= density) continue;
      Elem c = field.random(rng, height);
      if (!c.is_zero()) terms.push_back({m, std::move(c)});
    }
  return Polynomial::from_terms(field, nvars, std::move(terms));
}

Matrix random_invertible(const Field& field, std::size_t n, Rng& rng) {
  Matrix m(field, n, n);
  do {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.set(i, j, field.random(rng, 3));
  } while (rank(m) < n);
  return m;
}

PolyMap random_map_with_rank(const Field& field, std::size_t n, std::size_t r, std::size_t rk, Rng& rng) {
  std::vector<Polynomial> comps;
  for (std::size_t c = 0; c < r; ++c) {
    Polynomial p = random_polynomial(field, n, 2, 2, 1.0, rng) + random_polynomial(field, n, 3, 3, 1.0 / 3, rng);
    if (c < rk) p += Polynomial::variable(field, n, c);
    comps.push_back(p);
  }
  const Matrix a = random_invertible(field, n, rng), b = random_invertible(field, r, rng);
  std::vector<Polynomial> subs;
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial s(field, n);
    for (std::size_t j = 0; j < n; ++j) s += Polynomial::variable(field, n, j) * a.at(i, j);
    subs.push_back(s);
  }
  std::vector<Polynomial> mixed(r, Polynomial(field, n));
  for (std::size_t c = 0; c < r; ++c)
    for (std::size_t d = 0; d < r; ++d) mixed[c] += comps[d].compose(subs) * b.at(c, d);
  return PolyMap(field, n, mixed);
}

LocalAutomorphism random_automorphism(const Field& field, std::size_t nvars, int N, Rng& rng,
                                      std::size_t fixed_prefix, double density) {
  const std::size_t m = nvars - fixed_prefix;
  const Matrix L = random_invertible(field, m, rng);
  std::vector<Polynomial> images;
  for (std::size_t i = 0; i < nvars; ++i) {
    if (i < fixed_prefix) {
      images.push_back(Polynomial::variable(field, nvars, i));
      continue;
    }
    Polynomial img = random_polynomial(field, nvars, 2, static_cast<unsigned>(std::min(N, 3)), density, rng);
    for (std::size_t j = 0; j < m; ++j)
      if (!L.at(i - fixed_prefix, j).is_zero())
        img += Polynomial::variable(field, nvars, fixed_prefix + j) * L.at(i - fixed_prefix, j);
    // Parameters may enter the fiber images linearly too.
    for (std::size_t j = 0; j < fixed_prefix; ++j)
      if (rng.uniform() < density) img += Polynomial::variable(field, nvars, j) * field.random(rng, 3);
    images.push_back(img);
  }
  return LocalAutomorphism::from_images(field, nvars, N, std::move(images), fixed_prefix);
}

}  // namespace charstrat

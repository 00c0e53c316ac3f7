#include "charstrat/jets.hpp"

#include <regex>
#include <string>

#include "charstrat/rng.hpp"

namespace charstrat {

LinearSystem::LinearSystem(Field f, std::size_t n_, std::size_t r_, std::vector<PolyMap> b)
    : field(f), n(n_), r(r_), basis(std::move(b)) {
  for (const PolyMap& m : basis) {
    if (m.field != field) fail(ErrorCode::FieldMismatch, "basis maps over different fields");
    if (m.n != n || m.r != r) fail(ErrorCode::DimensionMismatch, "basis maps of different shapes");
  }
}

LinearSystem LinearSystem::monomials(Field field, std::size_t n, std::size_t r, unsigned d) {
  std::vector<PolyMap> basis;
  const Polynomial zero(field, n);
  for (std::size_t c = 0; c < r; ++c) {
    for (const Monomial& m : Monomial::up_to_degree(n, d)) {
      std::vector<Polynomial> comps(r, zero);
      comps[c] = Polynomial::monomial(field, n, m, field.one());
      basis.emplace_back(field, n, std::move(comps));
    }
  }
  return LinearSystem(field, n, r, std::move(basis));
}

LinearSystem LinearSystem::parse(Field field, std::string_view text) {
  static const std::regex re(R"(\s*monomials\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*)");
  std::cmatch m;
  if (!std::regex_match(text.begin(), text.end(), m, re)) {
    fail(ErrorCode::ParseError, "expected monomials(n,r,d), got \"" + std::string(text) + "\"");
  }
  const auto n = std::stoul(m[1]), r = std::stoul(m[2]), d = std::stoul(m[3]);
  if (n > kMaxVars || d > 64 || r > 64) fail(ErrorCode::Unsupported, "linear system too large");
  return monomials(field, n, r, static_cast<unsigned>(d));
}

std::size_t jet2_dimension(std::size_t n, std::size_t r) { return r * (1 + n + n * (n + 1) / 2); }

Vector jet2_coordinates(const PolyMap& f, const Vector& x0) {
  if (x0.size() != f.n) fail(ErrorCode::DimensionMismatch, "point has wrong dimension");
  check_field(f.field, x0);
  std::vector<Polynomial> subs;
  for (std::size_t i = 0; i < f.n; ++i) {
    subs.push_back(Polynomial::variable(f.field, f.n, i) + Polynomial::constant(f.field, f.n, x0[i]));
  }
  const auto mons = Monomial::up_to_degree(f.n, 2);
  Vector out;
  out.reserve(f.r * mons.size());
  for (const Polynomial& p : f.components) {
    const Polynomial s = p.compose(subs, 2);
    for (const Monomial& m : mons) out.push_back(s.coeff(m));
  }
  return out;
}

SeparationReport separates_order2(const LinearSystem& w, const std::vector<Vector>& points) {
  if (points.empty()) fail(ErrorCode::EmptySample, "no sample points");
  SeparationReport rep;
  rep.jet_dim = jet2_dimension(w.n, w.r);
  rep.system_dim = w.dim();
  rep.separates = true;
  for (const Vector& x : points) {
    std::vector<Vector> rows;
    rows.reserve(w.dim());
    for (const PolyMap& b : w.basis) rows.push_back(jet2_coordinates(b, x));
    SeparationAtPoint at;
    at.point = x;
    at.rank = rows.empty() ? 0 : rank(Matrix::from_rows(w.field, rows, rep.jet_dim));
    at.surjective = at.rank == rep.jet_dim;
    rep.separates = rep.separates && at.surjective;
    rep.points.push_back(std::move(at));
  }
  return rep;
}

PolyMap sample_member(const LinearSystem& w, std::uint64_t seed, long long height) {
  Rng rng(seed);
  std::vector<Polynomial> comps(w.r, Polynomial(w.field, w.n));
  for (const PolyMap& b : w.basis) {
    const Elem c = w.field.random(rng, height);
    if (c.is_zero()) continue;
    for (std::size_t k = 0; k < w.r; ++k) comps[k] += b.components[k] * c;
  }
  return PolyMap(w.field, w.n, std::move(comps));
}

}  // namespace charstrat

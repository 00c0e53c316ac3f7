#include "charstrat/morse.hpp"

#include <algorithm>
#include <unordered_map>

#include "charstrat/error.hpp"
#include "charstrat/strata.hpp"

namespace charstrat {

namespace {

using SparseRow = std::vector<std::pair<std::uint32_t, Elem>>;

// a - c * b on rows sorted by column.
SparseRow axpy(const SparseRow& a, const Elem& c, const SparseRow& b) {
  SparseRow out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, -(c * b[j].second));
      ++j;
    } else {
      Elem v = a[i].second - c * b[j].second;
      if (!v.is_zero()) out.emplace_back(a[i].first, std::move(v));
      ++i, ++j;
    }
  }
  return out;
}

// Semi-echelon basis of a span of polynomials modulo <x>^(D+1). Columns run
// from the largest monomial down, so pivots are leading monomials and the
// non-pivot columns are standard monomials of the quotient. Optionally keeps
// for each row its expression in the generators.
class SpanEchelon {
 public:
  SpanEchelon(Field field, std::size_t nvars, int D, std::size_t ngens, bool track)
      : field_(field), nvars_(nvars), D_(D), ngens_(ngens), track_(track) {
    mons_ = Monomial::up_to_degree(nvars, static_cast<unsigned>(std::max(D, 0)));
    std::reverse(mons_.begin(), mons_.end());
    for (std::uint32_t c = 0; c < mons_.size(); ++c) index_.emplace(mons_[c].bits(), c);
    pivots_.resize(mons_.size());
  }

  std::size_t rank() const { return rank_; }
  std::size_t columns() const { return mons_.size(); }
  bool is_pivot(std::size_t c) const { return pivots_[c].has_value(); }
  const Monomial& monomial(std::size_t c) const { return mons_[c]; }

  void add(const Polynomial& p, std::vector<Polynomial> prov) {
    Row row{to_row(p), std::move(prov)};
    while (!row.e.empty() && pivots_[row.e.front().first]) eliminate_lead(row);
    if (row.e.empty()) return;
    const Elem inv = row.e.front().second.inv();
    for (auto& [c, v] : row.e) v = v * inv;
    if (track_)
      for (auto& g : row.prov) g = g * inv;
    const auto lead = row.e.front().first;
    pivots_[lead] = std::move(row);
    ++rank_;
  }

  // p = sum coeffs[i] * gen_i + remainder mod <x>^(D+1), remainder on non-pivot monomials.
  std::pair<Polynomial, std::vector<Polynomial>> reduce(const Polynomial& p) const {
    Row row{to_row(p), std::vector<Polynomial>(track_ ? ngens_ : 0, Polynomial(field_, nvars_))};
    std::vector<Term> rem;
    while (!row.e.empty()) {
      if (pivots_[row.e.front().first]) {
        const Elem c = row.e.front().second;
        const Row& piv = *pivots_[row.e.front().first];
        row.e = axpy(row.e, c, piv.e);
        if (track_)
          for (std::size_t g = 0; g < ngens_; ++g) row.prov[g] += piv.prov[g] * c;
      } else {
        rem.push_back({mons_[row.e.front().first], row.e.front().second});
        row.e.erase(row.e.begin());
      }
    }
    return {Polynomial::from_terms(field_, nvars_, std::move(rem)), std::move(row.prov)};
  }

 private:
  struct Row {
    SparseRow e;
    std::vector<Polynomial> prov;
  };

  SparseRow to_row(const Polynomial& p) const {
    SparseRow r;
    for (const Term& t : p.terms())
      if (static_cast<int>(t.m.degree()) <= D_) r.emplace_back(index_.at(t.m.bits()), t.c);
    std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return r;
  }

  void eliminate_lead(Row& row) const {
    const Elem c = row.e.front().second;
    const Row& piv = *pivots_[row.e.front().first];
    row.e = axpy(row.e, c, piv.e);
    if (track_)
      for (std::size_t g = 0; g < ngens_; ++g) row.prov[g] -= piv.prov[g] * c;
  }

  Field field_;
  std::size_t nvars_;
  int D_;
  std::size_t ngens_;
  bool track_;
  std::vector<Monomial> mons_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
  std::vector<std::optional<Row>> pivots_;
  std::size_t rank_ = 0;
};

// Span of {m * g_i : lo <= deg m, deg(m * g_i) reaches at most D} modulo <x>^(D+1).
SpanEchelon ideal_span(const std::vector<Polynomial>& gens, std::size_t nvars, int D, int lo, bool track) {
  const Field field = gens.front().field();
  SpanEchelon span(field, nvars, D, gens.size(), track);
  for (int deg = std::max(lo, 0); deg <= D; ++deg)
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const Polynomial g = gens[i].truncated(D);
      if (g.is_zero() || g.order() + deg > D) continue;
      for (const Monomial& m : Monomial::of_degree(nvars, static_cast<unsigned>(deg))) {
        const Polynomial mono = Polynomial::monomial(field, nvars, m, field.one());
        std::vector<Polynomial> prov;
        if (track) {
          prov.assign(gens.size(), Polynomial(field, nvars));
          prov[i] = mono;
        }
        span.add(mono.mul(g, D), std::move(prov));
      }
    }
  return span;
}

std::vector<Polynomial> gradient(const Polynomial& f) {
  std::vector<Polynomial> g;
  for (std::size_t i = 0; i < f.nvars(); ++i) g.push_back(f.derive(i));
  return g;
}

Polynomial var(const Field& f, std::size_t n, std::size_t i) { return Polynomial::variable(f, n, i); }

Elem quad_coeff(const Polynomial& f, std::size_t i, std::size_t j) {
  return f.coeff(Monomial::var(i) * Monomial::var(j));
}

// Automorphism sending x_{first+i} to sum_j cols[j][i] x_{first+j}: the new
// variable y_j is the coordinate along basis vector cols[j].
LocalAutomorphism block_linear(const Field& field, std::size_t n, int N, std::size_t first,
                               const std::vector<Vector>& cols, std::size_t fixed_prefix) {
  std::vector<Polynomial> images;
  for (std::size_t v = 0; v < n; ++v) images.push_back(var(field, n, v));
  const std::size_t m = cols.size();
  for (std::size_t i = 0; i < m; ++i) {
    Polynomial img(field, n);
    for (std::size_t j = 0; j < m; ++j)
      if (!cols[j][i].is_zero()) img += var(field, n, first + j) * cols[j][i];
    images[first + i] = img;
  }
  return LocalAutomorphism::from_images(field, n, N, std::move(images), fixed_prefix);
}

// Smallest non-square of an odd finite field.
Elem non_square(const Field& field) {
  for (std::uint32_t a = 2; a < field.cardinality(); ++a) {
    const Elem e = field.element(a);
    if (!e.is_square()) return e;
  }
  fail(ErrorCode::Unsupported, "no non-square in " + field.name());
}

// Absolute trace to F_2 of an element of F_{2^k}.
bool trace_one(const Elem& x) {
  Elem s = x, y = x;
  for (unsigned i = 1; i < x.field().degree(); ++i) {
    y = y * y;
    s = s + y;
  }
  return !s.is_zero();
}

Elem trace_one_element(const Field& field) {
  for (std::uint32_t a = 1; a < field.cardinality(); ++a)
    if (trace_one(field.element(a))) return field.element(a);
  fail(ErrorCode::Unsupported, "no trace-one element");
}

// A root of z^2 + z = c in F_{2^k}: the map is F_2-linear on the coefficient bits.
std::optional<Elem> artin_schreier_root(const Elem& c) {
  const Field field = c.field();
  const unsigned k = field.degree();
  std::vector<std::uint32_t> cols(k);
  for (unsigned i = 0; i < k; ++i) {
    const Elem b = field.element(1u << i);
    cols[i] = (b * b + b).index();
  }
  // Solve sum_i z_i cols[i] = c by elimination on augmented bit rows.
  std::vector<std::uint64_t> rows(k, 0);
  for (unsigned r = 0; r < k; ++r) {
    for (unsigned i = 0; i < k; ++i)
      if (cols[i] >> r & 1) rows[r] |= std::uint64_t{1} << i;
    if (c.index() >> r & 1) rows[r] |= std::uint64_t{1} << k;
  }
  std::vector<int> pivot_row(k, -1);
  unsigned rank = 0;
  for (unsigned col = 0; col < k && rank < k; ++col) {
    unsigned sel = rank;
    while (sel < k && !(rows[sel] >> col & 1)) ++sel;
    if (sel == k) continue;
    std::swap(rows[sel], rows[rank]);
    for (unsigned r = 0; r < k; ++r)
      if (r != rank && (rows[r] >> col & 1)) rows[r] ^= rows[rank];
    pivot_row[col] = static_cast<int>(rank++);
  }
  for (unsigned r = rank; r < k; ++r)
    if (rows[r] >> k & 1) return std::nullopt;
  std::uint32_t z = 0;
  for (unsigned col = 0; col < k; ++col)
    if (pivot_row[col] >= 0 && (rows[static_cast<std::size_t>(pivot_row[col])] >> k & 1)) z |= 1u << col;
  return field.element(z);
}

// Squarefree part s of a nonzero rational c together with w such that c = s w^2.
std::pair<mpz_class, mpq_class> squarefree_split(const mpq_class& c) {
  mpz_class n = c.get_num() * c.get_den();
  const int sign = sgn(n);
  n = abs(n);
  mpz_class s = 1, w = 1;
  if (n > mpz_class("1000000000000")) {
    s = n;
  } else {
    for (mpz_class d = 2; d * d <= n; ++d) {
      while (n % (d * d) == 0) {
        n /= d * d;
        w *= d;
      }
      if (n % d == 0) {
        n /= d;
        s *= d;
      }
    }
    s *= n;
  }
  // c = num/den = num*den/den^2 = sign * s * (w/den)^2.
  mpq_class ratio(w, c.get_den());
  ratio.canonicalize();
  return {sign * s, ratio};
}

struct Vec {
  static Vector unit(const Field& f, std::size_t m, std::size_t i) {
    Vector v(m, f.zero());
    v[i] = f.one();
    return v;
  }
  static Vector axpy(const Vector& a, const Elem& c, const Vector& b) {
    Vector out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += c * b[i];
    return out;
  }
  static Vector scale(const Vector& a, const Elem& c) {
    Vector out = a;
    for (auto& x : out) x = x * c;
    return out;
  }
};

QuadNormalForm quad_block_odd(const Polynomial& f, std::size_t first, std::size_t m, int N, std::size_t fixed_prefix) {
  const Field field = f.field();
  const std::size_t n = f.nvars();
  const Elem two = field.from_int(2);
  // Gram matrix S and basis vectors (columns of P) transformed in step.
  std::vector<Vector> S(m, Vector(m, field.zero()));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      S[i][j] = i == j ? quad_coeff(f, first + i, first + i) : quad_coeff(f, first + i, first + j) / two;
  std::vector<Vector> P;
  for (std::size_t i = 0; i < m; ++i) P.push_back(Vec::unit(field, m, i));
  auto add_to = [&](std::size_t dst, std::size_t src, const Elem& c) {
    // Basis vector dst += c * basis vector src (congruence on S).
    P[dst] = Vec::axpy(P[dst], c, P[src]);
    for (std::size_t k = 0; k < m; ++k) S[dst][k] += c * S[src][k];
    for (std::size_t k = 0; k < m; ++k) S[k][dst] += c * S[k][src];
  };
  auto swap_basis = [&](std::size_t a, std::size_t b) {
    std::swap(P[a], P[b]);
    std::swap(S[a], S[b]);
    for (auto& row : S) std::swap(row[a], row[b]);
  };
  std::size_t rank = 0;
  for (; rank < m; ++rank) {
    std::size_t piv = m;
    for (std::size_t i = rank; i < m && piv == m; ++i)
      if (!S[i][i].is_zero()) piv = i;
    if (piv == m) {
      for (std::size_t i = rank; i < m && piv == m; ++i)
        for (std::size_t j = i + 1; j < m && piv == m; ++j)
          if (!S[i][j].is_zero()) {
            add_to(i, j, field.one());
            piv = i;
          }
    }
    if (piv == m) break;
    swap_basis(rank, piv);
    const Elem inv = S[rank][rank].inv();
    for (std::size_t j = rank + 1; j < m; ++j)
      if (!S[j][rank].is_zero()) add_to(j, rank, -(S[j][rank] * inv));
  }

  QuadNormalForm out;
  out.rank = rank;
  const bool finite = field.is_finite();
  const Elem eps = finite ? non_square(field) : field.one();
  out.q = Polynomial(field, n);
  for (std::size_t k = 0; k < rank; ++k) {
    const Elem c = S[k][k];
    Elem target, scale;
    if (finite) {
      if (auto s = c.sqrt()) {
        target = field.one();
        scale = s->inv();
      } else {
        target = eps;
        scale = (*(c / eps).sqrt()).inv();
      }
    } else {
      auto [sf, w] = squarefree_split(c.rational());
      target = field.from_rational(mpq_class(sf));
      scale = field.from_rational(w).inv();
    }
    // c (scale y)^2 = target y^2.
    P[k] = Vec::scale(P[k], scale);
    out.coefficients.push_back(target);
    if (!target.is_one()) out.closed_shape = false;
    out.q += Polynomial::monomial(field, n, Monomial::var(first + k, 2), target);
  }
  out.phi = block_linear(field, n, N, first, P, fixed_prefix);
  return out;
}

QuadNormalForm quad_block_char2(const Polynomial& f, std::size_t first, std::size_t m, int N,
                                std::size_t fixed_prefix) {
  const Field field = f.field();
  const std::size_t n = f.nvars();
  std::vector<Elem> a(m);
  std::vector<Vector> b(m, Vector(m, field.zero()));
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = quad_coeff(f, first + i, first + i);
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) b[i][j] = quad_coeff(f, first + i, first + j);
  }
  auto Q = [&](const Vector& v) {
    Elem s = field.zero();
    for (std::size_t i = 0; i < m; ++i) {
      s += a[i] * v[i] * v[i];
      for (std::size_t j = i + 1; j < m; ++j) s += b[i][j] * v[i] * v[j];
    }
    return s;
  };
  auto B = [&](const Vector& u, const Vector& v) {
    Elem s = field.zero();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j) s += b[i][j] * u[i] * v[j];
    return s;
  };
  using Pair = std::pair<Vector, Vector>;
  // Symplectic Gram-Schmidt: pairs with B(e, f) = 1 and a radical.
  auto split = [&](std::vector<Vector> W, std::vector<Pair>& pairs) {
    for (;;) {
      std::size_t iu = W.size(), iw = W.size();
      for (std::size_t i = 0; i < W.size() && iu == W.size(); ++i)
        for (std::size_t j = i + 1; j < W.size(); ++j)
          if (!B(W[i], W[j]).is_zero()) {
            iu = i, iw = j;
            break;
          }
      if (iu == W.size()) return W;
      const Vector e = W[iu];
      const Vector g = Vec::scale(W[iw], B(W[iu], W[iw]).inv());
      std::vector<Vector> rest;
      for (std::size_t k = 0; k < W.size(); ++k) {
        if (k == iu || k == iw) continue;
        Vector w = Vec::axpy(W[k], -B(W[k], g), e);
        w = Vec::axpy(w, B(W[k], e), g);
        rest.push_back(w);
      }
      pairs.emplace_back(e, g);
      W = std::move(rest);
    }
  };
  // Make Q vanish on both vectors of a pair with Arf invariant 0.
  auto hyperbolic = [&](Pair p) {
    auto& [e, g] = p;
    const Elem al = Q(e), be = Q(g);
    if (!al.is_zero()) {
      Elem t;
      if (be.is_zero()) {
        t = al;
      } else {
        const auto z = artin_schreier_root(al * be);
        if (!z) fail(ErrorCode::PreconditionViolated, "pair is anisotropic");
        t = *z / be;
      }
      e = Vec::axpy(e, t, g);
    }
    g = Vec::axpy(g, Q(g), e);
    return p;
  };

  std::vector<Vector> W;
  for (std::size_t i = 0; i < m; ++i) W.push_back(Vec::unit(field, m, i));
  std::vector<Pair> pairs;
  std::vector<Vector> radical = split(W, pairs);

  QuadNormalForm out;
  out.rank = 2 * pairs.size();
  std::vector<Vector> basis;
  std::optional<Vector> square;
  std::size_t star = radical.size();
  for (std::size_t i = 0; i < radical.size(); ++i)
    if (!Q(radical[i]).is_zero()) star = i;
  if (star < radical.size()) {
    // Q on the radical is the square of a linear form; split off one square.
    const Elem l0 = *Q(radical[star]).sqrt();
    const Vector z = Vec::scale(radical[star], l0.inv());
    std::vector<Vector> rest;
    for (std::size_t i = 0; i < radical.size(); ++i)
      if (i != star) rest.push_back(Vec::axpy(radical[i], *Q(radical[i]).sqrt(), z));
    for (auto& [e, g] : pairs) {
      e = Vec::axpy(e, *Q(e).sqrt(), z);
      g = Vec::axpy(g, *Q(g).sqrt(), z);
    }
    radical = std::move(rest);
    square = z;
  } else {
    std::vector<Pair> anisotropic;
    std::vector<Pair> done;
    for (auto& p : pairs) {
      if (trace_one(Q(p.first) * Q(p.second))) {
        anisotropic.push_back(p);
      } else {
        done.push_back(hyperbolic(p));
      }
    }
    // Normalize to Q(e) = 1, Q(g) = c with c the fixed trace-one element.
    const Elem c = anisotropic.empty() ? field.one() : trace_one_element(field);
    for (auto& [e, g] : anisotropic) {
      const Elem s = *Q(e).sqrt();
      e = Vec::scale(e, s.inv());
      g = Vec::scale(g, s);
      const auto t = artin_schreier_root(Q(g) + c);
      g = Vec::axpy(g, *t, e);
    }
    // Two anisotropic planes make two hyperbolic ones: e1 + e2 is isotropic.
    while (anisotropic.size() >= 2) {
      const Pair p1 = anisotropic.back();
      anisotropic.pop_back();
      const Pair p2 = anisotropic.back();
      anisotropic.pop_back();
      std::vector<Pair> sub;
      const auto left = split({Vec::axpy(p1.first, field.one(), p2.first), p1.second, p2.first, p2.second}, sub);
      if (!left.empty() || sub.size() != 2) fail(ErrorCode::PreconditionViolated, "plane recombination failed");
      for (auto& p : sub) done.push_back(hyperbolic(p));
    }
    pairs = std::move(done);
    if (!anisotropic.empty()) {
      pairs.push_back(anisotropic.front());
      out.arf_term = true;
      out.closed_shape = false;
    }
  }
  for (const auto& [e, g] : pairs) {
    basis.push_back(e);
    basis.push_back(g);
  }
  if (square) basis.push_back(*square);
  for (const auto& z : radical) basis.push_back(z);

  out.q = Polynomial(field, n);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::size_t u = first + 2 * k;
    out.q += Polynomial::monomial(field, n, Monomial::var(u) * Monomial::var(u + 1), field.one());
  }
  if (out.arf_term) {
    const std::size_t u = first + out.rank - 2;
    out.q += Polynomial::monomial(field, n, Monomial::var(u, 2), Q(basis[out.rank - 2]));
    out.q += Polynomial::monomial(field, n, Monomial::var(u + 1, 2), Q(basis[out.rank - 1]));
  }
  out.extra_square = square.has_value();
  out.phi = block_linear(field, n, N, first, basis, fixed_prefix);
  return out;
}

// Quadratic normalization of the x-block [first, first+m) of f restricted to the block.
QuadNormalForm quad_block(const Polynomial& f, std::size_t first, std::size_t m, int N, std::size_t fixed_prefix) {
  if (f.field().characteristic() == 2) return quad_block_char2(f, first, m, N, fixed_prefix);
  return quad_block_odd(f, first, m, N, fixed_prefix);
}

bool uses_any(const Monomial& mono, const std::vector<std::size_t>& vars) {
  for (std::size_t v : vars)
    if (mono[v] > 0) return true;
  return false;
}

}  // namespace

LocalAutomorphism LocalAutomorphism::identity(Field field, std::size_t nvars, int N, std::size_t fixed_prefix) {
  std::vector<Polynomial> images;
  for (std::size_t i = 0; i < nvars; ++i) images.push_back(var(field, nvars, i));
  return from_images(field, nvars, N, std::move(images), fixed_prefix);
}

LocalAutomorphism LocalAutomorphism::from_images(Field field, std::size_t nvars, int N, std::vector<Polynomial> images,
                                                 std::size_t fixed_prefix) {
  LocalAutomorphism phi;
  phi.field = field;
  phi.nvars = nvars;
  phi.N = N;
  for (auto& p : images) p = p.truncated(N);
  phi.images = std::move(images);
  phi.fixed_prefix = fixed_prefix;
  phi.validate();
  return phi;
}

void LocalAutomorphism::validate() const {
  if (N < 1) fail(ErrorCode::NotTruncatable, "automorphisms need N >= 1");
  if (images.size() != nvars) fail(ErrorCode::DimensionMismatch, "one image per variable");
  if (fixed_prefix > nvars) fail(ErrorCode::PreconditionViolated, "fixed prefix longer than the variable list");
  for (std::size_t i = 0; i < nvars; ++i) {
    if (images[i].field() != field || images[i].nvars() != nvars)
      fail(ErrorCode::FieldMismatch, "image in the wrong ring");
    if (!images[i].constant_term().is_zero()) fail(ErrorCode::PreconditionViolated, "image with constant term");
    if (i < fixed_prefix && images[i] != var(field, nvars, i))
      fail(ErrorCode::PreconditionViolated, "parameter variable not fixed");
  }
  if (rank(linear_part()) != nvars) fail(ErrorCode::PreconditionViolated, "linear part not invertible");
}

Polynomial LocalAutomorphism::apply(const Polynomial& f) const {
  if (f.nvars() != nvars) fail(ErrorCode::DimensionMismatch, "series in the wrong number of variables");
  return series_compose(f.truncated(N), images, N);
}

TruncatedSeries LocalAutomorphism::apply(const TruncatedSeries& f) const {
  const int n = std::min(N, f.trunc_order());
  return TruncatedSeries(series_compose(f.poly().truncated(n), images, n), n);
}

LocalAutomorphism LocalAutomorphism::then(const LocalAutomorphism& next) const {
  if (next.nvars != nvars || next.field != field) fail(ErrorCode::DimensionMismatch, "automorphisms of different rings");
  const int n = std::min(N, next.N);
  std::vector<Polynomial> comp;
  for (const auto& img : images) comp.push_back(series_compose(img, next.images, n));
  return from_images(field, nvars, n, std::move(comp), std::min(fixed_prefix, next.fixed_prefix));
}

LocalAutomorphism LocalAutomorphism::inverse() const {
  const Matrix L = linear_part();
  const auto Linv = charstrat::inverse(L);
  if (!Linv) fail(ErrorCode::PreconditionViolated, "linear part not invertible");
  std::vector<Polynomial> higher;
  for (const auto& img : images) higher.push_back(img.degree_range(2, static_cast<unsigned>(N)));
  auto apply_linv = [&](const std::vector<Polynomial>& v) {
    std::vector<Polynomial> out;
    for (std::size_t i = 0; i < nvars; ++i) {
      Polynomial s(field, nvars);
      for (std::size_t j = 0; j < nvars; ++j)
        if (!Linv->at(i, j).is_zero()) s += v[j] * Linv->at(i, j);
      out.push_back(s);
    }
    return out;
  };
  std::vector<Polynomial> xs;
  for (std::size_t i = 0; i < nvars; ++i) xs.push_back(var(field, nvars, i));
  std::vector<Polynomial> psi = apply_linv(xs);
  // psi = L^{-1}(x - H(psi)); each round fixes one more degree.
  for (int round = 1; round < N; ++round) {
    std::vector<Polynomial> rhs;
    for (std::size_t i = 0; i < nvars; ++i) rhs.push_back(xs[i] - series_compose(higher[i], psi, N));
    psi = apply_linv(rhs);
  }
  return from_images(field, nvars, N, std::move(psi), fixed_prefix);
}

Matrix LocalAutomorphism::linear_part() const {
  Matrix m(field, nvars, nvars);
  for (std::size_t i = 0; i < nvars; ++i)
    for (std::size_t j = 0; j < nvars; ++j) m.set(i, j, images[i].coeff(Monomial::var(j)));
  return m;
}

bool LocalAutomorphism::is_identity() const {
  for (std::size_t i = 0; i < nvars; ++i)
    if (images[i] != var(field, nvars, i)) return false;
  return true;
}

std::vector<std::string> LocalAutomorphism::image_strings() const {
  std::vector<std::string> out;
  for (const auto& p : images) out.push_back(p.to_string());
  return out;
}

MilnorReport milnor(const Polynomial& f, int N_max) {
  if (!f.constant_term().is_zero()) fail(ErrorCode::NonzeroConstant, "Milnor number needs f(0) = 0");
  const std::size_t n = f.nvars();
  const auto grad = gradient(f);
  MilnorReport rep;
  if (std::all_of(grad.begin(), grad.end(), [](const Polynomial& g) { return g.is_zero(); })) {
    for (int N = 1; N <= N_max; ++N)
      rep.dims.emplace_back(N, Monomial::up_to_degree(n, static_cast<unsigned>(N - 1)).size());
    return rep;
  }
  // dims[N] = dim k[x]/(jac + <x>^N) from the span modulo <x>^N.
  auto dim_at = [&](int N) {
    const SpanEchelon s = ideal_span(grad, n, N - 1, 0, false);
    return static_cast<std::uint64_t>(s.columns() - s.rank());
  };
  for (int r = 1; r < N_max; ++r) {
    rep.dims.emplace_back(r, dim_at(r));
    // <x>^r inside jac + <x>^(r+1) gives <x>^r inside jac by Nakayama.
    const SpanEchelon s = ideal_span(grad, n, r, 0, false);
    bool all = true;
    for (const Monomial& m : Monomial::of_degree(n, static_cast<unsigned>(r))) {
      if (!s.reduce(Polynomial::monomial(f.field(), n, m, f.field().one())).first.is_zero()) {
        all = false;
        break;
      }
    }
    if (!all) continue;
    rep.dims.emplace_back(r + 1, s.columns() - s.rank());
    rep.certified = true;
    rep.r = r;
    rep.N_used = r + 1;
    const SpanEchelon below = ideal_span(grad, n, r - 1, 0, false);
    for (std::size_t c = 0; c < below.columns(); ++c)
      if (!below.is_pivot(c)) rep.monomial_basis.push_back(below.monomial(c));
    std::sort(rep.monomial_basis.begin(), rep.monomial_basis.end(), GrevlexLess());
    rep.mu = rep.monomial_basis.size();
    return rep;
  }
  rep.dims.emplace_back(N_max, dim_at(N_max));
  rep.N_used = N_max;
  return rep;
}

int determinacy_bound(const Polynomial& f, int N_max) {
  const auto rep = milnor(f, N_max);
  if (!rep.certified)
    fail(ErrorCode::NotCertifiedFinite, "Milnor number not certified up to N = " + std::to_string(N_max));
  return 2 * rep.r;
}

QuadNormalForm quad_normal_form(const Polynomial& f, int N) {
  if (!f.constant_term().is_zero()) fail(ErrorCode::NonzeroConstant, "f must vanish at 0");
  if (!f.homogeneous_part(1).is_zero()) fail(ErrorCode::OrderTooLow, "f has a linear term");
  if (N < 2) fail(ErrorCode::NotTruncatable, "need N >= 2");
  return quad_block(f, 0, f.nvars(), N, 0);
}

MorseResult morse_with_params(const Polynomial& F, std::size_t s, int N) {
  if (N < 2) fail(ErrorCode::NotTruncatable, "need N >= 2");
  const Field field = F.field();
  const std::size_t n = F.nvars();
  if (s > n) fail(ErrorCode::DimensionMismatch, "more parameters than variables");
  const std::size_t m = n - s;
  // Reduction at t = 0 must have no linear x-part.
  Polynomial reduced = F.truncated(N);
  for (std::size_t i = 0; i < s; ++i) reduced = reduced.partial_evaluate(i, field.zero());
  if (!reduced.homogeneous_part(1).is_zero()) fail(ErrorCode::OrderTooLow, "linear term in the fiber variables");

  const QuadNormalForm quad = quad_block(reduced.homogeneous_part(2), s, m, N, s);
  MorseResult out;
  out.rank = quad.rank;
  out.extra_square = quad.extra_square;
  out.arf_term = quad.arf_term;
  out.closed_shape = quad.closed_shape;
  out.q = quad.q;
  for (std::size_t k = 0; k < quad.rank; ++k) out.q_vars.push_back(s + k);
  LocalAutomorphism phi = quad.phi;
  Polynomial cur = phi.apply(F);

  const bool char2 = field.characteristic() == 2;
  // d q / d x_v as a monomial multiple: char 2 pairs x_v with its partner.
  auto partner = [&](std::size_t v) { return char2 ? (((v - s) % 2 == 0) ? v + 1 : v - 1) : v; };
  std::vector<Elem> dq(n, field.zero());
  for (std::size_t v : out.q_vars)
    dq[v] = char2 ? field.one() : quad.coefficients[v - s] * field.from_int(2);

  for (int pass = 0;; ++pass) {
    if (pass > 4 * N + 4) fail(ErrorCode::Unsupported, "term elimination did not converge");
    std::vector<Polynomial> g(n, Polynomial(field, n));
    bool any = false;
    const Polynomial excess = cur - out.q;
    for (const Term& t : excess.terms()) {
      std::size_t hit = n;
      for (std::size_t v : out.q_vars)
        if (t.m[v] > 0) {
          hit = v;
          break;
        }
      if (hit == n) continue;
      // t = (t / x_hit) * d q / d x_partner(hit), up to the constant dq.
      const std::size_t sub = partner(hit);
      g[sub] += Polynomial::monomial(field, n, Monomial::var(hit).quotient_of(t.m), t.c / dq[sub]);
      any = true;
    }
    if (!any) break;
    std::vector<Polynomial> images;
    for (std::size_t v = 0; v < n; ++v) images.push_back(var(field, n, v) - g[v]);
    const auto step = LocalAutomorphism::from_images(field, n, N, std::move(images), s);
    cur = step.apply(cur);
    phi = phi.then(step);
  }
  out.phi = phi;
  out.h = cur - out.q;
  for (const Term& t : out.h.terms())
    if (uses_any(t.m, out.q_vars)) fail(ErrorCode::Unsupported, "remainder still involves q-variables");
  return out;
}

std::optional<LocalAutomorphism> right_equiv_truncated(const Polynomial& f, const Polynomial& g, int N) {
  if (f.nvars() != g.nvars() || f.field() != g.field()) fail(ErrorCode::DimensionMismatch, "f and g live in different rings");
  const auto rep = milnor(f);
  if (!rep.certified) fail(ErrorCode::NotCertifiedFinite, "f has no certified Milnor number");
  const int r = rep.r;
  const Field field = f.field();
  const std::size_t n = f.nvars();
  const Polynomial diff0 = (g - f).truncated(N);
  if (!diff0.is_zero() && diff0.order() < 2 * r + 1)
    fail(ErrorCode::PreconditionViolated, "g must agree with f modulo <x>^(2r+1)");
  const auto grad = gradient(f);
  LocalAutomorphism phi = LocalAutomorphism::identity(field, n, std::max(N, 1));
  Polynomial cur = g.truncated(N);
  for (int pass = 0; pass <= N; ++pass) {
    const Polynomial diff = (cur - f).truncated(N);
    if (diff.is_zero()) return phi;
    const int s = diff.order();
    // diff lies in <x>^(s-r) jac(f) modulo <x>^(N+1).
    const SpanEchelon span = ideal_span(grad, n, N, s - r, true);
    auto [rem, u] = span.reduce(diff);
    if (!rem.is_zero()) return std::nullopt;
    std::vector<Polynomial> images;
    for (std::size_t v = 0; v < n; ++v) images.push_back(var(field, n, v) - u[v]);
    const auto step = LocalAutomorphism::from_images(field, n, N, std::move(images));
    cur = step.apply(cur);
    phi = phi.then(step);
  }
  return (cur - f).truncated(N).is_zero() ? std::optional<LocalAutomorphism>(phi) : std::nullopt;
}

NormalFormReport corank1_normal_form(const PolyMap& F, const Vector& x0, int N) {
  const std::size_t n = F.n, r = F.r;
  if (r > n) fail(ErrorCode::TargetTooBig, "corank-1 normal form needs r <= n");
  if (N < 2) fail(ErrorCode::NotTruncatable, "need N >= 2");
  const Field field = F.field;
  const PointClassifier cls(F);
  if (cls.corank(x0) != 1) fail(ErrorCode::WrongCorank, "point does not have corank 1");

  NormalFormReport rep;
  rep.N = N;
  std::vector<Polynomial> G;
  const Vector val = F.evaluate(x0);
  for (std::size_t k = 0; k < r; ++k)
    G.push_back(F.components[k].shifted(x0) - Polynomial::constant(field, n, val[k]));
  const Matrix J = cls.jacobian_at(x0);

  // Independent rows first, the dependent one last.
  std::vector<Vector> rows;
  std::size_t last = r;
  for (std::size_t k = 0; k < r; ++k) {
    rows.push_back(J.row(k));
    if (rank(Matrix::from_rows(field, rows, n)) < rows.size()) {
      rows.pop_back();
      if (last == r) last = k;
      else fail(ErrorCode::WrongCorank, "jacobian rank below r - 1");
    } else {
      rep.reordering.push_back(k);
    }
  }
  rep.reordering.push_back(last);
  for (std::size_t k : rep.reordering) rep.constants.push_back(val[k]);

  // Parameters: the first r-1 reordered components, then coordinates y_j completing them.
  for (std::size_t l = 0; l + 1 < r; ++l) rep.parameters.push_back(G[rep.reordering[l]].truncated(N));
  for (std::size_t j = 0; j < n && rows.size() < n; ++j) {
    rows.push_back(Vec::unit(field, n, j));
    if (rank(Matrix::from_rows(field, rows, n)) < rows.size()) {
      rows.pop_back();
      continue;
    }
    rep.parameters.push_back(var(field, n, j));
  }
  const auto coords = LocalAutomorphism::from_images(field, n, N, rep.parameters);
  // psi expresses y in the new coordinates: psi.apply(parameters[l]) = x_l.
  const LocalAutomorphism psi = coords.inverse();
  const Polynomial fr = psi.apply(G[rep.reordering[r - 1]]);

  const auto morse = morse_with_params(fr, r - 1, N);
  rep.rank = morse.rank;
  rep.j = (n - r + 1) - morse.rank;
  rep.q = morse.q;
  rep.h = morse.h;
  rep.extra_square = morse.extra_square;
  rep.arf_term = morse.arf_term;
  rep.phi = psi.then(morse.phi);

  bool ok = (rep.phi.apply(G[rep.reordering[r - 1]]) - (rep.q + rep.h)).is_zero();
  for (std::size_t l = 0; l + 1 < r && ok; ++l)
    ok = rep.phi.apply(G[rep.reordering[l]]) == var(field, n, l);
  for (const Term& t : rep.h.terms())
    if (uses_any(t.m, morse.q_vars)) ok = false;
  rep.verified = ok;
  return rep;
}

}  // namespace charstrat

#include "charstrat/strata.hpp"

#include <algorithm>

namespace charstrat {

namespace {

std::size_t poly_vars(const PolyMatrix& alpha) {
  if (alpha.empty() || alpha[0].empty()) fail(ErrorCode::DimensionMismatch, "empty polynomial matrix");
  const std::size_t n = alpha[0][0].nvars();
  const Field f = alpha[0][0].field();
  for (const auto& row : alpha) {
    if (row.size() != alpha[0].size()) fail(ErrorCode::DimensionMismatch, "ragged polynomial matrix");
    for (const Polynomial& p : row) {
      if (p.field() != f) fail(ErrorCode::FieldMismatch, "entries over different fields");
      if (p.nvars() != n) fail(ErrorCode::DimensionMismatch, "entries in different variable counts");
    }
  }
  return n;
}

Matrix evaluate(const PolyMatrix& a, const Field& f, const Vector& x) {
  Matrix m(f, a.size(), a.empty() ? 0 : a[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) m.set(i, j, a[i][j].evaluate(x));
  return m;
}

// Kernel / cokernel data of alpha(x); `derivative(l)` gives the matrix of d/dx_l alpha at x.
template <class Derivative>
IntrinsicDiff build_intrinsic(const Matrix& at_x, const Vector& x, std::size_t n, Derivative derivative) {
  IntrinsicDiff d;
  d.point = x;
  const RankProfile rp = rank_profile(at_x);
  d.corank = std::min(at_x.rows(), at_x.cols()) - rp.rank;
  d.kernel = rp.kernel_basis.empty() ? Matrix(at_x.field(), at_x.cols(), 0)
                                     : Matrix::from_columns(at_x.field(), at_x.cols(), rp.kernel_basis);
  d.cokernel_proj = rp.cokernel_projection;
  for (std::size_t l = 0; l < n; ++l) d.tensor.push_back(d.cokernel_proj * derivative(l) * d.kernel);
  return d;
}

Matrix flatten(const Field& f, const std::vector<Matrix>& slices, std::size_t rows_each, std::size_t cols_each) {
  Matrix m(f, rows_each * cols_each, slices.size());
  for (std::size_t s = 0; s < slices.size(); ++s)
    for (std::size_t a = 0; a < rows_each; ++a)
      for (std::size_t b = 0; b < cols_each; ++b) m.set(a * cols_each + b, s, slices[s].at(a, b));
  return m;
}

// Univariate polynomials over a finite field, raw encoding, coefficients low to high.
using RawPoly = std::vector<std::uint32_t>;

void trim(RawPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

RawPoly raw_mod(const FiniteOps& o, RawPoly a, const RawPoly& b) {
  trim(a);
  const std::uint32_t inv_lead = o.inv(b.back());
  while (a.size() >= b.size()) {
    const std::uint32_t c = o.mul(a.back(), inv_lead);
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = o.sub(a[shift + i], o.mul(c, b[i]));
    trim(a);
  }
  return a;
}

RawPoly raw_gcd(const FiniteOps& o, RawPoly a, RawPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    RawPoly r = raw_mod(o, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

RawPoly raw_mulmod(const FiniteOps& o, const RawPoly& a, const RawPoly& b, const RawPoly& m) {
  if (a.empty() || b.empty()) return {};
  RawPoly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = o.add(c[i + j], o.mul(a[i], b[j]));
  return raw_mod(o, std::move(c), m);
}

// y^e mod m.
RawPoly raw_pow_y(const FiniteOps& o, std::uint64_t e, const RawPoly& m) {
  RawPoly result = raw_mod(o, {1}, m), base = raw_mod(o, {0, 1}, m);
  while (e) {
    if (e & 1u) result = raw_mulmod(o, result, base, m);
    e >>= 1;
    if (e) base = raw_mulmod(o, base, base, m);
  }
  return result;
}

// Number of distinct roots of g in F_q.
std::uint64_t distinct_roots(const FiniteOps& o, const RawPoly& g) {
  if (g.size() <= 1) return 0;
  RawPoly h = raw_pow_y(o, o.q, g);
  h.resize(std::max<std::size_t>(h.size(), 2), 0);
  h[1] = o.sub(h[1], 1);
  const RawPoly d = raw_gcd(o, g, h);
  return d.empty() ? g.size() - 1 : d.size() - 1;
}

struct CompiledPoly {
  std::vector<std::pair<Monomial, std::uint32_t>> terms;
};

CompiledPoly compile(const Polynomial& p) {
  CompiledPoly c;
  for (const Term& t : p.terms()) c.terms.push_back({t.m, t.c.index()});
  return c;
}

}  // namespace

Matrix IntrinsicDiff::as_linear_map() const {
  const Field f = kernel.field();
  return flatten(f, tensor, dim_cokernel(), dim_kernel());
}

Matrix SecondDiff::as_linear_map() const {
  const Field f = base.kernel.field();
  const std::size_t k = base.dim_kernel(), c = base.dim_cokernel();
  Matrix m(f, c * k, k);
  for (std::size_t g = 0; g < c; ++g)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t a = 0; a < k; ++a) m.set(g * k + b, a, forms[g].at(a, b));
  return m;
}

IntrinsicDiff intrinsic_differential_at(const PolyMatrix& alpha, const Vector& x) {
  const std::size_t n = poly_vars(alpha);
  if (x.size() != n) fail(ErrorCode::DimensionMismatch, "point has wrong dimension");
  const Field f = alpha[0][0].field();
  check_field(f, x);
  return build_intrinsic(evaluate(alpha, f, x), x, n, [&](std::size_t l) {
    Matrix d(f, alpha.size(), alpha[0].size());
    for (std::size_t i = 0; i < alpha.size(); ++i)
      for (std::size_t j = 0; j < alpha[i].size(); ++j) d.set(i, j, alpha[i][j].derive(l).evaluate(x));
    return d;
  });
}

PointClassifier::PointClassifier(PolyMap f) : f_(std::move(f)) {
  jac_ = f_.jacobian();
  hess_.resize(f_.r);
  for (std::size_t c = 0; c < f_.r; ++c) {
    hess_[c].assign(f_.n, std::vector<Polynomial>(f_.n));
    for (std::size_t a = 0; a < f_.n; ++a)
      for (std::size_t b = a; b < f_.n; ++b) {
        hess_[c][a][b] = jac_[c][a].derive(b);
        hess_[c][b][a] = hess_[c][a][b];
      }
  }
}

void PointClassifier::check_point(const Vector& x) const {
  if (x.size() != f_.n) fail(ErrorCode::DimensionMismatch, "point has wrong dimension");
  check_field(f_.field, x);
}

Matrix PointClassifier::jacobian_at(const Vector& x) const {
  check_point(x);
  return evaluate(jac_, f_.field, x);
}

std::vector<Matrix> PointClassifier::hessian_at(const Vector& x) const {
  check_point(x);
  std::vector<Matrix> out;
  for (std::size_t c = 0; c < f_.r; ++c) out.push_back(evaluate(hess_[c], f_.field, x));
  return out;
}

std::size_t PointClassifier::corank(const Vector& x) const {
  return std::min(f_.n, f_.r) - rank(jacobian_at(x));
}

IntrinsicDiff PointClassifier::intrinsic(const Vector& x) const {
  const std::vector<Matrix> h = hessian_at(x);
  // d/dx_l of the Jacobian entry (c, a) is the Hessian entry (a, l) of component c.
  return build_intrinsic(jacobian_at(x), x, f_.n, [&](std::size_t l) {
    Matrix d(f_.field, f_.r, f_.n);
    for (std::size_t c = 0; c < f_.r; ++c)
      for (std::size_t a = 0; a < f_.n; ++a) d.set(c, a, h[c].at(a, l));
    return d;
  });
}

SecondDiff PointClassifier::second(const Vector& x) const {
  SecondDiff s;
  s.base = intrinsic(x);
  const std::vector<Matrix> h = hessian_at(x);
  const std::size_t k = s.base.dim_kernel(), cdim = s.base.dim_cokernel();
  const Matrix kt = s.base.kernel.transpose();
  std::vector<Matrix> restricted;
  for (std::size_t c = 0; c < f_.r; ++c) restricted.push_back(kt * h[c] * s.base.kernel);
  for (std::size_t g = 0; g < cdim; ++g) {
    Matrix m(f_.field, k, k);
    for (std::size_t c = 0; c < f_.r; ++c) {
      const Elem w = s.base.cokernel_proj.at(g, c);
      if (w.is_zero()) continue;
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) m.set(a, b, m.at(a, b) + w * restricted[c].at(a, b));
    }
    s.forms.push_back(std::move(m));
  }
  return s;
}

SymbolClass PointClassifier::symbol(const Vector& x) const {
  const SecondDiff s = second(x);
  const std::size_t k = s.base.dim_kernel(), c = s.base.dim_cokernel();
  // Degeneracy index of K -> Hom(K, C): expected rank min(k, k*c) minus the actual rank.
  const std::size_t expected = std::min(k, k * c);
  return {s.base.corank, expected - (k * c == 0 ? 0 : rank(s.as_linear_map()))};
}

bool PointClassifier::bad_locus(const Vector& x) const {
  const IntrinsicDiff d = intrinsic(x);
  const std::size_t i = d.corank;
  if (i == 0) return false;
  const std::size_t n = f_.n, r = f_.r;
  const std::size_t target = i * ((n > r ? n - r : r - n) + i);
  if (n < target) return true;
  return rank(d.as_linear_map()) < target;
}

std::size_t corank_at(const PolyMap& f, const Vector& x) { return PointClassifier(f).corank(x); }
SecondDiff second_intrinsic_differential_at(const PolyMap& f, const Vector& x) { return PointClassifier(f).second(x); }
SymbolClass symbol_at(const PolyMap& f, const Vector& x) { return PointClassifier(f).symbol(x); }
bool bad_locus_member(const PolyMap& f, const Vector& x) { return PointClassifier(f).bad_locus(x); }

PointScan scan_critical_points(const PolyMap& f, std::uint64_t limit) {
  if (!f.field.is_finite()) fail(ErrorCode::InfiniteField, "point scans need a finite field");
  const FiniteOps& o = f.field.ops();
  const std::size_t n = f.n, r = f.r, m = std::min(n, r);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= o.q;
    if (total > limit) fail(ErrorCode::BudgetExceeded, "too many points to scan");
  }
  const PointClassifier cls(f);
  const auto jac = f.jacobian();
  std::vector<CompiledPoly> entries;
  unsigned maxdeg = 0;
  for (const auto& row : jac)
    for (const Polynomial& p : row) {
      entries.push_back(compile(p));
      maxdeg = std::max(maxdeg, static_cast<unsigned>(std::max(p.degree(), 0)));
    }

  PointScan scan;
  scan.points = total;
  std::vector<std::uint32_t> coords(n, 0);
  std::vector<std::vector<std::uint32_t>> pw(n, std::vector<std::uint32_t>(maxdeg + 1));
  std::vector<std::uint32_t> mat(r * n);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    for (std::size_t i = 0; i < n; ++i) {
      pw[i][0] = 1;
      for (unsigned e = 1; e <= maxdeg; ++e) pw[i][e] = o.mul(pw[i][e - 1], coords[i]);
    }
    for (std::size_t e = 0; e < entries.size(); ++e) {
      std::uint32_t acc = 0;
      for (const auto& [mono, c] : entries[e].terms) {
        std::uint32_t v = c;
        for (std::size_t i = 0; i < n && v; ++i)
          if (mono[i]) v = o.mul(v, pw[i][mono[i]]);
        acc = o.add(acc, v);
      }
      mat[e] = acc;
    }
    if (rank_raw(o, mat.data(), r, n) < m) {
      ++scan.critical;
      Vector x;
      for (std::size_t i = 0; i < n; ++i) x.push_back(f.field.element(coords[i]));
      if (cls.bad_locus(x)) {
        ++scan.bad;
        if (scan.bad_points.size() < 64) scan.bad_points.push_back(std::move(x));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (++coords[i] < o.q) break;
      coords[i] = 0;
    }
  }
  return scan;
}

std::uint64_t count_critical_points_plane(const PolyMap& f) {
  if (f.n != 2) fail(ErrorCode::DimensionMismatch, "plane count needs a map from A^2");
  if (!f.field.is_finite()) fail(ErrorCode::InfiniteField, "point counts need a finite field");
  const FiniteOps& o = f.field.ops();
  const auto jac = f.jacobian();
  std::vector<Polynomial> minors;
  if (f.r == 1) {
    minors = {jac[0][0], jac[0][1]};
  } else {
    for (std::size_t a = 0; a < f.r; ++a)
      for (std::size_t b = a + 1; b < f.r; ++b) minors.push_back(jac[a][0] * jac[b][1] - jac[a][1] * jac[b][0]);
  }
  if (minors.empty()) return 0;

  std::uint64_t count = 0;
  for (std::uint32_t xv = 0; xv < o.q; ++xv) {
    RawPoly g;
    for (const Polynomial& p : minors) {
      RawPoly u(static_cast<std::size_t>(std::max(p.degree(), 0)) + 1, 0);
      for (const Term& t : p.terms()) {
        std::uint32_t c = t.c.index();
        if (t.m[0]) c = o.mul(c, o.pow(xv, t.m[0]));
        u[t.m[1]] = o.add(u[t.m[1]], c);
      }
      g = raw_gcd(o, std::move(g), std::move(u));
    }
    count += g.empty() ? o.q : distinct_roots(o, g);
  }
  return count;
}

}  // namespace charstrat

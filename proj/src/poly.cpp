#include "charstrat/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

namespace charstrat {

namespace {

using Accum = std::unordered_map<std::uint64_t, std::pair<Monomial, Elem>>;

void accumulate(Accum& acc, const Monomial& m, const Elem& c) {
  auto it = acc.find(m.bits());
  if (it == acc.end()) {
    acc.emplace(m.bits(), std::make_pair(m, c));
  } else {
    it->second.second += c;
  }
}

std::vector<Term> drain(Accum& acc) {
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [bits, mc] : acc) {
    if (!mc.second.is_zero()) out.push_back({mc.first, std::move(mc.second)});
  }
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return GrevlexLess{}(a.m, b.m); });
  return out;
}

void check_same(const Polynomial& a, const Polynomial& b) {
  if (a.field() != b.field()) fail(ErrorCode::FieldMismatch, "polynomials over different fields");
  if (a.nvars() != b.nvars()) fail(ErrorCode::DimensionMismatch, "polynomials in different variable counts");
}

void gen_degree(std::size_t nvars, std::size_t i, unsigned left, std::vector<unsigned>& e,
                std::vector<Monomial>& out) {
  if (i + 1 == nvars) {
    e[i] = left;
    out.push_back(Monomial::from_exponents(e));
    return;
  }
  for (unsigned k = 0; k <= left; ++k) {
    e[i] = k;
    gen_degree(nvars, i + 1, left - k, e, out);
  }
  e[i] = 0;
}

bool plain_number(const std::string& s) {
  std::size_t i = s[0] == '-' ? 1 : 0;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i])) && s[i] != '/') return false;
  return true;
}

class Parser {
 public:
  Parser(Field field, std::size_t nvars, std::string_view text) : field_(field), nvars_(nvars), s_(text) {}

  Polynomial run() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::ParseError, msg + " at offset " + std::to_string(pos_) + " in \"" + std::string(s_) + "\"");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (eat('+')) {
        acc += term();
      } else if (eat('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    for (;;) {
      if (eat('*')) {
        acc = acc * unary();
      } else if (eat('/')) {
        const Polynomial d = unary();
        if (d.degree() > 0) error("division by a non-constant");
        const Elem c = d.constant_term();
        if (c.is_zero()) error("division by zero");
        acc = acc * c.inv();
      } else {
        return acc;
      }
    }
  }

  Polynomial unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = atom();
    if (eat('^')) {
      skip();
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) error("expected exponent");
      const std::string digits = read_digits();
      if (digits.size() > 3) error("exponent too large");
      return base.pow(static_cast<unsigned>(std::stoul(digits)));
    }
    return base;
  }

  std::string read_digits() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Polynomial atom() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!eat(')')) error("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const mpz_class v(read_digits());
      return Polynomial::constant(field_, nvars_, field_.from_rational(mpq_class(v)));
    }
    if (c == 't') {
      ++pos_;
      if (!field_.is_finite() || field_.degree() == 1) error("'t' needs an extension field");
      return Polynomial::constant(field_, nvars_, field_.t());
    }
    std::size_t index = 0;
    if (c == 'x') {
      ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        const std::string d = read_digits();
        index = d.size() > 2 ? kMaxVars : std::stoul(d);
      }
    } else if (c == 'y' || c == 'z' || c == 'w') {
      ++pos_;
      index = c == 'y' ? 1 : c == 'z' ? 2 : 3;
    } else {
      error("unexpected '" + std::string(1, c) + "'");
    }
    if (index >= nvars_) error("variable index " + std::to_string(index) + " out of range");
    return Polynomial::variable(field_, nvars_, index);
  }

  Field field_;
  std::size_t nvars_;
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Monomial Monomial::var(std::size_t i, unsigned power) {
  if (i >= kMaxVars) fail(ErrorCode::Unsupported, "at most 8 variables");
  if (power > 255) fail(ErrorCode::Unsupported, "exponent above 255");
  return Monomial(std::uint64_t{power} << (8 * i));
}

Monomial Monomial::from_exponents(const std::vector<unsigned>& e) {
  if (e.size() > kMaxVars) fail(ErrorCode::Unsupported, "at most 8 variables");
  unsigned total = 0;
  std::uint64_t b = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    total += e[i];
    if (e[i] > 255 || total > 255) fail(ErrorCode::Unsupported, "total degree above 255");
    b |= std::uint64_t{e[i]} << (8 * i);
  }
  return Monomial(b);
}

Monomial Monomial::operator*(const Monomial& o) const {
  if (degree() + o.degree() > 255) fail(ErrorCode::Unsupported, "total degree above 255");
  return Monomial(bits_ + o.bits_);
}

bool Monomial::divides(const Monomial& o) const {
  for (std::size_t i = 0; i < kMaxVars; ++i)
    if ((*this)[i] > o[i]) return false;
  return true;
}

std::string Monomial::to_string() const {
  if (bits_ == 0) return "1";
  std::string s;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    const unsigned e = (*this)[i];
    if (!e) continue;
    if (!s.empty()) s += '*';
    s += 'x' + std::to_string(i);
    if (e > 1) s += '^' + std::to_string(e);
  }
  return s;
}

std::vector<Monomial> Monomial::of_degree(std::size_t nvars, unsigned d) {
  std::vector<Monomial> out;
  if (nvars == 0) {
    if (d == 0) out.push_back(Monomial());
    return out;
  }
  std::vector<unsigned> e(nvars, 0);
  gen_degree(nvars, 0, d, e, out);
  std::sort(out.begin(), out.end(), GrevlexLess{});
  return out;
}

std::vector<Monomial> Monomial::up_to_degree(std::size_t nvars, unsigned d) {
  std::vector<Monomial> out;
  for (unsigned k = 0; k <= d; ++k) {
    auto part = of_degree(nvars, k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Polynomial::Polynomial(Field field, std::size_t nvars) : field_(field), nvars_(nvars) {
  if (nvars > kMaxVars) fail(ErrorCode::Unsupported, "at most 8 variables");
}

Polynomial Polynomial::constant(Field field, std::size_t nvars, const Elem& c) {
  return monomial(field, nvars, Monomial(), c);
}

Polynomial Polynomial::variable(Field field, std::size_t nvars, std::size_t i) {
  if (i >= nvars) fail(ErrorCode::DimensionMismatch, "variable index out of range");
  return monomial(field, nvars, Monomial::var(i), field.one());
}

Polynomial Polynomial::monomial(Field field, std::size_t nvars, const Monomial& m, const Elem& c) {
  Polynomial p(field, nvars);
  if (c.field() != field) fail(ErrorCode::FieldMismatch, "coefficient from another field");
  if (!c.is_zero()) p.terms_.push_back({m, c});
  return p;
}

Polynomial Polynomial::from_terms(Field field, std::size_t nvars, std::vector<Term> terms) {
  Polynomial p(field, nvars);
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return GrevlexLess{}(a.m, b.m); });
  for (Term& t : terms) {
    if (t.c.field() != field) fail(ErrorCode::FieldMismatch, "coefficient from another field");
    if (!p.terms_.empty() && p.terms_.back().m == t.m) {
      p.terms_.back().c += t.c;
    } else {
      p.terms_.push_back(std::move(t));
    }
  }
  std::erase_if(p.terms_, [](const Term& t) { return t.c.is_zero(); });
  return p;
}

Polynomial Polynomial::parse(Field field, std::size_t nvars, std::string_view text) {
  return Parser(field, nvars, text).run();
}

std::size_t Polynomial::count_vars(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == 'x') {
      std::size_t j = i + 1, idx = 0;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) idx = idx * 10 + (text[j++] - '0');
      n = std::max(n, idx + 1);
    } else if (c == 'y') {
      n = std::max<std::size_t>(n, 2);
    } else if (c == 'z') {
      n = std::max<std::size_t>(n, 3);
    } else if (c == 'w') {
      n = std::max<std::size_t>(n, 4);
    }
  }
  return n;
}

Elem Polynomial::coeff(const Monomial& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, const Monomial& key) { return GrevlexLess{}(t.m, key); });
  if (it != terms_.end() && it->m == m) return it->c;
  return field_.zero();
}

int Polynomial::degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.back().m.degree()); }
int Polynomial::order() const { return terms_.empty() ? -1 : static_cast<int>(terms_.front().m.degree()); }

bool Polynomial::uses_var(std::size_t i) const {
  for (const Term& t : terms_)
    if (t.m[i]) return true;
  return false;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  check_same(*this, o);
  Polynomial out(field_, nvars_);
  out.terms_.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin(), b = o.terms_.begin();
  const GrevlexLess less;
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && less(a->m, b->m))) {
      out.terms_.push_back(*a++);
    } else if (a == terms_.end() || less(b->m, a->m)) {
      out.terms_.push_back(*b++);
    } else {
      Elem c = a->c + b->c;
      if (!c.is_zero()) out.terms_.push_back({a->m, std::move(c)});
      ++a;
      ++b;
    }
  }
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (Term& t : out.terms_) t.c = -t.c;
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Elem& c) const {
  if (c.field() != field_) fail(ErrorCode::FieldMismatch, "scalar from another field");
  Polynomial out(field_, nvars_);
  if (c.is_zero()) return out;
  out.terms_.reserve(terms_.size());
  for (const Term& t : terms_) out.terms_.push_back({t.m, t.c * c});
  return out;
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  if (a.field_ != b.field_ || a.nvars_ != b.nvars_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].m != b.terms_[i].m || a.terms_[i].c != b.terms_[i].c) return false;
  }
  return true;
}

Polynomial Polynomial::mul(const Polynomial& o, int trunc) const {
  check_same(*this, o);
  Polynomial out(field_, nvars_);
  if (terms_.empty() || o.terms_.empty()) return out;
  const unsigned limit = trunc < 0 ? 1024u : static_cast<unsigned>(trunc);
  const unsigned o_order = o.terms_.front().m.degree();
  if (o.terms_.size() == 1 || terms_.size() == 1) {
    // Product with a single term keeps the grevlex order (it is a monomial order).
    const Polynomial& many = terms_.size() == 1 ? o : *this;
    const Term& one = terms_.size() == 1 ? terms_.front() : o.terms_.front();
    for (const Term& t : many.terms_) {
      if (t.m.degree() + one.m.degree() > limit) break;
      Elem c = t.c * one.c;
      if (!c.is_zero()) out.terms_.push_back({t.m * one.m, std::move(c)});
    }
    return out;
  }
  Accum acc;
  for (const Term& a : terms_) {
    const unsigned da = a.m.degree();
    if (da + o_order > limit) break;
    for (const Term& b : o.terms_) {
      if (da + b.m.degree() > limit) break;
      accumulate(acc, a.m * b.m, a.c * b.c);
    }
  }
  out.terms_ = drain(acc);
  return out;
}

Polynomial Polynomial::pow(unsigned e, int trunc) const {
  Polynomial result = constant(field_, nvars_, field_.one()).truncated(trunc);
  Polynomial base = truncated(trunc);
  while (e) {
    if (e & 1u) result = result.mul(base, trunc);
    e >>= 1;
    if (e) base = base.mul(base, trunc);
  }
  return result;
}

Polynomial Polynomial::truncated(int n) const {
  if (n < 0) return *this;
  return degree_range(0, static_cast<unsigned>(n));
}

Polynomial Polynomial::homogeneous_part(unsigned d) const { return degree_range(d, d); }

Polynomial Polynomial::degree_range(unsigned lo, unsigned hi) const {
  Polynomial out(field_, nvars_);
  for (const Term& t : terms_) {
    const unsigned d = t.m.degree();
    if (d > hi) break;
    if (d >= lo) out.terms_.push_back(t);
  }
  return out;
}

Polynomial Polynomial::derive(std::size_t i) const {
  if (i >= nvars_) fail(ErrorCode::DimensionMismatch, "derivative index out of range");
  std::vector<Term> out;
  for (const Term& t : terms_) {
    const unsigned e = t.m[i];
    if (!e) continue;
    Elem c = t.c * field_.from_int(e);
    if (!c.is_zero()) out.push_back({t.m.lowered(i), std::move(c)});
  }
  return from_terms(field_, nvars_, std::move(out));
}

Elem Polynomial::evaluate(const Vector& point) const {
  if (point.size() != nvars_) fail(ErrorCode::DimensionMismatch, "point has wrong dimension");
  check_field(field_, point);
  if (terms_.empty()) return field_.zero();
  const unsigned maxdeg = terms_.back().m.degree();
  std::vector<std::vector<Elem>> powers(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) {
    powers[i].reserve(maxdeg + 1);
    powers[i].push_back(field_.one());
    for (unsigned k = 1; k <= maxdeg; ++k) powers[i].push_back(powers[i].back() * point[i]);
  }
  Elem acc = field_.zero();
  for (const Term& t : terms_) {
    Elem v = t.c;
    for (std::size_t i = 0; i < nvars_; ++i)
      if (t.m[i]) v *= powers[i][t.m[i]];
    acc += v;
  }
  return acc;
}

Polynomial Polynomial::compose(const std::vector<Polynomial>& subs, int trunc) const {
  if (subs.size() != nvars_) fail(ErrorCode::DimensionMismatch, "need one substitution per variable");
  const std::size_t out_vars = subs.empty() ? 0 : subs[0].nvars();
  std::vector<unsigned> orders(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) {
    if (subs[i].field() != field_) fail(ErrorCode::FieldMismatch, "substitution over another field");
    if (subs[i].nvars() != out_vars) fail(ErrorCode::DimensionMismatch, "substitutions differ in variable count");
    orders[i] = subs[i].is_zero() ? 255u : static_cast<unsigned>(subs[i].order());
  }
  const Polynomial one = constant(field_, out_vars, field_.one());
  std::unordered_map<std::uint64_t, Polynomial> cache;
  cache.emplace(0, one.truncated(trunc));

  // Image of a monomial, built from the image of the monomial with its first variable lowered.
  auto image = [&](auto&& self, const Monomial& m) -> const Polynomial& {
    auto it = cache.find(m.bits());
    if (it != cache.end()) return it->second;
    std::size_t i = 0;
    while (!m[i]) ++i;
    Polynomial img = self(self, m.lowered(i)).mul(subs[i], trunc);
    return cache.emplace(m.bits(), std::move(img)).first->second;
  };

  Accum acc;
  for (const Term& t : terms_) {
    if (trunc >= 0) {
      unsigned low = 0;
      for (std::size_t i = 0; i < nvars_; ++i) low += t.m[i] * orders[i];
      if (low > static_cast<unsigned>(trunc)) continue;
    }
    const Polynomial& img = image(image, t.m);
    for (const Term& u : img.terms()) accumulate(acc, u.m, t.c * u.c);
  }
  Polynomial out(field_, out_vars);
  out.terms_ = drain(acc);
  return out;
}

Polynomial Polynomial::shifted(const Vector& x0) const {
  if (x0.size() != nvars_) fail(ErrorCode::DimensionMismatch, "point has wrong dimension");
  check_field(field_, x0);
  std::vector<Polynomial> subs;
  for (std::size_t i = 0; i < nvars_; ++i) {
    subs.push_back(variable(field_, nvars_, i) + constant(field_, nvars_, x0[i]));
  }
  return compose(subs);
}

Polynomial Polynomial::partial_evaluate(std::size_t i, const Elem& value) const {
  if (i >= nvars_) fail(ErrorCode::DimensionMismatch, "variable index out of range");
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const Term& t : terms_) {
    const unsigned e = t.m[i];
    if (!e) {
      out.push_back(t);
      continue;
    }
    Monomial m = t.m;
    for (unsigned k = 0; k < e; ++k) m = m.lowered(i);
    out.push_back({m, t.c * value.pow(e)});
  }
  return from_terms(field_, nvars_, std::move(out));
}

Polynomial Polynomial::remap(std::size_t nvars, const std::vector<std::size_t>& map) const {
  if (map.size() != nvars_) fail(ErrorCode::DimensionMismatch, "remap needs one target per variable");
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const Term& t : terms_) {
    std::vector<unsigned> e(nvars, 0);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (!t.m[i]) continue;
      if (map[i] >= nvars) fail(ErrorCode::DimensionMismatch, "remap target out of range");
      e[map[i]] += t.m[i];
    }
    out.push_back({Monomial::from_exponents(e), t.c});
  }
  return from_terms(field_, nvars, std::move(out));
}

Polynomial Polynomial::embedded(const Field& target) const {
  if (target == field_) return *this;
  Polynomial out(target, nvars_);
  for (const Term& t : terms_) out.terms_.push_back({t.m, target.embed(t.c)});
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Ascending degree; within a degree, leading (grevlex-largest) monomial first.
  std::vector<const Term*> order;
  for (std::size_t lo = 0; lo < terms_.size();) {
    std::size_t hi = lo;
    while (hi < terms_.size() && terms_[hi].m.degree() == terms_[lo].m.degree()) ++hi;
    for (std::size_t k = hi; k-- > lo;) order.push_back(&terms_[k]);
    lo = hi;
  }
  for (const Term* tp : order) {
    const Term& t = *tp;
    std::string c = t.c.to_string();
    bool negative = !field_.is_finite() && c[0] == '-';
    if (negative) c = c.substr(1);
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    const bool unit = c == "1";
    if (t.m.is_one()) {
      os << (plain_number(c) ? c : "(" + c + ")");
      continue;
    }
    if (!unit) os << (plain_number(c) ? c : "(" + c + ")") << '*';
    os << t.m.to_string();
  }
  return os.str();
}

TruncatedSeries series_compose(const TruncatedSeries& f, const std::vector<TruncatedSeries>& subs, int n) {
  std::vector<Polynomial> ps;
  ps.reserve(subs.size());
  for (const auto& s : subs) ps.push_back(s.poly());
  return TruncatedSeries(series_compose(f.poly(), ps, n), n);
}

Polynomial series_compose(const Polynomial& f, const std::vector<Polynomial>& subs, int n) {
  if (n < 0) fail(ErrorCode::NotTruncatable, "negative truncation order");
  for (const auto& s : subs) {
    if (s.field() != f.field()) fail(ErrorCode::FieldMismatch, "substitution over another field");
    if (!s.constant_term().is_zero()) fail(ErrorCode::NonzeroConstantTerm, "substituted series must vanish at 0");
  }
  return f.compose(subs, n);
}

TruncatedSeries derive(const TruncatedSeries& f, std::size_t i) {
  // Terms of degree N in the derivative depend on unknown degree N+1 terms of f.
  const int n = std::max(0, f.trunc_order() - 1);
  return TruncatedSeries(f.poly().derive(i), n);
}

PolyMap::PolyMap(Field f, std::size_t n_, std::vector<Polynomial> comps)
    : field(f), n(n_), r(comps.size()), components(std::move(comps)) {
  for (const Polynomial& p : components) {
    if (p.field() != field) fail(ErrorCode::FieldMismatch, "map components over different fields");
    if (p.nvars() != n) fail(ErrorCode::DimensionMismatch, "map component in wrong variable count");
  }
}

PolyMap PolyMap::parse(Field field, std::size_t n, std::string_view text) {
  std::vector<Polynomial> comps;
  std::size_t start = 0;
  for (;;) {
    const std::size_t semi = text.find(';', start);
    comps.push_back(Polynomial::parse(field, n, text.substr(start, semi == std::string_view::npos ? semi : semi - start)));
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  return PolyMap(field, n, std::move(comps));
}

Vector PolyMap::evaluate(const Vector& x) const {
  Vector out;
  out.reserve(r);
  for (const Polynomial& p : components) out.push_back(p.evaluate(x));
  return out;
}

std::vector<std::vector<Polynomial>> PolyMap::jacobian() const {
  std::vector<std::vector<Polynomial>> j(r);
  for (std::size_t c = 0; c < r; ++c)
    for (std::size_t i = 0; i < n; ++i) j[c].push_back(components[c].derive(i));
  return j;
}

PolyMap PolyMap::operator+(const PolyMap& o) const {
  if (o.r != r || o.n != n) fail(ErrorCode::DimensionMismatch, "maps of different shapes");
  std::vector<Polynomial> comps;
  for (std::size_t c = 0; c < r; ++c) comps.push_back(components[c] + o.components[c]);
  return PolyMap(field, n, std::move(comps));
}

PolyMap PolyMap::operator*(const Elem& c) const {
  std::vector<Polynomial> comps;
  for (const Polynomial& p : components) comps.push_back(p * c);
  return PolyMap(field, n, std::move(comps));
}

PolyMap PolyMap::embedded(const Field& target) const {
  std::vector<Polynomial> comps;
  for (const Polynomial& p : components) comps.push_back(p.embedded(target));
  return PolyMap(target, n, std::move(comps));
}

std::string PolyMap::to_string() const {
  std::string s;
  for (std::size_t c = 0; c < r; ++c) {
    if (c) s += "; ";
    s += components[c].to_string();
  }
  return s;
}

Jet2 jet2_at(const PolyMap& f, const Vector& x0) {
  if (x0.size() != f.n) fail(ErrorCode::DimensionMismatch, "point has wrong dimension");
  Jet2 j;
  j.value = f.evaluate(x0);
  j.jacobian = Matrix(f.field, f.r, f.n);
  for (std::size_t c = 0; c < f.r; ++c) {
    Matrix h(f.field, f.n, f.n);
    for (std::size_t a = 0; a < f.n; ++a) {
      const Polynomial da = f.components[c].derive(a);
      j.jacobian.set(c, a, da.evaluate(x0));
      for (std::size_t b = a; b < f.n; ++b) {
        const Elem v = da.derive(b).evaluate(x0);
        h.set(a, b, v);
        h.set(b, a, v);
      }
    }
    j.hessian.push_back(std::move(h));
  }
  return j;
}

}  // namespace charstrat

#include "charstrat/field.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

#include "charstrat/rng.hpp"

namespace charstrat {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPrimeModulus: return "NonPrimeModulus";
    case ErrorCode::ReducibleModulus: return "ReducibleModulus";
    case ErrorCode::InfiniteField: return "InfiniteField";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonzeroConstantTerm: return "NonzeroConstantTerm";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::EmptyStratum: return "EmptyStratum";
    case ErrorCode::DegenerateTower: return "DegenerateTower";
    case ErrorCode::NonzeroConstant: return "NonzeroConstant";
    case ErrorCode::NotCertifiedFinite: return "NotCertifiedFinite";
    case ErrorCode::OrderTooLow: return "OrderTooLow";
    case ErrorCode::NotTruncatable: return "NotTruncatable";
    case ErrorCode::WrongCorank: return "WrongCorank";
    case ErrorCode::TargetTooBig: return "TargetTooBig";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Unsupported: return "Unsupported";
  }
  return "Error";
}

namespace {

constexpr std::uint64_t kMaxTableSize = 1u << 20;

using UPoly = std::vector<std::uint32_t>;  // coefficients mod p, low to high

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

void trim(UPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) {
  return static_cast<std::uint32_t>(powmod(a, p - 2, p));
}

UPoly poly_mod(UPoly a, const UPoly& m, std::uint32_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  const std::uint32_t lead_inv = inv_mod(m.back(), p);
  while (a.size() > dm) {
    const std::size_t shift = a.size() - 1 - dm;
    const std::uint64_t c = mulmod(a.back(), lead_inv, p);
    for (std::size_t i = 0; i <= dm; ++i) {
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - mulmod(c, m[i], p)) % p);
    }
    trim(a);
  }
  return a;
}

UPoly poly_mulmod(const UPoly& a, const UPoly& b, const UPoly& m, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  UPoly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      c[i + j] = static_cast<std::uint32_t>((c[i + j] + mulmod(a[i], b[j], p)) % p);
    }
  }
  return poly_mod(std::move(c), m, p);
}

UPoly poly_powmod(UPoly base, std::uint64_t e, const UPoly& m, std::uint32_t p) {
  UPoly r{1};
  base = poly_mod(std::move(base), m, p);
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, m, p);
    base = poly_mulmod(base, base, m, p);
    e >>= 1;
  }
  return poly_mod(std::move(r), m, p);
}

UPoly poly_gcd(UPoly a, UPoly b, std::uint32_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    UPoly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

bool is_x_power_one(const UPoly& r) { return r.size() == 1 && r[0] == 1; }

// x has multiplicative order exactly p^k - 1 modulo m (implies m irreducible).
bool is_primitive(const UPoly& m, std::uint32_t p, std::uint64_t order,
                  const std::vector<std::uint64_t>& factors) {
  if (m[0] == 0) return false;
  const UPoly x{0, 1};
  if (!is_x_power_one(poly_powmod(x, order, m, p))) return false;
  for (std::uint64_t l : factors) {
    if (is_x_power_one(poly_powmod(x, order / l, m, p))) return false;
  }
  return true;
}

// b^e, saturating just above the table bound.
std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) {
    r *= b;
    if (r > (std::uint64_t{1} << 40)) return r;
  }
  return r;
}

std::vector<std::uint32_t> conway_uncached(std::uint32_t p, unsigned k);

std::mutex& conway_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::pair<std::uint32_t, unsigned>, UPoly>& conway_cache() {
  static std::map<std::pair<std::uint32_t, unsigned>, UPoly> cache;
  return cache;
}

std::vector<std::uint32_t> conway_uncached(std::uint32_t p, unsigned k) {
  const std::uint64_t q = ipow(p, k);
  const std::uint64_t order = q - 1;
  const auto factors = prime_factors(order);
  if (k == 1) {
    for (std::uint32_t g = 1; g < p; ++g) {
      bool prim = true;
      for (std::uint64_t l : factors) {
        if (powmod(g, order / l, p) == 1) {
          prim = false;
          break;
        }
      }
      if (prim || p == 2) return {static_cast<std::uint32_t>((p - g) % p), 1};
    }
  }
  std::vector<std::pair<unsigned, UPoly>> subs;
  for (unsigned d = 1; d < k; ++d) {
    if (k % d == 0) subs.emplace_back(d, conway_polynomial(p, d));
  }
  // Candidates x^k + sum (-1)^(k-i) a_i x^i ordered lexicographically by
  // (a_{k-1}, ..., a_0).
  UPoly cand(k + 1, 0);
  cand[k] = 1;
  for (std::uint64_t idx = 0; idx < q; ++idx) {
    std::uint64_t rest = idx;
    for (unsigned i = 0; i < k; ++i) {
      const auto a = static_cast<std::uint32_t>(rest % p);
      rest /= p;
      cand[i] = ((k - i) % 2 == 0 || a == 0) ? a : p - a;
    }
    if (!is_primitive(cand, p, order, factors)) continue;
    bool compatible = true;
    for (const auto& [d, cd] : subs) {
      const UPoly y = poly_powmod(UPoly{0, 1}, order / (ipow(p, d) - 1), cand, p);
      UPoly acc;  // Horner evaluation of cd at y
      for (std::size_t i = cd.size(); i-- > 0;) {
        acc = poly_mulmod(acc, y, cand, p);
        if (acc.empty()) acc.push_back(0);
        acc[0] = static_cast<std::uint32_t>((acc[0] + cd[i]) % p);
        trim(acc);
      }
      if (!acc.empty()) {
        compatible = false;
        break;
      }
    }
    if (compatible) return cand;
  }
  fail(ErrorCode::Unsupported, "no Conway polynomial found");
}

struct FieldKey {
  FieldSpec::Kind kind;
  std::uint32_t p;
  unsigned k;
  std::vector<std::uint32_t> modulus;
  bool operator<(const FieldKey& o) const {
    return std::tie(kind, p, k, modulus) < std::tie(o.kind, o.p, o.k, o.modulus);
  }
};

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<FieldKey, std::unique_ptr<detail::FieldData>>& registry() {
  static std::map<FieldKey, std::unique_ptr<detail::FieldData>> r;
  return r;
}

std::string poly_string(const UPoly& m) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = m.size(); i-- > 0;) {
    if (!m[i]) continue;
    if (!first) os << '+';
    first = false;
    if (m[i] != 1 || i == 0) os << m[i];
    if (i > 0) {
      if (m[i] != 1) os << '*';
      os << 't';
      if (i > 1) os << '^' << i;
    }
  }
  return first ? "0" : os.str();
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % d == 0) return n == d;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_irreducible_mod_p(const std::vector<std::uint32_t>& poly, std::uint32_t p) {
  UPoly f = poly;
  trim(f);
  if (f.size() < 2) return false;
  const std::size_t k = f.size() - 1;
  if (k == 1) return true;
  // Ben-Or: f is irreducible iff gcd(f, x^(p^i) - x) = 1 for i <= k/2.
  UPoly xp{0, 1};
  for (std::size_t i = 1; i <= k / 2; ++i) {
    xp = poly_powmod(xp, p, f, p);
    UPoly g = xp;
    g.resize(std::max<std::size_t>(g.size(), 2), 0);
    g[1] = (g[1] + p - 1) % p;
    trim(g);
    if (g.empty()) return false;
    if (poly_gcd(f, g, p).size() > 1) return false;
  }
  return true;
}

std::vector<std::uint32_t> conway_polynomial(std::uint32_t p, unsigned k) {
  if (!is_prime(p)) fail(ErrorCode::NonPrimeModulus, std::to_string(p) + " is not prime");
  if (k == 0 || (k > 1 && ipow(p, k) > kMaxTableSize)) {
    fail(ErrorCode::Unsupported, "built-in moduli cover p^k <= 2^20");
  }
  {
    std::lock_guard<std::mutex> lock(conway_mutex());
    auto it = conway_cache().find({p, k});
    if (it != conway_cache().end()) return it->second;
  }
  UPoly c = conway_uncached(p, k);
  std::lock_guard<std::mutex> lock(conway_mutex());
  conway_cache().emplace(std::make_pair(p, k), c);
  return c;
}

FieldSpec FieldSpec::rationals() { return FieldSpec{}; }

FieldSpec FieldSpec::prime(std::uint32_t p) {
  FieldSpec s;
  s.kind = Kind::Prime;
  s.p = p;
  return s;
}

FieldSpec FieldSpec::extension(std::uint32_t p, unsigned k, std::vector<std::uint32_t> modulus) {
  FieldSpec s;
  s.kind = Kind::Extension;
  s.p = p;
  s.k = k;
  s.modulus = std::move(modulus);
  return s;
}

FieldSpec FieldSpec::parse(std::string_view text) {
  auto bad = [&]() -> FieldSpec {
    fail(ErrorCode::ParseError, "bad field spec '" + std::string(text) + "'");
  };
  if (text == "Q" || text == "QQ") return rationals();
  if (text.size() < 2 || text[0] != 'F') return bad();
  std::uint64_t p = 0;
  unsigned k = 1;
  const char* b = text.data() + 1;
  const char* e = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(b, e, p);
  if (ec != std::errc() || ptr == b) return bad();
  if (ptr != e) {
    if (*ptr != '^') return bad();
    auto [ptr2, ec2] = std::from_chars(ptr + 1, e, k);
    if (ec2 != std::errc() || ptr2 != e || k == 0) return bad();
  }
  if (p > UINT32_MAX) fail(ErrorCode::Unsupported, "characteristic too large");
  if (k == 1 && p > 1 && !is_prime(p)) {
    // "F16" names F2^4.
    for (std::uint64_t d = 2; d * d <= p; ++d) {
      if (p % d) continue;
      std::uint64_t m = p;
      unsigned kk = 0;
      while (m % d == 0) m /= d, ++kk;
      if (m == 1) return extension(static_cast<std::uint32_t>(d), kk);
      break;
    }
  }
  if (k == 1) return prime(static_cast<std::uint32_t>(p));
  return extension(static_cast<std::uint32_t>(p), k);
}

std::string FieldSpec::to_string() const {
  switch (kind) {
    case Kind::Rationals: return "Q";
    case Kind::Prime: return "F" + std::to_string(p);
    case Kind::Extension: {
      std::string s = "F" + std::to_string(p) + "^" + std::to_string(k);
      if (!modulus.empty()) s += "[" + poly_string(modulus) + "]";
      return s;
    }
  }
  return "?";
}

struct FieldBuilder {
  static void build_prime(detail::FieldData& d, std::uint32_t p) {
    FiniteOps& o = d.ops;
    o.p = p;
    o.k = 1;
    o.q = p;
    o.prime_field = true;
    if (p > kMaxTableSize) return;
    const std::uint32_t g = (p - conway_polynomial(p, 1)[0]) % p;
    fill_tables(o, g, [&](std::uint32_t a, std::uint32_t b) {
      return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % p);
    });
  }

  static void build_extension(detail::FieldData& d, std::uint32_t p, unsigned k, const UPoly& m) {
    FiniteOps& o = d.ops;
    o.p = p;
    o.k = k;
    o.q = static_cast<std::uint32_t>(ipow(p, k));
    o.prime_field = false;
    auto decode = [&](std::uint32_t a) {
      UPoly v(k, 0);
      for (unsigned i = 0; i < k; ++i) {
        v[i] = a % p;
        a /= p;
      }
      return v;
    };
    auto encode = [&](const UPoly& v) {
      std::uint32_t a = 0;
      for (std::size_t i = v.size(); i-- > 0;) a = a * p + v[i];
      return a;
    };
    auto slow_mul = [&](std::uint32_t a, std::uint32_t b) {
      return encode(poly_mulmod(decode(a), decode(b), m, p));
    };
    const std::uint64_t order = o.q - 1;
    const auto factors = prime_factors(order);
    std::uint32_t g = 0;
    if (is_primitive(m, p, order, factors)) {
      g = p;  // the class of t
    } else {
      for (std::uint32_t c = 2; c < o.q && g == 0; ++c) {
        const UPoly cv = decode(c);
        bool prim = is_x_power_one(poly_powmod(cv, order, m, p));
        for (std::uint64_t l : factors) {
          if (!prim) break;
          if (is_x_power_one(poly_powmod(cv, order / l, m, p))) prim = false;
        }
        if (prim) g = c;
      }
    }
    if (g == p) {
      // Multiplication by t: shift coefficients and reduce by the monic modulus.
      fill_tables(o, g, [&](std::uint32_t a, std::uint32_t) {
        UPoly v = decode(a);
        const std::uint32_t top = v[k - 1];
        for (unsigned i = k - 1; i > 0; --i) v[i] = v[i - 1];
        v[0] = 0;
        for (unsigned i = 0; i < k; ++i) {
          v[i] = static_cast<std::uint32_t>((v[i] + static_cast<std::uint64_t>(p - m[i]) * top) % p);
        }
        return encode(v);
      });
    } else {
      fill_tables(o, g, slow_mul);
    }
    if (p != 2) {
      o.zech_.assign(o.q - 1, FiniteOps::kNoLog);
      for (std::uint32_t n = 0; n < o.q - 1; ++n) {
        std::uint32_t x = o.exp_[n];
        const std::uint32_t c0 = x % p;
        x = x - c0 + (c0 + 1) % p;
        o.zech_[n] = x == 0 ? FiniteOps::kNoLog : o.log_[x];
      }
    }
  }

  template <class Mul>
  static void fill_tables(FiniteOps& o, std::uint32_t g, Mul mul) {
    o.has_tables = true;
    o.generator_ = g;
    const std::uint32_t n = o.q - 1;
    o.exp_.assign(2 * static_cast<std::size_t>(n), 0);
    o.log_.assign(o.q, 0);
    std::uint32_t x = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
      o.exp_[i] = x;
      o.log_[x] = i;
      x = mul(x, g);
    }
    for (std::uint32_t i = 0; i < n; ++i) o.exp_[n + i] = o.exp_[i];
    o.half_ = n / 2;
  }
};

Field Field::create(const FieldSpec& in) {
  FieldSpec spec = in;
  if (spec.kind == FieldSpec::Kind::Extension && spec.k == 1) {
    spec = FieldSpec::prime(spec.p);
  }
  if (spec.kind != FieldSpec::Kind::Rationals) {
    if (!is_prime(spec.p)) fail(ErrorCode::NonPrimeModulus, std::to_string(spec.p) + " is not prime");
    if (spec.p >= (1u << 31)) fail(ErrorCode::Unsupported, "characteristic must be below 2^31");
  }
  FieldKey key{spec.kind, spec.p, spec.k, spec.modulus};
  {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = registry().find(key);
    if (it != registry().end()) return Field(it->second.get());
  }
  auto d = std::make_unique<detail::FieldData>();
  d->spec = spec;
  d->name = spec.to_string();
  switch (spec.kind) {
    case FieldSpec::Kind::Rationals:
      d->finite = false;
      break;
    case FieldSpec::Kind::Prime:
      d->finite = true;
      FieldBuilder::build_prime(*d, spec.p);
      break;
    case FieldSpec::Kind::Extension: {
      if (spec.k == 0) fail(ErrorCode::ParseError, "extension degree must be positive");
      if (ipow(spec.p, spec.k) > kMaxTableSize) {
        fail(ErrorCode::Unsupported, "extension fields are limited to p^k <= 2^20");
      }
      UPoly m = spec.modulus;
      if (m.empty()) {
        m = conway_polynomial(spec.p, spec.k);
        d->conway = true;
      } else {
        if (m.size() != spec.k + 1 || m.back() != 1) {
          fail(ErrorCode::ReducibleModulus, "modulus must be monic of degree k");
        }
        for (auto c : m) {
          if (c >= spec.p) fail(ErrorCode::ParseError, "modulus coefficient out of range");
        }
        if (!is_irreducible_mod_p(m, spec.p)) {
          fail(ErrorCode::ReducibleModulus, poly_string(m) + " factors over F" + std::to_string(spec.p));
        }
      }
      d->modulus = m;
      d->finite = true;
      FieldBuilder::build_extension(*d, spec.p, spec.k, m);
      break;
    }
  }
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto [it, inserted] = registry().emplace(std::move(key), std::move(d));
  return Field(it->second.get());
}

std::uint64_t Field::cardinality() const {
  if (!data_->finite) fail(ErrorCode::InfiniteField, "Q has no cardinality");
  return data_->ops.q;
}

Elem Field::zero() const {
  if (data_->finite) return Elem(data_, std::uint32_t{0});
  return Elem(data_, mpq_class(0));
}

Elem Field::one() const {
  if (data_->finite) return Elem(data_, std::uint32_t{1});
  return Elem(data_, mpq_class(1));
}

Elem Field::from_int(long long v) const {
  if (!data_->finite) return Elem(data_, mpq_class(static_cast<long>(v)));
  const long long p = data_->ops.p;
  long long r = v % p;
  if (r < 0) r += p;
  return Elem(data_, static_cast<std::uint32_t>(r));
}

Elem Field::from_rational(const mpq_class& v) const {
  if (!data_->finite) {
    mpq_class c = v;
    c.canonicalize();
    return Elem(data_, std::move(c));
  }
  const std::uint32_t p = data_->ops.p;
  mpz_class num = v.get_num() % p;
  mpz_class den = v.get_den() % p;
  if (num < 0) num += p;
  if (den == 0) fail(ErrorCode::PreconditionViolated, "denominator divisible by the characteristic");
  const auto n = static_cast<std::uint32_t>(num.get_ui());
  const auto dd = static_cast<std::uint32_t>(den.get_ui());
  return Elem(data_, data_->ops.mul(n, data_->ops.inv(dd)));
}

Elem Field::element(std::uint32_t index) const {
  if (!data_->finite) fail(ErrorCode::InfiniteField, "Q elements have no encoding");
  if (index >= data_->ops.q) fail(ErrorCode::PreconditionViolated, "encoding out of range");
  return Elem(data_, index);
}

Elem Field::t() const {
  if (data_->finite && data_->ops.k > 1) return Elem(data_, data_->ops.p);
  return one();
}

std::vector<Elem> Field::enumerate() const {
  if (!data_->finite) fail(ErrorCode::InfiniteField, "cannot enumerate Q");
  std::vector<Elem> out;
  out.reserve(data_->ops.q);
  for (std::uint32_t i = 0; i < data_->ops.q; ++i) out.push_back(Elem(data_, i));
  return out;
}

Elem Field::random(Rng& rng, long long height) const {
  if (data_->finite) return Elem(data_, static_cast<std::uint32_t>(rng.below(data_->ops.q)));
  return from_int(rng.between(-height, height));
}

Elem Field::embed(const Elem& x) const {
  const Field src = x.field();
  if (src == *this) return x;
  if (!data_->finite || !src.is_finite() || src.characteristic() != characteristic()) {
    fail(ErrorCode::FieldMismatch, "no embedding from " + src.name() + " into " + name());
  }
  const unsigned d = src.degree();
  const unsigned k = degree();
  if (k % d != 0) fail(ErrorCode::FieldMismatch, src.name() + " is not a subfield of " + name());
  if (d == 1) return Elem(data_, x.index());
  if (!src.data_->conway || !data_->conway) {
    fail(ErrorCode::Unsupported, "subfield embedding needs built-in moduli");
  }
  if (x.is_zero()) return zero();
  const std::uint64_t step = (data_->ops.q - 1) / (src.data_->ops.q - 1);
  return Elem(data_, data_->ops.exp(static_cast<std::uint64_t>(src.data_->ops.log(x.index())) * step));
}

std::uint32_t FiniteOps::inv(std::uint32_t a) const {
  if (a == 0) fail(ErrorCode::PreconditionViolated, "division by zero");
  if (has_tables) return exp_[(q - 1) - log_[a]];
  return static_cast<std::uint32_t>(powmod(a, p - 2, p));
}

std::uint32_t FiniteOps::pow(std::uint32_t a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  if (has_tables) return exp_[static_cast<std::uint64_t>(log_[a]) * (e % (q - 1)) % (q - 1)];
  return static_cast<std::uint32_t>(powmod(a, e, p));
}

Elem Elem::inv() const {
  if (is_zero()) fail(ErrorCode::PreconditionViolated, "division by zero");
  if (f_->finite) return Elem(f_, f_->ops.inv(index()));
  return Elem(f_, mpq_class(1 / rational()));
}

Elem Elem::pow(std::uint64_t e) const {
  if (f_->finite) return Elem(f_, f_->ops.pow(index(), e));
  mpq_class r = 1;
  mpq_class b = rational();
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return Elem(f_, r);
}

namespace {

// Tonelli-Shanks for prime fields without tables.
std::optional<std::uint64_t> sqrt_mod_prime(std::uint64_t a, std::uint64_t p) {
  if (a == 0) return 0;
  if (p == 2) return a;
  if (powmod(a, (p - 1) / 2, p) != 1) return std::nullopt;
  std::uint64_t q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  std::uint64_t z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  std::uint64_t m = s;
  std::uint64_t c = powmod(z, q, p);
  std::uint64_t t = powmod(a, q, p);
  std::uint64_t r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    std::uint64_t i = 0;
    std::uint64_t tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    std::uint64_t b = c;
    for (std::uint64_t j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

}  // namespace

std::optional<Elem> Elem::sqrt() const {
  if (!f_->finite) {
    const mpq_class& v = rational();
    if (sgn(v) < 0) return std::nullopt;
    if (!mpz_perfect_square_p(v.get_num().get_mpz_t()) ||
        !mpz_perfect_square_p(v.get_den().get_mpz_t())) {
      return std::nullopt;
    }
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), v.get_num().get_mpz_t());
    mpz_sqrt(d.get_mpz_t(), v.get_den().get_mpz_t());
    return Elem(f_, mpq_class(n, d));
  }
  const FiniteOps& o = f_->ops;
  const std::uint32_t a = index();
  if (a == 0) return *this;
  if (o.p == 2) {
    std::uint32_t x = a;
    for (std::uint32_t i = 1; i < o.k; ++i) x = o.mul(x, x);
    return Elem(f_, x);
  }
  if (o.has_tables) {
    const std::uint32_t l = o.log(a);
    if (l % 2) return std::nullopt;
    return Elem(f_, o.exp(l / 2));
  }
  auto r = sqrt_mod_prime(a, o.p);
  if (!r) return std::nullopt;
  return Elem(f_, static_cast<std::uint32_t>(*r));
}

bool Elem::is_square() const { return sqrt().has_value(); }

std::string Elem::to_string() const {
  if (!f_) return "<null>";
  if (!f_->finite) return rational().get_str();
  const FiniteOps& o = f_->ops;
  if (o.k == 1) return std::to_string(index());
  UPoly v(o.k, 0);
  std::uint32_t a = index();
  for (unsigned i = 0; i < o.k; ++i) {
    v[i] = a % o.p;
    a /= o.p;
  }
  return poly_string(v);
}

}  // namespace charstrat

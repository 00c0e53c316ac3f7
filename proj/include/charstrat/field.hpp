#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "charstrat/error.hpp"

namespace charstrat {

class Rng;

struct FieldSpec {
  enum class Kind { Rationals, Prime, Extension };

  Kind kind = Kind::Rationals;
  std::uint32_t p = 0;
  unsigned k = 1;
  // Monic modulus, coefficients from t^0 to t^k. Empty selects the built-in one.
  std::vector<std::uint32_t> modulus;

  static FieldSpec rationals();
  static FieldSpec prime(std::uint32_t p);
  static FieldSpec extension(std::uint32_t p, unsigned k, std::vector<std::uint32_t> modulus = {});
  // Accepts "Q", "F5", "F2^4".
  static FieldSpec parse(std::string_view text);

  std::string to_string() const;
};

// Raw arithmetic on encoded finite-field elements. An element of F_{p^k} is
// encoded as sum c_i p^i where c_i are its coefficients in the power basis of
// t; prime-field elements are their residues.
class FiniteOps {
 public:
  std::uint32_t p = 0;
  std::uint32_t k = 1;
  std::uint32_t q = 0;
  bool prime_field = true;
  bool has_tables = false;

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    if (prime_field) {
      const std::uint32_t s = a + b;
      return s >= p ? s - p : s;
    }
    if (p == 2) return a ^ b;
    return add_zech(a, b);
  }

  std::uint32_t neg(std::uint32_t a) const {
    if (a == 0 || p == 2) return a;
    if (prime_field) return p - a;
    return exp_[log_[a] + half_];
  }

  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg(b)); }

  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    if (prime_field) {
      return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % p);
    }
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }

  std::uint32_t inv(std::uint32_t a) const;
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;

  // Discrete log with respect to generator(); requires tables and a != 0.
  std::uint32_t log(std::uint32_t a) const { return log_[a]; }
  std::uint32_t exp(std::uint64_t n) const { return exp_[n % (q - 1)]; }
  std::uint32_t generator() const { return generator_; }

 private:
  friend class Field;
  friend struct FieldBuilder;

  std::uint32_t add_zech(std::uint32_t a, std::uint32_t b) const {
    if (a == 0) return b;
    if (b == 0) return a;
    const std::uint32_t la = log_[a];
    std::uint32_t n = log_[b] + (q - 1) - la;
    if (n >= q - 1) n -= q - 1;
    const std::uint32_t z = zech_[n];
    if (z == kNoLog) return 0;
    return exp_[la + z];
  }

  static constexpr std::uint32_t kNoLog = 0xffffffffu;

  std::uint32_t half_ = 0;
  std::uint32_t generator_ = 0;
  std::vector<std::uint32_t> exp_;   // length 2(q-1)
  std::vector<std::uint32_t> log_;   // length q
  std::vector<std::uint32_t> zech_;  // log(1 + g^n), only for odd-p extensions
};

namespace detail {

struct FieldData {
  FieldSpec spec;
  std::string name;
  bool finite = false;
  FiniteOps ops;
  std::vector<std::uint32_t> modulus;  // resolved modulus for extensions
  bool conway = false;                 // modulus is the built-in (Conway) one
};

}  // namespace detail

class Elem;

// Handle to an interned, immutable field description. Copies are cheap and
// the underlying data lives for the whole process.
class Field {
 public:
  Field() = default;

  static Field create(const FieldSpec& spec);
  static Field parse(std::string_view text) { return create(FieldSpec::parse(text)); }
  static Field rationals() { return create(FieldSpec::rationals()); }
  static Field gf(std::uint32_t p, unsigned k = 1) {
    return create(k == 1 ? FieldSpec::prime(p) : FieldSpec::extension(p, k));
  }

  bool valid() const { return data_ != nullptr; }
  bool is_finite() const { return data_->finite; }
  std::uint32_t characteristic() const { return data_->finite ? data_->ops.p : 0; }
  unsigned degree() const { return data_->finite ? data_->ops.k : 1; }
  std::uint64_t cardinality() const;
  const FieldSpec& spec() const { return data_->spec; }
  const std::string& name() const { return data_->name; }
  const std::vector<std::uint32_t>& modulus() const { return data_->modulus; }
  const FiniteOps& ops() const { return data_->ops; }

  Elem zero() const;
  Elem one() const;
  Elem from_int(long long v) const;
  Elem from_rational(const mpq_class& v) const;
  // Element with the given encoding (finite fields only).
  Elem element(std::uint32_t index) const;
  // The class of t in F_p[t]/(modulus); for prime fields this is 1.
  Elem t() const;

  // All elements in encoding order 0, 1, ..., q-1.
  std::vector<Elem> enumerate() const;

  // Uniform element (finite) or uniform integer in [-height, height] (Q).
  Elem random(Rng& rng, long long height = 1) const;

  // Image of an element of a subfield. Supported for the prime subfield and,
  // when both fields use built-in moduli, for any F_{p^d} inside F_{p^k}.
  Elem embed(const Elem& x) const;

  const detail::FieldData* data() const { return data_; }

  friend bool operator==(const Field& a, const Field& b) { return a.data_ == b.data_; }
  friend bool operator!=(const Field& a, const Field& b) { return a.data_ != b.data_; }

 private:
  explicit Field(const detail::FieldData* d) : data_(d) {}
  friend class Elem;

  const detail::FieldData* data_ = nullptr;
};

class Elem {
 public:
  Elem() = default;

  Field field() const { return Field(f_); }
  bool valid() const { return f_ != nullptr; }

  bool is_zero() const {
    return f_->finite ? std::get<std::uint32_t>(v_) == 0 : sgn(std::get<mpq_class>(v_)) == 0;
  }
  bool is_one() const {
    return f_->finite ? std::get<std::uint32_t>(v_) == 1 : std::get<mpq_class>(v_) == 1;
  }

  // Encoding of a finite-field element.
  std::uint32_t index() const { return std::get<std::uint32_t>(v_); }
  const mpq_class& rational() const { return std::get<mpq_class>(v_); }

  friend Elem operator+(const Elem& a, const Elem& b) {
    const auto* f = common(a, b);
    if (f->finite) return Elem(f, f->ops.add(a.index(), b.index()));
    return Elem(f, mpq_class(a.rational() + b.rational()));
  }
  friend Elem operator-(const Elem& a, const Elem& b) {
    const auto* f = common(a, b);
    if (f->finite) return Elem(f, f->ops.sub(a.index(), b.index()));
    return Elem(f, mpq_class(a.rational() - b.rational()));
  }
  friend Elem operator*(const Elem& a, const Elem& b) {
    const auto* f = common(a, b);
    if (f->finite) return Elem(f, f->ops.mul(a.index(), b.index()));
    return Elem(f, mpq_class(a.rational() * b.rational()));
  }
  friend Elem operator/(const Elem& a, const Elem& b) { return a * b.inv(); }

  Elem operator-() const {
    if (f_->finite) return Elem(f_, f_->ops.neg(index()));
    return Elem(f_, mpq_class(-rational()));
  }

  Elem& operator+=(const Elem& b) { return *this = *this + b; }
  Elem& operator-=(const Elem& b) { return *this = *this - b; }
  Elem& operator*=(const Elem& b) { return *this = *this * b; }

  Elem inv() const;
  Elem pow(std::uint64_t e) const;

  // Square root if one exists in the field. In characteristic 2 every element
  // has exactly one, x^(2^(k-1)).
  std::optional<Elem> sqrt() const;
  bool is_square() const;

  friend bool operator==(const Elem& a, const Elem& b) {
    const auto* f = common(a, b);
    if (f->finite) return a.index() == b.index();
    return a.rational() == b.rational();
  }
  friend bool operator!=(const Elem& a, const Elem& b) { return !(a == b); }

  std::string to_string() const;

 private:
  friend class Field;

  Elem(const detail::FieldData* f, std::uint32_t v) : f_(f), v_(v) {}
  Elem(const detail::FieldData* f, mpq_class v) : f_(f), v_(std::move(v)) {}

  static const detail::FieldData* common(const Elem& a, const Elem& b) {
    if (a.f_ != b.f_ || a.f_ == nullptr) {
      fail(ErrorCode::FieldMismatch, "operands belong to different fields");
    }
    return a.f_;
  }

  const detail::FieldData* f_ = nullptr;
  std::variant<std::uint32_t, mpq_class> v_;
};

bool is_prime(std::uint64_t n);

// Conway polynomial (monic, coefficients t^0..t^k) for p^k <= 2^20.
std::vector<std::uint32_t> conway_polynomial(std::uint32_t p, unsigned k);

// True when the monic polynomial (coefficients low to high) is irreducible over F_p.
bool is_irreducible_mod_p(const std::vector<std::uint32_t>& poly, std::uint32_t p);

}  // namespace charstrat

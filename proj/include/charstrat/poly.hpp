#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "charstrat/field.hpp"
#include "charstrat/linalg.hpp"

namespace charstrat {

constexpr std::size_t kMaxVars = 8;
constexpr int kDefaultTrunc = 8;

// Exponent vector packed one byte per variable (variable i in byte i).
class Monomial {
 public:
  Monomial() = default;
  static Monomial var(std::size_t i, unsigned power = 1);
  static Monomial from_exponents(const std::vector<unsigned>& e);

  unsigned operator[](std::size_t i) const { return static_cast<unsigned>((bits_ >> (8 * i)) & 0xffu); }
  unsigned degree() const { return static_cast<unsigned>((bits_ * 0x0101010101010101ULL) >> 56); }
  std::uint64_t bits() const { return bits_; }
  bool is_one() const { return bits_ == 0; }

  Monomial operator*(const Monomial& o) const;
  bool divides(const Monomial& o) const;
  // Requires divides(o).
  Monomial quotient_of(const Monomial& o) const { return Monomial(o.bits_ - bits_); }
  Monomial lowered(std::size_t i) const { return Monomial(bits_ - (std::uint64_t{1} << (8 * i))); }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.bits_ == b.bits_; }
  friend bool operator!=(const Monomial& a, const Monomial& b) { return a.bits_ != b.bits_; }

  std::string to_string() const;

  // All monomials in `nvars` variables of exactly / at most the given degree, grevlex ascending.
  static std::vector<Monomial> of_degree(std::size_t nvars, unsigned d);
  static std::vector<Monomial> up_to_degree(std::size_t nvars, unsigned d);

 private:
  explicit Monomial(std::uint64_t b) : bits_(b) {}
  std::uint64_t bits_ = 0;
};

// Graded reverse lexicographic order.
struct GrevlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const unsigned da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    const std::uint64_t diff = a.bits() ^ b.bits();
    if (diff == 0) return false;
    const int byte = (63 - __builtin_clzll(diff)) / 8;
    return a[static_cast<std::size_t>(byte)] > b[static_cast<std::size_t>(byte)];
  }
};

struct Term {
  Monomial m;
  Elem c;
};

// Sparse polynomial; terms sorted ascending in grevlex order, no zero coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(Field field, std::size_t nvars);

  static Polynomial constant(Field field, std::size_t nvars, const Elem& c);
  static Polynomial variable(Field field, std::size_t nvars, std::size_t i);
  static Polynomial monomial(Field field, std::size_t nvars, const Monomial& m, const Elem& c);
  // Text syntax: integers, x0..x7 (x, y, z, w as aliases of x0..x3), t for the
  // extension generator, + - * / ^ and parentheses. Division only by constants.
  static Polynomial parse(Field field, std::size_t nvars, std::string_view text);
  // Number of variables used by `text` (highest index + 1).
  static std::size_t count_vars(std::string_view text);

  Field field() const { return field_; }
  std::size_t nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  Elem coeff(const Monomial& m) const;
  Elem constant_term() const { return coeff(Monomial()); }
  // Total degree of the highest / lowest term; -1 for zero.
  int degree() const;
  int order() const;
  bool uses_var(std::size_t i) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const { return mul(o, -1); }
  Polynomial operator*(const Elem& c) const;
  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
  friend bool operator==(const Polynomial& a, const Polynomial& b);
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  // Product keeping only terms of degree <= trunc (trunc < 0: no truncation).
  Polynomial mul(const Polynomial& o, int trunc) const;
  Polynomial pow(unsigned e, int trunc = -1) const;
  Polynomial truncated(int n) const;
  Polynomial homogeneous_part(unsigned d) const;
  // Terms of degree in [lo, hi].
  Polynomial degree_range(unsigned lo, unsigned hi) const;

  // Formal partial derivative (coefficient m * x^(m-1), m read in the field).
  Polynomial derive(std::size_t i) const;
  Elem evaluate(const Vector& point) const;
  // Substitute x_i := subs[i]. Constant terms allowed; trunc < 0 keeps everything.
  Polynomial compose(const std::vector<Polynomial>& subs, int trunc = -1) const;
  // f(x0 + y) as a polynomial in y.
  Polynomial shifted(const Vector& x0) const;
  // Set x_i := value, keeping the variable count.
  Polynomial partial_evaluate(std::size_t i, const Elem& value) const;
  // Same polynomial read in `nvars` variables; variable j goes to map[j].
  Polynomial remap(std::size_t nvars, const std::vector<std::size_t>& map) const;
  // Image under a field embedding (e.g. F_p into F_{p^k}).
  Polynomial embedded(const Field& target) const;

  std::string to_string() const;

  // Internal: build from unsorted terms (duplicates summed, zeros dropped).
  static Polynomial from_terms(Field field, std::size_t nvars, std::vector<Term> terms);

 private:
  Field field_;
  std::size_t nvars_ = 0;
  std::vector<Term> terms_;
};

// Polynomial considered modulo <x>^(N+1).
class TruncatedSeries {
 public:
  TruncatedSeries() = default;
  TruncatedSeries(Polynomial p, int n) : body_(p.truncated(n)), n_(n) {
    if (n < 0) fail(ErrorCode::NotTruncatable, "negative truncation order");
  }
  static TruncatedSeries parse(Field field, std::size_t nvars, std::string_view text, int n = kDefaultTrunc) {
    return TruncatedSeries(Polynomial::parse(field, nvars, text), n);
  }

  const Polynomial& poly() const { return body_; }
  int trunc_order() const { return n_; }
  std::size_t nvars() const { return body_.nvars(); }
  Field field() const { return body_.field(); }

  TruncatedSeries operator+(const TruncatedSeries& o) const { return {body_ + o.body_, std::min(n_, o.n_)}; }
  TruncatedSeries operator-(const TruncatedSeries& o) const { return {body_ - o.body_, std::min(n_, o.n_)}; }
  TruncatedSeries operator*(const TruncatedSeries& o) const {
    const int n = std::min(n_, o.n_);
    return {body_.mul(o.body_, n), n};
  }
  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a.n_ == b.n_ && a.body_ == b.body_;
  }

  std::string to_string() const { return body_.to_string(); }

 private:
  Polynomial body_;
  int n_ = kDefaultTrunc;
};

// f(subs_1, ..., subs_n) mod <x>^(N+1); every substituted series must vanish at 0.
TruncatedSeries series_compose(const TruncatedSeries& f, const std::vector<TruncatedSeries>& subs, int n);
Polynomial series_compose(const Polynomial& f, const std::vector<Polynomial>& subs, int n);
TruncatedSeries derive(const TruncatedSeries& f, std::size_t i);

// F : A^n -> A^r given by r polynomials in n variables.
struct PolyMap {
  Field field;
  std::size_t n = 0;
  std::size_t r = 0;
  std::vector<Polynomial> components;

  PolyMap() = default;
  PolyMap(Field f, std::size_t n_, std::vector<Polynomial> comps);
  // Components separated by ';'.
  static PolyMap parse(Field field, std::size_t n, std::string_view text);

  Vector evaluate(const Vector& x) const;
  // r x n matrix of partial derivatives.
  std::vector<std::vector<Polynomial>> jacobian() const;
  PolyMap operator+(const PolyMap& o) const;
  PolyMap operator*(const Elem& c) const;
  PolyMap embedded(const Field& target) const;
  std::string to_string() const;
};

struct Jet2 {
  Vector value;                 // r
  Matrix jacobian;              // r x n
  std::vector<Matrix> hessian;  // r slices, each n x n
};

Jet2 jet2_at(const PolyMap& f, const Vector& x0);

}  // namespace charstrat

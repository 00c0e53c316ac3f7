#include "charstrat/codim.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "charstrat/error.hpp"

namespace charstrat {

namespace {

std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

bool even(std::int64_t v) { return v % 2 == 0; }

void check_cmin(const CMinSpec& s) {
  if (s.a < 1 || s.f < 1 || s.a * s.f > s.e) fail(ErrorCode::PreconditionViolated, "need a >= 1, f >= 1, af <= e");
  if (s.sign != 1 && s.sign != -1) fail(ErrorCode::PreconditionViolated, "sign must be +1 or -1");
}

}  // namespace

Symmetry parse_symmetry(const std::string& s) {
  if (s == "sym" || s == "plus" || s == "+") return Symmetry::Sym;
  if (s == "alt" || s == "minus" || s == "-") return Symmetry::Alt;
  fail(ErrorCode::ParseError, "symmetry must be sym or alt, got \"" + s + "\"");
}

std::optional<std::int64_t> crit_codim(std::int64_t n, std::int64_t r, std::int64_t i) {
  if (n < 0 || r < 0 || i < 0 || i > std::min(n, r)) return std::nullopt;
  return i * (iabs(n - r) + i);
}

std::optional<std::int64_t> second_order_codim(std::int64_t n, std::int64_t r, std::int64_t i, std::int64_t j,
                                               std::uint32_t ch) {
  const std::int64_t m = std::min(n, r);
  if (n < 0 || r < 0 || i < 0 || j < 0 || i > m || j > n - m + i) return std::nullopt;
  if (i == 0 && j != 0) return std::nullopt;
  if (ch == 2 && i == 1 && r <= n && !even(n - m + i - j)) return std::nullopt;
  const std::int64_t pm = ch == 2 ? -1 : 1;
  return i * (iabs(n - r) + i) + j * (n - m + i - j) * (r - m + i - 1) + j * (j + pm) * (r - m + i) / 2;
}

std::optional<std::int64_t> bad_locus_codim(std::int64_t n, std::int64_t r, std::int64_t i, std::uint32_t ch) {
  const std::int64_t m = std::min(n, r);
  if (i <= 0 || i > m) return std::nullopt;
  const std::int64_t c = i * (iabs(n - r) + i);
  if (n < c) return c;
  return c + first_degeneracy_codim(n, n - m + i, r - m + i, symmetry_for_char(ch));
}

std::int64_t DeltaSpec::n() const { return std::min(e, a * f) - i; }

std::int64_t DeltaSpec::ambient_dim() const {
  const std::int64_t pm = sym == Symmetry::Sym ? 1 : -1;
  return f * (a * (a + pm) / 2 + a * (e - a));
}

bool delta_nonempty(const DeltaSpec& s) {
  if (s.e < 0 || s.a < 0 || s.f < 0 || s.i < 0 || s.a > s.e) return false;
  const std::int64_t n = s.n();
  if (n < 0) return false;
  if (s.p < std::max<std::int64_t>(s.a - n, 0) || s.p > std::min(s.a, s.e - n)) return false;
  if (s.sym == Symmetry::Alt && s.f == 1 && !even(s.a - s.p)) return false;
  return true;
}

std::optional<std::int64_t> delta_codim(const DeltaSpec& s) {
  if (!delta_nonempty(s)) return std::nullopt;
  const std::int64_t n = s.n(), p = s.p, a = s.a, e = s.e, f = s.f;
  const std::int64_t pm = s.sym == Symmetry::Sym ? 1 : -1;
  return p * (n - a + p) + f * ((-p * p + pm * p) / 2 + (e - n) * a) - n * (e - n);
}

std::optional<std::int64_t> box_rank_stratum_codim(std::int64_t e, std::int64_t f, std::int64_t i, Symmetry sym) {
  if (e < 0 || f < 0 || i < 0 || i > e) return std::nullopt;
  if (sym == Symmetry::Alt && f == 1 && !even(e - i)) return std::nullopt;
  const std::int64_t pm = sym == Symmetry::Sym ? 1 : -1;
  return i * (e - i) * (f - 1) + i * (i + pm) * f / 2;
}

std::int64_t first_degeneracy_codim(std::int64_t e, std::int64_t a, std::int64_t f, Symmetry sym) {
  if (a * f > e) fail(ErrorCode::PreconditionViolated, "first degeneracy codimension needs af <= e");
  if (sym == Symmetry::Alt) {
    const bool keeps = a > 1 && (f != 1 || (a == e && even(e)));
    if (!keeps) return e - a * f;
  }
  return e - a * f + 1;
}

bool CMinSpec::admissible(std::int64_t i, std::int64_t p) const {
  if (i < 1 || i > a * f) return false;
  if (p < std::max<std::int64_t>(a - a * f + i, 0) || p > std::min(a, e - a * f + i)) return false;
  return !parity_restricted() || even(p - a);
}

std::int64_t CMinSpec::value(std::int64_t i, std::int64_t p) const {
  const std::int64_t af = a * f;
  return p * (af - i - a + p) + f * ((-p * p + sign * p) / 2 + (e - af + i) * a) - (af - i) * (e - af + i);
}

std::vector<std::pair<std::int64_t, std::int64_t>> CMinSpec::region() const {
  std::vector<std::pair<std::int64_t, std::int64_t>> pts;
  for (std::int64_t i = 1; i <= a * f; ++i)
    for (std::int64_t p = std::max<std::int64_t>(a - a * f + i, 0); p <= std::min(a, e - a * f + i); ++p)
      if (admissible(i, p)) pts.emplace_back(i, p);
  return pts;
}

CMinResult minimize_C(const CMinSpec& s) {
  check_cmin(s);
  const std::int64_t e = s.e, a = s.a, f = s.f, af = a * f;
  CMinResult out;
  if (s.sign > 0) {
    out.value = e - af + 1;
  } else if (f > 1) {
    out.value = a > 1 ? e - af + 1 : e - af;
  } else {
    out.value = (a == e && even(e)) ? e - af + 1 : e - af;
  }
  // Minimizers lie on the boundary segments L1 = {i = 1} and L2 = {p = e - af + i}.
  std::vector<std::pair<std::int64_t, std::int64_t>> cand;
  for (std::int64_t p = std::max<std::int64_t>(a - af + 1, 0); p <= std::min(a, e - af + 1); ++p) cand.emplace_back(1, p);
  for (std::int64_t i = 1; i <= (f + 1) * a - e; ++i) cand.emplace_back(i, e - af + i);
  std::sort(cand.begin(), cand.end());
  for (const auto& [i, p] : cand) {
    if (s.admissible(i, p) && s.value(i, p) == out.value) {
      out.witness = {i, p};
      return out;
    }
  }
  fail(ErrorCode::EmptyRegion, "no boundary point attains the closed-form minimum");
}

BruteForceMin brute_force_min_C(const CMinSpec& s) {
  check_cmin(s);
  BruteForceMin out;
  out.value = std::numeric_limits<std::int64_t>::max();
  for (const auto& [i, p] : s.region()) {
    ++out.evaluated;
    const std::int64_t v = s.value(i, p);
    if (v < out.value) {
      out.value = v;
      out.argmin.clear();
    }
    if (v == out.value) out.argmin.emplace_back(i, p);
  }
  if (out.argmin.empty()) fail(ErrorCode::EmptyRegion, "no admissible lattice point");
  return out;
}

}  // namespace charstrat

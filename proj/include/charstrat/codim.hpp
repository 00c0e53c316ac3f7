#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace charstrat {

// Sym2 (characteristic != 2) or wedge2 (characteristic 2).
enum class Symmetry { Sym, Alt };

inline Symmetry symmetry_for_char(std::uint32_t ch) { return ch == 2 ? Symmetry::Alt : Symmetry::Sym; }
inline const char* to_string(Symmetry s) { return s == Symmetry::Sym ? "sym" : "alt"; }
Symmetry parse_symmetry(const std::string& s);

std::optional<std::int64_t> crit_codim(std::int64_t n, std::int64_t r, std::int64_t i);
std::optional<std::int64_t> second_order_codim(std::int64_t n, std::int64_t r, std::int64_t i, std::int64_t j,
                                               std::uint32_t ch);
std::optional<std::int64_t> bad_locus_codim(std::int64_t n, std::int64_t r, std::int64_t i, std::uint32_t ch);

struct DeltaSpec {
  std::int64_t e = 0, a = 0, f = 0, i = 0, p = 0;
  Symmetry sym = Symmetry::Sym;

  std::int64_t n() const;
  // f * (a(a +- 1)/2 + a(e - a)).
  std::int64_t ambient_dim() const;
};

bool delta_nonempty(const DeltaSpec& s);
std::optional<std::int64_t> delta_codim(const DeltaSpec& s);
std::optional<std::int64_t> box_rank_stratum_codim(std::int64_t e, std::int64_t f, std::int64_t i, Symmetry sym);
// Throws PreconditionViolated when af > e.
std::int64_t first_degeneracy_codim(std::int64_t e, std::int64_t a, std::int64_t f, Symmetry sym);

struct CMinSpec {
  std::int64_t e = 0, a = 0, f = 0;
  int sign = +1;

  bool parity_restricted() const { return sign < 0 && f == 1; }
  bool admissible(std::int64_t i, std::int64_t p) const;
  std::int64_t value(std::int64_t i, std::int64_t p) const;
  std::vector<std::pair<std::int64_t, std::int64_t>> region() const;
};

struct CMinResult {
  std::int64_t value = 0;
  std::pair<std::int64_t, std::int64_t> witness;
};

struct BruteForceMin {
  std::int64_t value = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> argmin;
  std::size_t evaluated = 0;
};

CMinResult minimize_C(const CMinSpec& s);
BruteForceMin brute_force_min_C(const CMinSpec& s);

}  // namespace charstrat

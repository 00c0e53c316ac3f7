#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "charstrat/codim.hpp"
#include "charstrat/field.hpp"
#include "charstrat/linalg.hpp"
#include "charstrat/rng.hpp"

namespace charstrat {

inline constexpr std::uint64_t kDefaultCensusBudget = std::uint64_t{1} << 26;

// Linear maps h : E -> Hom(A, F) coming from f bilinear forms A x E -> k whose
// A x A block is symmetric (Sym) or alternating (Alt). A is spanned by the
// first a basis vectors of E.
struct ConstrainedSpec {
  Field field;
  std::int64_t e = 0, a = 0, f = 0;
  Symmetry sym = Symmetry::Sym;

  std::int64_t ambient_dim() const;
  // Free coordinates in storage order: for each form c, pairs (k, l) with
  // k < a, l < e and k <= l (Sym) or k < l (Alt).
  std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> coordinates() const;
  // field cardinality ^ ambient_dim, saturating at UINT64_MAX.
  std::uint64_t point_count() const;
  std::string to_string() const;
};

struct ConstrainedMap {
  ConstrainedSpec spec;
  Vector data;
  // e x (a f): row l is h(v_l), column c*a + k its value on u_k in form c.
  Matrix realized;

  static ConstrainedMap from_data(const ConstrainedSpec& spec, Vector data);
  // forms[c] is a x e with entry (k, l) = b_c(v_k, v_l); throws
  // PreconditionViolated if an A x A block breaks the symmetry constraint.
  static ConstrainedMap from_forms(const ConstrainedSpec& spec, const std::vector<Matrix>& forms);

  std::size_t rank() const;
  std::size_t rank_on_A() const;
  // (i, p) with i = min(e, af) - rank and p = a - rank on A.
  std::pair<std::int64_t, std::int64_t> stratum() const;
};

// Visits every point of the ambient space in index order, coordinate 0 varying fastest.
class ConstrainedEnumerator {
 public:
  explicit ConstrainedEnumerator(ConstrainedSpec spec, std::uint64_t budget = kDefaultCensusBudget);

  std::uint64_t total() const { return total_; }
  bool next(ConstrainedMap& out);

 private:
  ConstrainedSpec spec_;
  std::vector<Elem> elems_;
  std::vector<std::uint32_t> digits_;
  std::uint64_t total_ = 0;
  std::uint64_t emitted_ = 0;
};

std::vector<ConstrainedMap> enumerate_constrained(const ConstrainedSpec& spec,
                                                  std::uint64_t budget = kDefaultCensusBudget);

struct CensusTable {
  std::map<std::pair<std::int64_t, std::int64_t>, std::uint64_t> counts;
  std::uint64_t total = 0;

  std::uint64_t count(std::int64_t i, std::int64_t p) const;
  bool occupied(std::int64_t i, std::int64_t p) const { return count(i, p) > 0; }
};

CensusTable stratum_census(const ConstrainedSpec& spec, std::uint64_t budget = kDefaultCensusBudget,
                           unsigned workers = 1);

// Witness point of the stratum, built as in the nonemptiness argument and then
// verified. Throws EmptyStratum if the predicate fails or the construction
// does not land in the stratum.
ConstrainedMap witness(const Field& field, const DeltaSpec& spec);

struct CodimEstimate {
  std::vector<std::string> tower;
  std::vector<std::uint64_t> cardinalities;
  std::vector<std::uint64_t> hits;
  std::uint64_t samples_per_field = 0;
  std::vector<double> fractions;
  double estimate = 0;
  double halfwidth = 0;
};

struct McConfig {
  std::vector<Field> tower;
  std::uint64_t samples_per_field = 1000000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

// One Bernoulli trial over the given field.
using Trial = std::function<bool(const Field&, Rng&)>;

CodimEstimate estimate_codim_mc(const Trial& trial, const McConfig& cfg);
// Uniform points of the ambient space of `shape` (its field is ignored).
CodimEstimate estimate_codim_mc(const std::function<bool(const ConstrainedMap&)>& membership,
                                const ConstrainedSpec& shape, const McConfig& cfg);
// Membership in the stratum, on the raw fast path.
CodimEstimate estimate_delta_codim_mc(const DeltaSpec& spec, const McConfig& cfg);

// Least-squares slope of -ln(fraction) against ln(q), with the delta-method half-width.
void fit_codim(CodimEstimate& est);

std::vector<Field> parse_tower(const std::string& text);

}  // namespace charstrat

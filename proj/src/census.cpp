#include "charstrat/census.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <thread>

#include "charstrat/error.hpp"

namespace charstrat {

namespace {

// Where each free coordinate lands in the realized matrix.
struct Layout {
  struct Slot {
    std::uint32_t row, col;
    bool negate;
  };

  std::size_t e, a, cols;
  std::vector<std::array<Slot, 2>> slots;
  std::vector<std::uint8_t> nslots;

  explicit Layout(const ConstrainedSpec& s)
      : e(static_cast<std::size_t>(s.e)), a(static_cast<std::size_t>(s.a)), cols(static_cast<std::size_t>(s.a * s.f)) {
    for (const auto& [c, k, l] : s.coordinates()) {
      std::array<Slot, 2> sl{};
      const auto uc = static_cast<std::uint32_t>(c * s.a);
      sl[0] = {static_cast<std::uint32_t>(l), uc + static_cast<std::uint32_t>(k), false};
      std::uint8_t n = 1;
      if (l < s.a && l != k) {
        sl[1] = {static_cast<std::uint32_t>(k), uc + static_cast<std::uint32_t>(l), s.sym == Symmetry::Alt};
        n = 2;
      }
      slots.push_back(sl);
      nslots.push_back(n);
    }
  }

  std::size_t dim() const { return slots.size(); }

  void put(const FiniteOps& ops, std::vector<std::uint32_t>& m, std::size_t t, std::uint32_t d) const {
    for (std::uint8_t s = 0; s < nslots[t]; ++s) {
      const Slot& sl = slots[t][s];
      m[sl.row * cols + sl.col] = sl.negate ? ops.neg(d) : d;
    }
  }

  // Bit masks of each coordinate on the rows, characteristic 2 only.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> masks() const {
    std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> out(dim());
    for (std::size_t t = 0; t < dim(); ++t)
      for (std::uint8_t s = 0; s < nslots[t]; ++s)
        out[t].emplace_back(slots[t][s].row, std::uint64_t{1} << slots[t][s].col);
    return out;
  }
};

struct Ranks {
  std::size_t on_a, total;
};

Ranks ranks_raw(const FiniteOps& ops, const Layout& lay, const std::vector<std::uint32_t>& m,
                std::vector<std::uint32_t>& scratch) {
  scratch.assign(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(lay.a * lay.cols));
  const std::size_t ra = rank_raw(ops, scratch.data(), lay.a, lay.cols);
  scratch.assign(m.begin(), m.end());
  const std::size_t r = rank_raw(ops, scratch.data(), lay.e, lay.cols);
  return {ra, r};
}

Ranks ranks_f2(const std::uint64_t* rows, std::size_t e, std::size_t a) {
  std::uint64_t piv[64];
  std::uint64_t have = 0;
  std::size_t r = 0, ra = 0;
  for (std::size_t l = 0; l < e; ++l) {
    if (l == a) ra = r;
    std::uint64_t v = rows[l];
    while (v) {
      const int hb = 63 - __builtin_clzll(v);
      if (have >> hb & 1) {
        v ^= piv[hb];
      } else {
        piv[hb] = v;
        have |= std::uint64_t{1} << hb;
        ++r;
        break;
      }
    }
  }
  if (a >= e) ra = r;
  return {ra, r};
}

// Flat (i, p) counter.
struct Tally {
  std::size_t imax, pmax;
  std::vector<std::uint64_t> n;

  Tally(std::size_t imax_, std::size_t pmax_) : imax(imax_), pmax(pmax_), n((imax_ + 1) * (pmax_ + 1), 0) {}

  void add(const Layout& lay, const Ranks& r) { ++n[(imax - r.total) * (pmax + 1) + (lay.a - r.on_a)]; }
};

void census_chunk_f2(const Layout& lay, std::uint64_t lo, std::uint64_t hi, Tally& out) {
  const auto masks = lay.masks();
  std::vector<std::uint64_t> rows(lay.e, 0);
  for (std::size_t t = 0; t < lay.dim(); ++t)
    if (lo >> t & 1)
      for (const auto& [row, m] : masks[t]) rows[row] ^= m;
  for (std::uint64_t x = lo; x < hi; ++x) {
    out.add(lay, ranks_f2(rows.data(), lay.e, lay.a));
    const std::uint64_t flipped = x ^ (x + 1);
    for (std::size_t t = 0; t < lay.dim() && (flipped >> t & 1); ++t)
      for (const auto& [row, m] : masks[t]) rows[row] ^= m;
  }
}

void census_chunk(const FiniteOps& ops, const Layout& lay, std::uint64_t lo, std::uint64_t hi, Tally& out) {
  const std::uint32_t q = ops.q;
  std::vector<std::uint32_t> digits(lay.dim());
  std::vector<std::uint32_t> m(lay.e * lay.cols, 0), scratch;
  std::uint64_t rest = lo;
  for (std::size_t t = 0; t < lay.dim(); ++t) {
    digits[t] = static_cast<std::uint32_t>(rest % q);
    rest /= q;
    lay.put(ops, m, t, digits[t]);
  }
  for (std::uint64_t x = lo; x < hi; ++x) {
    out.add(lay, ranks_raw(ops, lay, m, scratch));
    for (std::size_t t = 0; t < lay.dim(); ++t) {
      digits[t] = digits[t] + 1 == q ? 0 : digits[t] + 1;
      lay.put(ops, m, t, digits[t]);
      if (digits[t] != 0) break;
    }
  }
}

void check_spec(const ConstrainedSpec& s) {
  if (!s.field.valid() || !s.field.is_finite()) fail(ErrorCode::InfiniteField, "census needs a finite field");
  if (s.e < 1 || s.a < 1 || s.a > s.e || s.f < 1) fail(ErrorCode::PreconditionViolated, "need 1 <= a <= e and f >= 1");
}

void check_budget(const ConstrainedSpec& s, std::uint64_t budget) {
  const std::uint64_t total = s.point_count();
  if (total > budget)
    fail(ErrorCode::BudgetExceeded, s.to_string() + " has " + std::to_string(s.field.cardinality()) + "^" +
                                        std::to_string(s.ambient_dim()) + " points, budget " + std::to_string(budget));
}

template <class Body>
void run_workers(unsigned workers, Body body) {
  if (workers <= 1) {
    body(0u);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        body(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::int64_t ConstrainedSpec::ambient_dim() const { return DeltaSpec{e, a, f, 0, 0, sym}.ambient_dim(); }

std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> ConstrainedSpec::coordinates() const {
  std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> out;
  for (std::int64_t c = 0; c < f; ++c)
    for (std::int64_t k = 0; k < a; ++k)
      for (std::int64_t l = sym == Symmetry::Sym ? k : k + 1; l < e; ++l) out.emplace_back(c, k, l);
  return out;
}

std::uint64_t ConstrainedSpec::point_count() const {
  const std::uint64_t q = field.cardinality();
  std::uint64_t total = 1;
  for (std::int64_t t = 0; t < ambient_dim(); ++t) {
    if (total > UINT64_MAX / q) return UINT64_MAX;
    total *= q;
  }
  return total;
}

std::string ConstrainedSpec::to_string() const {
  std::ostringstream os;
  os << "(e=" << e << ", a=" << a << ", f=" << f << ", " << charstrat::to_string(sym) << ", "
     << (field.valid() ? field.name() : "?") << ")";
  return os.str();
}

ConstrainedMap ConstrainedMap::from_data(const ConstrainedSpec& spec, Vector data) {
  const auto coords = spec.coordinates();
  if (data.size() != coords.size()) fail(ErrorCode::DimensionMismatch, "coordinate count does not match the spec");
  check_field(spec.field, data);
  ConstrainedMap out{spec, std::move(data), Matrix(spec.field, static_cast<std::size_t>(spec.e),
                                                    static_cast<std::size_t>(spec.a * spec.f))};
  for (std::size_t t = 0; t < coords.size(); ++t) {
    const auto [c, k, l] = coords[t];
    const Elem& x = out.data[t];
    out.realized.set(static_cast<std::size_t>(l), static_cast<std::size_t>(c * spec.a + k), x);
    if (l < spec.a && l != k)
      out.realized.set(static_cast<std::size_t>(k), static_cast<std::size_t>(c * spec.a + l),
                       spec.sym == Symmetry::Alt ? -x : x);
  }
  return out;
}

ConstrainedMap ConstrainedMap::from_forms(const ConstrainedSpec& spec, const std::vector<Matrix>& forms) {
  if (static_cast<std::int64_t>(forms.size()) != spec.f) fail(ErrorCode::DimensionMismatch, "need f forms");
  for (const Matrix& b : forms) {
    if (static_cast<std::int64_t>(b.rows()) != spec.a || static_cast<std::int64_t>(b.cols()) != spec.e)
      fail(ErrorCode::DimensionMismatch, "forms must be a x e");
    for (std::size_t k = 0; k < b.rows(); ++k)
      for (std::size_t l = 0; l < b.rows(); ++l) {
        const bool ok = spec.sym == Symmetry::Sym ? b.at(k, l) == b.at(l, k)
                                                  : b.at(k, l) == -b.at(l, k) && (k != l || b.at(k, k).is_zero());
        if (!ok) fail(ErrorCode::PreconditionViolated, "A x A block violates the symmetry constraint");
      }
  }
  Vector data;
  for (const auto& [c, k, l] : spec.coordinates())
    data.push_back(forms[static_cast<std::size_t>(c)].at(static_cast<std::size_t>(k), static_cast<std::size_t>(l)));
  return from_data(spec, std::move(data));
}

std::size_t ConstrainedMap::rank() const { return charstrat::rank(realized); }

std::size_t ConstrainedMap::rank_on_A() const {
  return charstrat::rank(realized.block(0, static_cast<std::size_t>(spec.a), 0, realized.cols()));
}

std::pair<std::int64_t, std::int64_t> ConstrainedMap::stratum() const {
  return {std::min(spec.e, spec.a * spec.f) - static_cast<std::int64_t>(rank()),
          spec.a - static_cast<std::int64_t>(rank_on_A())};
}

ConstrainedEnumerator::ConstrainedEnumerator(ConstrainedSpec spec, std::uint64_t budget) : spec_(std::move(spec)) {
  check_spec(spec_);
  check_budget(spec_, budget);
  total_ = spec_.point_count();
  elems_ = spec_.field.enumerate();
  digits_.assign(static_cast<std::size_t>(spec_.ambient_dim()), 0);
}

bool ConstrainedEnumerator::next(ConstrainedMap& out) {
  if (emitted_ == total_) return false;
  Vector data;
  data.reserve(digits_.size());
  for (std::uint32_t d : digits_) data.push_back(elems_[d]);
  out = ConstrainedMap::from_data(spec_, std::move(data));
  ++emitted_;
  const auto q = static_cast<std::uint32_t>(elems_.size());
  for (auto& d : digits_) {
    d = d + 1 == q ? 0 : d + 1;
    if (d != 0) break;
  }
  return true;
}

std::vector<ConstrainedMap> enumerate_constrained(const ConstrainedSpec& spec, std::uint64_t budget) {
  ConstrainedEnumerator it(spec, budget);
  std::vector<ConstrainedMap> out;
  out.reserve(it.total());
  ConstrainedMap m;
  while (it.next(m)) out.push_back(std::move(m));
  return out;
}

std::uint64_t CensusTable::count(std::int64_t i, std::int64_t p) const {
  const auto it = counts.find({i, p});
  return it == counts.end() ? 0 : it->second;
}

CensusTable stratum_census(const ConstrainedSpec& spec, std::uint64_t budget, unsigned workers) {
  check_spec(spec);
  check_budget(spec, budget);
  const Layout lay(spec);
  const FiniteOps& ops = spec.field.ops();
  const std::uint64_t total = spec.point_count();
  const auto imax = static_cast<std::size_t>(std::min(spec.e, spec.a * spec.f));
  workers = std::max(1u, workers);
  std::vector<Tally> tallies(workers, Tally(imax, lay.a));
  const bool f2 = ops.q == 2 && lay.cols <= 64;
  run_workers(workers, [&](unsigned w) {
    const std::uint64_t lo = total / workers * w + std::min<std::uint64_t>(w, total % workers);
    const std::uint64_t hi = lo + total / workers + (w < total % workers ? 1 : 0);
    if (f2) {
      census_chunk_f2(lay, lo, hi, tallies[w]);
    } else {
      census_chunk(ops, lay, lo, hi, tallies[w]);
    }
  });
  CensusTable out;
  out.total = total;
  for (std::size_t i = 0; i <= imax; ++i)
    for (std::size_t p = 0; p <= lay.a; ++p) {
      std::uint64_t n = 0;
      for (const Tally& t : tallies) n += t.n[i * (lay.a + 1) + p];
      if (n) out.counts[{static_cast<std::int64_t>(i), static_cast<std::int64_t>(p)}] = n;
    }
  return out;
}

ConstrainedMap witness(const Field& field, const DeltaSpec& s) {
  if (!delta_nonempty(s)) fail(ErrorCode::EmptyStratum, "the nonemptiness conditions fail");
  const ConstrainedSpec cs{field, s.e, s.a, s.f, s.sym};
  if (s.a < 1 || s.f < 1) fail(ErrorCode::PreconditionViolated, "need a >= 1 and f >= 1");
  const auto a = static_cast<std::size_t>(s.a), e = static_cast<std::size_t>(s.e);
  const std::int64_t n = s.n();
  const auto d = static_cast<std::size_t>(s.a - s.p);
  std::vector<Matrix> forms(static_cast<std::size_t>(s.f), Matrix(field, a, e));
  auto bump = [&](std::size_t c, std::size_t k, std::size_t l, long long v) {
    forms[c].set(k, l, forms[c].at(k, l) + field.from_int(v));
  };
  auto pair = [&](std::size_t c, std::size_t j, std::size_t k) {
    bump(c, j, k, 1);
    bump(c, k, j, -1);
  };
  if (s.sym == Symmetry::Sym) {
    for (std::size_t j = 0; j < d; ++j) bump(0, j, j, 1);
  } else if (d % 2 == 0) {
    for (std::size_t j = 0; j + 1 < d; j += 2) pair(0, j, j + 1);
  } else {
    // Chain against w_1 closed up by one pairing against w_2.
    for (std::size_t j = 0; j + 2 < d; ++j) pair(0, j, j + 1);
    pair(1, d - 1, 0);
  }

  // Extend the images of v_1..v_{a-p} by unit vectors of Hom(A, F).
  const std::size_t cols = a * static_cast<std::size_t>(s.f);
  std::vector<Vector> span;
  for (std::size_t j = 0; j < a; ++j) {
    Vector row(cols, field.zero());
    for (std::size_t c = 0; c < forms.size(); ++c)
      for (std::size_t k = 0; k < a; ++k) row[c * a + k] = forms[c].at(k, j);
    span.push_back(row);
  }
  std::size_t have = rank(Matrix::from_rows(field, span, cols));
  const auto extra = static_cast<std::size_t>(n - s.a + s.p);
  std::size_t next_row = a;
  for (std::size_t col = 0; col < cols && next_row < a + extra; ++col) {
    Vector unit(cols, field.zero());
    unit[col] = field.one();
    span.push_back(unit);
    const std::size_t r = rank(Matrix::from_rows(field, span, cols));
    if (r == have) {
      span.pop_back();
      continue;
    }
    have = r;
    forms[col / a].set(col % a, next_row++, field.one());
  }

  ConstrainedMap out = ConstrainedMap::from_forms(cs, forms);
  if (out.stratum() != std::make_pair(s.i, s.p)) {
    const auto got = out.stratum();
    fail(ErrorCode::EmptyStratum, "construction lands in (i, p) = (" + std::to_string(got.first) + ", " +
                                      std::to_string(got.second) + "), not the requested stratum");
  }
  return out;
}

void fit_codim(CodimEstimate& est) {
  std::vector<double> xs, ys, vs;
  for (std::size_t k = 0; k < est.hits.size(); ++k) {
    if (est.hits[k] == 0) continue;
    const double n = static_cast<double>(est.samples_per_field);
    const double p = static_cast<double>(est.hits[k]) / n;
    xs.push_back(std::log(static_cast<double>(est.cardinalities[k])));
    ys.push_back(-std::log(p));
    vs.push_back((1 - p) / (n * p));
  }
  if (xs.empty()) fail(ErrorCode::DegenerateTower, "no hits at any level of the tower");
  if (xs.size() == 1) {
    est.estimate = ys[0] / xs[0];
    est.halfwidth = 1.96 * std::sqrt(vs[0]) / xs[0];
    return;
  }
  double xbar = 0;
  for (double x : xs) xbar += x;
  xbar /= static_cast<double>(xs.size());
  double sxx = 0;
  for (double x : xs) sxx += (x - xbar) * (x - xbar);
  double slope = 0, var = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double w = (xs[k] - xbar) / sxx;
    slope += w * ys[k];
    var += w * w * vs[k];
  }
  est.estimate = slope;
  est.halfwidth = 1.96 * std::sqrt(var);
}

namespace {

void check_mc(const McConfig& cfg) {
  if (cfg.tower.size() < 3) fail(ErrorCode::PreconditionViolated, "tower needs at least 3 fields");
  for (const Field& f : cfg.tower) {
    if (!f.is_finite()) fail(ErrorCode::InfiniteField, "tower fields must be finite");
    if (f.characteristic() != cfg.tower[0].characteristic())
      fail(ErrorCode::PreconditionViolated, "tower fields must share the characteristic");
  }
  if (cfg.samples_per_field < 100000) fail(ErrorCode::PreconditionViolated, "need at least 1e5 samples per field");
}

template <class MakeCounter>
CodimEstimate run_mc(const McConfig& cfg, MakeCounter make) {
  check_mc(cfg);
  CodimEstimate est;
  est.samples_per_field = cfg.samples_per_field;
  const unsigned workers = std::max(1u, cfg.workers);
  for (std::size_t level = 0; level < cfg.tower.size(); ++level) {
    const Field& field = cfg.tower[level];
    est.tower.push_back(field.name());
    est.cardinalities.push_back(field.cardinality());
    std::vector<std::uint64_t> hits(workers, 0);
    run_workers(workers, [&](unsigned w) {
      Rng rng = Rng::substream(cfg.seed, level * 0x10000 + w);
      const std::uint64_t n = cfg.samples_per_field / workers + (w < cfg.samples_per_field % workers ? 1 : 0);
      auto count = make(field);
      for (std::uint64_t s = 0; s < n; ++s) hits[w] += count(rng) ? 1 : 0;
    });
    std::uint64_t h = 0;
    for (auto x : hits) h += x;
    est.hits.push_back(h);
    est.fractions.push_back(static_cast<double>(h) / static_cast<double>(cfg.samples_per_field));
  }
  fit_codim(est);
  return est;
}

}  // namespace

CodimEstimate estimate_codim_mc(const Trial& trial, const McConfig& cfg) {
  return run_mc(cfg, [&](const Field& field) { return [&trial, field](Rng& rng) { return trial(field, rng); }; });
}

CodimEstimate estimate_codim_mc(const std::function<bool(const ConstrainedMap&)>& membership,
                                const ConstrainedSpec& shape, const McConfig& cfg) {
  return run_mc(cfg, [&](const Field& field) {
    ConstrainedSpec s = shape;
    s.field = field;
    check_spec(s);
    return [&membership, s](Rng& rng) {
      Vector data;
      for (std::int64_t t = 0; t < s.ambient_dim(); ++t) data.push_back(s.field.random(rng));
      return membership(ConstrainedMap::from_data(s, std::move(data)));
    };
  });
}

CodimEstimate estimate_delta_codim_mc(const DeltaSpec& spec, const McConfig& cfg) {
  return run_mc(cfg, [&](const Field& field) {
    const ConstrainedSpec s{field, spec.e, spec.a, spec.f, spec.sym};
    check_spec(s);
    return [lay = Layout(s), ops = &field.ops(), spec, m = std::vector<std::uint32_t>(),
            scratch = std::vector<std::uint32_t>()](Rng& rng) mutable {
      m.assign(lay.e * lay.cols, 0);
      for (std::size_t t = 0; t < lay.dim(); ++t) lay.put(*ops, m, t, static_cast<std::uint32_t>(rng.below(ops->q)));
      const Ranks r = ranks_raw(*ops, lay, m, scratch);
      const auto i = static_cast<std::int64_t>(std::min(lay.e, lay.cols) - r.total);
      const auto p = static_cast<std::int64_t>(lay.a - r.on_a);
      return i == spec.i && p == spec.p;
    };
  });
}

std::vector<Field> parse_tower(const std::string& text) {
  std::vector<Field> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(Field::parse(item));
  return out;
}

}  // namespace charstrat

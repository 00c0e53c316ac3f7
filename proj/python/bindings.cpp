#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "charstrat/census.hpp"
#include "charstrat/cli.hpp"
#include "charstrat/codim.hpp"
#include "charstrat/error.hpp"
#include "charstrat/morse.hpp"
#include "charstrat/strata.hpp"

namespace py = pybind11;
using namespace charstrat;

namespace {

Symmetry sym_of(const std::string& s) {
  if (s == "sym") return Symmetry::Sym;
  if (s == "alt") return Symmetry::Alt;
  throw py::value_error("symmetry must be 'sym' or 'alt'");
}

std::size_t nvars_of(const std::string& text, std::optional<std::size_t> n) {
  return n ? *n : std::max<std::size_t>(1, Polynomial::count_vars(text));
}

Vector point_of(const Field& f, const std::vector<std::string>& coords) {
  Vector v;
  for (const auto& c : coords) v.push_back(Polynomial::parse(f, 0, c).constant_term());
  return v;
}

std::vector<std::string> strings_of(const Vector& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(x.to_string());
  return out;
}

py::dict milnor_dict(const std::string& series, const std::string& field, int nmax, std::optional<std::size_t> n) {
  const Field f = Field::parse(field);
  const MilnorReport rep = milnor(Polynomial::parse(f, nvars_of(series, n), series), nmax);
  py::dict d;
  d["certified"] = rep.certified;
  d["mu"] = rep.certified ? py::object(py::int_(rep.mu)) : py::object(py::none());
  d["r"] = rep.certified ? py::object(py::int_(rep.r)) : py::object(py::none());
  std::vector<std::string> basis;
  for (const auto& m : rep.monomial_basis) basis.push_back(m.to_string());
  d["monomial_basis"] = basis;
  d["N_used"] = rep.N_used;
  return d;
}

py::dict morse_dict(const std::string& series, const std::string& field, std::size_t params, int trunc,
                    std::optional<std::size_t> n) {
  const Field f = Field::parse(field);
  const Polynomial F = Polynomial::parse(f, nvars_of(series, n), series);
  const MorseResult r = morse_with_params(F, params, trunc);
  py::dict d;
  d["q"] = r.q.to_string();
  d["h"] = r.h.to_string();
  d["rank"] = r.rank;
  d["j"] = F.nvars() - params - r.rank;
  d["extra_square"] = r.extra_square;
  d["arf_term"] = r.arf_term;
  d["automorphism"] = r.phi.image_strings();
  d["verified"] = r.phi.apply(F) == (r.q + r.h).truncated(trunc);
  return d;
}

py::dict normal_form_dict(const std::string& map, const std::string& field, const std::vector<std::string>& point,
                          int trunc, std::optional<std::size_t> n) {
  const Field f = Field::parse(field);
  const PolyMap F = PolyMap::parse(f, nvars_of(map, n), map);
  const NormalFormReport rep = corank1_normal_form(F, point.empty() ? Vector(F.n, f.zero()) : point_of(f, point), trunc);
  py::dict d;
  d["q"] = rep.q.to_string();
  d["h"] = rep.h.to_string();
  d["j"] = rep.j;
  d["rank"] = rep.rank;
  d["reordering"] = rep.reordering;
  d["automorphism"] = rep.phi.image_strings();
  d["verified"] = rep.verified;
  return d;
}

py::dict classify_dict(const std::string& map, const std::string& field, const std::vector<std::string>& point,
                       std::optional<std::size_t> n) {
  const Field f = Field::parse(field);
  const PolyMap F = PolyMap::parse(f, nvars_of(map, n), map);
  const Vector x = point.empty() ? Vector(F.n, f.zero()) : point_of(f, point);
  if (x.size() != F.n) throw py::value_error("point has the wrong number of coordinates");
  const PointClassifier cls(F);
  py::dict d;
  d["corank"] = cls.corank(x);
  const IntrinsicDiff diff = cls.intrinsic(x);
  d["kernel_dim"] = diff.dim_kernel();
  d["cokernel_dim"] = diff.dim_cokernel();
  if (cls.corank(x) > 0) {
    const SymbolClass s = cls.symbol(x);
    d["symbol"] = py::make_tuple(s.i, s.j);
    d["bad_locus"] = cls.bad_locus(x);
  }
  return d;
}

py::dict census_dict(const std::string& field, std::int64_t e, std::int64_t a, std::int64_t f, const std::string& sym,
                     std::uint64_t budget, unsigned workers) {
  const ConstrainedSpec spec{Field::parse(field), e, a, f, sym_of(sym)};
  CensusTable table;
  {
    py::gil_scoped_release release;
    table = stratum_census(spec, budget, workers);
  }
  py::dict d;
  for (const auto& [key, count] : table.counts) d[py::make_tuple(key.first, key.second)] = count;
  return d;
}

py::dict mc_dict(std::int64_t e, std::int64_t a, std::int64_t f, std::int64_t i, std::int64_t p, const std::string& sym,
                 const std::string& tower, std::uint64_t samples, std::uint64_t seed, unsigned workers) {
  const DeltaSpec d{e, a, f, i, p, sym_of(sym)};
  const McConfig cfg{parse_tower(tower), samples, seed, workers};
  CodimEstimate est;
  {
    py::gil_scoped_release release;
    est = estimate_delta_codim_mc(d, cfg);
  }
  py::dict out;
  out["tower"] = est.tower;
  out["hits"] = est.hits;
  out["fractions"] = est.fractions;
  out["estimate"] = est.estimate;
  out["halfwidth"] = est.halfwidth;
  out["formula_codim"] = delta_codim(d);
  return out;
}

py::dict minimize_dict(std::int64_t e, std::int64_t a, std::int64_t f, const std::string& sign) {
  if (sign != "plus" && sign != "minus") throw py::value_error("sign must be 'plus' or 'minus'");
  const CMinSpec s{e, a, f, sign == "plus" ? +1 : -1};
  const CMinResult closed = minimize_C(s);
  const BruteForceMin brute = brute_force_min_C(s);
  py::dict d;
  d["closed_form"] = closed.value;
  d["witness"] = closed.witness;
  d["brute_force"] = brute.value;
  d["argmin"] = brute.argmin;
  d["agree"] = closed.value == brute.value;
  return d;
}

py::tuple cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Singularity strata of polynomial maps over Q and finite fields";
  m.attr("__version__") = kVersion;

  static py::exception<Error> exc(m, "CharstratError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      exc(e.what());
    }
  });

  m.def("crit_codim", &crit_codim, py::arg("n"), py::arg("r"), py::arg("i"));
  m.def("second_order_codim", &second_order_codim, py::arg("n"), py::arg("r"), py::arg("i"), py::arg("j"),
        py::arg("char"));
  m.def("bad_locus_codim", &bad_locus_codim, py::arg("n"), py::arg("r"), py::arg("i"), py::arg("char"));
  m.def(
      "delta_codim",
      [](std::int64_t e, std::int64_t a, std::int64_t f, std::int64_t i, std::int64_t p, const std::string& sym) {
        return delta_codim(DeltaSpec{e, a, f, i, p, sym_of(sym)});
      },
      py::arg("e"), py::arg("a"), py::arg("f"), py::arg("i"), py::arg("p"), py::arg("sym") = "sym");
  m.def(
      "delta_nonempty",
      [](std::int64_t e, std::int64_t a, std::int64_t f, std::int64_t i, std::int64_t p, const std::string& sym) {
        return delta_nonempty(DeltaSpec{e, a, f, i, p, sym_of(sym)});
      },
      py::arg("e"), py::arg("a"), py::arg("f"), py::arg("i"), py::arg("p"), py::arg("sym") = "sym");
  m.def(
      "box_rank_stratum_codim",
      [](std::int64_t e, std::int64_t f, std::int64_t i, const std::string& sym) {
        return box_rank_stratum_codim(e, f, i, sym_of(sym));
      },
      py::arg("e"), py::arg("f"), py::arg("i"), py::arg("sym") = "sym");
  m.def(
      "first_degeneracy_codim",
      [](std::int64_t e, std::int64_t a, std::int64_t f, const std::string& sym) {
        return first_degeneracy_codim(e, a, f, sym_of(sym));
      },
      py::arg("e"), py::arg("a"), py::arg("f"), py::arg("sym") = "sym");
  m.def("minimize", &minimize_dict, py::arg("e"), py::arg("a"), py::arg("f"), py::arg("sign"));
  m.def("census", &census_dict, py::arg("field"), py::arg("e"), py::arg("a"), py::arg("f"), py::arg("sym") = "sym",
        py::arg("budget") = kDefaultCensusBudget, py::arg("workers") = 1u);
  m.def("estimate_codim", &mc_dict, py::arg("e"), py::arg("a"), py::arg("f"), py::arg("i"), py::arg("p"),
        py::arg("sym") = "sym", py::arg("tower") = "F3,F9,F27", py::arg("samples") = 1000000,
        py::arg("seed") = 7, py::arg("workers") = 1u);
  m.def("classify", &classify_dict, py::arg("map"), py::arg("field") = "Q",
        py::arg("point") = std::vector<std::string>{}, py::arg("n") = py::none());
  m.def("milnor", &milnor_dict, py::arg("series"), py::arg("field") = "Q", py::arg("nmax") = 14,
        py::arg("n") = py::none());
  m.def("morse", &morse_dict, py::arg("series"), py::arg("field") = "Q", py::arg("params") = 0,
        py::arg("trunc") = kDefaultTrunc, py::arg("n") = py::none());
  m.def("corank1_normal_form", &normal_form_dict, py::arg("map"), py::arg("field") = "Q",
        py::arg("point") = std::vector<std::string>{}, py::arg("trunc") = kDefaultTrunc, py::arg("n") = py::none());
  m.def("run_cli", &cli, py::arg("args"), "Run the command-line front end; returns (exit_code, stdout, stderr).");
}

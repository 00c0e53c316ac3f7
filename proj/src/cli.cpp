#include "charstrat/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <optional>
#include <sstream>

#include "charstrat/census.hpp"
#include "charstrat/codim.hpp"
#include "charstrat/error.hpp"
#include "charstrat/morse.hpp"
#include "charstrat/strata.hpp"
#include "charstrat/verify.hpp"

namespace charstrat {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string field = "Q";
  std::uint64_t seed = 7;
  double tol = 0.35;
  int trunc = kDefaultTrunc;
  std::uint64_t samples = 1000000;
  std::string tower = "F2,F4,F16";
  std::uint64_t budget = kDefaultCensusBudget;
  std::string out;
  std::string format = "json";
  unsigned workers = 1;
};

Field parse_field(const std::string& text) {
  try {
    return Field::parse(text);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

Polynomial parse_poly(const Field& f, std::size_t n, const std::string& text) {
  try {
    return Polynomial::parse(f, n, text);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw UsageError(e.what());
    throw;
  }
}

Vector parse_point(const Field& f, std::size_t n, const std::string& text) {
  Vector v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(parse_poly(f, 0, tok).constant_term());
  if (text.empty()) v.assign(n, f.zero());
  if (v.size() != n) throw UsageError("point needs " + std::to_string(n) + " coordinates");
  return v;
}

Symmetry parse_sym(const std::string& s) {
  if (s == "sym") return Symmetry::Sym;
  if (s == "alt") return Symmetry::Alt;
  throw UsageError("symmetry must be sym or alt");
}

json elem_json(const Elem& e) { return e.to_string(); }

json strings(const std::vector<std::string>& v) { return json(v); }

json opt_codim(const std::optional<std::int64_t>& c, json params = nullptr) {
  json j;
  if (!params.is_null()) j["params"] = std::move(params);
  j["nonempty"] = c.has_value();
  if (c) j["codim"] = *c;
  return j;
}

class App {
 public:
  App(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args) {
    CLI::App app{"Singularity strata of polynomial maps in every characteristic", "charstrat"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--field", c_.field, "Q, Fp, Fp^k or Fq");
    app.add_option("--seed", c_.seed);
    app.add_option("--tol", c_.tol, "Tolerance on a Monte-Carlo codimension estimate");
    app.add_option("--trunc", c_.trunc, "Truncation order N");
    app.add_option("--samples", c_.samples, "Monte-Carlo samples per field");
    app.add_option("--tower", c_.tower, "Comma-separated fields, e.g. F2,F4,F16");
    app.add_option("--budget", c_.budget, "Largest enumeration size");
    app.add_option("--out", c_.out, "Write the report to a file");
    app.add_option("--format", c_.format)->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--workers", c_.workers)->check(CLI::Range(1u, 256u));

    auto* codim = app.add_subcommand("codim", "Codimension formulas");
    auto* codim_kind = codim->add_option_group("formula")->require_option(1);
    codim_kind->add_option("--crit", ints_, "n r i")->expected(3);
    codim_kind->add_option("--second", ints2_, "n r i j")->expected(4);
    codim_kind->add_option("--bad", ints3_, "n r i")->expected(3);
    codim_kind->add_option("--delta", ints4_, "e a f i p")->expected(5);
    codim_kind->add_option("--box", ints5_, "e f i")->expected(3);
    codim_kind->add_option("--first", ints6_, "e a f")->expected(3);
    codim->add_option("--char", ch_, "Characteristic for --second / --bad");
    codim->add_option("--sym", sym_, "sym or alt");

    auto* minimize = app.add_subcommand("minimize", "Minimal codimension over the region");
    minimize->add_option("--e", e_)->required();
    minimize->add_option("--a", a_)->required();
    minimize->add_option("--f", f_)->required();
    minimize->add_option("--sign", sign_)->check(CLI::IsMember({"plus", "minus"}))->required();

    auto* census = app.add_subcommand("census", "Exhaustive stratum census");
    census->add_option("--e", e_)->required();
    census->add_option("--a", a_)->required();
    census->add_option("--f", f_)->required();
    census->add_option("--sym", sym_);

    auto* mc = app.add_subcommand("mc", "Monte-Carlo codimension of a stratum");
    mc->add_option("--delta", ints4_, "e a f i p")->expected(5)->required();
    mc->add_option("--sym", sym_);

    auto* classify = app.add_subcommand("classify", "Pointwise classification of a map");
    classify->add_option("--map", text_, "Components separated by ';'")->required();
    classify->add_option("--n", nvars_, "Source dimension");
    auto* where = classify->add_option_group("where")->require_option(1);
    where->add_option("--point", point_, "Comma-separated coordinates");
    where->add_flag("--scan", scan_, "Scan every rational point");

    auto* morse = app.add_subcommand("morse", "Morse splitting of a series or corank-1 normal form of a map");
    auto* morse_in = morse->add_option_group("input")->require_option(1);
    morse_in->add_option("--series", text_);
    morse_in->add_option("--map", map_text_);
    morse->add_option("--params", params_, "Leading variables treated as parameters");
    morse->add_option("--point", point_);
    morse->add_option("--n", nvars_);

    auto* milnor_cmd = app.add_subcommand("milnor", "Milnor number and determinacy");
    milnor_cmd->add_option("--series", text_)->required();
    milnor_cmd->add_option("--n", nvars_);
    milnor_cmd->add_option("--nmax", nmax_, "Largest truncation examined");
    milnor_cmd->add_flag("--determinacy", determinacy_, "Fail unless finiteness is certified");

    auto* verify = app.add_subcommand("verify", "Run the acceptance battery");
    verify->add_option("--only", only_, "Criterion numbers")->check(CLI::Range(1, kCriterionCount));

    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp& e) {
      out_ << app.help();
      return 0;
    } catch (const CLI::CallForVersion&) {
      out_ << kVersion << "\n";
      return 0;
    } catch (const CLI::ParseError& e) {
      err_ << "usage error: " << e.what() << "\n";
      return 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
      json result;
      int code = 0;
      if (name == "codim") result = do_codim();
      else if (name == "minimize") result = do_minimize();
      else if (name == "census") result = do_census();
      else if (name == "mc") result = do_mc();
      else if (name == "classify") result = do_classify();
      else if (name == "morse") result = do_morse();
      else if (name == "milnor") result = do_milnor();
      else if (name == "verify") result = do_verify(code);
      if (!csv_.empty()) {
        emit(csv_);
      } else {
        json doc;
        doc["schema"] = kSchema;
        doc["version"] = kVersion;
        doc["command"] = name;
        doc["seed"] = c_.seed;
        doc["config"] = config_;
        doc["result"] = result;
        emit(doc.dump(2) + "\n");
      }
      return code;
    } catch (const UsageError& e) {
      err_ << "usage error: " << e.what() << "\n";
      return 2;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << "\n";
      return 1;
    }
  }

 private:
  void emit(const std::string& text) {
    if (c_.out.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(c_.out);
    if (!f) throw UsageError("cannot open " + c_.out);
    f << text;
  }

  std::uint32_t characteristic() const {
    if (ch_) return *ch_;
    return parse_field(c_.field).characteristic();
  }

  json do_codim() {
    const Symmetry sym = parse_sym(sym_);
    if (!ints_.empty()) {
      config_ = {{"formula", "crit"}, {"n", ints_[0]}, {"r", ints_[1]}, {"i", ints_[2]}};
      return opt_codim(crit_codim(ints_[0], ints_[1], ints_[2]), ints_);
    }
    if (!ints2_.empty()) {
      const auto ch = characteristic();
      config_ = {{"formula", "second"}, {"n", ints2_[0]}, {"r", ints2_[1]}, {"i", ints2_[2]}, {"j", ints2_[3]},
                 {"char", ch}};
      return opt_codim(second_order_codim(ints2_[0], ints2_[1], ints2_[2], ints2_[3], ch), ints2_);
    }
    if (!ints3_.empty()) {
      const auto ch = characteristic();
      config_ = {{"formula", "bad"}, {"n", ints3_[0]}, {"r", ints3_[1]}, {"i", ints3_[2]}, {"char", ch}};
      return opt_codim(bad_locus_codim(ints3_[0], ints3_[1], ints3_[2], ch), ints3_);
    }
    if (!ints4_.empty()) {
      const DeltaSpec d{ints4_[0], ints4_[1], ints4_[2], ints4_[3], ints4_[4], sym};
      config_ = {{"formula", "delta"}, {"e", d.e}, {"a", d.a}, {"f", d.f}, {"i", d.i}, {"p", d.p}, {"sym", sym_}};
      return opt_codim(delta_codim(d), ints4_);
    }
    if (!ints5_.empty()) {
      config_ = {{"formula", "box"}, {"e", ints5_[0]}, {"f", ints5_[1]}, {"i", ints5_[2]}, {"sym", sym_}};
      return opt_codim(box_rank_stratum_codim(ints5_[0], ints5_[1], ints5_[2], sym), ints5_);
    }
    config_ = {{"formula", "first"}, {"e", ints6_[0]}, {"a", ints6_[1]}, {"f", ints6_[2]}, {"sym", sym_}};
    return {{"params", ints6_}, {"nonempty", true}, {"codim", first_degeneracy_codim(ints6_[0], ints6_[1], ints6_[2], sym)}};
  }

  json do_minimize() {
    const CMinSpec s{e_, a_, f_, sign_ == "plus" ? +1 : -1};
    if (s.region().empty()) throw Error(ErrorCode::EmptyRegion, "no admissible (i, p)");
    config_ = {{"e", e_}, {"a", a_}, {"f", f_}, {"sign", sign_}};
    const CMinResult closed = minimize_C(s);
    const BruteForceMin brute = brute_force_min_C(s);
    json argmin = json::array();
    for (const auto& [i, p] : brute.argmin) argmin.push_back({i, p});
    return {{"closed_form", closed.value},
            {"witness", {closed.witness.first, closed.witness.second}},
            {"brute_force", brute.value},
            {"argmin", argmin},
            {"evaluated", brute.evaluated},
            {"agree", closed.value == brute.value}};
  }

  json do_census() {
    const Field field = parse_field(c_.field);
    const ConstrainedSpec spec{field, e_, a_, f_, parse_sym(sym_)};
    config_ = {{"field", field.name()}, {"e", e_},       {"a", a_},
               {"f", f_},               {"sym", sym_},   {"budget", c_.budget},
               {"workers", c_.workers}};
    const CensusTable table = stratum_census(spec, c_.budget, c_.workers);
    if (c_.format == "csv") {
      std::ostringstream os;
      os << "e,a,f,sym,field,i,p,count\n";
      for (const auto& [key, count] : table.counts)
        os << e_ << "," << a_ << "," << f_ << "," << sym_ << "," << field.name() << "," << key.first << ","
           << key.second << "," << count << "\n";
      csv_ = os.str();
      return {};
    }
    json strata = json::array();
    for (const auto& [key, count] : table.counts) {
      const DeltaSpec d{e_, a_, f_, key.first, key.second, spec.sym};
      json row = {{"i", key.first}, {"p", key.second}, {"count", count}, {"predicted_nonempty", delta_nonempty(d)}};
      if (auto c = delta_codim(d)) row["formula_codim"] = *c;
      strata.push_back(row);
    }
    return {{"ambient_dim", spec.ambient_dim()}, {"total", table.total}, {"strata", strata}};
  }

  json do_mc() {
    const Symmetry sym = parse_sym(sym_);
    const DeltaSpec d{ints4_[0], ints4_[1], ints4_[2], ints4_[3], ints4_[4], sym};
    std::vector<Field> tower;
    try {
      tower = parse_tower(c_.tower);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    config_ = {{"e", d.e},         {"a", d.a},         {"f", d.f},
               {"i", d.i},         {"p", d.p},         {"sym", sym_},
               {"tower", c_.tower}, {"samples", c_.samples}, {"workers", c_.workers}};
    const CodimEstimate est = estimate_delta_codim_mc(d, McConfig{tower, c_.samples, c_.seed, c_.workers});
    json r = {{"tower", est.tower},       {"cardinalities", est.cardinalities}, {"hits", est.hits},
              {"fractions", est.fractions}, {"estimate", est.estimate},         {"halfwidth", est.halfwidth}};
    const auto formula = delta_codim(d);
    r["formula_codim"] = formula ? json(*formula) : json(nullptr);
    r["tol"] = c_.tol;
    r["agree"] = formula ? std::abs(est.estimate - static_cast<double>(*formula)) <= c_.tol : std::accumulate(est.hits.begin(), est.hits.end(), std::uint64_t{0}) == 0;
    return r;
  }

  std::size_t nvars_for(const std::string& text) const {
    return nvars_ ? *nvars_ : std::max<std::size_t>(1, Polynomial::count_vars(text));
  }

  PolyMap parse_map(const Field& field, const std::string& text) const {
    const std::size_t n = nvars_for(text);
    try {
      return PolyMap::parse(field, n, text);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw UsageError(e.what());
      throw;
    }
  }

  json do_classify() {
    const Field field = parse_field(c_.field);
    const PolyMap F = parse_map(field, text_);
    config_ = {{"field", field.name()}, {"map", F.to_string()}, {"n", F.n}, {"r", F.r}};
    if (scan_) {
      config_["scan"] = true;
      const PointScan s = scan_critical_points(F, c_.budget);
      json bad = json::array();
      for (const auto& p : s.bad_points) {
        json pt = json::array();
        for (const auto& x : p) pt.push_back(elem_json(x));
        bad.push_back(pt);
      }
      return {{"points", s.points}, {"critical", s.critical}, {"bad", s.bad}, {"bad_points", bad}};
    }
    const Vector x = parse_point(field, F.n, point_);
    json pt = json::array();
    for (const auto& v : x) pt.push_back(elem_json(v));
    config_["point"] = pt;
    const PointClassifier cls(F);
    const std::size_t corank = cls.corank(x);
    json r = {{"corank", corank}};
    const IntrinsicDiff d = cls.intrinsic(x);
    r["kernel_dim"] = d.dim_kernel();
    r["cokernel_dim"] = d.dim_cokernel();
    if (corank > 0) {
      const SymbolClass s = cls.symbol(x);
      r["symbol"] = {{"i", s.i}, {"j", s.j}};
      r["bad_locus"] = cls.bad_locus(x);
    }
    return r;
  }

  json do_morse() {
    const Field field = parse_field(c_.field);
    const int N = c_.trunc;
    if (!map_text_.empty()) {
      const PolyMap F = parse_map(field, map_text_);
      const Vector x = parse_point(field, F.n, point_);
      config_ = {{"field", field.name()}, {"map", F.to_string()}, {"point", point_.empty() ? "0" : point_}, {"N", N}};
      const NormalFormReport rep = corank1_normal_form(F, x, N);
      json params = json::array();
      for (const auto& p : rep.parameters) params.push_back(p.to_string());
      json consts = json::array();
      for (const auto& c : rep.constants) consts.push_back(elem_json(c));
      return {{"reordering", rep.reordering}, {"constants", consts},   {"parameters", params},
              {"j", rep.j},                   {"rank", rep.rank},       {"q", rep.q.to_string()},
              {"h", rep.h.to_string()},       {"extra_square", rep.extra_square}, {"arf_term", rep.arf_term},
              {"automorphism", strings(rep.phi.image_strings())}, {"verified", rep.verified}};
    }
    const Polynomial F = parse_poly(field, nvars_for(text_), text_);
    config_ = {{"field", field.name()}, {"series", F.to_string()}, {"params", params_}, {"N", N}};
    const MorseResult r = morse_with_params(F, params_, N);
    const bool ok = r.phi.apply(F) == (r.q + r.h).truncated(N);
    return {{"q", r.q.to_string()},
            {"h", r.h.to_string()},
            {"rank", r.rank},
            {"j", F.nvars() - params_ - r.rank},
            {"extra_square", r.extra_square},
            {"arf_term", r.arf_term},
            {"closed_shape", r.closed_shape},
            {"automorphism", strings(r.phi.image_strings())},
            {"verified", ok}};
  }

  json do_milnor() {
    const Field field = parse_field(c_.field);
    const Polynomial f = parse_poly(field, nvars_for(text_), text_);
    config_ = {{"field", field.name()}, {"series", f.to_string()}, {"nmax", nmax_}};
    const MilnorReport rep = milnor(f, nmax_);
    if (determinacy_ && !rep.certified)
      throw Error(ErrorCode::NotCertifiedFinite, "Milnor number not certified up to N = " + std::to_string(nmax_));
    json basis = json::array();
    for (const auto& m : rep.monomial_basis) basis.push_back(m.to_string());
    json dims = json::array();
    for (const auto& [N, d] : rep.dims) dims.push_back({N, d});
    json r = {{"certified", rep.certified}};
    if (rep.certified) {
      r["mu"] = rep.mu;
      r["r"] = rep.r;
      r["determinacy_bound"] = 2 * rep.r;
      r["monomial_basis"] = basis;
    } else {
      r["mu"] = "not certified <= budget";
    }
    r["N_used"] = rep.N_used;
    r["dims"] = dims;
    return r;
  }

  json do_verify(int& code) {
    const VerifyConfig cfg{c_.seed, c_.workers, c_.budget, c_.samples};
    config_ = {{"seed", cfg.seed}, {"workers", cfg.workers}, {"budget", cfg.budget}, {"samples", cfg.mc_samples}};
    json rows = json::array();
    std::size_t passed = 0;
    for (const auto& r : run_acceptance(cfg, only_)) {
      err_ << format_result(r) << "\n";
      if (r.pass) ++passed;
      rows.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
    }
    code = passed == rows.size() ? 0 : 1;
    return {{"criteria", rows}, {"passed", passed}, {"total", rows.size()}};
  }

  std::ostream& out_;
  std::ostream& err_;
  Common c_;
  json config_ = json::object();
  std::string csv_;
  std::vector<std::int64_t> ints_, ints2_, ints3_, ints4_, ints5_, ints6_;
  std::optional<std::uint32_t> ch_;
  std::string sym_ = "sym";
  std::int64_t e_ = 0, a_ = 0, f_ = 0;
  std::string sign_;
  std::string text_, map_text_, point_;
  std::optional<std::size_t> nvars_;
  bool scan_ = false;
  std::size_t params_ = 0;
  int nmax_ = 14;
  bool determinacy_ = false;
  std::vector<int> only_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return App(out, err).run(args);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace charstrat

#pragma once

#include <string>
#include <vector>

#include "commands_algebra.hpp"
#include "context.hpp"
#include "nilmix/cocycle/cocycle.hpp"
#include "nilmix/nil/box_map.hpp"
#include "nilmix/nil/heisenberg.hpp"
#include "nilmix/nil/monte_carlo.hpp"
#include "nilmix/toral/correlation.hpp"

namespace nilmix::cli {

/// Times of a correlation, optionally swept: with {"sweep": {"from", "to"}}
/// the n-th row uses n * times.
struct TimeSweep {
  std::vector<std::vector<long>> base;
  long from = 1, to = 1;
  bool swept = false;

  std::vector<std::vector<long>> at(long n) const {
    auto out = base;
    if (swept)
      for (auto& z : out)
        for (auto& v : z) v *= n;
    return out;
  }
};

inline TimeSweep parse_sweep(RunContext& ctx, const char* times_key) {
  TimeSweep s;
  for (const auto& z : ctx.need(times_key)) s.base.push_back(io::parse_long_vector(z));
  if (ctx.inputs.contains("sweep")) {
    json& sw = ctx.inputs["sweep"];
    if (!sw.contains("from")) sw["from"] = 1;
    s.from = io::parse_long(io::require(sw, "from"));
    s.to = io::parse_long(io::require(sw, "to"));
    if (s.from > s.to) throw io::SchemaError("sweep 'from' exceeds 'to'");
    s.swept = true;
  }
  return s;
}

/// Rows: n, separation, N, N_star (with radii), exact correlation, tail radius.
inline CommandResult run_mix_exact(RunContext& ctx) {
  ZlAction action = action_from(ctx);
  std::vector<TrigPolynomial> fs;
  for (const auto& f : ctx.need("functions")) fs.push_back(io::parse_trig(f));
  TimeSweep sweep = parse_sweep(ctx, "times");
  if (sweep.base.size() != fs.size()) throw io::SchemaError("'times' and 'functions' differ in length");
  CommandResult out;
  io::CsvWriter csv({"n", "separation", "N", "N_radius", "N_star", "N_star_radius", "corr_re", "corr_im", "radius",
                     "product_re", "product_im", "matched_tuples"});
  json rows = json::array();
  std::string parse;
  const ComplexQ prod = product_of_integrals(fs);
  auto mid = [](const std::optional<Interval>& v) { return v ? v->mid_str(17) : std::string(); };
  auto rad = [](const std::optional<Interval>& v) {
    return v ? (v->width() * Interval::from_double(0.5, v->prec())).hi_str(4) : std::string();
  };
  for (long n = sweep.from; n <= sweep.to; ++n) {
    auto zs = sweep.at(n);
    CorrelationResult r = multi_correlation(fs, zs, action, ctx.budget);
    SeparationStats st = separation_stats(action, zs, ctx.precision);
    parse = st.n_star_parse;
    csv.row({std::to_string(n), std::to_string(st.min_separation), mid(st.N), rad(st.N), mid(st.n_star), rad(st.n_star),
             r.value.re.get_str(), r.value.im.get_str(), r.radius.get_str(), prod.re.get_str(), prod.im.get_str(),
             std::to_string(r.matched_tuples)});
    json row = {{"n", n}, {"separation", st.min_separation}, {"N", io::enclosure(st.N)},
                {"correlation", io::exact(r.value)}, {"radius", io::exact(r.radius)}};
    row["N_star"] = st.n_star ? io::enclosure(*st.n_star) : json(nullptr);
    rows.push_back(row);
  }
  out.result["rows"] = rows;
  out.result["product_of_integrals"] = io::exact(prod);
  out.result["n_star_parse"] = parse;
  out.csv = csv.str();
  return out;
}

/// N_*(n z) against N_*(z)^n for n = 1..scales.
inline CommandResult run_shape(RunContext& ctx) {
  ZlAction action = action_from(ctx);
  std::vector<std::vector<long>> zs;
  for (const auto& z : ctx.need("times")) zs.push_back(io::parse_long_vector(z));
  const long scales = io::parse_long(ctx.get("scales", 10));
  CommandResult out;
  SeparationStats base = separation_stats(action, zs, ctx.precision);
  if (!base.n_star) throw InvalidInput("shape has no character value of modulus >= 1");
  json rows = json::array();
  for (long n = 1; n <= scales; ++n) {
    auto scaled = zs;
    for (auto& z : scaled)
      for (auto& v : z) v *= n;
    SeparationStats st = separation_stats(action, scaled, ctx.precision);
    Interval power = pow(*base.n_star, n);
    json row = {{"n", n}, {"separation", st.min_separation}, {"N", io::enclosure(st.N)}, {"base_power", io::enclosure(power)}};
    bool consistent = st.n_star && st.n_star->intersects(power);
    row["N_star"] = st.n_star ? io::enclosure(*st.n_star) : json(nullptr);
    row["power_identity"] = consistent;
    if (!consistent) out.raise(kFalsification, "N_star power identity fails at n = " + std::to_string(n));
    rows.push_back(row);
  }
  out.result["rows"] = rows;
  out.result["n_star_parse"] = base.n_star_parse;
  return out;
}

/// Generators are named; a word is either an exponent vector in generator
/// order or an object {name: exponent}.
inline std::vector<long> parse_word(const json& w, const std::vector<std::string>& names) {
  if (w.is_array()) {
    auto v = io::parse_long_vector(w);
    if (v.size() != names.size()) throw io::SchemaError("word length differs from the number of generators");
    return v;
  }
  if (!w.is_object()) throw io::SchemaError("word must be an array or an object");
  std::vector<long> v(names.size(), 0);
  for (const auto& [k, e] : w.items()) {
    auto it = std::find(names.begin(), names.end(), k);
    if (it == names.end()) throw io::SchemaError("unknown generator '" + k + "'");
    v[it - names.begin()] = io::parse_long(e);
  }
  return v;
}

inline std::string word_string(const std::vector<std::vector<long>>& zs, const std::vector<std::string>& names) {
  std::string s;
  for (size_t i = 0; i < zs.size(); ++i) {
    if (i) s += ", ";
    std::string w;
    for (size_t j = 0; j < names.size(); ++j)
      if (zs[i][j] != 0) w += (w.empty() ? "" : " ") + names[j] + "^" + std::to_string(zs[i][j]);
    s += w.empty() ? "e" : w;
  }
  return s;
}

inline CommandResult run_mix_mc(RunContext& ctx) {
  std::vector<HeisAuto> gens;
  std::vector<std::string> names;
  int idx = 0;
  for (auto& g : ctx.inputs["automorphisms"]) {
    if (!g.contains("name")) g["name"] = "g" + std::to_string(idx);
    names.push_back(g["name"].get<std::string>());
    gens.push_back(io::parse_heis_auto(g));
    ++idx;
  }
  if (gens.empty()) throw io::SchemaError("'automorphisms' must be nonempty");
  HeisAction action(gens);
  std::vector<TestFunction> fs;
  for (const auto& f : ctx.need("functions")) fs.push_back(io::parse_test_function(f));
  std::vector<std::vector<long>> base;
  for (const auto& w : ctx.need("words")) base.push_back(parse_word(w, names));
  if (base.size() != fs.size()) throw io::SchemaError("'words' and 'functions' differ in length");
  TimeSweep sweep;
  sweep.base = base;
  if (ctx.inputs.contains("sweep")) {
    json& sw = ctx.inputs["sweep"];
    if (!sw.contains("from")) sw["from"] = 1;
    sweep.from = io::parse_long(sw["from"]);
    sweep.to = io::parse_long(io::require(sw, "to"));
    sweep.swept = true;
  }
  McOptions opt;
  opt.samples = static_cast<std::uint64_t>(io::parse_long(ctx.get("samples", 1'000'000)));
  opt.seed = ctx.seed;
  opt.jobs = ctx.jobs;
  if (opt.samples > ctx.budget) throw BudgetExceeded("sample count exceeds the budget");
  CommandResult out;
  io::CsvWriter csv({"z_word", "estimate", "stderr", "samples", "seed"});
  json rows = json::array();
  for (long n = sweep.from; n <= sweep.to; ++n) {
    auto zs = sweep.at(n);
    McEstimate e = mc_correlation(fs, action, zs, opt);
    std::string w = word_string(zs, names);
    csv.row({w, io::decimal(e.estimate), io::decimal(e.std_error), std::to_string(e.samples), std::to_string(e.seed)});
    rows.push_back({{"z_word", w}, {"value", io::estimate(e.estimate, e.std_error)}, {"samples", e.samples}, {"seed", e.seed}});
  }
  json integrals = json::array();
  for (const auto& f : fs) integrals.push_back({{"integral", io::enclosure(f.integral(ctx.precision))},
                                                {"square_integral", io::enclosure(f.square_integral(ctx.precision))}});
  out.result["rows"] = rows;
  out.result["functions"] = integrals;
  out.csv = csv.str();
  return out;
}

inline CommandResult run_boxmap(RunContext& ctx) {
  FieldPtr k = io::parse_field(ctx.need("field"));
  const int emb = static_cast<int>(io::parse_long(ctx.get("embedding", detail::first_real_embedding(*k))));
  BoxMap bm;
  const json& base = ctx.get("base", json::array({0, 0, 0}));
  if (!base.is_array() || base.size() != 3) throw io::SchemaError("'base' must have three entries");
  for (int i = 0; i < 3; ++i) bm.base[i] = io::parse_real(base[i]);
  std::vector<std::vector<NumberFieldElement>> dpi_w;
  for (auto& d : ctx.inputs["directions"]) {
    const json& pr = io::require(d, "projected");
    if (!pr.is_array() || pr.size() != 2) throw io::SchemaError("'projected' must have two coordinates");
    std::vector<NumberFieldElement> w{io::parse_element(k, pr[0]), io::parse_element(k, pr[1])};
    if (!d.contains("central")) d["central"] = "0";
    std::array<double, 3> v{};
    for (int i = 0; i < 2; ++i) v[i] = w[i].embeddings(64)[emb].re_mid();
    v[2] = io::parse_real(d["central"]);
    bm.directions.push_back(v);
    bm.sides.push_back(io::parse_real(io::require(d, "side")));
    dpi_w.push_back(std::move(w));
  }
  if (dpi_w.empty()) throw io::SchemaError("'directions' must be nonempty");
  DichotomyParams p;
  p.delta = io::parse_rational(ctx.get("delta", "1/20"));
  p.L1 = io::parse_rational(ctx.get("L1", "1"));
  p.L2 = io::parse_rational(ctx.get("L2", "1"));
  p.C1 = io::parse_rational(ctx.get("C1", "1"));
  p.C2 = io::parse_rational(ctx.get("C2", "1"));
  p.budget = ctx.budget;
  p.precision_bits = ctx.precision;
  TestFunction f = io::parse_test_function(ctx.need("function"));
  EquidistributionOptions eo;
  eo.samples = static_cast<std::uint64_t>(io::parse_long(ctx.get("samples", 200'000)));
  eo.random_shifts = static_cast<int>(io::parse_long(ctx.get("random_shifts", 4)));
  eo.seed = ctx.seed;
  eo.jobs = ctx.jobs;
  CommandResult out;
  DichotomyOutcome o = boxmap_dichotomy(bm, dpi_w, f, p, eo);
  json ob = {{"found", o.obstruction_found()}, {"partial", o.obstruction.partial}, {"radius", o.obstruction.radius},
             {"checked", o.obstruction.checked}, {"best_z", o.obstruction.best_z}};
  if (o.obstruction.z) ob["z"] = *o.obstruction.z;
  json bv = json::array();
  for (const auto& v : o.obstruction.best_values) bv.push_back(io::enclosure(v));
  ob["best_values"] = bv;
  const auto& e = o.equidistribution;
  out.result["obstruction"] = ob;
  out.result["equidistribution"] = {{"pass", e.pass},
                                    {"discrepancy", io::estimate(e.discrepancy, e.std_error)},
                                    {"box_average", io::estimate(e.box_average, e.std_error)},
                                    {"integral", io::enclosure(f.integral(ctx.precision))},
                                    {"tolerance", {{"exact", io::decimal(e.tolerance)}}},
                                    {"worst_shift", e.worst_shift}};
  out.result["resolves_to_one_branch"] = o.resolves_to_one_branch();
  out.result["both"] = o.both();
  out.result["neither"] = o.neither();
  if (o.obstruction.partial) out.raise(kBudget, "obstruction search budget exhausted");
  if (o.both() || o.neither()) out.raise(kFalsification, o.both() ? "both branches hold" : "neither branch holds");
  return out;
}

inline CommandResult run_cocycle(RunContext& ctx) {
  ZlAction action = action_from(ctx);
  if (action.rank() != 2) throw io::SchemaError("cocycle needs exactly two generators");
  TorusCocycle c{action, TrigPolynomial(action.dim()), TrigPolynomial(action.dim())};
  if (ctx.inputs.contains("phi")) {
    // coboundary plus constants: f_z = phi o z - phi + c_z
    TrigPolynomial phi = io::parse_trig(ctx.inputs["phi"]);
    const json& cs = ctx.get("constants", json::array({"0", "0"}));
    if (!cs.is_array() || cs.size() != 2) throw io::SchemaError("'constants' must have two entries");
    c.f_a = coboundary_of(phi, action.generator(0)) + TrigPolynomial::constant(action.dim(), io::parse_rational(cs[0]));
    c.f_b = coboundary_of(phi, action.generator(1)) + TrigPolynomial::constant(action.dim(), io::parse_rational(cs[1]));
  } else {
    c.f_a = io::parse_trig(ctx.need("f_a"));
    c.f_b = io::parse_trig(ctx.need("f_b"));
  }
  RigidityOptions opt;
  json& tel = ctx.inputs["telescoping"];
  if (tel.is_null()) tel = json::object();
  if (!tel.contains("n")) tel["n"] = opt.telescoping_n;
  if (!tel.contains("j")) tel["j"] = opt.telescoping_j;
  opt.telescoping_n = io::parse_long(tel["n"]);
  opt.telescoping_j = io::parse_long(tel["j"]);
  CommandResult out;
  CocycleCertificate cert = cocycle_validate(c);
  json mism = json::array();
  for (const auto& m : cert.mismatches)
    mism.push_back({{"frequency", io::to_json(m.frequency)}, {"lhs", io::exact(m.lhs)}, {"rhs", io::exact(m.rhs)}});
  out.result["certificate"] = {{"valid", cert.valid},         {"commute", cert.commute},
                               {"generators_ergodic", cert.generators_ergodic}, {"exact", cert.exact},
                               {"compatible", cert.compatible}, {"mismatches", mism},
                               {"report", cert.report}};
  if (!cert.valid) {
    out.raise(kSchema, "invalid cocycle: " + cert.report);
    return out;
  }
  RigidityReport r = rigidity_pipeline(c, opt);
  out.result["constants"] = {io::exact(r.constants.first), io::exact(r.constants.second)};
  out.result["phi"] = r.phi ? io::to_json(*r.phi) : json(nullptr);
  out.result["sigma_squared"] = {{"orbit_route", io::exact(r.sigma.value)},
                                 {"series_route", io::exact(r.sigma.series_value)},
                                 {"routes_agree", r.sigma.routes_agree}};
  out.result["telescoping_ok"] = r.telescoping_ok;
  json terms = json::array();
  for (const auto& t : r.higher_rank.terms) terms.push_back(t);
  out.result["higher_rank_sum"] = {{"value", io::exact(r.higher_rank.value)}, {"terms", terms}};
  out.result["second_generator_ok"] = r.second_generator_ok;
  json obs = json::array();
  for (const auto& o : r.obstructions)
    obs.push_back({{"representative", io::to_json(o.representative)}, {"sum", io::exact(o.sum)}});
  out.result["obstructions"] = obs;
  out.result["falsification"] = r.falsification;
  out.result["trace"] = r.trace;
  if (r.falsification) out.raise(kFalsification, "sigma^2 is nonzero on a compatible cocycle");
  if (!r.telescoping_ok || !r.sigma.routes_agree) out.raise(kFalsification, "exact identity failed in the rigidity pipeline");
  return out;
}

}  // namespace nilmix::cli

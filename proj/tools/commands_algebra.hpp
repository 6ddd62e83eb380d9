#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "context.hpp"
#include "nilmix/diophantine/height.hpp"
#include "nilmix/diophantine/sunit.hpp"
#include "nilmix/diophantine/linear_form.hpp"
#include "nilmix/spectrum/action.hpp"
#include "nilmix/spectrum/lyapunov.hpp"

namespace nilmix::cli {

inline ZlAction action_from(RunContext& ctx) { return ZlAction(io::parse_generators(ctx.need("generators"))); }

inline CommandResult run_spectrum(RunContext& ctx) {
  ZlAction action = action_from(ctx);
  CommandResult out;
  json chars = json::array();
  for (const auto& c : simultaneous_spectrum(action)) {
    json values = json::array();
    for (const auto& v : c.values) {
      CertifiedComplex e = v.embeddings(ctx.precision)[c.embedding_index];
      values.push_back({{"coords", io::to_json(v)}, {"minpoly", io::to_json(v.minpoly())}, {"embedded", io::enclosure(e)}});
    }
    json vec = json::array();
    for (const auto& e : c.eigenvector) vec.push_back(io::to_json(e));
    chars.push_back({{"orbit", c.orbit},
                     {"embedding", c.embedding_index},
                     {"field_polynomial", io::to_json(c.field()->defining())},
                     {"values", values},
                     {"eigenvector", vec}});
  }
  out.result["characters"] = chars;
  return out;
}

inline CommandResult run_ergodic(RunContext& ctx) {
  ZlAction action = action_from(ctx);
  ErgodicityOptions opt;
  opt.search_radius = static_cast<int>(io::parse_long(ctx.get("search_radius", opt.search_radius)));
  opt.precision_bits = ctx.precision;
  CommandResult out;
  ErgodicityCertificate cert = ergodicity_certificate(action, opt);
  out.result["ergodic"] = cert.ergodic;
  json orbits = json::array();
  for (const auto& o : cert.orbits)
    orbits.push_back({{"orbit", o.orbit}, {"rank_certified", o.rank_certified}, {"minor_rows", o.minor_rows}});
  out.result["orbits"] = orbits;
  if (!cert.ergodic) {
    out.result["counterexample"] = cert.counterexample;
    out.result["counterexample_orbit"] = cert.counterexample_orbit;
    out.result["root_of_unity_order"] = cert.root_of_unity_order;
    out.result["trivialising"] = cert.trivialising;
  }
  return out;
}

inline CommandResult run_anosov(RunContext& ctx) {
  ZlAction action = action_from(ctx);
  std::vector<long> z = io::parse_long_vector(ctx.need("z"));
  CommandResult out;
  AnosovResult r = anosov_check(action, z, ctx.precision);
  out.result["anosov"] = r.anosov;
  out.result["decided_exactly"] = r.decided_exactly;
  if (!r.anosov) {
    out.result["witness_orbit"] = r.witness_orbit;
    out.result["witness_embedding"] = r.witness_embedding;
    out.result["witness_minpoly"] = io::to_json(r.witness_minpoly);
  }
  return out;
}

/// Per Galois orbit: the certified growth constant c and, up to
/// `check_radius`, a check of max_chi log|chi(z)| >= c ||z||_inf.
inline CommandResult run_lyapunov(RunContext& ctx) {
  ZlAction action = action_from(ctx);
  const long radius = io::parse_long(ctx.get("check_radius", 0));
  CommandResult out;
  json orbits = json::array();
  auto all = galois_orbits(simultaneous_spectrum(action));
  for (size_t o = 0; o < all.size(); ++o) {
    GrowthConstant g = growth_constant(all[o], ctx.precision);
    json entry = {{"orbit", o},
                  {"field_polynomial", io::to_json(all[o].field()->defining())},
                  {"c", io::enclosure(g.c)},
                  {"argmin", g.argmin}};
    if (radius > 0) {
      long checked = 0;
      json violations = json::array();
      for (const auto& z : detail::canonical_vectors(action.rank(), static_cast<int>(radius))) {
        long norm = 0;
        for (long v : z) norm = std::max(norm, std::labs(v));
        // z and -z give the same bound up to the sign of each log, so both are checked.
        for (int sign : {1, -1}) {
          std::vector<long> w = z;
          for (auto& v : w) v *= sign;
          auto ls = lyapunov_map(all[o], w, ctx.precision);
          Interval m = ls.front();
          for (const auto& l : ls) m = max(m, l);
          ++checked;
          if (m.certainly_less(g.c * Interval(norm, ctx.precision))) violations.push_back(w);
        }
      }
      entry["checked"] = checked;
      entry["violations"] = violations;
      if (!violations.empty()) out.raise(kFalsification, "growth inequality violated on orbit " + std::to_string(o));
    }
    orbits.push_back(entry);
  }
  out.result["orbits"] = orbits;
  return out;
}

inline CommandResult run_height(RunContext& ctx) {
  FieldPtr k = io::parse_field(ctx.need("field"));
  CommandResult out;
  json heights = json::array();
  for (const auto& e : ctx.get("elements", json::array())) {
    NumberFieldElement u = io::parse_element(k, e);
    HeightValue h = height(u, ctx.precision);
    heights.push_back({{"element", io::to_json(u)}, {"minpoly", io::to_json(u.minpoly())}, {"degree", h.degree},
                       {"height", io::enclosure(h.value)}});
  }
  out.result["heights"] = heights;
  json vectors = json::array();
  for (const auto& v : ctx.get("vectors", json::array())) {
    std::vector<NumberFieldElement> x;
    for (const auto& e : v) x.push_back(io::parse_element(k, e));
    vectors.push_back({{"vector", v}, {"height", io::enclosure(vector_height(x, ctx.precision))}});
  }
  out.result["vector_heights"] = vectors;
  return out;
}

inline std::optional<Interval> optional_param(json& params, const char* key, long prec) {
  if (!params.contains(key) || params[key].is_null()) {
    params[key] = nullptr;
    return std::nullopt;
  }
  return Interval(io::parse_rational(params[key]), prec);
}

/// Shape bound, proof-route bound and certified gap per instance; with
/// "calibrate" the smallest admissible c1 over all instances.
inline CommandResult run_linear_form(RunContext& ctx) {
  FieldPtr k = io::parse_field(ctx.need("field"));
  std::vector<NumberFieldElement> u_list;
  for (const auto& e : ctx.need("u_list")) u_list.push_back(io::parse_element(k, e));
  json params = ctx.get("params", json::object());
  LinearFormParams p;
  p.c1 = optional_param(params, "c1", ctx.precision);
  p.c2 = optional_param(params, "c2", ctx.precision);
  p.c3 = optional_param(params, "c3", ctx.precision);
  p.c = optional_param(params, "c", ctx.precision);
  ctx.inputs["params"] = params;
  const bool calibrate = ctx.get("calibrate", false).get<bool>();
  ctx.need("instances");
  std::vector<LogFormInstance> instances;
  for (auto& inst : ctx.inputs["instances"]) {
    LogFormInstance li;
    li.u_list = u_list;
    li.u = io::parse_element(k, io::require(inst, "u"));
    li.z = io::parse_long_vector(io::require(inst, "z"));
    if (!inst.contains("embedding")) inst["embedding"] = 0;
    li.embedding = static_cast<int>(io::parse_long(inst["embedding"]));
    if (li.z.size() != u_list.size()) throw io::SchemaError("instance z length differs from u_list");
    instances.push_back(std::move(li));
  }
  if (instances.empty()) throw io::SchemaError("'instances' must be nonempty");
  CommandResult out;
  json rows = json::array();
  for (const auto& inst : instances) {
    json row = {{"u", io::to_json(inst.u)}, {"z", inst.z}, {"embedding", inst.embedding}};
    if (is_degenerate(inst)) {
      row["degenerate"] = true;
      rows.push_back(row);
      continue;
    }
    LinearFormBound b = linear_form_bound(inst, p, ctx.precision);
    Interval gap = empirical_gap(inst, ctx.precision);
    row["degenerate"] = false;
    row["gap"] = io::enclosure(gap);
    row["bound"] = io::enclosure(b.bound);
    row["proof_route"] = io::enclosure(b.proof_route);
    row["gap_above_bound"] = b.bound.certainly_leq(gap) ? json(true) : b.bound.certainly_greater(gap) ? json(false) : json(nullptr);
    row["condition_holds"] = b.chain.condition_holds;
    rows.push_back(row);
  }
  out.result["instances"] = rows;
  if (calibrate) {
    std::vector<LogFormInstance> live;
    for (const auto& i : instances)
      if (!is_degenerate(i)) live.push_back(i);
    CalibrationResult c = calibrate_c1(live, p, ctx.precision);
    // c1 comes from a bisection on certified comparisons; its accuracy is the bisection tolerance.
    out.result["calibrated_c1"] = {{"estimate", c.c1}, {"relative_tolerance", 1e-9}};
    out.result["binding_instance"] = c.binding_instance;
  }
  return out;
}

inline CommandResult run_sunit(RunContext& ctx) {
  SUnitInstance inst;
  inst.field = io::parse_field(ctx.need("field"));
  for (const auto& e : ctx.need("units")) inst.fundamental_units.push_back(io::parse_element(inst.field, e));
  for (const auto& e : ctx.get("roots_of_unity", json::array({json::array({1}), json::array({-1})})))
    inst.roots_of_unity.push_back(io::parse_element(inst.field, e));
  for (const auto& e : ctx.need("b")) inst.b.push_back(io::parse_element(inst.field, e));
  inst.place = static_cast<int>(io::parse_long(ctx.get("place", 0)));
  inst.epsilon = io::parse_rational(ctx.get("epsilon", "1"));
  std::vector<long> boxes = io::parse_long_vector(ctx.get("boxes", json::array({10})));
  if (boxes.empty()) throw io::SchemaError("'boxes' must be nonempty");
  std::sort(boxes.begin(), boxes.end());
  inst.validate();
  CommandResult out;
  json per_box = json::array();
  SUnitResult last;
  for (long box : boxes) {
    last = sunit_solutions(inst, box, ctx.budget, ctx.precision);
    per_box.push_back({{"box", box},
                       {"solutions", last.solutions.size()},
                       {"nondegenerate", last.nondegenerate_count()},
                       {"undecided", last.undecided.size()},
                       {"stabilization_box", last.stabilization_box()},
                       {"partial", last.partial},
                       {"candidates_checked", last.candidates_checked},
                       {"exact_ties", last.exact_ties}});
    if (last.partial) {
      out.raise(kBudget, "enumeration budget exhausted at box " + std::to_string(box));
      break;
    }
  }
  out.result["boxes"] = per_box;
  auto solution_json = [](const SUnitSolution& s) {
    json x = json::array();
    for (const auto& e : s.x) x.push_back(io::to_json(e));
    return json{{"zeta_index", s.zeta_index}, {"exponents", s.exponents}, {"x", x},
                {"nondegenerate", s.nondegenerate}, {"lhs", io::enclosure(s.lhs)}, {"rhs", io::enclosure(s.rhs)}};
  };
  json sols = json::array(), und = json::array();
  for (const auto& s : last.solutions) sols.push_back(solution_json(s));
  for (const auto& s : last.undecided) und.push_back(solution_json(s));
  out.result["solutions"] = sols;
  out.result["undecided"] = und;
  // Degenerate candidates are excluded from the count whatever the comparison gives.
  if (std::any_of(last.undecided.begin(), last.undecided.end(), [](const auto& s) { return s.nondegenerate; }))
    out.raise(kPrecision, "undecided comparisons below the precision cap");
  return out;
}

}  // namespace nilmix::cli

#include "gaussito/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "gaussito/error.hpp"
#include "gaussito/heatkernel.hpp"
#include "gaussito/itoverify.hpp"
#include "gaussito/sampling.hpp"
#include "json.hpp"

namespace gaussito {

using json = nlohmann::json;

namespace {

// Collects schema violations as "<path>: <message>".
class Issues {
 public:
  void add(const std::string& path, const std::string& msg) { list_.push_back(path + ": " + msg); }
  bool empty() const { return list_.empty(); }
  [[noreturn]] void raise() const {
    std::string all = "scenario rejected";
    for (const auto& s : list_) all += "\n  " + s;
    throw ConfigError(all);
  }
  void raise_if_any() const {
    if (!empty()) raise();
  }

 private:
  std::vector<std::string> list_;
};

double number(const json& obj, const std::string& key, const std::string& path, double fallback,
              Issues& issues) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    issues.add(path + "." + key, "expected a number");
    return fallback;
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) issues.add(path + "." + key, "must be finite");
  return d;
}

std::size_t count(const json& obj, const std::string& key, const std::string& path,
                  std::size_t fallback, Issues& issues) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    issues.add(path + "." + key, "expected a non-negative integer");
    return fallback;
  }
  return v.get<std::size_t>();
}

bool flag(const json& obj, const std::string& key, const std::string& path, bool fallback,
          Issues& issues) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) {
    issues.add(path + "." + key, "expected true or false");
    return fallback;
  }
  return obj.at(key).get<bool>();
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> known, Issues& issues) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) issues.add(path + "." + key, "unknown key");
  }
}

ModelParams model_params(const json& p, const std::string& path, Issues& issues) {
  ModelParams out;
  if (!p.is_object()) {
    issues.add(path, "expected an object");
    return out;
  }
  reject_unknown(p, path, {"horizon", "hurst", "jumps", "coupling", "s0"}, issues);
  out.horizon = number(p, "horizon", path, out.horizon, issues);
  out.hurst = number(p, "hurst", path, out.hurst, issues);
  out.coupling = number(p, "coupling", path, out.coupling, issues);
  out.s0 = number(p, "s0", path, out.s0, issues);
  if (p.contains("jumps")) {
    const json& j = p.at("jumps");
    if (!j.is_array()) {
      issues.add(path + ".jumps", "expected an array of [time, variance] pairs");
    } else {
      for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string jp = path + ".jumps[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != 2 || !j[i][0].is_number() || !j[i][1].is_number()) {
          issues.add(jp, "expected [time, variance]");
          continue;
        }
        out.jumps.emplace_back(j[i][0].get<double>(), j[i][1].get<double>());
      }
    }
  }
  return out;
}

struct FunctionSpec {
  std::string id;
  double a = 0.05;
  std::vector<double> coeffs;
};

Side parse_side(const json& v, const std::string& path, Issues& issues) {
  if (!v.is_string()) {
    issues.add(path, "expected \"left\", \"at\" or \"right\"");
    return Side::at;
  }
  const std::string s = v.get<std::string>();
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  if (s != "at") issues.add(path, "expected \"left\", \"at\" or \"right\"");
  return Side::at;
}

const char* side_name(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::at: return "at";
    case Side::right: return "right";
  }
  return "at";
}

struct Tolerances {
  double polynomial = 1e-8;
  double transcendental = 1e-6;
  double rcll_agreement = 1e-10;
  double z_max = 4.0;
  double relative_l2 = 0.05;
};

struct McSettings {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  std::size_t grid_intervals = 256;
};

struct Checks {
  bool ito = true;
  bool rcll = false;
  bool martingale_mc = false;
  bool s_transform_mc = false;
  bool hermite_mc = false;
  bool path_qv_mc = false;
};

struct Scenario {
  std::string model_id;
  ModelParams params;
  std::vector<FunctionSpec> functions;
  bool auto_h = true;
  std::vector<std::vector<CmTerm>> h;
  Checks checks;
  Tolerances tol;
  ItoOptions integration;
  McSettings mc;
  ItoMutation mutation;
  std::string out_dir = "gaussito-out";
  std::string report_name = "report.json";
  std::string csv_name = "terms.csv";
  json canonical;
};

Scenario parse(const json& doc) {
  Issues issues;
  Scenario sc;
  if (!doc.is_object()) {
    issues.add("$", "expected a JSON object");
    issues.raise();
  }
  reject_unknown(doc, "$",
                 {"schema_version", "model", "functions", "h", "checks", "tolerances",
                  "integration", "mc", "mutations", "output"},
                 issues);
  if (!doc.contains("schema_version"))
    issues.add("$.schema_version", "missing");
  else if (!doc.at("schema_version").is_number_integer() ||
           doc.at("schema_version").get<int>() != kScenarioSchemaVersion)
    issues.add("$.schema_version", "unsupported, expected " + std::to_string(kScenarioSchemaVersion));

  if (!doc.contains("model") || !doc.at("model").is_object()) {
    issues.add("$.model", "missing or not an object");
  } else {
    const json& m = doc.at("model");
    reject_unknown(m, "$.model", {"id", "params", "horizon"}, issues);
    if (!m.contains("id") || !m.at("id").is_string())
      issues.add("$.model.id", "missing or not a string");
    else
      sc.model_id = m.at("id").get<std::string>();
    if (m.contains("params")) sc.params = model_params(m.at("params"), "$.model.params", issues);
    sc.params.horizon = number(m, "horizon", "$.model", sc.params.horizon, issues);
    bool known = false;
    for (const auto& e : catalog_entries()) known = known || e.id == sc.model_id;
    if (!sc.model_id.empty() && !known)
      issues.add("$.model.id", "unknown model id '" + sc.model_id + "'");
  }

  if (!doc.contains("functions") || !doc.at("functions").is_array() ||
      doc.at("functions").empty()) {
    issues.add("$.functions", "missing or empty array");
  } else {
    const json& fs = doc.at("functions");
    const auto ids = test_function_ids();
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string path = "$.functions[" + std::to_string(i) + "]";
      FunctionSpec f;
      if (fs[i].is_string()) {
        f.id = fs[i].get<std::string>();
      } else if (fs[i].is_object()) {
        reject_unknown(fs[i], path, {"id", "a", "coeffs"}, issues);
        if (!fs[i].contains("id") || !fs[i].at("id").is_string()) {
          issues.add(path + ".id", "missing or not a string");
          continue;
        }
        f.id = fs[i].at("id").get<std::string>();
        f.a = number(fs[i], "a", path, f.a, issues);
        if (fs[i].contains("coeffs")) {
          const json& c = fs[i].at("coeffs");
          if (!c.is_array()) {
            issues.add(path + ".coeffs", "expected an array of numbers");
          } else {
            for (std::size_t k = 0; k < c.size(); ++k) {
              if (!c[k].is_number())
                issues.add(path + ".coeffs[" + std::to_string(k) + "]", "expected a number");
              else
                f.coeffs.push_back(c[k].get<double>());
            }
          }
        }
      } else {
        issues.add(path, "expected a function id or an object");
        continue;
      }
      if (std::find(ids.begin(), ids.end(), f.id) == ids.end()) {
        issues.add(path, "unknown function id '" + f.id + "'");
        continue;
      }
      if (f.id == "poly" && f.coeffs.empty()) issues.add(path + ".coeffs", "poly needs coefficients");
      if (f.a < 0.0) issues.add(path + ".a", "growth exponent must be non-negative");
      sc.functions.push_back(f);
    }
  }

  if (doc.contains("h")) {
    const json& h = doc.at("h");
    if (h.is_string()) {
      if (h.get<std::string>() != "auto") issues.add("$.h", "expected \"auto\" or a list of elements");
    } else if (h.is_array()) {
      sc.auto_h = false;
      for (std::size_t i = 0; i < h.size(); ++i) {
        const std::string path = "$.h[" + std::to_string(i) + "]";
        if (!h[i].is_array()) {
          issues.add(path, "expected a list of {coeff, time, side} terms");
          continue;
        }
        std::vector<CmTerm> terms;
        for (std::size_t k = 0; k < h[i].size(); ++k) {
          const std::string tp = path + "[" + std::to_string(k) + "]";
          const json& t = h[i][k];
          if (!t.is_object() || !t.contains("time")) {
            issues.add(tp, "expected {\"coeff\", \"time\", \"side\"}");
            continue;
          }
          reject_unknown(t, tp, {"coeff", "time", "side"}, issues);
          CmTerm term;
          term.coeff = number(t, "coeff", tp, 1.0, issues);
          term.at.time = number(t, "time", tp, 0.0, issues);
          if (t.contains("side")) term.at.side = parse_side(t.at("side"), tp + ".side", issues);
          if (term.at.time < 0.0 || term.at.time > sc.params.horizon)
            issues.add(tp + ".time", "outside [0, horizon]");
          terms.push_back(term);
        }
        sc.h.push_back(std::move(terms));
      }
    } else {
      issues.add("$.h", "expected \"auto\" or a list of elements");
    }
  }

  if (doc.contains("checks")) {
    const json& c = doc.at("checks");
    if (!c.is_object()) {
      issues.add("$.checks", "expected an object");
    } else {
      reject_unknown(c, "$.checks",
                     {"ito", "rcll", "martingale_mc", "s_transform_mc", "hermite_mc", "path_qv_mc"},
                     issues);
      sc.checks.ito = flag(c, "ito", "$.checks", sc.checks.ito, issues);
      sc.checks.rcll = flag(c, "rcll", "$.checks", sc.checks.rcll, issues);
      sc.checks.martingale_mc = flag(c, "martingale_mc", "$.checks", false, issues);
      sc.checks.s_transform_mc = flag(c, "s_transform_mc", "$.checks", false, issues);
      sc.checks.hermite_mc = flag(c, "hermite_mc", "$.checks", false, issues);
      sc.checks.path_qv_mc = flag(c, "path_qv_mc", "$.checks", false, issues);
    }
  }

  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) {
      issues.add("$.tolerances", "expected an object");
    } else {
      reject_unknown(t, "$.tolerances",
                     {"polynomial", "transcendental", "rcll_agreement", "z_max", "relative_l2"},
                     issues);
      sc.tol.polynomial = number(t, "polynomial", "$.tolerances", sc.tol.polynomial, issues);
      sc.tol.transcendental =
          number(t, "transcendental", "$.tolerances", sc.tol.transcendental, issues);
      sc.tol.rcll_agreement =
          number(t, "rcll_agreement", "$.tolerances", sc.tol.rcll_agreement, issues);
      sc.tol.z_max = number(t, "z_max", "$.tolerances", sc.tol.z_max, issues);
      sc.tol.relative_l2 = number(t, "relative_l2", "$.tolerances", sc.tol.relative_l2, issues);
      for (double v : {sc.tol.polynomial, sc.tol.transcendental, sc.tol.rcll_agreement,
                       sc.tol.z_max, sc.tol.relative_l2})
        if (!(v > 0.0)) issues.add("$.tolerances", "tolerances must be positive");
    }
  }

  if (doc.contains("integration")) {
    const json& t = doc.at("integration");
    if (!t.is_object()) {
      issues.add("$.integration", "expected an object");
    } else {
      reject_unknown(t, "$.integration", {"ys_tol", "max_refine", "ls_tol"}, issues);
      sc.integration.ys_tol = number(t, "ys_tol", "$.integration", sc.integration.ys_tol, issues);
      sc.integration.ls_tol = number(t, "ls_tol", "$.integration", sc.integration.ls_tol, issues);
      sc.integration.max_refine =
          count(t, "max_refine", "$.integration", sc.integration.max_refine, issues);
      if (!(sc.integration.ys_tol > 0.0)) issues.add("$.integration.ys_tol", "must be positive");
      if (!(sc.integration.ls_tol > 0.0)) issues.add("$.integration.ls_tol", "must be positive");
    }
  }

  if (doc.contains("mc")) {
    const json& m = doc.at("mc");
    if (!m.is_object()) {
      issues.add("$.mc", "expected an object");
    } else {
      reject_unknown(m, "$.mc", {"n_paths", "seed", "grid_intervals"}, issues);
      sc.mc.n_paths = count(m, "n_paths", "$.mc", sc.mc.n_paths, issues);
      sc.mc.seed = count(m, "seed", "$.mc", sc.mc.seed, issues);
      sc.mc.grid_intervals = count(m, "grid_intervals", "$.mc", sc.mc.grid_intervals, issues);
      if (sc.mc.n_paths == 0) issues.add("$.mc.n_paths", "must be at least 1");
      if (sc.mc.grid_intervals == 0) issues.add("$.mc.grid_intervals", "must be at least 1");
    }
  }

  if (doc.contains("mutations")) {
    const json& m = doc.at("mutations");
    if (!m.is_object()) {
      issues.add("$.mutations", "expected an object");
    } else {
      reject_unknown(m, "$.mutations",
                     {"drop_jump_sum", "drop_left_jumps", "drop_right_jumps", "drop_dv_integral",
                      "drop_ys_integral", "drop_xleft_correction"},
                     issues);
      const bool both = flag(m, "drop_jump_sum", "$.mutations", false, issues);
      sc.mutation.drop_left_jumps = both || flag(m, "drop_left_jumps", "$.mutations", false, issues);
      sc.mutation.drop_right_jumps =
          both || flag(m, "drop_right_jumps", "$.mutations", false, issues);
      sc.mutation.drop_dv_integral = flag(m, "drop_dv_integral", "$.mutations", false, issues);
      sc.mutation.drop_ys_integral = flag(m, "drop_ys_integral", "$.mutations", false, issues);
      sc.mutation.drop_xleft_correction =
          flag(m, "drop_xleft_correction", "$.mutations", false, issues);
    }
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (!o.is_object()) {
      issues.add("$.output", "expected an object");
    } else {
      reject_unknown(o, "$.output", {"dir", "report", "csv"}, issues);
      for (const auto& [key, target] :
           {std::pair<const char*, std::string*>{"dir", &sc.out_dir},
            {"report", &sc.report_name},
            {"csv", &sc.csv_name}}) {
        if (!o.contains(key)) continue;
        if (!o.at(key).is_string() || o.at(key).get<std::string>().empty())
          issues.add(std::string("$.output.") + key, "expected a non-empty string");
        else
          *target = o.at(key).get<std::string>();
      }
    }
  }
  issues.raise_if_any();
  sc.canonical = doc;
  return sc;
}

// One unit of work; results land in a fixed slot so report order does not
// depend on scheduling.
struct CaseResult {
  json record;
  std::vector<std::pair<std::string, std::pair<double, double>>> terms;  // term -> (value, contribution)
  bool pass = false;
  double runtime_s = 0.0;
};

struct PlannedCase {
  std::string id;
  std::function<CaseResult()> run;
};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t case_seed(std::uint64_t base, const std::string& id) { return path_seed(base, fnv1a(id)); }

json terms_json(const std::vector<CmTerm>& terms) {
  json out = json::array();
  for (const CmTerm& t : terms)
    out.push_back({{"coeff", t.coeff}, {"time", t.at.time}, {"side", side_name(t.at.side)}});
  return out;
}

json mc_json(const McReport& r) {
  return {{"estimate", r.estimate},   {"standard_error", r.standard_error},
          {"reference", r.reference}, {"z_score", r.z_score},
          {"n_paths", r.n_paths},     {"seed", r.seed}};
}

CaseResult ito_result(const ItoTerms& t, double tol, const ItoMutation& m, bool rcll_form) {
  CaseResult r;
  const bool finite = std::isfinite(t.residual);
  r.pass = finite && std::abs(t.residual) < tol && t.converged;
  r.record = {{"kind", "deterministic"},
              {"form", rcll_form ? "rcll" : "stransform"},
              {"lhs", t.lhs},
              {"rhs", t.rhs},
              {"residual", t.residual},
              {"tolerance", tol},
              {"converged", t.converged},
              {"ys_error_estimate", t.ys_error_estimate},
              {"terms",
               {{"ys_integral", t.ys_integral},
                {"dv_integral", t.dv_integral},
                {"left_jump_sum", t.left_jump_sum},
                {"right_jump_sum", t.right_jump_sum}}}};
  if (rcll_form) r.record["terms"]["xleft_correction"] = t.xleft_correction;
  auto contrib = [](bool dropped, double v) { return dropped ? 0.0 : -v; };
  r.terms = {{"lhs", {t.lhs, t.lhs}},
             {"ys_integral", {t.ys_integral, contrib(m.drop_ys_integral, t.ys_integral)}},
             {"dv_integral", {t.dv_integral, contrib(m.drop_dv_integral, t.dv_integral)}},
             {"left_jump_sum", {t.left_jump_sum, contrib(m.drop_left_jumps, t.left_jump_sum)}},
             {"right_jump_sum", {t.right_jump_sum, contrib(m.drop_right_jumps, t.right_jump_sum)}}};
  if (rcll_form) r.terms.push_back({"xleft_correction", {t.xleft_correction, 0.0}});
  return r;
}

CaseResult mc_result(const McReport& rep, double z_max) {
  CaseResult r;
  r.pass = std::isfinite(rep.z_score) && std::abs(rep.z_score) <= z_max && rep.n_paths >= 2;
  r.record = mc_json(rep);
  r.record["kind"] = "mc";
  r.record["z_max"] = z_max;
  r.terms = {{"estimate", {rep.estimate, rep.estimate}},
             {"reference", {rep.reference, -rep.reference}}};
  return r;
}

std::vector<PlannedCase> plan(const Scenario& sc) {
  auto at_path = [](const std::string& path, auto&& make) {
    try {
      return make();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(path + ": " + e.what());
    }
  };
  const ProcessSpec spec = at_path("$.model.params", [&] { return catalog(sc.model_id, sc.params); });
  std::vector<TestFunction> functions;
  for (std::size_t i = 0; i < sc.functions.size(); ++i) {
    const FunctionSpec& f = sc.functions[i];
    functions.push_back(at_path("$.functions[" + std::to_string(i) + "]",
                                [&] { return make_test_function(f.id, f.a, f.coeffs); }));
  }
  std::vector<std::vector<CmTerm>> hs = sc.auto_h ? auto_battery(spec) : sc.h;
  for (std::size_t k = 0; k < hs.size(); ++k)
    at_path("$.h[" + std::to_string(k) + "]", [&] { return CameronMartinElement(spec, hs[k]); });
  if (hs.empty()) throw ConfigError("$.h: no Cameron-Martin elements");

  // Growth constraint and h validity are checked here, before any case runs.
  std::vector<std::string> fn_ids;
  for (std::size_t i = 0; i < functions.size(); ++i) {
    std::string id = functions[i].id;
    if (std::count_if(functions.begin(), functions.end(),
                      [&](const TestFunction& g) { return g.id == id; }) > 1)
      id += "#" + std::to_string(i);
    fn_ids.push_back(id);
    try {
      ItoCase(id, spec, functions[i], hs.front(), sc.integration);
    } catch (const Error& e) {
      throw ConfigError("$.functions[" + std::to_string(i) + "]: " + e.what());
    }
  }

  const bool rcll_model = spec.kind() != ProcessKind::general;
  if (sc.checks.rcll && !rcll_model)
    throw ConfigError("$.checks.rcll: model '" + spec.id() + "' is not stochastically RCLL");
  if (sc.checks.martingale_mc && spec.kind() != ProcessKind::martingale)
    throw ConfigError("$.checks.martingale_mc: model '" + spec.id() + "' is not a martingale");
  if (sc.checks.path_qv_mc && !spec.continuous_qv())
    throw ConfigError("$.checks.path_qv_mc: model '" + spec.id() +
                      "' has no continuous quadratic variation");
  if (sc.checks.hermite_mc && hs.size() < 2)
    throw ConfigError("$.checks.hermite_mc: needs at least two elements in $.h");

  std::vector<PlannedCase> out;
  auto hid = [&](std::size_t k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "h%02zu", k);
    return std::string(buf);
  };
  for (std::size_t fi = 0; fi < functions.size(); ++fi) {
    const double tol = functions[fi].polynomial ? sc.tol.polynomial : sc.tol.transcendental;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      const ItoCase c(spec.id() + "/" + fn_ids[fi] + "/" + hid(k), spec, functions[fi], hs[k],
                      sc.integration);
      if (sc.checks.ito)
        out.push_back({"ito/" + c.id(), [c, tol, m = sc.mutation]() {
                         CaseResult r = ito_result(ito_stransform_residual(c, m), tol, m, false);
                         r.record["h"] = terms_json({c.h().terms().begin(), c.h().terms().end()});
                         return r;
                       }});
      if (sc.checks.rcll)
        out.push_back({"rcll/" + c.id(), [c, tol, m = sc.mutation, agree = sc.tol.rcll_agreement]() {
                         const ItoTerms rc = ito_rcll_residual(c, m);
                         const ItoTerms full = ito_stransform_residual(c, {});
                         CaseResult r = ito_result(rc, tol, m, true);
                         const double gap = std::abs(rc.residual - full.residual);
                         r.record["agreement_gap"] = gap;
                         r.record["agreement_tolerance"] = agree;
                         if (!m.any()) r.pass = r.pass && gap < agree;
                         return r;
                       }});
    }
    if (sc.checks.martingale_mc) {
      const ItoCase c(spec.id() + "/" + fn_ids[fi], spec, functions[fi], hs.front(),
                      sc.integration);
      const std::string id = "martingale_mc/" + c.id();
      out.push_back({id, [c, id, mc = sc.mc, rel = sc.tol.relative_l2]() {
                       const MartingaleMcReport rep =
                           martingale_ito_mc(c, mc.grid_intervals, mc.n_paths, case_seed(mc.seed, id));
                       CaseResult r;
                       r.pass = std::isfinite(rep.relative_l2) && rep.relative_l2 < rel;
                       r.record = {{"kind", "mc"},
                                   {"relative_l2", rep.relative_l2},
                                   {"rms_residual", rep.rms_residual},
                                   {"mean_residual", rep.mean_residual},
                                   {"standard_error", rep.standard_error},
                                   {"grid_intervals", rep.grid_intervals},
                                   {"n_paths", rep.n_paths},
                                   {"seed", rep.seed},
                                   {"tolerance", rel}};
                       r.terms = {{"relative_l2", {rep.relative_l2, rep.relative_l2}}};
                       return r;
                     }});
    }
  }

  if (sc.checks.s_transform_mc) {
    const double T = spec.horizon();
    for (std::size_t k = 0; k < hs.size(); ++k) {
      const ItoCase c(spec.id() + "/" + hid(k), spec, functions.front(), hs[k], sc.integration);
      std::vector<std::pair<std::string, Observable>> obs = {
          {"x", {ObservableKind::x, 0.5 * T, 0.0, {}}},
          {"f", {ObservableKind::f, 0.5 * T, 0.0, {}}},
          {"wick_exp", {ObservableKind::wick_exp, 0.0, 0.0, {{1.0, {T, Side::at}}}}},
      };
      for (double s : spec.discontinuity_times()) {
        obs.push_back({"smoothed_left@" + std::to_string(s), {ObservableKind::smoothed_left, s, 0.0, {}}});
        obs.push_back({"jump_wick@" + std::to_string(s), {ObservableKind::jump_wick, s, 0.5, {}}});
      }
      for (const auto& [name, o] : obs) {
        const std::string id = "s_transform_mc/" + c.id() + "/" + name;
        out.push_back({id, [c, o = o, id, mc = sc.mc, z = sc.tol.z_max]() {
                         CaseResult r =
                             mc_result(mc_s_transform(c, o, mc.n_paths, case_seed(mc.seed, id)), z);
                         r.record["h"] = terms_json({c.h().terms().begin(), c.h().terms().end()});
                         return r;
                       }});
      }
    }
  }

  if (sc.checks.hermite_mc) {
    for (std::size_t k = 0; k + 1 < hs.size(); ++k) {
      const std::string id = "hermite_mc/" + spec.id() + "/" + hid(k) + "-" + hid(k + 1);
      out.push_back({id, [spec, g = hs[k], h = hs[k + 1], id, mc = sc.mc, z = sc.tol.z_max]() {
                       return mc_result(
                           hermite_p2_identity_mc(spec, g, h, mc.n_paths, case_seed(mc.seed, id)), z);
                     }});
    }
  }

  if (sc.checks.path_qv_mc) {
    const std::string id = "path_qv_mc/" + spec.id();
    out.push_back({id, [spec, id, mc = sc.mc, z = sc.tol.z_max]() {
                     const Partition grid = Partition::uniform(spec.horizon(), mc.grid_intervals);
                     return mc_result(path_qv_mc(spec, grid, mc.n_paths, case_seed(mc.seed, id)), z);
                   }});
  }

  std::sort(out.begin(), out.end(),
            [](const PlannedCase& a, const PlannedCase& b) { return a.id < b.id; });
  return out;
}

std::vector<CaseResult> execute(const std::vector<PlannedCase>& cases, unsigned jobs) {
  std::vector<CaseResult> results(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cases.size()) return;
      const auto start = std::chrono::steady_clock::now();
      try {
        results[i] = cases[i].run();
      } catch (const std::exception& e) {
        results[i] = CaseResult{};
        results[i].record = {{"kind", "error"}, {"error", e.what()}};
        results[i].pass = false;
      }
      results[i].runtime_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cases.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write '" + p.string() + "'");
  os << content;
  if (!os) throw ConfigError("failed writing '" + p.string() + "'");
}

}  // namespace

ModelParams parse_model_params(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text.empty() ? std::string("{}") : json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("$: invalid JSON: ") + e.what());
  }
  Issues issues;
  ModelParams p = model_params(doc, "$", issues);
  issues.raise_if_any();
  return p;
}

std::string fnv1a_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

RunResult run_scenario(const std::string& json_text, const RunOptions& options, bool write_files) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("$: invalid JSON: ") + e.what());
  }
  Scenario sc = parse(doc);
  if (options.seed) {
    sc.mc.seed = *options.seed;
    sc.canonical["mc"]["seed"] = *options.seed;
  }
  std::vector<PlannedCase> cases;
  try {
    cases = plan(sc);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const std::vector<CaseResult> results = execute(cases, options.jobs);

  RunResult out;
  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["scenario_hash"] = fnv1a_hex(sc.canonical.dump());
  report["model"] = sc.model_id;
  json arr = json::array();
  std::ostringstream csv, summary;
  csv << "case_id,term,value,residual_contribution\n";
  for (std::size_t i = 0; i < cases.size(); ++i) {
    json rec = results[i].record;
    rec["id"] = cases[i].id;
    rec["pass"] = results[i].pass;
    arr.push_back(rec);
    for (const auto& [term, vc] : results[i].terms)
      csv << csv_field(cases[i].id) << ',' << term << ',' << fmt(vc.first) << ','
          << fmt(vc.second) << '\n';
    (results[i].pass ? out.passed : out.failed)++;
    summary << (results[i].pass ? "PASS " : "FAIL ") << cases[i].id;
    if (rec.contains("residual")) summary << "  residual=" << fmt(rec["residual"].get<double>());
    if (rec.contains("z_score")) summary << "  z=" << fmt(rec["z_score"].get<double>());
    if (rec.contains("relative_l2")) summary << "  rel_l2=" << fmt(rec["relative_l2"].get<double>());
    if (rec.contains("error")) summary << "  error=" << rec["error"].get<std::string>();
    char rt[32];
    std::snprintf(rt, sizeof rt, "  (%.3fs)", results[i].runtime_s);
    summary << rt << '\n';
  }
  report["cases"] = std::move(arr);
  report["summary"] = {{"total", cases.size()}, {"passed", out.passed}, {"failed", out.failed}};
  summary << out.passed << " passed, " << out.failed << " failed\n";

  out.exit_code = out.failed == 0 ? 0 : 1;
  out.report_json = report.dump(2) + "\n";
  out.csv = csv.str();
  out.summary = summary.str();

  if (write_files) {
    std::filesystem::path dir;
    if (options.out_dir) {
      dir = *options.out_dir;
    } else if (const char* env = std::getenv("GAUSSITO_OUT_DIR"); env && *env) {
      dir = env;
    } else {
      dir = sc.out_dir;
      if (dir.is_relative()) dir = std::filesystem::path(options.base_dir) / dir;
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
    const auto report_path = dir / sc.report_name;
    const auto csv_path = dir / sc.csv_name;
    write_file(report_path, out.report_json);
    write_file(csv_path, out.csv);
    out.report_path = report_path.string();
    out.csv_path = csv_path.string();
  }
  return out;
}

RunResult run_scenario_file(const std::string& path, RunOptions options) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read scenario '" + path + "'");
  std::stringstream buf;
  buf << is.rdbuf();
  if (options.base_dir == ".") {
    const auto parent = std::filesystem::path(path).parent_path();
    options.base_dir = parent.empty() ? "." : parent.string();
  }
  return run_scenario(buf.str(), options, true);
}

std::string catalog_text() {
  std::ostringstream os;
  for (const CatalogEntry& e : catalog_entries())
    os << e.id << " - " << e.exercises << "\n    params: " << e.params << "\n";
  return os.str();
}

}  // namespace gaussito

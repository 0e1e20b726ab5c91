#pragma once
/**
 * @file cli.hpp
 * @brief Command-line front end: structures, special, counterexample and
 * full-report subcommands producing JSON reports and stable exit codes.
 */

#include "holoforge/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

namespace holoforge::cli {

enum ExitCode : int {
  kPass = 0,
  kUsage = 1,
  kStructureFailure = 2,
  kSpecialMismatch = 3,
  kCounterexampleMismatch = 4,
  kCoveringFailure = 5,
};

struct RunConfig {
  std::string subcommand;
  std::string group;
  int n = 0;
  int definition = 1;
  int example = 1;
  std::vector<double> r;
  int steps = kDefaultSteps;
  int trials = 50;
  std::uint64_t seed = 1;
  std::string out;
  Tolerances tol{};
  bool inject_phi_sign_flip = false;
};

struct Outcome {
  int code = kPass;
  Json report;
  std::string summary;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline std::vector<double> default_r_grid() { return {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline GroupSpec group_from(const RunConfig& cfg) {
  if (cfg.group.empty()) throw UsageError("--group is required");
  auto f = parse_family(cfg.group);
  if (!f) throw UsageError("unknown group '" + cfg.group + "' (so u su sp spu1 spsp1 g2 spin7 spin9)");
  if (has_parameter(*f) && cfg.n == 0) throw UsageError("--n is required for group " + cfg.group);
  try {
    return GroupSpec(*f, cfg.n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

inline void validate(const RunConfig& cfg) {
  try {
    cfg.tol.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (cfg.steps < 100) throw UsageError("--steps must be at least 100");
  if (cfg.trials < 1) throw UsageError("--trials must be at least 1");
  if (cfg.definition != 1 && cfg.definition != 2) throw UsageError("--definition must be 1 or 2");
  if (cfg.example != 1 && cfg.example != 2) throw UsageError("--example must be 1 or 2");
  for (double r : cfg.r)
    if (!(r > 0.0 && r < 1.0)) throw UsageError("--r values must lie in (0, 1)");
}

inline Json header(const std::string& command, const RunConfig& cfg) {
  Json j;
  j["schema"] = kSchema;
  j["command"] = command;
  j["config"] = {{"steps", cfg.steps},
                 {"trials", cfg.trials},
                 {"seed", cfg.seed},
                 {"tol_rank", cfg.tol.rank_tol},
                 {"tol_ode", cfg.tol.ode_tol},
                 {"inject_phi_sign_flip", cfg.inject_phi_sign_flip}};
  return j;
}

inline std::string fmt(double v, int prec = 10) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

// Flips the sign of the first coefficient of the defining form (phi for G2,
// Phi for Spin(7)); packs without a form are left unchanged.
inline void flip_phi_sign(StructurePack& pack) {
  for (auto& f : pack.forms)
    if (!f.form.terms().empty()) {
      f.form.terms().front().coefficient *= -1.0;
      return;
    }
}

inline int worst_code(std::initializer_list<int> codes) {
  int worst = kPass;
  for (int c : codes)
    if (c != kPass && (worst == kPass || c < worst)) worst = c;
  return worst;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// structures

inline Json structures_json(const StructurePack& pack, bool& pass) {
  auto rel = structure_relations(pack);
  Json ops = Json::array();
  for (const auto& o : pack.operators) ops.push_back({{"name", o.name}, {"matrix", to_json(o.matrix)}});
  Json forms = Json::array();
  for (const auto& f : pack.forms) {
    Json fj = to_json(f.form);
    fj["name"] = f.name;
    forms.push_back(fj);
  }
  Json rels = Json::array();
  pass = true;
  for (const auto& c : rel) {
    rels.push_back(to_json(c));
    pass = pass && c.passed;
  }
  Json j;
  j["group"] = to_json(pack.spec);
  j["operators"] = ops;
  j["forms"] = forms;
  j["relation_count"] = rel.size();
  j["relations"] = rels;
  j["pass"] = pass;
  return j;
}

inline Outcome cmd_structures(const RunConfig& cfg) {
  const GroupSpec spec = detail::group_from(cfg);
  StructurePack pack = build_structures(spec);
  if (cfg.inject_phi_sign_flip) detail::flip_phi_sign(pack);
  bool pass = false;
  Outcome o;
  o.report = detail::header("structures", cfg);
  o.report.update(structures_json(pack, pass));
  std::size_t failed = 0;
  for (const auto& r : o.report["relations"]) failed += r["passed"].get<bool>() ? 0 : 1;
  std::ostringstream s;
  s << spec.name() << " on R^" << spec.ambient_dim() << ": " << pack.operators.size() << " operators, ";
  if (!pack.forms.empty()) s << pack.forms.front().form.terms().size() << " form coefficients, ";
  s << o.report["relation_count"].get<std::size_t>() << " relation checks, " << failed << " failed\n";
  s << "structures: " << (pass ? "pass" : "FAIL") << "\n";
  o.summary = s.str();
  o.code = pass ? kPass : kStructureFailure;
  return o;
}

// ---------------------------------------------------------------------------
// special

inline Outcome cmd_special(const RunConfig& cfg) {
  const GroupSpec spec = detail::group_from(cfg);
  const auto pack = build_structures(spec);
  const auto alg = algebra_basis(pack, cfg.tol.rank_tol);
  const Definition def = cfg.definition == 1 ? Definition::Pointwise : Definition::Setwise;
  SpecialConfig sc;
  sc.tol = cfg.tol;
  auto res = minimal_special_dimension(pack, alg, def, cfg.trials, cfg.seed, sc);
  Outcome o;
  o.report = detail::header("special", cfg);
  o.report.update(to_json(res));
  const bool match = o.report["match"].get<bool>();
  std::ostringstream s;
  s << spec.name() << ", definition " << cfg.definition << ": minimal special dimension " << res.dim
    << " (expected " << expected_minimal_dim(spec, def) << ", " << res.total_evaluated
    << " generating subspaces)\n";
  s << "special: " << (match ? "pass" : "MISMATCH") << "\n";
  o.summary = s.str();
  o.code = match ? kPass : kSpecialMismatch;
  return o;
}

// ---------------------------------------------------------------------------
// counterexample

inline Json examples_json(int example, const std::vector<double>& grid, int steps, double tol,
                          bool& pass, std::string& summary) {
  Json points = Json::array();
  pass = true;
  std::ostringstream s;
  for (double r : grid) {
    CounterexampleReport rep = example == 1 ? example1_check(r, steps) : example2_check(r, steps);
    // the verdict must match the one predicted by the closed-form gap
    const bool expected_violation = rep.gap_closed_form > kViolationThreshold;
    bool ok = rep.violated == expected_violation && rep.agrees(tol);
    if (rep.factor) ok = ok && std::abs(*rep.factor - std::cos(kTwoPi * std::sqrt(1 - r * r))) < 1e-6;
    pass = pass && ok;
    Json pj = to_json(rep, tol);
    pj["expected_verdict"] = expected_violation ? "VIOLATED" : "HOLDS";
    pj["pass"] = ok;
    points.push_back(pj);
    s << "example " << example << "  r=" << detail::fmt(r, 4) << "  gap=" << detail::fmt(rep.gap_numeric)
      << "  closed form=" << detail::fmt(rep.gap_closed_form) << "  " << rep.verdict() << "\n";
  }
  summary += s.str();
  return {{"example", example}, {"points", points}, {"pass", pass}};
}

inline Outcome cmd_counterexample(const RunConfig& cfg) {
  const auto grid = cfg.r.empty() ? default_r_grid() : cfg.r;
  Outcome o;
  o.report = detail::header("counterexample", cfg);
  bool pass = false;
  o.report.update(examples_json(cfg.example, grid, cfg.steps, cfg.tol.ode_tol, pass, o.summary));
  o.summary += std::string("counterexample: ") + (pass ? "pass" : "MISMATCH") + "\n";
  o.code = pass ? kPass : kCounterexampleMismatch;
  return o;
}

// ---------------------------------------------------------------------------
// full-report

inline Json algebras_section(std::uint64_t seed, double rank_tol, bool& pass) {
  Json items = Json::array();
  pass = true;
  std::uint64_t k = 0;
  for (const auto& spec : reference_instances()) {
    const auto pack = build_structures(spec);
    const auto alg = algebra_basis(pack, rank_tol);
    std::mt19937_64 rng(detail::mix_seed(seed, k++));
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) worst = std::max(worst, membership_residual(pack, exp_element(random_element(alg, rng))));
    const double closure = bracket_closure_residual(alg);
    const bool ok = alg.dim() == expected_algebra_dim(spec) && closure < 1e-8 && worst < 1e-8;
    Json j{{"group", to_json(spec)},
           {"dim", alg.dim()},
           {"expected_dim", expected_algebra_dim(spec)},
           {"closure_residual", closure},
           {"antisymmetry_defect", antisymmetry_defect(alg)},
           {"exp_membership_max_residual", worst}};
    if (spec.family() == Family::G2 || spec.family() == Family::Spin7) {
      Operator reflect = Operator::Identity(spec.ambient_dim(), spec.ambient_dim());
      reflect(0, 0) = -1.0;
      const bool rejected = !is_member(pack, reflect);
      j["reflection_residual"] = membership_residual(pack, reflect);
      j["reflection_rejected"] = rejected;
      pass = pass && rejected;
    }
    j["pass"] = ok;
    pass = pass && ok;
    items.push_back(j);
  }
  return {{"instances", items}, {"pass", pass}};
}

inline Json special_section(Definition def, const RunConfig& cfg, bool& pass) {
  Json items = Json::array();
  pass = true;
  SpecialConfig sc;
  sc.tol = cfg.tol;
  std::uint64_t k = 0;
  for (const auto& spec : reference_instances()) {
    const auto pack = build_structures(spec);
    const auto alg = algebra_basis(pack, cfg.tol.rank_tol);
    auto res = minimal_special_dimension(pack, alg, def, cfg.trials, detail::mix_seed(cfg.seed, 100 + k++), sc);
    Json j = to_json(res);
    pass = pass && j["match"].get<bool>();
    items.push_back(j);
  }
  return {{"definition", to_int(def)}, {"instances", items}, {"pass", pass}};
}

inline Json covering_section(std::uint64_t seed, bool& pass) {
  constexpr int kTrials = 100;
  Json cases = Json::array();
  pass = true;
  struct Case {
    GroupSpec sub;
    GroupSpec ambient;
  };
  std::uint64_t k = 0;
  for (const auto& c : {Case{GroupSpec(Family::SU, 3), GroupSpec(Family::U, 3)},
                        Case{GroupSpec(Family::SpU1, 2), GroupSpec(Family::U, 4)}}) {
    const auto sub = build_structures(c.sub);
    std::array<Operator, 1> i_sub{sub.op("I")};
    const auto ambient_alg = commutant_algebra(i_sub, c.sub.ambient_dim());
    std::mt19937_64 rng(detail::mix_seed(seed, 200 + k++));
    std::normal_distribution<double> gauss;
    int found = 0;
    double worst = 0.0, worst_member = 0.0;
    for (int t = 0; t < kTrials; ++t) {
      const Operator a = exp_element(random_element(ambient_alg, rng));
      Vector x(c.sub.ambient_dim());
      for (Index i = 0; i < x.size(); ++i) x(i) = gauss(rng);
      x.normalize();
      Matrix p(x.size(), 2);
      p << x, sub.op("I") * x;
      auto res = weak_cover_check(sub, a, SubspaceBasis::from_orthonormal(p), x);
      found += res.found ? 1 : 0;
      worst = std::max(worst, res.residual);
      worst_member = std::max(worst_member, res.membership);
    }
    const bool ok = found == kTrials;
    pass = pass && ok;
    cases.push_back({{"subgroup", to_json(c.sub)},
                     {"ambient", to_json(c.ambient)},
                     {"ambient_algebra_dim", ambient_alg.dim()},
                     {"trials", kTrials},
                     {"found", found},
                     {"max_residual", worst},
                     {"max_membership_residual", worst_member},
                     {"pass", ok}});
  }
  // transport around the S^6 circle loop is not covered by SU(3)
  const auto th = example1_tangent_holonomy(0.6, 20000);
  const auto su3 = build_structures(GroupSpec(Family::SU, 3));
  Matrix p(6, 2);
  p << Vector::Unit(6, 0), Vector::Unit(6, 1);
  auto neg = weak_cover_check(su3, th.matrix, SubspaceBasis::from_orthonormal(p));
  pass = pass && !neg.found;
  Json negative{{"subgroup", to_json(GroupSpec(Family::SU, 3))},
                {"r", 0.6},
                {"found", neg.found},
                {"residual", neg.residual},
                {"pass", !neg.found}};
  return {{"cases", cases}, {"transport_control", negative}, {"pass", pass}};
}

inline Json theorem1_section(std::uint64_t seed, bool& pass) {
  Json table = Json::array();
  std::vector<std::string> proper;
  for (Family f : kAllFamilies) {
    const Family g = forced_supergroup(f);
    const bool strict = g != f;
    if (strict) proper.push_back(std::string(family_token(f)));
    std::string rule = std::string(family_token(g));
    if (f == Family::SpU1) rule += "(2n)";
    else if (has_parameter(g)) rule += "(n)";
    table.push_back({{"family", std::string(family_token(f))}, {"forced", rule}, {"proper", strict}});
  }
  const bool table_ok = proper == std::vector<std::string>{"su", "spu1"};

  constexpr int kSamples = 50;
  Json rigidity = Json::array();
  bool rigid_ok = true;
  std::uint64_t k = 0;
  for (const auto& spec : {GroupSpec(Family::SpSp1, 2), GroupSpec(Family::Spin9)}) {
    const auto pack = build_structures(spec);
    const auto alg = algebra_basis(pack);
    std::mt19937_64 rng(detail::mix_seed(seed, 300 + k++));
    std::normal_distribution<double> gauss;
    double norm_dev = 0.0, probe = 0.0, fit = 0.0;
    const auto ops = pack.operator_list();
    for (int t = 0; t < kSamples; ++t) {
      const Operator a = exp_element(random_element(alg, rng));
      Vector x(spec.ambient_dim());
      for (Index i = 0; i < x.size(); ++i) x(i) = gauss(rng);
      x.normalize();
      const Operator& l = ops[static_cast<std::size_t>(t) % ops.size()];
      auto c = structure_coefficients(pack, a, x, l, 10, detail::mix_seed(seed, 400 + t));
      norm_dev = std::max(norm_dev, std::abs(c.norm() - 1.0));
      probe = std::max(probe, c.probe_residual);
      fit = std::max(fit, c.fit_residual);
    }
    const bool ok = norm_dev < 1e-8 && probe < 1e-7;
    rigid_ok = rigid_ok && ok;
    rigidity.push_back({{"group", to_json(spec)},
                        {"samples", kSamples},
                        {"max_norm_deviation", norm_dev},
                        {"max_fit_residual", fit},
                        {"max_probe_residual", probe},
                        {"pass", ok}});
  }
  pass = table_ok && rigid_ok;
  return {{"forced_supergroup", table}, {"proper_inclusions", proper}, {"rigidity", rigidity}, {"pass", pass}};
}

inline Outcome cmd_full_report(const RunConfig& cfg) {
  Outcome o;
  o.report = detail::header("full-report", cfg);
  std::ostringstream s;
  const auto line = [&](const char* name, bool ok) { s << std::left << std::setw(16) << name << (ok ? "pass" : "FAIL") << "\n"; };

  bool structures_ok = true;
  Json structs = Json::array();
  for (const auto& spec : reference_instances()) {
    StructurePack pack = build_structures(spec);
    if (cfg.inject_phi_sign_flip) detail::flip_phi_sign(pack);
    bool ok = false;
    Json j = structures_json(pack, ok);
    j.erase("operators");
    structs.push_back(j);
    structures_ok = structures_ok && ok;
  }
  Json sections;
  sections["structures"] = {{"instances", structs}, {"pass", structures_ok}};
  line("structures", structures_ok);

  bool algebras_ok = false;
  sections["algebras"] = algebras_section(cfg.seed, cfg.tol.rank_tol, algebras_ok);
  line("algebras", algebras_ok);

  bool def1_ok = false, def2_ok = false;
  sections["special_def1"] = special_section(Definition::Pointwise, cfg, def1_ok);
  line("special_def1", def1_ok);
  sections["special_def2"] = special_section(Definition::Setwise, cfg, def2_ok);
  Json differs = Json::array();
  const auto& d1 = sections["special_def1"]["instances"];
  const auto& d2 = sections["special_def2"]["instances"];
  for (std::size_t i = 0; i < d1.size(); ++i)
    if (d1[i]["minimal_dim"] != d2[i]["minimal_dim"]) differs.push_back(d1[i]["group"]["name"]);
  sections["special_def2"]["differs_from_def1"] = differs;
  line("special_def2", def2_ok);

  const auto grid = cfg.r.empty() ? default_r_grid() : cfg.r;
  bool e1_ok = false, e2_ok = false;
  std::string ignored;
  Json e1 = examples_json(1, grid, cfg.steps, cfg.tol.ode_tol, e1_ok, ignored);
  Json e2 = examples_json(2, grid, cfg.steps, cfg.tol.ode_tol, e2_ok, ignored);
  const auto gc = example1_check(Loop::great_circle(6), Vector::Unit(7, 1), Vector::Unit(7, 2),
                                 std::min(cfg.steps, 20000));
  const bool examples_ok = e1_ok && e2_ok && !gc.violated;
  sections["examples"] = {{"example1", e1},
                          {"example2", e2},
                          {"great_circle_control", {{"gap", gc.gap_numeric}, {"verdict", gc.verdict()}}},
                          {"pass", examples_ok}};
  line("examples", examples_ok);

  bool cover_ok = false, thm_ok = false;
  sections["covering"] = covering_section(cfg.seed, cover_ok);
  line("covering", cover_ok);
  sections["theorem1_table"] = theorem1_section(cfg.seed, thm_ok);
  line("theorem1_table", thm_ok);

  o.report["sections"] = sections;
  o.code = detail::worst_code({structures_ok ? kPass : kStructureFailure,
                               algebras_ok ? kPass : kStructureFailure,
                               def1_ok && def2_ok ? kPass : kSpecialMismatch,
                               examples_ok ? kPass : kCounterexampleMismatch,
                               cover_ok && thm_ok ? kPass : kCoveringFailure});
  o.report["pass"] = o.code == kPass;
  s << "full-report: " << (o.code == kPass ? "pass" : "FAIL") << " (exit " << o.code << ")\n";
  o.summary = s.str();
  return o;
}

// ---------------------------------------------------------------------------
// entry point

/// Parses `args` (without the program name), runs the subcommand, writes
/// the summary to `out` and the JSON report to --out, and returns the exit
/// code.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Numerical verification of weak holonomy classification results", "holoforge"};
  app.require_subcommand(1);
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "sampler seed");
    sub->add_option("--out", cfg.out, "write the JSON report to this path");
    sub->add_option("--tol-rank", cfg.tol.rank_tol, "relative singular value cutoff");
    sub->add_option("--tol-ode", cfg.tol.ode_tol, "transport agreement tolerance");
  };
  const auto add_group = [&](CLI::App* sub) {
    sub->add_option("--group", cfg.group, "so u su sp spu1 spsp1 g2 spin7 spin9");
    sub->add_option("--n", cfg.n, "group parameter");
  };
  CLI::App* structures = app.add_subcommand("structures", "structure tensors and their relations");
  add_group(structures);
  add_common(structures);
  structures->add_flag("--inject-phi-sign-flip", cfg.inject_phi_sign_flip, "test hook: corrupt one phi coefficient");

  CLI::App* special = app.add_subcommand("special", "minimal special subspace dimension");
  add_group(special);
  add_common(special);
  special->add_option("--definition", cfg.definition, "1 (pointwise) or 2 (setwise)");
  special->add_option("--trials", cfg.trials, "random generating subspaces per dimension");

  CLI::App* counter = app.add_subcommand("counterexample", "circle-loop counterexamples");
  add_common(counter);
  counter->add_option("--example", cfg.example, "1 (S^6) or 2 (S^7)");
  counter->add_option("--r", cfg.r, "loop radii in (0, 1)")->delimiter(',');
  counter->add_option("--steps", cfg.steps, "RK4 steps per loop");

  CLI::App* full = app.add_subcommand("full-report", "every check in one report");
  add_common(full);
  full->add_option("--r", cfg.r, "loop radii in (0, 1)")->delimiter(',');
  full->add_option("--steps", cfg.steps, "RK4 steps per loop");
  full->add_option("--trials", cfg.trials, "random generating subspaces per dimension");
  full->add_flag("--inject-phi-sign-flip", cfg.inject_phi_sign_flip, "test hook: corrupt one phi coefficient");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  Outcome o;
  try {
    detail::validate(cfg);
    if (structures->parsed()) o = cmd_structures(cfg);
    else if (special->parsed()) o = cmd_special(cfg);
    else if (counter->parsed()) o = cmd_counterexample(cfg);
    else o = cmd_full_report(cfg);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  out << o.summary;
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      err << "cannot write " << cfg.out << "\n";
      return kUsage;
    }
    f << dump_json(o.report);
  }
  return o.code;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args));
}

}  // namespace holoforge::cli

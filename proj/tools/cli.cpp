#include "cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "meddis/io.hpp"
#include "meddis/oracle.hpp"
#include "meddis/solver.hpp"
#include "meddis/stochastic.hpp"

namespace meddis::cli {
namespace {

using nlohmann::json;

json config_json(const RunConfig& c) {
  json j{{"command", c.command},
         {"instance", c.instance},
         {"rho", c.rho},
         {"delta", c.delta},
         {"epsilon", c.epsilon},
         {"max_candidates", c.max_candidates},
         {"seed", c.seed},
         {"jobs", c.jobs},
         {"oracle", c.oracle}};
  if (c.tau) j["tau"] = *c.tau;
  if (c.step) j["step"] = *c.step;
  if (c.cap1) j["cap1"] = *c.cap1;
  if (c.cap2) j["cap2"] = *c.cap2;
  if (c.command == "gen") {
    j["facilities"] = c.facilities;
    j["clients"] = c.clients;
    j["constraint"] = c.constraint;
    j["k"] = c.k;
    j["matroid"] = c.matroid;
    j["discount_scale"] = c.discount_scale;
    j["points"] = c.points;
    j["support"] = c.support;
  }
  return j;
}

void emit(const RunConfig& c, const json& doc, std::ostream& out) {
  if (c.out.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    write_json(c.out, doc);
  }
}

KnapsackOptions knapsack_options(const RunConfig& c) {
  KnapsackOptions k;
  if (c.tau) k.tau = *c.tau;
  k.rho = c.rho;
  k.delta = c.delta;
  k.epsilon = c.epsilon;
  k.cap1 = c.cap1;
  k.cap2 = c.cap2;
  k.max_candidates = c.max_candidates;
  k.jobs = c.jobs;
  return k;
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions s;
  s.tau = c.tau;
  s.h = c.step;
  s.knapsack = knapsack_options(c);
  return s;
}

void check_ranges(const RunConfig& c) {
  if (c.tau && !(*c.tau > 1.0)) throw Error("--tau must exceed 1");
  if (c.step && *c.step != 1 && *c.step != 2) throw Error("--step must be 1 or 2");
  if (!(c.rho > 0.0 && c.rho < 1.0)) throw Error("--rho must lie in (0, 1)");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw Error("--delta must lie in (0, 1)");
  if (!(c.epsilon > 0.0)) throw Error("--epsilon must be positive");
  if (c.jobs < 1) throw Error("--jobs must be at least 1");
}

Instance load_valid(const std::string& path) {
  Instance in = read_instance(path);
  const auto violations = validate(in);
  if (!violations.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& v : violations) msg += "\n  " + v.kind + ": " + v.message;
    throw SchemaError(msg);
  }
  return in;
}

// The knapsack solver is certified against its estimate grid, one (1 + eps)
// factor above the optimum.
double effective_beta(const SolveReport& r, double epsilon) {
  return r.problem == "knapmeddis" ? r.beta * (1.0 + epsilon) : r.beta;
}

int do_solve(const RunConfig& c, std::ostream& out) {
  const Instance in = load_valid(c.instance);
  const SolveReport report = solve_instance(in, solve_options(c));
  json doc = to_json(report);
  doc["version"] = MEDDIS_VERSION;
  doc["config"] = config_json(c);
  bool ok = report.all_hold();
  if (c.oracle) {
    const auto check = check_bicriteria(in, report.solution_positions, report.alpha, effective_beta(report, c.epsilon));
    doc["oracle"] = to_json(check, in);
    ok = ok && check.holds;
  }
  emit(c, doc, out);
  return ok ? kExitOk : kExitCertificate;
}

int do_verify(const RunConfig& c, std::ostream& out) {
  const Instance in = load_valid(c.instance);
  const json doc = read_json(c.report);
  const SolveReport report = report_from_json(doc);
  FacilitySet solution;
  for (const auto& id : report.solution) {
    int found = -1;
    for (int f = 0; f < in.num_facilities(); ++f)
      if (in.facility_id(f) == id) found = f;
    if (found < 0) throw SchemaError("report names unknown facility '" + id + "'");
    solution.push_back(found);
  }
  std::sort(solution.begin(), solution.end());
  const double epsilon = doc.contains("config") ? doc["config"].value("epsilon", c.epsilon) : c.epsilon;
  const auto check = check_bicriteria(in, solution, report.alpha, effective_beta(report, epsilon));
  json result = to_json(check, in);
  const bool certificates = report.all_hold();
  result["report_certificates_hold"] = certificates;
  emit(c, result, out);
  return check.holds && certificates ? kExitOk : kExitCertificate;
}

int do_stochastic(const RunConfig& c, std::ostream& out) {
  const StochasticInstance stoch = stochastic_from_json(read_json(c.instance));
  StochasticOptions opt;
  opt.tau = c.tau;
  opt.epsilon = c.epsilon;
  opt.knapsack = knapsack_options(c);
  opt.seed = c.seed;
  const StochasticReport report = solve_stochastic_center(stoch, opt);
  json doc = to_json(report);
  doc["version"] = MEDDIS_VERSION;
  doc["config"] = config_json(c);
  bool ok = report.all_hold();
  if (c.oracle) {
    const OracleResult best = brute_stochastic_opt(stoch);
    std::vector<std::string> ids;
    for (int f : best.optimum) ids.push_back(stoch.base.facility_id(f));
    const double rhs = report.guarantee * best.value;
    const bool holds = report.expected_max <= rhs + 1e-6;
    doc["oracle"] = {{"opt", best.value}, {"optSet", ids}, {"lhs", report.expected_max}, {"rhs", rhs}, {"holds", holds}};
    ok = ok && holds;
  }
  emit(c, doc, out);
  return ok ? kExitOk : kExitCertificate;
}

ConstraintKind parse_kind(const std::string& s) {
  if (s == "cardinality") return ConstraintKind::kCardinality;
  if (s == "matroid") return ConstraintKind::kMatroid;
  if (s == "knapsack") return ConstraintKind::kKnapsack;
  throw Error("unknown constraint kind '" + s + "'");
}

int do_gen(const RunConfig& c, std::ostream& out) {
  GenerateParams p;
  p.num_facilities = c.facilities;
  p.num_clients = c.clients;
  p.kind = parse_kind(c.constraint);
  p.k = c.k;
  p.matroid_type = c.matroid;
  p.discount_scale = c.discount_scale;
  p.seed = c.seed;
  if (p.num_facilities < 1 || p.num_clients < 1) throw Error("gen needs at least one facility and one client");
  if (c.points > 0) {
    emit(c, to_json(generate_stochastic({p, c.points, c.support})), out);
  } else {
    emit(c, to_json(generate(p)), out);
  }
  return kExitOk;
}

void add_solver_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--tau", c.tau, "Discretization base (> 1)");
  app->add_option("--step", c.step, "Level gap h for overlapping clients (1 or 2)");
  app->add_option("--rho", c.rho, "Knapsack sparsity parameter in (0, 1)");
  app->add_option("--delta", c.delta, "Knapsack ball-radius parameter in (0, 1)");
  app->add_option("--epsilon", c.epsilon, "Estimate grid / sweep step");
  app->add_option("--cap1", c.cap1, "Pre-selected facilities beyond the removal balls");
  app->add_option("--cap2", c.cap2, "Removal balls per extended instance");
  app->add_option("--max-candidates", c.max_candidates, "Refuse enumerations projected above this count");
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--jobs", c.jobs, "Worker threads");
  app->add_option("--out", c.out, "Output file (stdout when omitted)");
  app->add_flag("--oracle", c.oracle, "Compare against the brute-force optimum");
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    check_ranges(c);
    if (c.command == "solve") return do_solve(c, out);
    if (c.command == "verify") return do_verify(c, out);
    if (c.command == "stochastic") return do_stochastic(c, out);
    if (c.command == "gen") return do_gen(c, out);
    err << "error: unknown command '" << c.command << "'\n";
  } catch (const GuardExceeded& e) {
    err << "guard exceeded: " << e.what() << '\n';
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    err << "malformed input: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInput;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Median clustering with per-client discounts"};
  app.set_version_flag("--version", std::string(MEDDIS_VERSION));
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Solve an instance and write a report");
  solve->add_option("instance", c.instance, "Instance JSON")->required();
  add_solver_flags(solve, c);

  auto* verify = app.add_subcommand("verify", "Check a report against the brute-force optimum");
  verify->add_option("instance", c.instance, "Instance JSON")->required();
  verify->add_option("report", c.report, "Report JSON")->required();
  verify->add_option("--epsilon", c.epsilon, "Estimate grid used by knapsack reports without a config");
  verify->add_option("--out", c.out, "Output file (stdout when omitted)");

  auto* stochastic = app.add_subcommand("stochastic", "Solve a stochastic center instance");
  stochastic->add_option("instance", c.instance, "Stochastic instance JSON")->required();
  add_solver_flags(stochastic, c);

  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--facilities", c.facilities, "Number of facilities");
  gen->add_option("--clients", c.clients, "Number of clients");
  gen->add_option("--constraint", c.constraint, "cardinality | matroid | knapsack");
  gen->add_option("-k", c.k, "Cardinality bound or matroid size parameter");
  gen->add_option("--matroid", c.matroid, "uniform | partition | explicit");
  gen->add_option("--discount-scale", c.discount_scale, "Discounts drawn from [0, scale * median distance]");
  gen->add_option("--points", c.points, "Stochastic points (0 for a plain instance)");
  gen->add_option("--support", c.support, "Locations per stochastic point");
  gen->add_option("--seed", c.seed, "Random seed");
  gen->add_option("--out", c.out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitInput;
  }
  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
  return run(c, out, err);
}

}  // namespace meddis::cli

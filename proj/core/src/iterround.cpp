#include "meddis/iterround.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <variant>

namespace meddis {
namespace {

bool overlap(const std::vector<int>& a, const std::vector<int>& b) {
  auto i = a.begin();
  auto k = b.begin();
  while (i != a.end() && k != b.end()) {
    if (*i == *k) return true;
    if (*i < *k) ++i;
    else ++k;
  }
  return false;
}

double mass_of(const std::vector<int>& set, const std::vector<double>& y) {
  double s = 0.0;
  for (int c : set) s += y[c];
  return s;
}

void add_copy_family_rows(LinearProgram& lp, const Instance& in, const std::vector<FacilityCopy>& copies) {
  const int n = in.num_facilities();
  std::vector<std::vector<int>> group(n);
  for (std::size_t c = 0; c < copies.size(); ++c) group[copies[c].original].push_back(static_cast<int>(c));
  auto row_over = [&](const FacilitySet& originals) {
    std::vector<std::pair<int, double>> terms;
    for (int f : originals)
      for (int c : group[f]) terms.emplace_back(c, 1.0);
    return terms;
  };

  if (const auto* card = std::get_if<Cardinality>(&in.constraint)) {
    std::vector<std::pair<int, double>> terms;
    for (std::size_t c = 0; c < copies.size(); ++c) terms.emplace_back(static_cast<int>(c), 1.0);
    lp.add_constraint(std::move(terms), Relation::kLessEqual, card->k);
  } else if (const auto* mat = std::get_if<Matroid>(&in.constraint)) {
    for (int f = 0; f < n; ++f) {
      if (group[f].size() < 2) continue;
      const int single[] = {f};
      lp.add_constraint(row_over({f}), Relation::kLessEqual, matroid_rank(mat->spec, n, single));
    }
    for (const auto& rc : rank_constraints(mat->spec, n)) {
      auto terms = row_over(rc.set);
      if (static_cast<int>(terms.size()) > rc.rank) lp.add_constraint(std::move(terms), Relation::kLessEqual, rc.rank);
    }
  } else {
    const auto& knap = std::get<Knapsack>(in.constraint);
    std::vector<std::pair<int, double>> terms;
    for (std::size_t c = 0; c < copies.size(); ++c) {
      const double w = in.facility_weights[copies[c].original];
      if (w != 0.0) terms.emplace_back(static_cast<int>(c), w);
    }
    lp.add_constraint(std::move(terms), Relation::kLessEqual, knap.budget);
  }
}

double relative_increase(double before, double after) {
  return (after - before) / std::max(1.0, std::abs(before));
}

}  // namespace

RoundingFactors rounding_factors(double tau, int h) {
  if (!(tau > 1.0)) throw Error("tau must exceed 1");
  if (h != 1 && h != 2) throw Error("step size must be 1 or 2");
  const double th = std::pow(tau, h);
  RoundingFactors f;
  f.radius_coefficient = (3.0 * th - 1.0) / (th - 1.0);
  f.alpha = tau * f.radius_coefficient;
  f.beta = f.radius_coefficient * (tau - 1.0) / std::log(tau);
  return f;
}

int RoundState::pair_level(int e, int copy) const {
  const RoundClient& rc = clients[e];
  if (rc.is_virtual()) return -1;
  return levels.level_of(instance->fc(copies[copy].original, rc.client));
}

std::vector<int> RoundState::inner_ball(int e) const {
  std::vector<int> out;
  for (int c : clients[e].outer)
    if (pair_level(e, c) <= clients[e].level - 1) out.push_back(c);
  return out;
}

RoundState make_round_state(const BallSystem& balls, const Instance& instance, const DiscretizedMetric& levels,
                            int h, const std::vector<std::vector<int>>& virtual_groups) {
  RoundState state;
  state.instance = &instance;
  state.levels = levels;
  state.copies = balls.copies;
  state.h = h;
  for (int b = 0; b < balls.num_balls(); ++b) {
    RoundClient rc;
    rc.client = balls.clients[b];
    rc.label = instance.client_id(rc.client);
    rc.weight = instance.client_weights[rc.client];
    rc.discount = instance.discounts[rc.client];
    rc.outer = balls.outer[b];
    rc.in_c0 = true;
    if (rc.outer.empty()) throw Error("client " + rc.label + " has an empty outer ball");
    state.clients.push_back(std::move(rc));
    const int e = static_cast<int>(state.clients.size()) - 1;
    int level = -1;
    for (int c : state.clients[e].outer) level = std::max(level, state.pair_level(e, c));
    state.clients[e].level = level;
    state.clients[e].inner = state.inner_ball(e);
  }
  for (const auto& group : virtual_groups) {
    RoundClient rc;
    rc.label = "virtual:" + instance.facility_id(balls.copies.at(group.at(0)).original);
    rc.outer = group;
    std::sort(rc.outer.begin(), rc.outer.end());
    rc.level = -1;
    rc.in_cstar = true;
    state.clients.push_back(std::move(rc));
  }
  return state;
}

LinearProgram build_aux_lp(const RoundState& state) {
  LinearProgram lp;
  for (std::size_t c = 0; c < state.copies.size(); ++c) lp.add_variable(0.0, 1.0);
  const double tau = state.levels.tau();
  auto ball_row = [](const std::vector<int>& set) {
    std::vector<std::pair<int, double>> terms;
    for (int c : set) terms.emplace_back(c, 1.0);
    return terms;
  };
  for (int e = 0; e < static_cast<int>(state.clients.size()); ++e) {
    const RoundClient& rc = state.clients[e];
    const double tr = tau * rc.discount;
    if (rc.in_c0) {
      for (int c : rc.outer) lp.objective[c] += rc.weight * positive_part(state.pair_rounded(e, c) - tr);
      lp.add_constraint(ball_row(rc.outer), Relation::kEqual, 1.0);
    } else {
      const double top = rc.weight * positive_part(state.levels.level_value(rc.level) - tr);
      lp.objective_offset += top;
      for (int c : rc.inner) lp.objective[c] += rc.weight * positive_part(state.pair_rounded(e, c) - tr) - top;
      if (!rc.inner.empty()) lp.add_constraint(ball_row(rc.inner), Relation::kLessEqual, 1.0);
    }
    if (rc.in_cstar) lp.add_constraint(ball_row(rc.outer), Relation::kEqual, 1.0);
  }
  add_copy_family_rows(lp, *state.instance, state.copies);
  return lp;
}

double aux_contribution(const RoundState& state, int e, const std::vector<double>& y) {
  const RoundClient& rc = state.clients[e];
  const double tr = state.levels.tau() * rc.discount;
  double total = 0.0;
  if (rc.in_c0) {
    for (int c : rc.outer) total += y[c] * positive_part(state.pair_rounded(e, c) - tr);
  } else {
    for (int c : rc.inner) total += y[c] * positive_part(state.pair_rounded(e, c) - tr);
    total += (1.0 - mass_of(rc.inner, y)) * positive_part(state.levels.level_value(rc.level) - tr);
  }
  return rc.weight * total;
}

bool update_cstar(RoundState& state, int e) {
  RoundClient& self = state.clients[e];
  for (int k = 0; k < static_cast<int>(state.clients.size()); ++k) {
    const RoundClient& other = state.clients[k];
    if (k == e || !other.in_cstar) continue;
    if (other.level <= self.level && overlap(self.outer, other.outer)) return false;
  }
  self.in_cstar = true;
  for (int k = 0; k < static_cast<int>(state.clients.size()); ++k) {
    RoundClient& other = state.clients[k];
    if (k == e || !other.in_cstar) continue;
    if (other.level >= self.level + state.h && overlap(self.outer, other.outer)) other.in_cstar = false;
  }
  return true;
}

int cstar_violations(const RoundState& state) {
  int bad = 0;
  const auto& cl = state.clients;
  for (std::size_t a = 0; a < cl.size(); ++a) {
    if (!cl[a].in_cstar) continue;
    for (std::size_t b = a + 1; b < cl.size(); ++b) {
      if (!cl[b].in_cstar) continue;
      if (std::abs(cl[a].level - cl[b].level) >= state.h && overlap(cl[a].outer, cl[b].outer)) ++bad;
    }
  }
  return bad;
}

std::string dump_state(const RoundState& state, const std::vector<double>& y) {
  std::ostringstream os;
  os << "tau=" << state.levels.tau() << " b=" << state.levels.offset() << " h=" << state.h << '\n';
  for (const auto& rc : state.clients) {
    os << "  " << rc.label << (rc.in_c0 ? " C0" : " C1") << (rc.in_cstar ? " C*" : "") << " level=" << rc.level
       << " |F|=" << rc.outer.size() << " y(F)=" << (y.empty() ? 0.0 : mass_of(rc.outer, y))
       << " |B|=" << rc.inner.size() << " y(B)=" << (y.empty() ? 0.0 : mass_of(rc.inner, y)) << '\n';
  }
  for (std::size_t c = 0; c < y.size(); ++c)
    if (y[c] > kIntegralityTolerance && y[c] < 1.0 - kIntegralityTolerance)
      os << "  fractional copy " << state.instance->facility_id(state.copies[c].original) << '#'
         << state.copies[c].copy_index << " = " << y[c] << '\n';
  return os.str();
}

IterRoundResult iter_round(RoundState& state, bool require_integral) {
  IterRoundResult res;
  std::size_t limit = state.clients.size() + 1;
  for (const auto& rc : state.clients) limit += static_cast<std::size_t>(rc.level + 2);

  for (std::size_t iteration = 0;; ++iteration) {
    if (iteration > limit) throw Error("iterative rounding exceeded its iteration bound\n" + dump_state(state, res.y));
    state.current_lp = build_aux_lp(state);
    LpResult lp = solve(state.current_lp);
    if (!lp.optimal())
      throw Error(std::string("auxiliary LP is ") + to_string(lp.status) + "\n" + dump_state(state, res.y));
    state.current_vertex = lp.solution;
    res.y = lp.solution.values;
    const double objective = lp.solution.objective_value;
    res.objectives.push_back(objective);

    int pick = -1;
    std::string action;
    for (int e = 0; e < static_cast<int>(state.clients.size()); ++e)
      if (state.clients[e].in_c0) {
        pick = e;
        action = "activate";
        break;
      }
    if (pick < 0)
      for (int e = 0; e < static_cast<int>(state.clients.size()); ++e) {
        const RoundClient& rc = state.clients[e];
        if (!rc.inner.empty() && mass_of(rc.inner, res.y) >= 1.0 - kIntegralityTolerance) {
          pick = e;
          action = "shrink";
          break;
        }
      }
    if (pick < 0) {
      res.trace.push_back({"stop", "", objective, true, 0.0});
      break;
    }

    const double before = aux_contribution(state, pick, res.y);
    RoundClient& rc = state.clients[pick];
    if (action == "activate") {
      rc.in_c0 = false;
      rc.inner = state.inner_ball(pick);
    } else {
      rc.level -= 1;
      rc.outer = rc.inner;
      rc.inner = state.inner_ball(pick);
    }
    update_cstar(state, pick);
    const double after = aux_contribution(state, pick, res.y);
    const double change = std::abs(after - before) / std::max(1.0, std::abs(before));
    const int violations = cstar_violations(state);
    res.max_contribution_change = std::max(res.max_contribution_change, change);
    res.max_cstar_violations = std::max(res.max_cstar_violations, violations);
    res.trace.push_back({action, state.clients[pick].label, objective, violations == 0, change});
  }

  for (double& v : res.y) {
    if (v < kIntegralityTolerance) v = 0.0;
    else if (v > 1.0 - kIntegralityTolerance) v = 1.0;
  }
  if (require_integral)
    for (double v : res.y)
      if (v != 0.0 && v != 1.0)
        throw Error("iterative rounding returned a fractional vertex\n" + dump_state(state, res.y));
  return res;
}

double nearest_open_distance_bound(const RoundState& state, int e) {
  const int level = state.clients[e].level;
  const double d = state.levels.level_value(level);
  if (level < 0) return 0.0;
  return rounding_factors(state.levels.tau(), state.h).radius_coefficient * d;
}

FacilitySet opened_facilities(const RoundState& state, const std::vector<double>& y) {
  FacilitySet out;
  for (std::size_t c = 0; c < y.size(); ++c)
    if (y[c] >= 1.0 - kIntegralityTolerance) out.push_back(state.copies[c].original);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

void require_valid(const Instance& in) {
  const auto violations = validate(in);
  if (!violations.empty()) throw Error("invalid instance: " + violations.front().message);
  if (in.num_clients() == 0) throw Error("instance has no clients");
}

SolveReport solve_by_rounding(const Instance& input, double tau, int h, const char* problem) {
  const Instance in = normalize(input);
  require_valid(in);
  const RoundingFactors factors = rounding_factors(tau, h);

  const NaturalLp nlp = build_natural_lp(in);
  const LpResult relaxed = solve(nlp.lp);
  if (!relaxed.optimal()) throw Error(std::string("natural relaxation is ") + to_string(relaxed.status));
  FractionalSolution sol = read_solution(nlp, in, relaxed.solution);
  const double lp_opt = relaxed.solution.objective_value;
  sol = make_distance_optimal(sol, in);
  const BallSystem balls = duplicate_facilities(sol, in);

  std::vector<OffsetInput> inputs;
  for (int b = 0; b < balls.num_balls(); ++b) {
    const int j = balls.clients[b];
    for (int c : balls.outer[b])
      inputs.push_back({in.fc(balls.copies[c].original, j), in.discounts[j], balls.y[c] * in.client_weights[j]});
  }
  const OffsetChoice offset = choose_offset(inputs, tau);

  RoundState state = make_round_state(balls, in, DiscretizedMetric(tau, offset.b), h);
  const IterRoundResult res = iter_round(state, true);
  const FacilitySet open = opened_facilities(state, res.y);
  if (open.empty()) throw Error("iterative rounding opened no facility\n" + dump_state(state, res.y));

  SolveReport report;
  report.problem = problem;
  report.tau = tau;
  report.b = offset.b;
  report.h = h;
  report.alpha = factors.alpha;
  report.beta = factors.beta;
  report.solution_positions = open;
  for (int f : open) report.solution.push_back(in.facility_id(f));
  report.objective = discounted_cost(in, open, 1.0) / in.scale;
  report.lp_objective = lp_opt / in.scale;
  report.iterations = res.trace;

  const double s = in.scale;
  double decay = 0.0;
  double distance_slack = -1e300;
  double inner_mass = 0.0;
  for (int e = 0; e < static_cast<int>(state.clients.size()); ++e) {
    const RoundClient& rc = state.clients[e];
    report.final_levels[rc.label] = rc.level;
    decay += rc.weight * positive_part(state.levels.level_value(rc.level) - tau * rc.discount);
    const double reach = connection_distance(in, rc.client, open);
    distance_slack = std::max(distance_slack, reach - nearest_open_distance_bound(state, e));
    inner_mass = std::max(inner_mass, mass_of(rc.inner, res.y));
  }
  double monotone = 0.0;
  for (std::size_t t = 1; t < res.objectives.size(); ++t)
    monotone = std::max(monotone, relative_increase(res.objectives[t - 1], res.objectives[t]));

  auto& certs = report.certificates;
  certs.push_back(certify("offset_bound", offset.objective / s, (tau - 1.0) / std::log(tau) * lp_opt / s));
  certs.push_back(certify("objective_monotone", monotone, 0.0, kFeasibilityTolerance));
  certs.push_back(certify("contribution_preserved", res.max_contribution_change, 0.0, kFeasibilityTolerance));
  certs.push_back(certify("cstar_discipline", res.max_cstar_violations, 0.0, 0.0));
  certs.push_back(certify("final_inner_empty", inner_mass, 0.0, kIntegralityTolerance));
  certs.push_back(certify("aux_decay", decay / s, offset.objective / s));
  certs.push_back(certify("distance_bound", distance_slack / s, 0.0));
  if (const auto* card = std::get_if<Cardinality>(&in.constraint)) {
    certs.push_back(certify("feasible", static_cast<double>(open.size()), card->k, 0.0));
  } else if (const auto* mat = std::get_if<Matroid>(&in.constraint)) {
    const int rank = matroid_rank(mat->spec, in.num_facilities(), open);
    if (rank != static_cast<int>(open.size()))
      throw Error("rounded solution is not independent in the matroid\n" + dump_state(state, res.y));
    certs.push_back(certify("feasible", static_cast<double>(open.size()) - rank, 0.0, 0.0));
  }
  certs.push_back(certify("bicriteria_lp", discounted_cost(in, open, factors.alpha) / s, factors.beta * lp_opt / s));
  return report;
}

}  // namespace

SolveReport solve_kmeddis(const Instance& instance, double tau, int h) {
  if (!std::holds_alternative<Cardinality>(instance.constraint))
    throw Error("solve_kmeddis requires a cardinality constraint");
  return solve_by_rounding(instance, tau, h, "kmeddis");
}

SolveReport solve_matmeddis(const Instance& instance, double tau, int h) {
  if (!std::holds_alternative<Matroid>(instance.constraint)) throw Error("solve_matmeddis requires a matroid constraint");
  return solve_by_rounding(instance, tau, h, "matmeddis");
}

}  // namespace meddis

#include "meddis/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <variant>

namespace meddis {
namespace {

constexpr double kMergeTolerance = 1e-9;

double term(const Instance& in, int f, int j) {
  return in.client_weights[j] * positive_part(in.fc(f, j) - in.discounts[j]);
}

void add_family_rows(LinearProgram& lp, const Instance& in, const std::vector<int>& y_var) {
  const int n = in.num_facilities();
  auto sum_row = [&](const FacilitySet& set) {
    std::vector<std::pair<int, double>> terms;
    for (int f : set) terms.emplace_back(y_var[f], 1.0);
    return terms;
  };
  if (const auto* c = std::get_if<Cardinality>(&in.constraint)) {
    FacilitySet all(n);
    std::iota(all.begin(), all.end(), 0);
    lp.add_constraint(sum_row(all), Relation::kLessEqual, c->k);
  } else if (const auto* m = std::get_if<Matroid>(&in.constraint)) {
    for (const auto& rc : rank_constraints(m->spec, n))
      if (rc.rank < static_cast<int>(rc.set.size()))
        lp.add_constraint(sum_row(rc.set), Relation::kLessEqual, rc.rank);
  } else {
    const auto& k = std::get<Knapsack>(in.constraint);
    std::vector<std::pair<int, double>> terms;
    for (int f = 0; f < n; ++f)
      if (in.facility_weights[f] != 0.0) terms.emplace_back(y_var[f], in.facility_weights[f]);
    lp.add_constraint(std::move(terms), Relation::kLessEqual, k.budget);
  }
}

}  // namespace

NaturalLp build_natural_lp(const Instance& instance) {
  const int nf = instance.num_facilities();
  const int nc = instance.num_clients();
  NaturalLp out;
  out.num_clients = nc;
  out.clients.resize(nc);
  std::iota(out.clients.begin(), out.clients.end(), 0);
  for (int f = 0; f < nf; ++f) out.y_var.push_back(out.lp.add_variable(0.0, 1.0));
  out.x_var.assign(static_cast<std::size_t>(nf) * nc, -1);
  for (int f = 0; f < nf; ++f)
    for (int j = 0; j < nc; ++j)
      out.x_var[static_cast<std::size_t>(f) * nc + j] = out.lp.add_variable(0.0, 1.0, term(instance, f, j));

  for (int j = 0; j < nc; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (int f = 0; f < nf; ++f) terms.emplace_back(out.x_var[static_cast<std::size_t>(f) * nc + j], 1.0);
    out.lp.add_constraint(std::move(terms), Relation::kEqual, 1.0);
  }
  add_family_rows(out.lp, instance, out.y_var);
  for (int f = 0; f < nf; ++f)
    for (int j = 0; j < nc; ++j)
      out.lp.add_constraint({{out.x_var[static_cast<std::size_t>(f) * nc + j], 1.0}, {out.y_var[f], -1.0}},
                            Relation::kLessEqual, 0.0);
  return out;
}

NaturalLp build_knapsack_lp(const ExtendedInstance& ext) {
  if (ext.base == nullptr) throw Error("extended instance has no base instance");
  if (!ext.has_radii()) throw Error("extended instance radii are not computed");
  const Instance& in = *ext.base;
  const auto* knap = std::get_if<Knapsack>(&in.constraint);
  if (knap == nullptr) throw Error("the strengthened relaxation requires a knapsack instance");
  const int nf = in.num_facilities();
  const int nc = in.num_clients();
  const double cap = ext.rho * ext.est;

  std::vector<bool> preselected(nf, false);
  for (int f : ext.f0) preselected[f] = true;

  NaturalLp out;
  out.num_clients = nc;
  out.clients = ext.cprime;
  for (int f = 0; f < nf; ++f) {
    const double lo = preselected[f] ? 1.0 : 0.0;
    out.y_var.push_back(out.lp.add_variable(lo, 1.0));
  }
  out.x_var.assign(static_cast<std::size_t>(nf) * nc, -1);
  for (int f = 0; f < nf; ++f)
    for (int j : ext.cprime) {
      if (in.fc(f, j) > ext.radius[j]) continue;
      if (!preselected[f] && term(in, f, j) > cap) continue;
      out.x_var[static_cast<std::size_t>(f) * nc + j] = out.lp.add_variable(0.0, 1.0, term(in, f, j));
    }

  for (int j : ext.cprime) {
    std::vector<std::pair<int, double>> terms;
    for (int f = 0; f < nf; ++f) {
      const int v = out.x_var[static_cast<std::size_t>(f) * nc + j];
      if (v >= 0) terms.emplace_back(v, 1.0);
    }
    out.lp.add_constraint(std::move(terms), Relation::kEqual, 1.0);
  }
  {
    std::vector<std::pair<int, double>> terms;
    for (int f = 0; f < nf; ++f)
      if (in.facility_weights[f] != 0.0) terms.emplace_back(out.y_var[f], in.facility_weights[f]);
    out.lp.add_constraint(std::move(terms), Relation::kLessEqual, knap->budget);
  }
  for (int f = 0; f < nf; ++f)
    for (int j : ext.cprime) {
      const int v = out.x_var[static_cast<std::size_t>(f) * nc + j];
      if (v >= 0) out.lp.add_constraint({{v, 1.0}, {out.y_var[f], -1.0}}, Relation::kLessEqual, 0.0);
    }
  for (int f = 0; f < nf; ++f) {
    if (preselected[f]) continue;
    std::vector<std::pair<int, double>> terms;
    for (int j : ext.cprime) {
      const int v = out.x_var[static_cast<std::size_t>(f) * nc + j];
      if (v >= 0 && term(in, f, j) > 0.0) terms.emplace_back(v, term(in, f, j));
    }
    if (terms.empty()) continue;
    terms.emplace_back(out.y_var[f], -cap);
    out.lp.add_constraint(std::move(terms), Relation::kLessEqual, 0.0);
  }
  return out;
}

FractionalSolution read_solution(const NaturalLp& nlp, const Instance& instance, const BasicOptimal& point) {
  FractionalSolution sol;
  sol.num_facilities = instance.num_facilities();
  sol.num_clients = instance.num_clients();
  sol.clients = nlp.clients;
  sol.objective_value = point.objective_value;
  auto snap = [](double v) { return v <= kSupportTolerance ? 0.0 : std::min(v, 1.0); };
  for (int v : nlp.y_var) sol.y.push_back(snap(point.values[v]));
  sol.x.assign(nlp.x_var.size(), 0.0);
  for (std::size_t k = 0; k < nlp.x_var.size(); ++k)
    if (nlp.x_var[k] >= 0) sol.x[k] = snap(point.values[nlp.x_var[k]]);
  return sol;
}

double fractional_objective(const Instance& instance, const FractionalSolution& sol) {
  double total = 0.0;
  for (int j : sol.clients)
    for (int f = 0; f < sol.num_facilities; ++f) total += sol.xv(f, j) * term(instance, f, j);
  return total;
}

double fractional_violation(const Instance& instance, const FractionalSolution& sol) {
  double worst = 0.0;
  auto note = [&](double v) { worst = std::max(worst, v); };
  for (int j : sol.clients) {
    double s = 0.0;
    for (int f = 0; f < sol.num_facilities; ++f) {
      const double x = sol.xv(f, j);
      s += x;
      note(-x);
      note(x - sol.y[f]);
    }
    note(std::abs(s - 1.0));
  }
  for (double y : sol.y) {
    note(-y);
    note(y - 1.0);
  }
  auto sum = [&](const FacilitySet& set) {
    double s = 0.0;
    for (int f : set) s += sol.y[f];
    return s;
  };
  if (const auto* c = std::get_if<Cardinality>(&instance.constraint)) {
    note(std::accumulate(sol.y.begin(), sol.y.end(), 0.0) - c->k);
  } else if (const auto* m = std::get_if<Matroid>(&instance.constraint)) {
    for (const auto& rc : rank_constraints(m->spec, sol.num_facilities)) note(sum(rc.set) - rc.rank);
  } else {
    double w = 0.0;
    for (int f = 0; f < sol.num_facilities; ++f) w += instance.facility_weights[f] * sol.y[f];
    note(w - std::get<Knapsack>(instance.constraint).budget);
  }
  return worst;
}

FractionalSolution make_distance_optimal(const FractionalSolution& sol, const Instance& instance) {
  FractionalSolution out = sol;
  const int nf = sol.num_facilities;
  std::vector<int> order(nf);
  for (int j : sol.clients) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return instance.fc(a, j) < instance.fc(b, j); });
    double remaining = 1.0;
    std::size_t g = 0;
    while (g < order.size()) {
      std::size_t end = g;
      const double d = instance.fc(order[g], j);
      double group_y = 0.0;
      double group_x = 0.0;
      while (end < order.size() && instance.fc(order[end], j) == d) {
        group_y += sol.y[order[end]];
        group_x += sol.xv(order[end], j);
        ++end;
      }
      if (remaining <= 0.0) {
        for (std::size_t k = g; k < end; ++k) out.xv(order[k], j) = 0.0;
      } else if (group_y <= remaining) {
        for (std::size_t k = g; k < end; ++k) out.xv(order[k], j) = sol.y[order[k]];
        remaining -= group_y;
      } else if (group_x >= remaining) {
        const double factor = remaining / group_x;
        for (std::size_t k = g; k < end; ++k) out.xv(order[k], j) = sol.xv(order[k], j) * factor;
        remaining = 0.0;
      } else {
        double extra = remaining - group_x;
        for (std::size_t k = g; k < end; ++k) {
          const int f = order[k];
          const double add = std::min(sol.y[f] - sol.xv(f, j), extra);
          out.xv(f, j) = sol.xv(f, j) + add;
          extra -= add;
        }
        remaining = 0.0;
      }
      g = end;
    }
  }
  out.objective_value = fractional_objective(instance, out);
  return out;
}

double BallSystem::mass(const std::vector<int>& set) const {
  double s = 0.0;
  for (int c : set) s += y[c];
  return s;
}

BallSystem duplicate_facilities(const FractionalSolution& sol, const Instance&) {
  BallSystem balls;
  balls.clients = sol.clients;
  std::vector<int> slot(sol.num_clients, -1);
  for (std::size_t b = 0; b < sol.clients.size(); ++b) slot[sol.clients[b]] = static_cast<int>(b);
  balls.outer.assign(sol.clients.size(), {});

  for (int f = 0; f < sol.num_facilities; ++f) {
    std::vector<double> cuts;
    for (int j : sol.clients)
      if (sol.xv(f, j) > kSupportTolerance) cuts.push_back(sol.xv(f, j));
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> distinct;
    for (double v : cuts)
      if (distinct.empty() || v - distinct.back() > kMergeTolerance) distinct.push_back(v);

    const int first = balls.num_copies();
    double prev = 0.0;
    for (std::size_t k = 0; k < distinct.size(); ++k) {
      balls.copies.push_back({f, static_cast<int>(k)});
      balls.y.push_back(distinct[k] - prev);
      prev = distinct[k];
    }
    if (sol.y[f] - prev > kMergeTolerance) {
      balls.copies.push_back({f, static_cast<int>(distinct.size())});
      balls.y.push_back(sol.y[f] - prev);
    }
    for (int j : sol.clients) {
      const double x = sol.xv(f, j);
      if (x <= kSupportTolerance) continue;
      // Number of cuts at or below x, allowing for the merge tolerance.
      const auto upto = std::upper_bound(distinct.begin(), distinct.end(), x + kMergeTolerance) - distinct.begin();
      for (int k = 0; k < upto; ++k) balls.outer[slot[j]].push_back(first + k);
    }
  }
  for (auto& ball : balls.outer) std::sort(ball.begin(), ball.end());
  return balls;
}

BallSystem duplicate_star_balanced(const FractionalSolution& sol, const Instance& instance) {
  BallSystem balls;
  balls.clients = sol.clients;
  std::vector<int> slot(sol.num_clients, -1);
  for (std::size_t b = 0; b < sol.clients.size(); ++b) slot[sol.clients[b]] = static_cast<int>(b);
  balls.outer.assign(sol.clients.size(), {});

  struct Copy {
    double y;
    std::vector<int> members;  // clients whose ball holds this copy
    double star = 0.0;
  };
  for (int f = 0; f < sol.num_facilities; ++f) {
    if (sol.y[f] <= kSupportTolerance) continue;
    std::vector<int> served;
    for (int j : sol.clients)
      if (sol.xv(f, j) > kSupportTolerance) served.push_back(j);

    std::vector<Copy> copies{{sol.y[f], served, 0.0}};
    for (int j : served) copies[0].star += term(instance, f, j);

    for (int j : served) {
      std::vector<int> order(copies.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return copies[a].star < copies[b].star; });
      const double need = sol.xv(f, j);
      double taken = 0.0;
      std::vector<int> chosen;
      for (int c : order) {
        if (taken >= need - kMergeTolerance) break;
        const double room = need - taken;
        if (copies[c].y > room + kMergeTolerance) {
          Copy rest{copies[c].y - room, copies[c].members, copies[c].star};
          copies[c].y = room;
          copies.push_back(std::move(rest));
        }
        taken += copies[c].y;
        chosen.push_back(c);
      }
      const double t = term(instance, f, j);
      for (auto& c : copies) {
        auto it = std::find(c.members.begin(), c.members.end(), j);
        if (it != c.members.end()) {
          c.members.erase(it);
          c.star -= t;
        }
      }
      for (int c : chosen) {
        copies[c].members.push_back(j);
        copies[c].star += t;
      }
    }

    for (std::size_t k = 0; k < copies.size(); ++k) {
      const int id = balls.num_copies();
      balls.copies.push_back({f, static_cast<int>(k)});
      balls.y.push_back(copies[k].y);
      for (int j : copies[k].members) balls.outer[slot[j]].push_back(id);
    }
  }
  for (auto& ball : balls.outer) std::sort(ball.begin(), ball.end());
  return balls;
}

std::vector<double> copy_star_costs(const BallSystem& balls, const Instance& instance) {
  std::vector<double> star(balls.copies.size(), 0.0);
  for (int b = 0; b < balls.num_balls(); ++b)
    for (int c : balls.outer[b]) star[c] += term(instance, balls.copies[c].original, balls.clients[b]);
  return star;
}

std::vector<double> star_costs(const Instance& instance, const FractionalSolution& sol) {
  std::vector<double> star(sol.num_facilities, 0.0);
  for (int f = 0; f < sol.num_facilities; ++f)
    for (int j : sol.clients) star[f] += sol.xv(f, j) * term(instance, f, j);
  return star;
}

}  // namespace meddis

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace meddis::testing {

std::optional<double> vertex_enumeration_optimum(const LinearProgram& lp, double tol) {
  const int n = lp.num_vars;
  // Candidate hyperplanes a.x = b: rows first, then lower and upper bounds.
  std::vector<Eigen::VectorXd> normals;
  std::vector<double> rhs;
  for (const auto& row : lp.constraints) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const auto& [v, c] : row.terms) a[v] += c;
    normals.push_back(a);
    rhs.push_back(row.rhs);
  }
  for (int v = 0; v < n; ++v) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, v);
    normals.push_back(e);
    rhs.push_back(lp.lower[v]);
    normals.push_back(e);
    rhs.push_back(lp.upper[v]);
  }
  const int m = static_cast<int>(normals.size());
  auto feasible = [&](const Eigen::VectorXd& x) {
    for (int v = 0; v < n; ++v)
      if (x[v] < lp.lower[v] - tol || x[v] > lp.upper[v] + tol) return false;
    for (const auto& row : lp.constraints) {
      double act = 0.0;
      for (const auto& [v, c] : row.terms) act += c * x[v];
      if (row.relation == Relation::kLessEqual && act > row.rhs + tol) return false;
      if (row.relation == Relation::kGreaterEqual && act < row.rhs - tol) return false;
      if (row.relation == Relation::kEqual && std::abs(act - row.rhs) > tol) return false;
    }
    return true;
  };

  std::optional<double> best;
  std::vector<int> pick(n);
  std::function<void(int, int)> choose = [&](int depth, int from) {
    if (depth == n) {
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd b(n);
      for (int r = 0; r < n; ++r) {
        a.row(r) = normals[pick[r]].transpose();
        b[r] = rhs[pick[r]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(b);
      if (!feasible(x)) return;
      double obj = lp.objective_offset;
      for (int v = 0; v < n; ++v) obj += lp.objective[v] * x[v];
      if (!best || obj < *best) best = obj;
      return;
    }
    for (int k = from; k < m; ++k) {
      pick[depth] = k;
      choose(depth + 1, k + 1);
    }
  };
  choose(0, 0);
  return best;
}

double naive_cost(const Instance& in, const std::vector<int>& set, double multiplier) {
  double total = 0.0;
  for (int j = 0; j < in.num_clients(); ++j) {
    double d = std::numeric_limits<double>::infinity();
    for (int f : set) d = std::min(d, in.metric.dist[in.facilities[f] * in.metric.size() + in.clients[j]]);
    total += in.client_weights[j] * std::max(0.0, d - multiplier * in.discounts[j]);
  }
  return total;
}

double recursive_opt(const Instance& in, std::vector<int>* best_set) {
  const int n = in.num_facilities();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> chosen;
  std::function<void(int)> go = [&](int f) {
    if (f == n) {
      if (chosen.empty() || !is_feasible(in, chosen)) return;
      const double v = naive_cost(in, chosen);
      if (v < best) {
        best = v;
        if (best_set) *best_set = chosen;
      }
      return;
    }
    chosen.push_back(f);
    go(f + 1);
    chosen.pop_back();
    go(f + 1);
  };
  go(0);
  return best;
}

double median_opt(const Instance& in, int k) {
  const int n = in.num_facilities();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > k) continue;
    double total = 0.0;
    for (int j = 0; j < in.num_clients(); ++j) {
      double d = std::numeric_limits<double>::infinity();
      for (int f = 0; f < n; ++f)
        if (mask >> f & 1u) d = std::min(d, in.fc(f, j));
      total += in.client_weights[j] * d;
    }
    best = std::min(best, total);
  }
  return best;
}

double bisect_radius(const Instance& in, const std::vector<int>& cprime, int j, double rho_est, double delta,
                     double hi) {
  auto lhs = [&](double r) {
    double s = 0.0;
    for (int k : cprime)
      if (in.cc(j, k) <= delta * r) s += in.client_weights[k] * std::max(0.0, r - in.discounts[k] / (1.0 - delta));
    return s;
  };
  double lo = 0.0;
  if (lhs(0.0) > rho_est) return 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lhs(mid) <= rho_est ? lo : hi) = mid;
  }
  return lo;
}

double grid_offset_minimum(const std::vector<std::pair<double, double>>& dist_discount,
                           const std::vector<double>& mass, double tau, int points) {
  double best = std::numeric_limits<double>::infinity();
  for (int g = 0; g < points; ++g) {
    const double b = static_cast<double>(g) / points;
    double total = 0.0;
    for (std::size_t p = 0; p < mass.size(); ++p) {
      const auto [c, r] = dist_discount[p];
      double chat = 0.0;
      if (c > 0.0) {
        // Smallest tau^(l + b), l >= 0, that is >= c.
        int l = 0;
        while (std::pow(tau, l + b) < c * (1.0 - 1e-12)) ++l;
        chat = std::pow(tau, l + b);
      }
      total += mass[p] * std::max(0.0, chat - tau * r);
    }
    best = std::min(best, total);
  }
  return best;
}

std::vector<double> enumerated_probs(const StochasticInstance& stoch) {
  const int nc = stoch.base.num_clients();
  std::vector<double> hit(nc, 0.0);
  std::vector<bool> landed(nc, false);
  std::function<void(std::size_t, double)> go = [&](std::size_t v, double prob) {
    if (v == stoch.points.size()) {
      for (int j = 0; j < nc; ++j)
        if (landed[j]) hit[j] += prob;
      return;
    }
    double rest = 1.0;
    for (const auto& [j, q] : stoch.points[v].dist) {
      rest -= q;
      const bool was = landed[j];
      landed[j] = true;
      go(v + 1, prob * q);
      landed[j] = was;
    }
    if (rest > 0.0) go(v + 1, prob * rest);
  };
  go(0, 1.0);
  return hit;
}

Instance line_instance(const std::vector<double>& facility_x, const std::vector<double>& client_x,
                       const std::vector<double>& discounts, ConstraintFamily constraint) {
  Instance in;
  std::vector<double> xs = facility_x;
  xs.insert(xs.end(), client_x.begin(), client_x.end());
  const int nf = static_cast<int>(facility_x.size());
  const std::size_t n = xs.size();
  for (int f = 0; f < nf; ++f) in.metric.ids.push_back("f" + std::to_string(f));
  for (std::size_t j = 0; j < client_x.size(); ++j) in.metric.ids.push_back("c" + std::to_string(j));
  in.metric.dist.resize(n * n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) in.metric.at(p, q) = std::abs(xs[p] - xs[q]);
  for (int f = 0; f < nf; ++f) in.facilities.push_back(f);
  for (std::size_t j = 0; j < client_x.size(); ++j) in.clients.push_back(nf + static_cast<int>(j));
  in.discounts = discounts;
  in.client_weights.assign(client_x.size(), 1.0);
  in.facility_weights.assign(nf, 1.0);
  in.constraint = std::move(constraint);
  return in;
}

bool is_sparse_witness(const Instance& in, const ExtendedInstance& ext, const std::vector<int>& fstar,
                       std::string* why, double tol) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  const int nc = in.num_clients();
  const double cap = ext.rho * ext.est;
  std::vector<bool> survives(nc, false);
  for (int j : ext.cprime) survives[j] = true;
  for (int f : ext.f0)
    if (std::find(fstar.begin(), fstar.end(), f) == fstar.end()) return fail("F0 not inside the optimum");

  // Nearest optimum facility per client, lowest position on ties.
  std::vector<int> kappa(nc, -1);
  std::vector<double> to_opt(nc, 0.0);
  for (int j = 0; j < nc; ++j)
    for (int f : fstar)
      if (kappa[j] < 0 || in.fc(f, j) < to_opt[j]) {
        kappa[j] = f;
        to_opt[j] = in.fc(f, j);
      }

  for (int f : fstar) {
    if (std::find(ext.f0.begin(), ext.f0.end(), f) != ext.f0.end()) continue;
    double load = 0.0;
    for (int j = 0; j < nc; ++j)
      if (survives[j] && kappa[j] == f) load += in.client_weights[j] * std::max(0.0, in.fc(f, j) - in.discounts[j]);
    if (load > cap + tol) return fail("light facility " + in.facility_id(f) + " exceeds rho EST");
  }

  // Balls around facilities and surviving clients.
  std::vector<int> sites;
  for (int f = 0; f < in.num_facilities(); ++f) sites.push_back(in.facilities[f]);
  for (int j = 0; j < nc; ++j)
    if (survives[j]) sites.push_back(in.clients[j]);
  for (int p : sites) {
    double reach = 1e300;
    for (int f : fstar) reach = std::min(reach, in.metric(p, in.facilities[f]));
    double load = 0.0;
    for (int j = 0; j < nc; ++j)
      if (survives[j] && in.metric(p, in.clients[j]) <= ext.delta * reach)
        load += in.client_weights[j] * std::max(0.0, reach - in.discounts[j] / (1.0 - ext.delta));
    if (load > cap + tol) return fail("ball around " + in.metric.ids[p] + " exceeds rho EST");
  }

  double total = 0.0;
  const double inflate = (1.0 + ext.delta) / (1.0 - ext.delta);
  for (int j = 0; j < nc; ++j) {
    if (survives[j]) {
      total += in.client_weights[j] * std::max(0.0, to_opt[j] - in.discounts[j]);
    } else {
      if (ext.f0.empty()) return fail("clients removed with empty F0");
      double near = 1e300;
      for (int f : ext.f0) near = std::min(near, in.fc(f, j));
      total += in.client_weights[j] * std::max(0.0, near - inflate * in.discounts[j]) / inflate;
    }
  }
  if (total > ext.est + tol) return fail("removed and surviving cost exceed EST");
  return true;
}

}  // namespace meddis::testing

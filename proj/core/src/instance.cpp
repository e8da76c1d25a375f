#include "meddis/instance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace meddis {
namespace {

constexpr double kNormalizationTolerance = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint32_t to_mask(std::span<const int> set) {
  std::uint32_t mask = 0;
  for (int f : set) mask |= 1u << f;
  return mask;
}

// Uniform double in [0, 1) from the top 53 bits; stable across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

}  // namespace

double Instance::max_distance() const {
  double best = 0.0;
  for (int f = 0; f < num_facilities(); ++f)
    for (int j = 0; j < num_clients(); ++j) best = std::max(best, fc(f, j));
  return best;
}

ConstraintKind constraint_kind(const Instance& instance) {
  return std::visit(Overloaded{[](const Cardinality&) { return ConstraintKind::kCardinality; },
                               [](const Matroid&) { return ConstraintKind::kMatroid; },
                               [](const Knapsack&) { return ConstraintKind::kKnapsack; }},
                    instance.constraint);
}

const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kCardinality: return "cardinality";
    case ConstraintKind::kMatroid: return "matroid";
    case ConstraintKind::kKnapsack: return "knapsack";
  }
  return "unknown";
}

std::vector<Violation> validate(const Instance& instance) {
  std::vector<Violation> out;
  const MetricSpace& m = instance.metric;
  const std::size_t n = m.size();
  auto add = [&](std::string kind, std::string message, std::vector<std::string> sites) {
    out.push_back({std::move(kind), std::move(message), std::move(sites)});
  };
  if (m.dist.size() != n * n) {
    add("shape", "distance matrix is not square over the sites", {});
    return out;
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (m(p, p) != 0.0) add("diagonal", "dist(p,p) must be 0", {m.ids[p]});
    for (std::size_t q = p + 1; q < n; ++q) {
      const double d = m(p, q);
      if (!std::isfinite(d) || d < 0.0) add("negative", "distance must be finite and nonnegative", {m.ids[p], m.ids[q]});
      if (m(p, q) != m(q, p)) add("symmetry", "dist(p,q) != dist(q,p)", {m.ids[p], m.ids[q]});
      if (d > 0.0 && d < 1.0 - kNormalizationTolerance)
        add("normalization", "non-co-located pair closer than 1", {m.ids[p], m.ids[q]});
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q)
      for (std::size_t s = 0; s < n; ++s) {
        if (m(p, q) > m(p, s) + m(s, q) + kTriangleTolerance) {
          std::ostringstream msg;
          msg << "dist(" << m.ids[p] << "," << m.ids[q] << ")=" << m(p, q) << " exceeds path via "
              << m.ids[s];
          add("triangle", msg.str(), {m.ids[p], m.ids[s], m.ids[q]});
        }
      }

  const int nf = instance.num_facilities();
  const int nc = instance.num_clients();
  if (nf == 0) add("facilities", "instance has no facilities", {});
  if (nc == 0) add("clients", "instance has no clients", {});
  for (int idx : instance.facilities)
    if (idx < 0 || static_cast<std::size_t>(idx) >= n) add("sites", "facility outside metric", {});
  for (int idx : instance.clients)
    if (idx < 0 || static_cast<std::size_t>(idx) >= n) add("sites", "client outside metric", {});
  if (static_cast<int>(instance.discounts.size()) != nc)
    add("discounts", "one discount per client required", {});
  if (static_cast<int>(instance.client_weights.size()) != nc)
    add("weights", "one weight per client required", {});
  for (int j = 0; j < nc && j < static_cast<int>(instance.discounts.size()); ++j)
    if (!(instance.discounts[j] >= 0.0)) add("discounts", "discount must be nonnegative", {instance.client_id(j)});
  for (int j = 0; j < nc && j < static_cast<int>(instance.client_weights.size()); ++j)
    if (!(instance.client_weights[j] >= 0.0)) add("weights", "client weight must be nonnegative", {instance.client_id(j)});
  if (static_cast<int>(instance.facility_weights.size()) != nf)
    add("weights", "one weight per facility required", {});

  std::visit(
      Overloaded{
          [&](const Cardinality& c) {
            if (c.k < 1) add("constraint", "k must be positive", {});
            if (c.k > nf) add("constraint", "k exceeds the number of facilities", {});
          },
          [&](const Matroid& mat) {
            std::visit(Overloaded{
                           [&](const UniformMatroid& u) {
                             if (u.rank < 0) add("matroid", "negative rank", {});
                           },
                           [&](const PartitionMatroid& p) {
                             if (p.parts.size() != p.caps.size())
                               add("matroid", "one cap per part required", {});
                             std::vector<int> seen(nf, 0);
                             for (const auto& part : p.parts)
                               for (int f : part) {
                                 if (f < 0 || f >= nf) {
                                   add("matroid", "partition references unknown facility", {});
                                   continue;
                                 }
                                 if (seen[f]++) add("matroid", "parts must be disjoint", {instance.facility_id(f)});
                               }
                             for (int cap : p.caps)
                               if (cap < 0) add("matroid", "negative part cap", {});
                           },
                           [&](const ExplicitMatroid& e) {
                             if (nf > kMaxExplicitMatroidSize) {
                               add("matroid", "explicit matroids are limited to 20 facilities", {});
                               return;
                             }
                             if (e.rank_table.size() != (std::size_t{1} << nf)) {
                               add("matroid", "rank table must cover all subsets", {});
                               return;
                             }
                             const std::string err = check_rank_axioms(e, nf);
                             if (!err.empty()) add("matroid", err, {});
                           }},
                       mat.spec);
          },
          [&](const Knapsack& k) {
            if (!(k.budget >= 0.0)) add("constraint", "budget must be nonnegative", {});
            bool fits = false;
            for (int f = 0; f < nf && f < static_cast<int>(instance.facility_weights.size()); ++f) {
              if (!(instance.facility_weights[f] >= 0.0))
                add("weights", "facility weight must be nonnegative", {instance.facility_id(f)});
              fits = fits || instance.facility_weights[f] <= k.budget;
            }
            if (!fits) add("constraint", "no single facility fits the knapsack budget", {});
          }},
      instance.constraint);
  return out;
}

double connection_distance(const Instance& instance, int j, std::span<const int> set) {
  double best = std::numeric_limits<double>::infinity();
  for (int f : set) best = std::min(best, instance.fc(f, j));
  return best;
}

double discounted_cost(const Instance& instance, std::span<const int> set, double multiplier) {
  if (set.empty()) throw Error("discounted_cost: facility set must be nonempty");
  double total = 0.0;
  for (int j = 0; j < instance.num_clients(); ++j) {
    const double c = connection_distance(instance, j, set);
    total += instance.client_weights[j] * positive_part(c - multiplier * instance.discounts[j]);
  }
  return total;
}

Instance normalize(const Instance& instance) {
  double min_nonzero = std::numeric_limits<double>::infinity();
  for (double d : instance.metric.dist)
    if (d > 0.0) min_nonzero = std::min(min_nonzero, d);
  Instance out = instance;
  if (!std::isfinite(min_nonzero) || min_nonzero >= 1.0) return out;
  for (double& d : out.metric.dist) d /= min_nonzero;
  for (double& r : out.discounts) r /= min_nonzero;
  out.scale = instance.scale / min_nonzero;
  return out;
}

int matroid_rank(const MatroidSpec& spec, int num_facilities, std::span<const int> set) {
  return std::visit(
      Overloaded{[&](const UniformMatroid& u) {
                   return std::min<int>(u.rank, static_cast<int>(set.size()));
                 },
                 [&](const PartitionMatroid& p) {
                   std::vector<int> part_of(num_facilities, -1);
                   for (std::size_t q = 0; q < p.parts.size(); ++q)
                     for (int f : p.parts[q]) part_of[f] = static_cast<int>(q);
                   std::vector<int> count(p.parts.size(), 0);
                   int rank = 0;
                   for (int f : set) {
                     const int q = part_of[f];
                     if (q < 0) continue;  // unlisted facilities are loops
                     if (count[q] < p.caps[q]) {
                       ++count[q];
                       ++rank;
                     }
                   }
                   return rank;
                 },
                 [&](const ExplicitMatroid& e) { return e.rank_table.at(to_mask(set)); }},
      spec);
}

std::vector<RankConstraint> rank_constraints(const MatroidSpec& spec, int n) {
  std::vector<RankConstraint> out;
  std::visit(
      Overloaded{[&](const UniformMatroid& u) {
                   FacilitySet all(n);
                   for (int f = 0; f < n; ++f) all[f] = f;
                   out.push_back({std::move(all), u.rank});
                 },
                 [&](const PartitionMatroid& p) {
                   std::vector<bool> listed(n, false);
                   for (std::size_t q = 0; q < p.parts.size(); ++q) {
                     FacilitySet part = p.parts[q];
                     std::sort(part.begin(), part.end());
                     for (int f : part) listed[f] = true;
                     out.push_back({std::move(part), p.caps[q]});
                   }
                   FacilitySet loops;
                   for (int f = 0; f < n; ++f)
                     if (!listed[f]) loops.push_back(f);
                   if (!loops.empty()) out.push_back({std::move(loops), 0});
                 },
                 [&](const ExplicitMatroid& e) {
                   const auto& r = e.rank_table;
                   const std::uint32_t full = 1u << n;
                   for (std::uint32_t s = 1; s < full; ++s) {
                     bool closed = true;
                     for (int f = 0; f < n && closed; ++f) {
                       const std::uint32_t bit = 1u << f;
                       if (!(s & bit) && r[s | bit] == r[s]) closed = false;
                     }
                     if (!closed) continue;
                     FacilitySet set;
                     for (int f = 0; f < n; ++f)
                       if (s & (1u << f)) set.push_back(f);
                     out.push_back({std::move(set), r[s]});
                   }
                 }},
      spec);
  return out;
}

std::string check_rank_axioms(const ExplicitMatroid& matroid, int n) {
  const auto& r = matroid.rank_table;
  const std::uint32_t full = 1u << n;
  if (r.size() != full) return "rank table size mismatch";
  if (r[0] != 0) return "rank of the empty set must be 0";
  for (std::uint32_t s = 0; s < full; ++s) {
    if (r[s] < 0 || r[s] > std::popcount(s)) return "rank must lie in [0, |S|]";
    for (int e = 0; e < n; ++e) {
      const std::uint32_t bit = 1u << e;
      if (s & bit) continue;
      const int gain = r[s | bit] - r[s];
      if (gain < 0 || gain > 1) return "rank must be monotone with unit increments";
      for (int g = e + 1; g < n; ++g) {
        const std::uint32_t bit2 = 1u << g;
        if (s & bit2) continue;
        if (r[s | bit] + r[s | bit2] < r[s | bit | bit2] + r[s]) return "rank must be submodular";
      }
    }
  }
  return {};
}

ExplicitMatroid explicit_matroid_from_sets(const std::vector<std::vector<int>>& sets, int n) {
  if (n > kMaxExplicitMatroidSize) throw Error("explicit matroids are limited to 20 facilities");
  std::vector<std::uint32_t> masks;
  masks.reserve(sets.size());
  for (const auto& s : sets) masks.push_back(to_mask(s));
  ExplicitMatroid out;
  out.rank_table.resize(std::size_t{1} << n, 0);
  for (std::uint32_t s = 0; s < out.rank_table.size(); ++s) {
    int best = 0;
    for (std::uint32_t m : masks) best = std::max(best, std::popcount(m & s));
    out.rank_table[s] = best;
  }
  return out;
}

bool is_feasible(const Instance& instance, std::span<const int> set) {
  return std::visit(
      Overloaded{[&](const Cardinality& c) { return static_cast<int>(set.size()) <= c.k; },
                 [&](const Matroid& m) {
                   return matroid_rank(m.spec, instance.num_facilities(), set) ==
                          static_cast<int>(set.size());
                 },
                 [&](const Knapsack& k) {
                   double w = 0.0;
                   for (int f : set) w += instance.facility_weights[f];
                   return w <= k.budget + 1e-9;
                 }},
      instance.constraint);
}

Instance generate(const GenerateParams& params) {
  if (params.num_facilities < 1 || params.num_clients < 1)
    throw Error("generate: counts must be at least 1");
  std::mt19937_64 rng(params.seed);
  const int nf = params.num_facilities;
  const int nc = params.num_clients;
  const int n = nf + nc;

  std::vector<double> xs(n), ys(n);
  for (int p = 0; p < n; ++p) {
    xs[p] = 100.0 * unit_uniform(rng);
    ys[p] = 100.0 * unit_uniform(rng);
  }
  Instance inst;
  inst.metric.ids.resize(n);
  for (int f = 0; f < nf; ++f) inst.metric.ids[f] = "f" + std::to_string(f);
  for (int j = 0; j < nc; ++j) inst.metric.ids[nf + j] = "c" + std::to_string(j);
  inst.metric.dist.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) inst.metric.at(p, q) = std::hypot(xs[p] - xs[q], ys[p] - ys[q]);

  inst.facilities.resize(nf);
  std::iota(inst.facilities.begin(), inst.facilities.end(), 0);
  inst.clients.resize(nc);
  std::iota(inst.clients.begin(), inst.clients.end(), nf);
  inst.client_weights.assign(nc, 1.0);
  inst.facility_weights.assign(nf, 1.0);
  inst = normalize(inst);
  inst.scale = 1.0;

  std::vector<double> nonzero;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      if (inst.metric(p, q) > 0.0) nonzero.push_back(inst.metric(p, q));
  double median = 0.0;
  if (!nonzero.empty()) {
    std::sort(nonzero.begin(), nonzero.end());
    median = nonzero[nonzero.size() / 2];
  }
  inst.discounts.resize(nc);
  for (int j = 0; j < nc; ++j) inst.discounts[j] = params.discount_scale * median * unit_uniform(rng);

  switch (params.kind) {
    case ConstraintKind::kCardinality:
      inst.constraint = Cardinality{std::clamp(params.k, 1, nf)};
      break;
    case ConstraintKind::kMatroid: {
      MatroidSpec spec;
      if (params.matroid_type == "uniform") {
        spec = UniformMatroid{std::clamp(params.k, 1, nf)};
      } else if (params.matroid_type == "partition") {
        const int nparts = std::clamp(params.k, 1, nf);
        PartitionMatroid p;
        p.parts.resize(nparts);
        for (int f = 0; f < nf; ++f) p.parts[f < nparts ? f : uniform_int(rng, 0, nparts - 1)].push_back(f);
        for (auto& part : p.parts) {
          std::sort(part.begin(), part.end());
          p.caps.push_back(uniform_int(rng, 1, std::max(1, static_cast<int>(part.size()) / 2)));
        }
        spec = std::move(p);
      } else if (params.matroid_type == "explicit") {
        // Graphic matroid: facilities are random edges (no self-loops) on
        // k + 1 vertices.
        const int vertices = std::max(2, params.k + 1);
        std::vector<std::pair<int, int>> edges(nf);
        for (auto& e : edges) {
          e.first = uniform_int(rng, 0, vertices - 1);
          e.second = uniform_int(rng, 0, vertices - 2);
          if (e.second >= e.first) ++e.second;
        }
        ExplicitMatroid e;
        e.rank_table.assign(std::size_t{1} << nf, 0);
        for (std::uint32_t s = 0; s < e.rank_table.size(); ++s) {
          std::vector<int> parent(vertices);
          std::iota(parent.begin(), parent.end(), 0);
          auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
          };
          int rank = 0;
          for (int f = 0; f < nf; ++f) {
            if (!(s >> f & 1u)) continue;
            const int a = find(edges[f].first), b = find(edges[f].second);
            if (a != b) {
              parent[a] = b;
              ++rank;
            }
          }
          e.rank_table[s] = rank;
        }
        spec = std::move(e);
      } else {
        throw Error("generate: unknown matroid type '" + params.matroid_type + "'");
      }
      inst.constraint = Matroid{std::move(spec)};
      break;
    }
    case ConstraintKind::kKnapsack: {
      double total = 0.0, heaviest = 0.0;
      for (int f = 0; f < nf; ++f) {
        inst.facility_weights[f] = uniform_int(rng, 1, 5);
        total += inst.facility_weights[f];
        heaviest = std::max(heaviest, inst.facility_weights[f]);
      }
      const double lo = heaviest, hi = std::max(heaviest, total / 2.0);
      inst.constraint = Knapsack{std::floor(lo + (hi - lo) * unit_uniform(rng))};
      break;
    }
  }
  return inst;
}

}  // namespace meddis

#include "meddis/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace meddis {
namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(where + ": expected a finite number");
  return d;
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError(where + ": expected a string");
  return v.get<std::string>();
}

std::vector<int> facility_list(const json& ids, const std::map<std::string, int>& position,
                               const std::string& where) {
  if (!ids.is_array()) throw SchemaError(where + ": expected an array of facility ids");
  std::vector<int> out;
  for (const auto& id : ids) {
    const std::string name = text(id, where);
    const auto it = position.find(name);
    if (it == position.end()) throw SchemaError(where + ": unknown facility '" + name + "'");
    out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MatroidSpec matroid_from_json(const json& m, const std::map<std::string, int>& position, int nf) {
  const std::string type = text(field(m, "type", "matroid"), "matroid.type");
  if (type == "uniform") return UniformMatroid{field(m, "rank", "matroid").get<int>()};
  if (type == "partition") {
    PartitionMatroid p;
    const json& parts = field(m, "parts", "matroid");
    const json& caps = field(m, "caps", "matroid");
    if (!parts.is_array() || !caps.is_array() || parts.size() != caps.size())
      throw SchemaError("matroid: 'parts' and 'caps' must be arrays of equal length");
    for (std::size_t i = 0; i < parts.size(); ++i) {
      p.parts.push_back(facility_list(parts[i], position, "matroid.parts"));
      p.caps.push_back(caps[i].get<int>());
    }
    return p;
  }
  if (type == "explicit") {
    if (nf > kMaxExplicitMatroidSize) throw SchemaError("matroid: explicit matroids are limited to 20 facilities");
    if (m.contains("rank_table")) {
      ExplicitMatroid e;
      e.rank_table = m.at("rank_table").get<std::vector<int>>();
      if (e.rank_table.size() != (std::size_t{1} << nf))
        throw SchemaError("matroid: 'rank_table' must have 2^|F| entries");
      return e;
    }
    std::vector<std::vector<int>> sets;
    for (const auto& s : field(m, "independent", "matroid")) sets.push_back(facility_list(s, position, "matroid.independent"));
    return explicit_matroid_from_sets(sets, nf);
  }
  throw SchemaError("matroid: unknown type '" + type + "'");
}

json matroid_to_json(const MatroidSpec& spec, const Instance& in) {
  return std::visit(
      [&](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UniformMatroid>) {
          return {{"type", "uniform"}, {"rank", m.rank}};
        } else if constexpr (std::is_same_v<T, PartitionMatroid>) {
          json parts = json::array();
          for (const auto& part : m.parts) {
            json ids = json::array();
            for (int f : part) ids.push_back(in.facility_id(f));
            parts.push_back(ids);
          }
          return {{"type", "partition"}, {"parts", parts}, {"caps", m.caps}};
        } else {
          return {{"type", "explicit"}, {"rank_table", m.rank_table}};
        }
      },
      spec);
}

}  // namespace

Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("instance: expected a JSON object");
  Instance in;
  std::map<std::string, int> site_of;
  std::map<std::string, int> facility_of;

  const json& facilities = field(doc, "facilities", "instance");
  const json& clients = field(doc, "clients", "instance");
  if (!facilities.is_array() || !clients.is_array()) throw SchemaError("instance: facilities and clients must be arrays");
  auto add_site = [&](const std::string& id) {
    if (!site_of.emplace(id, static_cast<int>(in.metric.ids.size())).second)
      throw SchemaError("instance: duplicate id '" + id + "'");
    in.metric.ids.push_back(id);
    return static_cast<int>(in.metric.ids.size()) - 1;
  };
  for (const auto& f : facilities) {
    const std::string id = text(field(f, "id", "facility"), "facility.id");
    facility_of[id] = in.num_facilities();
    in.facilities.push_back(add_site(id));
    in.facility_weights.push_back(f.contains("weight") ? number(f.at("weight"), "facility " + id + " weight") : 1.0);
  }
  for (const auto& c : clients) {
    const std::string id = text(field(c, "id", "client"), "client.id");
    in.clients.push_back(add_site(id));
    in.discounts.push_back(number(field(c, "discount", "client " + id), "client " + id + " discount"));
    in.client_weights.push_back(c.contains("weight") ? number(c.at("weight"), "client " + id + " weight") : 1.0);
  }

  const std::size_t n = in.metric.ids.size();
  in.metric.dist.assign(n * n, 0.0);
  const json& metric = field(doc, "metric", "instance");
  const std::string type = text(field(metric, "type", "metric"), "metric.type");
  if (type == "explicit") {
    const json& matrix = field(metric, "matrix", "metric");
    if (!matrix.is_array() || matrix.size() != n) throw SchemaError("metric: matrix must have one row per site");
    for (std::size_t p = 0; p < n; ++p) {
      if (!matrix[p].is_array() || matrix[p].size() != n) throw SchemaError("metric: matrix must be square");
      for (std::size_t q = 0; q < n; ++q) in.metric.at(p, q) = number(matrix[p][q], "metric.matrix");
    }
  } else if (type == "euclidean") {
    const json& coords = field(metric, "coords", "metric");
    std::vector<std::pair<double, double>> at(n);
    for (std::size_t p = 0; p < n; ++p) {
      const json& xy = field(coords, in.metric.ids[p].c_str(), "metric.coords");
      if (!xy.is_array() || xy.size() != 2) throw SchemaError("metric: coordinates must be [x, y]");
      at[p] = {number(xy[0], "metric.coords"), number(xy[1], "metric.coords")};
    }
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        in.metric.at(p, q) = std::hypot(at[p].first - at[q].first, at[p].second - at[q].second);
  } else {
    throw SchemaError("metric: unknown type '" + type + "'");
  }

  const json& constraint = field(doc, "constraint", "instance");
  const std::string kind = text(field(constraint, "type", "constraint"), "constraint.type");
  if (kind == "cardinality") {
    in.constraint = Cardinality{field(constraint, "k", "constraint").get<int>()};
  } else if (kind == "matroid") {
    in.constraint = Matroid{matroid_from_json(field(constraint, "matroid", "constraint"), facility_of, in.num_facilities())};
  } else if (kind == "knapsack") {
    in.constraint = Knapsack{number(field(constraint, "budget", "constraint"), "constraint.budget")};
  } else {
    throw SchemaError("constraint: unknown type '" + kind + "'");
  }
  return in;
}

json to_json(const Instance& in) {
  json doc;
  doc["facilities"] = json::array();
  for (int f = 0; f < in.num_facilities(); ++f)
    doc["facilities"].push_back({{"id", in.facility_id(f)}, {"weight", in.facility_weights[f]}});
  doc["clients"] = json::array();
  for (int j = 0; j < in.num_clients(); ++j)
    doc["clients"].push_back(
        {{"id", in.client_id(j)}, {"discount", in.discounts[j]}, {"weight", in.client_weights[j]}});
  std::vector<int> sites = in.facilities;
  sites.insert(sites.end(), in.clients.begin(), in.clients.end());
  json matrix = json::array();
  for (int p : sites) {
    json row = json::array();
    for (int q : sites) row.push_back(in.metric(p, q));
    matrix.push_back(std::move(row));
  }
  doc["metric"] = {{"type", "explicit"}, {"matrix", std::move(matrix)}};
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Cardinality>)
          doc["constraint"] = {{"type", "cardinality"}, {"k", c.k}};
        else if constexpr (std::is_same_v<T, Matroid>)
          doc["constraint"] = {{"type", "matroid"}, {"matroid", matroid_to_json(c.spec, in)}};
        else
          doc["constraint"] = {{"type", "knapsack"}, {"budget", c.budget}};
      },
      in.constraint);
  return doc;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw Error("cannot open " + path.string());
  try {
    return json::parse(file);
  } catch (const json::parse_error& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream file(path);
  if (!file) throw Error("cannot write " + path.string());
  file << doc.dump(2) << '\n';
}

Instance read_instance(const std::filesystem::path& path) {
  try {
    return instance_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace meddis

#include "meddis/report.hpp"

#include <algorithm>

namespace meddis {

Certificate certify(std::string name, double lhs, double rhs, double tol) {
  return {std::move(name), lhs, rhs, lhs <= rhs + tol};
}

bool SolveReport::all_hold() const {
  return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.holds; });
}

const Certificate* SolveReport::find(const std::string& name) const {
  for (const auto& c : certificates)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json to_json(const SolveReport& r) {
  using nlohmann::json;
  json out;
  out["problem"] = r.problem;
  out["tau"] = r.tau;
  out["b"] = r.b;
  out["h"] = r.h;
  out["solution"] = r.solution;
  out["objective"] = r.objective;
  out["alpha"] = r.alpha;
  out["beta"] = r.beta;
  out["lp_objective"] = r.lp_objective;
  out["iterations"] = json::array();
  for (const auto& it : r.iterations)
    out["iterations"].push_back({{"action", it.action},
                                 {"client", it.client},
                                 {"objective", it.objective},
                                 {"cstar_ok", it.cstar_ok},
                                 {"contribution_change", it.contribution_change}});
  out["final_levels"] = r.final_levels;
  out["certificates"] = json::array();
  for (const auto& c : r.certificates)
    out["certificates"].push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
  if (!r.candidates.empty()) {
    out["candidates"] = json::array();
    for (const auto& c : r.candidates)
      out["candidates"].push_back({{"f0", c.f0},
                                   {"cprime_size", c.cprime_size},
                                   {"c0", c.c0},
                                   {"est", c.est},
                                   {"lp_objective", c.lp_objective},
                                   {"fractional", c.fractional},
                                   {"solution", c.solution},
                                   {"cost", c.cost}});
  }
  if (!r.flags.empty()) out["flags"] = r.flags;
  return out;
}

SolveReport report_from_json(const nlohmann::json& j) {
  SolveReport r;
  r.problem = j.value("problem", "");
  r.tau = j.value("tau", 0.0);
  r.b = j.value("b", 0.0);
  r.h = j.value("h", 0);
  r.solution = j.at("solution").get<std::vector<std::string>>();
  r.objective = j.value("objective", 0.0);
  r.alpha = j.at("alpha").get<double>();
  r.beta = j.at("beta").get<double>();
  r.lp_objective = j.value("lp_objective", 0.0);
  for (const auto& it : j.value("iterations", nlohmann::json::array()))
    r.iterations.push_back({it.value("action", ""), it.value("client", ""), it.value("objective", 0.0),
                            it.value("cstar_ok", true), it.value("contribution_change", 0.0)});
  if (j.contains("final_levels")) r.final_levels = j["final_levels"].get<std::map<std::string, int>>();
  for (const auto& c : j.value("certificates", nlohmann::json::array()))
    r.certificates.push_back({c.at("name").get<std::string>(), c.at("lhs").get<double>(),
                              c.at("rhs").get<double>(), c.at("holds").get<bool>()});
  if (j.contains("flags")) r.flags = j["flags"].get<std::vector<std::string>>();
  return r;
}

}  // namespace meddis

#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "meddis/instance.hpp"

namespace meddis {

inline constexpr double kCertificateTolerance = 1e-6;

// A checked inequality lhs <= rhs (with kCertificateTolerance slack).
struct Certificate {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

Certificate certify(std::string name, double lhs, double rhs, double tol = kCertificateTolerance);

struct IterationRecord {
  std::string action;  // "solve", "activate", "shrink", "stop"
  std::string client;
  double objective = 0.0;
  bool cstar_ok = true;
  double contribution_change = 0.0;
};

// One evaluated knapsack candidate, kept for the report.
struct CandidateSummary {
  std::vector<std::string> f0;
  int cprime_size = 0;
  double c0 = 0.0;
  double est = 0.0;
  double lp_objective = 0.0;
  int fractional = 0;
  std::vector<std::string> solution;
  double cost = 0.0;  // discounted cost at the reported alpha
};

struct SolveReport {
  std::string problem;  // "kmeddis", "matmeddis" or "knapmeddis"
  double tau = 0.0;
  double b = 0.0;
  int h = 0;
  std::vector<std::string> solution;
  FacilitySet solution_positions;
  double objective = 0.0;      // discounted cost at multiplier 1, input units
  double alpha = 0.0;
  double beta = 0.0;
  double lp_objective = 0.0;   // input units
  std::vector<IterationRecord> iterations;
  std::map<std::string, int> final_levels;
  std::vector<Certificate> certificates;
  std::vector<CandidateSummary> candidates;
  std::vector<std::string> flags;

  bool all_hold() const;
  const Certificate* find(const std::string& name) const;
};

nlohmann::json to_json(const SolveReport& report);
SolveReport report_from_json(const nlohmann::json& j);

}  // namespace meddis

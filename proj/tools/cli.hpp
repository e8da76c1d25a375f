#pragma once

// The meddis command-line tool: parsing and dispatch, separated from main()
// so tests can drive it in-process.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace meddis::cli {

struct RunConfig {
  std::string command;  // solve | gen | verify | stochastic
  std::string instance;
  std::string report;   // verify only
  std::optional<double> tau;
  std::optional<int> step;
  double rho = 1.0 / 3.0;
  double delta = 2.0 / 3.0;
  double epsilon = 0.1;
  std::optional<int> cap1;
  std::optional<int> cap2;
  double max_candidates = 1e6;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out;      // stdout when empty
  bool oracle = false;

  // gen
  int facilities = 4;
  int clients = 6;
  std::string constraint = "cardinality";
  int k = 2;
  std::string matroid = "partition";
  double discount_scale = 0.5;
  int points = 0;       // > 0 writes a stochastic instance
  int support = 2;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitCertificate = 2;

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and runs; returns the process exit status.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace meddis::cli

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace mcfcnf::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;
// compare found a GA cost below its row's lower bound.
inline constexpr int kExitInconsistent = 3;

struct CompareRow {
  std::string instance;
  std::size_t pairs = 0;
  double ga_cost = 0.0;  // mean over repeats
  double ga_min_cost = 0.0;
  double exact_cost = 0.0;
  bool exact_proven = false;
  double lower_bound = 0.0;
  double ratio = 0.0;  // ga_cost / exact_cost
  double ga_wall_s = 0.0;  // mean over repeats
  double exact_wall_s = 0.0;
};

struct CompareOptions {
  std::vector<std::filesystem::path> instances;
  double budget_s = 60.0;
  int repeats = 3;
  unsigned long long seed = 1;
  std::size_t iterations = 0;
};

std::vector<CompareRow> run_compare(const CompareOptions& options, std::ostream& log);

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);

// True when every row's GA cost is at least its lower bound (1e-6 slack).
bool compare_consistent(const CompareRow& row);

// Entry point shared by the executable and the tests; args[0] is the
// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcfcnf::cli

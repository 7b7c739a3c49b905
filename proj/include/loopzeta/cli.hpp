#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace loopzeta::cli {

inline constexpr const char* kSchema = "loopzeta/1";

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNonConvergence = 3,
  kTailBound = 4,
};

struct RunConfig {
  std::string command;
  std::string torus;  // "d=1,m2=1"
  std::string graph;  // path to the graph JSON file
  std::optional<double> alpha;
  std::vector<double> twist;
  std::vector<double> chi;
  std::optional<double> s;
  double s_imag = 0.0;
  int window = 30;
  int grid = 0;
  std::optional<std::uint64_t> seed;
  long samples = 1000;
  int n_max = 0;  // 0 picks the smallest cutoff meeting the tail threshold
  int k_max = 0;
  bool series = false;
  std::string format = "json";
  std::string output;  // empty writes to the output stream
  unsigned threads = 0;
};

// Runs one command; the artifact goes to config.output or to out.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (CLI11), reads LOOPZETA_THREADS and runs.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace loopzeta::cli

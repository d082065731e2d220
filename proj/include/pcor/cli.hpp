#pragma once

// Command implementations behind the `pcor` binary. Each command takes the
// already-parsed inputs plus a RunConfig, writes to the given streams, and
// returns the process exit code:
//   0 valid / success, 1 invalid, 2 unknown, 3 usage or input error,
//   4 internal error.
// With a fixed seed the JSON output is byte-identical across runs and job
// counts.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pcor {

struct RunConfig {
  std::string mode = "auto";  // auto | oracle | automata | refute
  int max_model_size = 3;
  int star_depth = 3;
  uint64_t letter_budget = uint64_t(1) << 21;
  std::string format = "text";  // text | json
  uint64_t seed = 0;
  int jobs = 1;
  std::vector<std::string> tests;     // declared test names
  std::vector<std::string> nominals;  // declared nominal names
};

// decides lhs <= rhs (or lhs == rhs when eq is set: both inclusions)
int cmd_decide(const std::string& lhs, const std::string& rhs, const RunConfig& cfg,
               std::ostream& out, std::ostream& err);

// evaluates a term on a structure given as JSON text; prints the pairs
int cmd_eval(const std::string& term, const std::string& structure_json,
             const RunConfig& cfg, std::ostream& out, std::ostream& err);

// shortest derivative run of the term across the structure from one vertex
// to another; prints each step and the consumed atomic run
int cmd_trace(const std::string& term, const std::string& structure_json,
              const std::string& from, const std::string& to, const RunConfig& cfg,
              std::ostream& out, std::ostream& err);

// the graph language of the term up to the star unrolling depth
int cmd_glang(const std::string& term, const RunConfig& cfg, std::ostream& out,
              std::ostream& err);

// built-in smoke suite across all the layers; 0 iff everything passes
int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace pcor

// pcor: decide inclusions/equations of relational terms, evaluate terms on
// finite structures, trace derivative runs, and enumerate graph languages.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pcor/cli.hpp"

namespace {

void add_common(CLI::App* cmd, pcor::RunConfig* cfg) {
  cmd->add_option("--mode", cfg->mode, "auto | oracle | automata | refute")
      ->check(CLI::IsMember({"auto", "oracle", "automata", "refute"}));
  cmd->add_option("--max-model-size", cfg->max_model_size,
                  "largest universe for brute-force refutation");
  cmd->add_option("--star-depth", cfg->star_depth, "star unrolling depth (oracle, glang)");
  cmd->add_option("--letter-budget", cfg->letter_budget,
                  "largest admissible alphabet for the automata pipeline");
  cmd->add_option("--tests", cfg->tests, "declared test names (sub-identity relations)");
  cmd->add_option("--nominals", cfg->nominals, "declared nominal names (singleton pins)");
  cmd->add_option("--format", cfg->format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--seed", cfg->seed, "recorded in JSON reports");
  cmd->add_option("--jobs", cfg->jobs, "worker threads for sweeps and summaries");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equational reasoning about binary relations"};
  app.require_subcommand(1);
  pcor::RunConfig cfg;

  std::string lhs, rhs, term, structure_json, from, to;

  CLI::App* decide = app.add_subcommand("decide", "decide lhs <= rhs over all relations");
  decide->add_option("--lhs", lhs, "left term")->required();
  decide->add_option("--rhs", rhs, "right term")->required();
  add_common(decide, &cfg);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a term on a structure");
  eval->add_option("--term", term, "term")->required();
  eval->add_option("--structure", structure_json, "structure as JSON text")->required();
  add_common(eval, &cfg);

  CLI::App* trace = app.add_subcommand("trace", "derivative run between two vertices");
  trace->add_option("--term", term, "term")->required();
  trace->add_option("--structure", structure_json, "structure as JSON text")->required();
  trace->add_option("--from", from, "start vertex")->required();
  trace->add_option("--to", to, "target vertex")->required();
  add_common(trace, &cfg);

  CLI::App* glang = app.add_subcommand("glang", "graph language up to a star depth");
  glang->add_option("--term", term, "term")->required();
  add_common(glang, &cfg);

  CLI::App* check = app.add_subcommand("check", "built-in smoke suite");
  add_common(check, &cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  if (decide->parsed()) return pcor::cmd_decide(lhs, rhs, cfg, std::cout, std::cerr);
  if (eval->parsed()) return pcor::cmd_eval(term, structure_json, cfg, std::cout, std::cerr);
  if (trace->parsed())
    return pcor::cmd_trace(term, structure_json, from, to, cfg, std::cout, std::cerr);
  if (glang->parsed()) return pcor::cmd_glang(term, cfg, std::cout, std::cerr);
  if (check->parsed()) return pcor::cmd_check(cfg, std::cout, std::cerr);
  return 3;
}

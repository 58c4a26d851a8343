// Command-line front end: analyze | simulate | full <problem-file>.
// Exit codes: 0 success, 2 validation error, 3 bracket condition undecided,
// 4 simulation quality gate failed.
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "nilheat/errors.hpp"
#include "nilheat/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"weighted-filtration / nilpotent-approximation / heat-kernel-scaling toolkit"};
  app.require_subcommand(1);

  std::string file;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  long long paths = 0;
  int weight_cap = 0;
  int taylor_degree = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", file, "problem file")->required();
    sub->add_option("--out", out_dir, "output directory for report and CSV artifacts");
    sub->add_option("--seed", seed, "override the seed")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--paths", paths, "override the path count");
    sub->add_option("--weight-cap", weight_cap, "override the bracket weight cap");
    sub->add_option("--taylor-degree", taylor_degree, "override the series truncation degree");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "symbolic stages only (no sampling)");
  CLI::App* simulate = app.add_subcommand("simulate", "symbolic stages plus Monte-Carlo");
  CLI::App* full = app.add_subcommand("full", "simulate plus statistical verification suites");
  add_common(analyze);
  add_common(simulate);
  add_common(full);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  nilheat::Mode mode = nilheat::Mode::Analyze;
  if (simulate->parsed()) mode = nilheat::Mode::Simulate;
  if (full->parsed()) mode = nilheat::Mode::Full;

  try {
    nilheat::ProblemOverrides ov;
    if (seed_set) ov.seed = seed;
    if (paths > 0) ov.paths = paths;
    if (weight_cap > 0) ov.weight_cap = weight_cap;
    if (taylor_degree > 0) ov.taylor_degree = taylor_degree;
    nilheat::ProblemSpec spec = nilheat::load_problem(file, ov);

    nilheat::PipelineReport rep = nilheat::run_pipeline(spec, mode, out_dir);
    std::fputs(rep.text.c_str(), stdout);
    return 0;
  } catch (const nilheat::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const nilheat::HormanderUndecided& e) {
    std::fprintf(stderr, "undecided: %s\n", e.what());
    return 3;
  } catch (const nilheat::SimulationQuality& e) {
    std::fprintf(stderr, "quality gate: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}

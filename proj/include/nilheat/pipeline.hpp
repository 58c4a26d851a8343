#ifndef NILHEAT_PIPELINE_HPP
#define NILHEAT_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "nilheat/chart.hpp"
#include "nilheat/control.hpp"
#include "nilheat/filtration.hpp"
#include "nilheat/graded.hpp"
#include "nilheat/problem.hpp"
#include "nilheat/sde.hpp"

namespace nilheat {

enum class Mode { Analyze, Simulate, Full };

std::string mode_str(Mode m);

// Everything the run computed, plus the rendered artifacts. The text report
// and the JSON summary are deterministic byte-for-byte for a fixed spec
// (including the seed).
struct PipelineReport {
  Mode mode = Mode::Analyze;

  Filtration filtration;
  AdaptedChart chart;
  ChartVerification chart_check;
  NilpotentSystem nilpotent;
  bool homogeneity_ok = false;
  bool nilpotency_ok = false;
  LieEqualityReport lie_equality;
  Classification classification;

  // Simulate / full stages (empty optionals in analyze mode).
  std::optional<CoverageReport> reachability;
  std::optional<DiagonalDensity> q0;
  std::optional<ScalingFit> scaling;
  std::optional<ScalingIdentityCheck> identity_check;
  struct SchemeConsistency {
    long long n_paths = 0;
    double max_mean_sigma = 0.0;  // max |mean difference| / combined stderr
    double max_cov_sigma = 0.0;
    bool pass = false;
  };
  std::optional<SchemeConsistency> scheme_consistency;

  std::string text;  // report.txt contents
  std::string json;  // summary.json contents
};

// Runs the pipeline on a validated spec. When out_dir is nonempty, writes
// report.txt, summary.json and (simulate/full) scaling_fit.csv plus
// endpoints.csv into it (creating the directory if needed).
PipelineReport run_pipeline(const ProblemSpec& spec, Mode mode, const std::string& out_dir);

}  // namespace nilheat

#endif

#ifndef NILHEAT_SDE_HPP
#define NILHEAT_SDE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nilheat/graded.hpp"
#include "nilheat/vector_field.hpp"

namespace nilheat {

// Ito form of the Stratonovich SDE  dx = f0 dt + sum_i f_i o dw_i:
// the drift picks up the exact symbolic correction
//   drift_j = f0_j + 1/2 * sum_i sum_l f_i^(l) * d f_i^(j) / dx_l.
struct ItoSystem {
  VectorField drift;
  std::vector<VectorField> diffusions;

  int n() const { return static_cast<int>(drift.comp.size()); }
  int k() const { return static_cast<int>(diffusions.size()); }
};

ItoSystem stratonovich_to_ito(const VectorField& drift, const std::vector<VectorField>& diffusions);

// Flattened double-coefficient form of a polynomial field for the step loop.
struct CompiledTerm {
  double coeff;
  uint32_t nexp;               // number of (var, exp) pairs
  uint32_t var[8];             // 0-based variable indices
  uint32_t exp[8];
};

struct CompiledPoly {
  std::vector<CompiledTerm> terms;
  double evaluate(const double* x) const;
};

struct CompiledField {
  int n = 0;
  std::vector<CompiledPoly> comp;
  void evaluate(const double* x, double* out) const;
};

CompiledField compile_field(const VectorField& v);

enum class Scheme {
  ItoEuler,   // Euler-Maruyama on the Ito-converted system (default)
  StratHeun   // Euler-Heun predictor-corrector on the Stratonovich form
};

struct EnsembleConfig {
  uint64_t seed = 1;
  long long n_paths = 100000;
  double t_final = 1.0;
  int steps = 400;  // dt = t_final / steps
  Scheme scheme = Scheme::ItoEuler;
  bool parallel = true;
  double max_discard_fraction = 0.01;

  double dt() const { return t_final / steps; }
};

// Endpoint ensemble: kept endpoints only, in path-index order.
struct Ensemble {
  int n = 0;
  long long requested = 0;
  long long kept = 0;
  long long discarded = 0;
  double t_final = 0.0;
  std::vector<long long> path_index;  // original index of each kept endpoint
  std::vector<double> endpoints;      // kept * n, row-major

  const double* row(long long i) const { return endpoints.data() + i * n; }
};

// Simulates the Stratonovich system  dx = drift dt + sum_i diffusions_i o dw_i
// from x0. Scheme ItoEuler converts symbolically and runs Euler-Maruyama;
// StratHeun runs the predictor-corrector directly on the Stratonovich form
// with the same per-path noise. Non-finite endpoints are discarded and
// counted; a discard fraction above cfg.max_discard_fraction is a hard error.
Ensemble simulate_endpoints(const VectorField& drift, const std::vector<VectorField>& diffusions,
                            const std::vector<double>& x0, const EnsembleConfig& cfg);

// ---------------------------------------------------------------------------
// On-diagonal density estimation with dilation-shaped boxes.

struct DensityRow {
  double h = 0.0;          // box scale (half-width of coordinate j is h^w_j)
  long long n_in = 0;      // endpoints inside the box
  double estimate = 0.0;   // hits / (kept * volume)
  double stderr_ = 0.0;    // binomial error / volume
  bool usable = false;     // n_in >= 30
};

struct DensityEstimate {
  double value = 0.0;   // extrapolated h -> 0 estimate (fit a + b h^2, report a)
  double stderr_ = 0.0;
  double h_used = 0.0;  // smallest usable h
  long long n_in = 0;   // hits at h_used
  bool ok = false;
  bool boundary = false;  // some coordinate has one-sided support around the point
  std::vector<DensityRow> rows;
  std::vector<long long> below;  // per coordinate: endpoints strictly below point_j
  std::vector<long long> above;
  std::string note;
};

// Default box-scale schedule, as multiples of the data-driven scale.
std::vector<double> default_h_schedule();

// Estimates the endpoint density at `point` using boxes whose half-width in
// coordinate j is h^w_j, for h = (schedule values) * scale, where scale is the
// median over coordinates of (median |x_j - point_j|)^(1/w_j). Fits
// estimate(h) = a + b h^2 weighted by the binomial errors and reports a.
// Rows with fewer than 30 hits are unusable; fewer than two usable rows
// leaves ok = false with an explanatory note (insufficient hits).
DensityEstimate density_at_point(const Ensemble& ens, const std::vector<double>& point,
                                 const std::vector<int>& weights,
                                 const std::vector<double>& h_schedule = default_h_schedule());

// Simulates the nilpotent system from the origin at t = 1 and estimates the
// density at the origin. `advisory` is set when the controllability verdict
// did not establish Controllable (the estimate is then only indicative).
struct DiagonalDensity {
  DensityEstimate density;
  long long kept = 0;
  long long discarded = 0;
  bool advisory = false;
};

DiagonalDensity estimate_q0_diagonal(const NilpotentSystem& ns, const EnsembleConfig& cfg,
                                     bool verdict_controllable);

// ---------------------------------------------------------------------------
// Scaling checks.

// Checks q0(t, 0, x) = eps^N q0(eps^2 t, 0, delta_eps x) by estimating both
// sides with independent seeds; passes when the 3-stderr intervals overlap.
struct ScalingIdentityCheck {
  double eps = 0.0;
  double t = 0.0;
  double lhs = 0.0, lhs_stderr = 0.0;        // q0(t, 0, x)
  double rhs = 0.0, rhs_stderr = 0.0;        // eps^N * q0(eps^2 t, 0, delta_eps x)
  bool pass = false;
  std::string note;
};

ScalingIdentityCheck verify_scaling_identity(const NilpotentSystem& ns, double eps, double t,
                                             const std::vector<double>& x,
                                             const EnsembleConfig& cfg);

struct ScalingFitPoint {
  double t = 0.0;
  double p_hat = 0.0;
  double stderr_ = 0.0;
  bool usable = false;
};

struct ScalingFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<ScalingFitPoint> points;
  bool ok = false;
  std::string note;  // warnings, e.g. p_hat indistinguishable from zero
};

std::vector<double> default_t_grid();

// For each t in t_grid simulates the system and estimates the density at the
// origin of the chart, then fits log p_hat against log t by weighted least
// squares. The slope estimates the on-diagonal decay exponent (-N/2 when the
// leading term is positive). When the dynamics are given in centered original
// coordinates, pass endpoint_map = the (polynomial) chart forward map: it is
// applied exactly to every endpoint before density estimation, so the
// anisotropic boxes live in chart coordinates without truncating the
// dynamics.
ScalingFit scaling_exponent_fit(const VectorField& drift,
                                const std::vector<VectorField>& diffusions,
                                const std::vector<int>& weights,
                                const std::vector<double>& t_grid, const EnsembleConfig& cfg,
                                const CompiledField* endpoint_map = nullptr);

// Applies a polynomial map to every endpoint (row-wise), returning the mapped
// ensemble.
Ensemble map_endpoints(const Ensemble& ens, const CompiledField& map);

// ---------------------------------------------------------------------------
// CSV export: LF line endings, 17 significant digits.

// header: path_index,x1,...,xn
void write_endpoints_csv(const std::string& path, const Ensemble& ens);
// header: t,p_hat,stderr
void write_scaling_csv(const std::string& path, const ScalingFit& fit);

std::string format_g17(double v);

}  // namespace nilheat

#endif

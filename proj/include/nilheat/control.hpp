#ifndef NILHEAT_CONTROL_HPP
#define NILHEAT_CONTROL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nilheat/graded.hpp"
#include "nilheat/vector_field.hpp"

namespace nilheat {

enum class Verdict { Controllable, NotControllable, Undetermined };

std::string verdict_str(Verdict v);

// A control-affine system  x' = drift(x) + sum_i u_i * controlled[i](x),
// stated in coordinates where the equilibrium of interest is the origin.
struct PolySystem {
  VectorField drift;
  std::vector<VectorField> controlled;

  int n() const { return static_cast<int>(drift.comp.size()); }
  int k() const { return static_cast<int>(controlled.size()); }
};

struct TestResult {
  std::string name;
  Verdict verdict = Verdict::Undetermined;
  std::string detail;
};

// Driftless case: if the drift vanishes identically and the controlled
// fields are bracket-generating at the origin, the system is (small-time
// locally) controllable by the Chow-Rashevskii theorem.  Sound for
// Controllable; never reports NotControllable.
TestResult symmetric_test(const PolySystem& sys, int weight_cap, double rank_tol);

// Linear case: drift A*x with constant controlled fields b_i.  Exact rank of
// the controllability matrix [B AB ... A^{n-1}B] decides both ways.
TestResult kalman_test(const PolySystem& sys);

// Obstruction: a coordinate that no controlled field (and no control
// dependence) can influence, whose drift component is a sum of same-sign
// monomials in even powers, is monotone along every trajectory; the system
// cannot return from its strict side.  Sound for NotControllable.
TestResult monotone_obstruction_test(const PolySystem& sys);

// For dilation-homogeneous nilpotent systems only: if the controlled fields
// ALONE are bracket-generating at the origin, the weight-2 drift cannot
// obstruct small-time local controllability (after shrinking by the dilation
// the drift contribution is higher order along the returned trajectories).
// Sound for Controllable on such systems; never reports NotControllable.
TestResult bracket_span_test(const NilpotentSystem& ns, double rank_tol);

// ---------------------------------------------------------------------------
// Monte-Carlo reachability probe (informative, never used as a proof).

struct McConfig {
  uint64_t seed = 1;
  int rollouts = 4096;
  double bound = 5.0;       // admissible controls take values in [-bound, bound]
  int switches = 8;         // piecewise-constant segments per rollout
  double horizon = 1.0;
  double rk_abs_tol = 1e-9;
  double rk_rel_tol = 1e-9;
  bool parallel = true;
  std::vector<double> x0;   // start point; empty = origin
};

struct CoverageReport {
  double time_horizon = 0.0;
  int sample_count = 0;
  int kept = 0;              // rollouts whose endpoint stayed finite
  int discarded = 0;         // integration blow-ups
  int orthants_hit = 0;
  int orthants_total = 0;
  double direction_coverage = 0.0;  // fraction of orthants containing endpoints
  int sectors_hit = 0;              // finer bins: orthant x dominant coordinate
  int sectors_total = 0;
  double sector_coverage = 0.0;
  double min_scaled_radius = 0.0;   // dilation-scaled endpoint radius statistics
  double radius_q10 = 0.0;
  double radius_q50 = 0.0;
  double radius_q90 = 0.0;
  std::vector<uint32_t> hit_orthant_masks;  // bit j set = coordinate j negative
};

// Integrates `rollouts` trajectories from cfg.x0 under independent
// piecewise-constant controls and summarizes where the endpoints land,
// measured in dilation-scaled coordinates z_j = sign(y_j)|y_j|^(1/w_j)
// relative to the start point.
CoverageReport mc_reachability(const PolySystem& sys, const std::vector<int>& weights,
                               const McConfig& cfg);

// One sampled rollout with its control segments and a dense-ish time grid of
// states, so the trajectory itself can be inspected and rescaled.
struct ControlCurve {
  std::vector<double> times;                        // sample times, ascending
  std::vector<std::vector<double>> states;          // states.size() == times.size()
  std::vector<double> switch_times;                 // segment boundaries, size switches+1
  std::vector<std::vector<double>> segment_controls;  // per segment, size k
};

ControlCurve sample_rollout(const PolySystem& sys, const McConfig& cfg, uint64_t index,
                            int samples_per_segment = 16);

// Time/space rescaling that maps an admissible trajectory of a
// dilation-homogeneous system into an arbitrarily small dilation box:
// y~(t) = delta_eps(y(t / eps^2)), with controls u~(t) = u(t / eps^2) / eps.
ControlCurve rescale_admissible_curve(const ControlCurve& curve, double eps,
                                      const std::vector<int>& weights);

// Max over samples of |y'(t) - drift(y) - sum u_i f_i(y)| by central
// differences, skipping samples adjacent to control switches.  Used to check
// that a (rescaled) curve still solves the control system.
double max_ode_residual(const ControlCurve& curve, const PolySystem& sys);

// ---------------------------------------------------------------------------
// Classification of the pair (original system, nilpotent approximation).

enum class CaseLabel { KernelVanishes, FullScaling, DegenerateScaling, Undetermined };

std::string case_label_str(CaseLabel label);  // "case-i", "case-ii.1", ...

struct Classification {
  CaseLabel label = CaseLabel::Undetermined;
  Verdict original = Verdict::Undetermined;
  Verdict nilpotent = Verdict::Undetermined;
  std::vector<TestResult> original_tests;
  std::vector<TestResult> nilpotent_tests;
  bool hormander = false;
  std::string rationale;
};

// Runs every sound test on both systems and combines the verdicts:
//   case-i    : the original system is provably not controllable.
//   case-ii.1 : the approximation is provably controllable (which transfers
//               to the original system near the base point).
//   case-ii.2 : the approximation is provably not controllable while the
//               original satisfies the full-rank bracket condition and has
//               no proven obstruction.
//   undetermined otherwise.
Classification classify(const PolySystem& original_centered, const NilpotentSystem& ns,
                        bool hormander, int weight_cap, double rank_tol);

}  // namespace nilheat

#endif

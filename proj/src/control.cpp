#include "nilheat/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nilheat/errors.hpp"
#include "nilheat/filtration.hpp"
#include "nilheat/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nilheat {

std::string verdict_str(Verdict v) {
  switch (v) {
    case Verdict::Controllable:
      return "controllable";
    case Verdict::NotControllable:
      return "not-controllable";
    default:
      return "undetermined";
  }
}

std::string case_label_str(CaseLabel label) {
  switch (label) {
    case CaseLabel::KernelVanishes:
      return "case-i";
    case CaseLabel::FullScaling:
      return "case-ii.1";
    case CaseLabel::DegenerateScaling:
      return "case-ii.2";
    default:
      return "undetermined";
  }
}

TestResult symmetric_test(const PolySystem& sys, int weight_cap, double rank_tol) {
  TestResult r;
  r.name = "symmetric";
  if (!sys.drift.is_zero()) {
    r.detail = "drift is not identically zero";
    return r;
  }
  std::vector<VectorField> fields;
  fields.push_back(VectorField::zero(sys.n()));
  for (const auto& f : sys.controlled) fields.push_back(f);
  std::vector<Rational> origin(sys.n(), Rational(0));
  Filtration filt =
      compute_filtration(fields, origin, weight_cap, rank_tol, RankMode::Float, weight_cap);
  if (filt.full_rank()) {
    r.verdict = Verdict::Controllable;
    r.detail = "driftless and bracket-generating at the origin (Chow-Rashevskii)";
  } else {
    r.detail = "controlled fields span only " + std::to_string(filt.dims.back()) + " of " +
               std::to_string(sys.n()) + " directions up to weight " + std::to_string(weight_cap);
  }
  return r;
}

TestResult kalman_test(const PolySystem& sys) {
  TestResult r;
  r.name = "kalman";
  const int n = sys.n();
  const int k = sys.k();
  for (const auto& p : sys.drift.comp) {
    if (p.degree() > 1 || p.constant_term() != 0) {
      r.detail = "drift is not linear homogeneous";
      return r;
    }
  }
  for (const auto& f : sys.controlled) {
    for (const auto& p : f.comp) {
      if (p.degree() > 0) {
        r.detail = "a controlled field is not constant";
        return r;
      }
    }
  }
  if (k == 0) {
    r.detail = "no controlled fields";
    return r;
  }
  // A[j][l] = coefficient of x_{l+1} in drift component j, B columns from the
  // constant controlled fields; stack B, AB, ..., A^(n-1)B and take the rank.
  std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n, Rational(0)));
  for (int j = 0; j < n; ++j) {
    Monomial m(n, 0);
    for (int l = 0; l < n; ++l) {
      m[l] = 1;
      A[j][l] = sys.drift.comp[j].coeff(m);
      m[l] = 0;
    }
  }
  std::vector<std::vector<Rational>> cols;
  for (int i = 0; i < k; ++i) {
    std::vector<Rational> col(n);
    for (int j = 0; j < n; ++j) col[j] = sys.controlled[i].comp[j].constant_term();
    cols.push_back(col);
  }
  std::vector<std::vector<Rational>> all = cols;
  for (int p = 1; p < n; ++p) {
    for (auto& col : cols) {
      std::vector<Rational> next(n, Rational(0));
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) next[j] += A[j][l] * col[l];
      col = next;
      all.push_back(col);
    }
  }
  int rank = exact_rank(all);
  if (rank == n) {
    r.verdict = Verdict::Controllable;
    r.detail = "linear system, controllability matrix has full rank " + std::to_string(n);
  } else {
    r.verdict = Verdict::NotControllable;
    r.detail = "linear system, controllability matrix has rank " + std::to_string(rank) +
               " of " + std::to_string(n);
  }
  return r;
}

TestResult monotone_obstruction_test(const PolySystem& sys) {
  TestResult r;
  r.name = "monotone-obstruction";
  const int n = sys.n();
  for (int j = 0; j < n; ++j) {
    bool uninfluenced = true;
    for (const auto& f : sys.controlled)
      if (!f.comp[j].is_zero()) uninfluenced = false;
    if (!uninfluenced) continue;
    const Polynomial& d = sys.drift.comp[j];
    if (d.is_zero()) continue;
    bool monotone = true;
    int sign = 0;
    for (const auto& t : d.terms()) {
      for (uint32_t e : t.mono)
        if (e % 2 != 0) monotone = false;
      int s = t.coeff > 0 ? 1 : -1;
      if (sign == 0) sign = s;
      if (s != sign) monotone = false;
      if (!monotone) break;
    }
    if (monotone) {
      r.verdict = Verdict::NotControllable;
      r.detail = "coordinate " + std::to_string(j + 1) +
                 " is control-independent and its drift component is a " +
                 (sign > 0 ? std::string("nonnegative") : std::string("nonpositive")) +
                 " sum of even monomials, hence monotone along every trajectory";
      return r;
    }
  }
  r.detail = "no monotone coordinate obstruction found";
  return r;
}

TestResult bracket_span_test(const NilpotentSystem& ns, double rank_tol) {
  TestResult r;
  r.name = "bracket-span";
  std::vector<VectorField> fields;
  fields.push_back(VectorField::zero(ns.n));
  for (const auto& f : ns.controlled) fields.push_back(f);
  std::vector<Rational> origin(ns.n, Rational(0));
  // Brackets of dilation-weight > step vanish for a nilpotent graded system,
  // so enumerating up to the step is exhaustive.
  Filtration filt =
      compute_filtration(fields, origin, ns.step, rank_tol, RankMode::Float, ns.step);
  if (filt.full_rank()) {
    r.verdict = Verdict::Controllable;
    r.detail =
        "controlled fields alone are bracket-generating; for a dilation-homogeneous "
        "nilpotent system the weight-2 drift cannot obstruct small-time return";
  } else {
    r.detail = "controlled fields alone span only " + std::to_string(filt.dims.back()) +
               " of " + std::to_string(ns.n) + " directions";
  }
  return r;
}

// ---------------------------------------------------------------------------
// Rollout integration: Cash-Karp embedded RK4(5) with adaptive step size.

namespace {

// dy = drift(y) + sum_i u_i f_i(y)
void control_rhs(const PolySystem& sys, const double* u, const double* y, double* dy) {
  const int n = sys.n();
  sys.drift.evaluate_double(y, dy);
  std::vector<double> tmp(n);
  for (int i = 0; i < sys.k(); ++i) {
    sys.controlled[i].evaluate_double(y, tmp.data());
    for (int j = 0; j < n; ++j) dy[j] += u[i] * tmp[j];
  }
}

// Integrates y' = rhs(y) over [t0, t1] in place. Returns false on step
// underflow, step-count blowup, or non-finite state.
bool integrate_segment(const PolySystem& sys, const double* u, std::vector<double>& y,
                       double t0, double t1, double abs_tol, double rel_tol) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 3.0 / 10, a42 = -9.0 / 10, a43 = 6.0 / 5;
  static constexpr double a51 = -11.0 / 54, a52 = 5.0 / 2, a53 = -70.0 / 27, a54 = 35.0 / 27;
  static constexpr double a61 = 1631.0 / 55296, a62 = 175.0 / 512, a63 = 575.0 / 13824,
                          a64 = 44275.0 / 110592, a65 = 253.0 / 4096;
  static constexpr double b1 = 37.0 / 378, b3 = 250.0 / 621, b4 = 125.0 / 594,
                          b6 = 512.0 / 1771;
  static constexpr double d1 = 37.0 / 378 - 2825.0 / 27648, d3 = 250.0 / 621 - 18575.0 / 48384,
                          d4 = 125.0 / 594 - 13525.0 / 55296, d5 = -277.0 / 14336,
                          d6 = 512.0 / 1771 - 1.0 / 4;

  const int n = static_cast<int>(y.size());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), yt(n), ynew(n);
  double t = t0;
  double h = t1 - t0;
  int steps = 0;
  while (t < t1) {
    if (++steps > 100000) return false;
    if (t + h > t1) h = t1 - t;
    control_rhs(sys, u, y.data(), k1.data());
    for (int j = 0; j < n; ++j) yt[j] = y[j] + h * a21 * k1[j];
    control_rhs(sys, u, yt.data(), k2.data());
    for (int j = 0; j < n; ++j) yt[j] = y[j] + h * (a31 * k1[j] + a32 * k2[j]);
    control_rhs(sys, u, yt.data(), k3.data());
    for (int j = 0; j < n; ++j) yt[j] = y[j] + h * (a41 * k1[j] + a42 * k2[j] + a43 * k3[j]);
    control_rhs(sys, u, yt.data(), k4.data());
    for (int j = 0; j < n; ++j)
      yt[j] = y[j] + h * (a51 * k1[j] + a52 * k2[j] + a53 * k3[j] + a54 * k4[j]);
    control_rhs(sys, u, yt.data(), k5.data());
    for (int j = 0; j < n; ++j)
      yt[j] = y[j] + h * (a61 * k1[j] + a62 * k2[j] + a63 * k3[j] + a64 * k4[j] + a65 * k5[j]);
    control_rhs(sys, u, yt.data(), k6.data());

    double err = 0.0;
    for (int j = 0; j < n; ++j) {
      ynew[j] = y[j] + h * (b1 * k1[j] + b3 * k3[j] + b4 * k4[j] + b6 * k6[j]);
      double ej = h * (d1 * k1[j] + d3 * k3[j] + d4 * k4[j] + d5 * k5[j] + d6 * k6[j]);
      double sc = abs_tol + rel_tol * std::max(std::fabs(y[j]), std::fabs(ynew[j]));
      err = std::max(err, std::fabs(ej) / sc);
    }
    if (!std::isfinite(err)) return false;
    if (err <= 1.0) {
      t += h;
      y = ynew;
      for (double v : y)
        if (!std::isfinite(v)) return false;
    }
    double scale = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    scale = std::min(5.0, std::max(0.2, scale));
    h *= scale;
    if (h < 1e-14 * (t1 - t0)) return false;
  }
  return true;
}

struct RolloutResult {
  std::vector<double> endpoint;
  bool ok = false;
};

void draw_controls(RngStream& rng, const McConfig& cfg, int k, std::vector<double>& u) {
  u.resize(static_cast<size_t>(cfg.switches) * k);
  for (int s = 0; s < cfg.switches; ++s)
    for (int i = 0; i < k; ++i)
      u[static_cast<size_t>(s) * k + i] = rng.next_uniform(-cfg.bound, cfg.bound);
}

RolloutResult run_rollout(const PolySystem& sys, const McConfig& cfg, uint64_t index) {
  RolloutResult res;
  const int n = sys.n();
  const int k = sys.k();
  RngStream rng(cfg.seed, index);
  std::vector<double> u;
  draw_controls(rng, cfg, k, u);
  std::vector<double> y = cfg.x0.empty() ? std::vector<double>(n, 0.0) : cfg.x0;
  const double seg = cfg.horizon / cfg.switches;
  for (int s = 0; s < cfg.switches; ++s) {
    if (!integrate_segment(sys, u.data() + static_cast<size_t>(s) * k, y, s * seg,
                           (s + 1) * seg, cfg.rk_abs_tol, cfg.rk_rel_tol))
      return res;
  }
  res.endpoint = std::move(y);
  res.ok = true;
  return res;
}

double scaled_coordinate(double y, int w) {
  double a = std::pow(std::fabs(y), 1.0 / w);
  return y < 0 ? -a : a;
}

}  // namespace

CoverageReport mc_reachability(const PolySystem& sys, const std::vector<int>& weights,
                               const McConfig& cfg) {
  if (static_cast<int>(weights.size()) != sys.n())
    throw DomainError("mc_reachability: weights/dimension mismatch");
  const int n = sys.n();
  const int R = cfg.rollouts;
  std::vector<RolloutResult> results(R);

  bool parallel = cfg.parallel;
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < R; ++r) results[r] = run_rollout(sys, cfg, static_cast<uint64_t>(r));
  } else
#endif
  {
    (void)parallel;
    for (int r = 0; r < R; ++r) results[r] = run_rollout(sys, cfg, static_cast<uint64_t>(r));
  }

  CoverageReport rep;
  rep.time_horizon = cfg.horizon;
  rep.sample_count = R;
  const bool track_orthants = n <= 16;
  std::vector<char> orthant_seen(track_orthants ? (size_t{1} << n) : 0, 0);
  std::vector<char> sector_seen(track_orthants ? ((size_t{1} << n) * n) : 0, 0);
  std::vector<double> radii;
  radii.reserve(R);
  const std::vector<double> base = cfg.x0.empty() ? std::vector<double>(n, 0.0) : cfg.x0;
  for (int r = 0; r < R; ++r) {
    if (!results[r].ok) continue;
    ++rep.kept;
    double rad2 = 0.0;
    size_t orthant = 0;
    int dominant = 0;
    double dominant_abs = -1.0;
    for (int j = 0; j < n; ++j) {
      double z = scaled_coordinate(results[r].endpoint[j] - base[j], weights[j]);
      rad2 += z * z;
      if (std::fabs(z) > dominant_abs) {
        dominant_abs = std::fabs(z);
        dominant = j;
      }
      if (track_orthants && z < 0) orthant |= size_t{1} << j;
    }
    radii.push_back(std::sqrt(rad2));
    if (track_orthants) {
      orthant_seen[orthant] = 1;
      sector_seen[orthant * n + dominant] = 1;
    }
  }
  rep.discarded = R - rep.kept;
  if (track_orthants) {
    rep.orthants_total = 1 << n;
    for (size_t o = 0; o < orthant_seen.size(); ++o)
      if (orthant_seen[o]) rep.hit_orthant_masks.push_back(static_cast<uint32_t>(o));
    for (char c : orthant_seen) rep.orthants_hit += c;
    rep.direction_coverage = static_cast<double>(rep.orthants_hit) / rep.orthants_total;
    rep.sectors_total = rep.orthants_total * n;
    for (char c : sector_seen) rep.sectors_hit += c;
    rep.sector_coverage = static_cast<double>(rep.sectors_hit) / rep.sectors_total;
  }
  if (!radii.empty()) {
    std::sort(radii.begin(), radii.end());
    auto q = [&](double p) {
      size_t i = static_cast<size_t>(p * (radii.size() - 1));
      return radii[i];
    };
    rep.min_scaled_radius = radii.front();
    rep.radius_q10 = q(0.1);
    rep.radius_q50 = q(0.5);
    rep.radius_q90 = q(0.9);
  }
  return rep;
}

ControlCurve sample_rollout(const PolySystem& sys, const McConfig& cfg, uint64_t index,
                            int samples_per_segment) {
  const int n = sys.n();
  const int k = sys.k();
  RngStream rng(cfg.seed, index);
  std::vector<double> u;
  draw_controls(rng, cfg, k, u);

  ControlCurve curve;
  const double seg = cfg.horizon / cfg.switches;
  std::vector<double> y = cfg.x0.empty() ? std::vector<double>(n, 0.0) : cfg.x0;
  curve.times.push_back(0.0);
  curve.states.push_back(y);
  curve.switch_times.push_back(0.0);
  for (int s = 0; s < cfg.switches; ++s) {
    const double* us = u.data() + static_cast<size_t>(s) * k;
    curve.segment_controls.emplace_back(us, us + k);
    for (int q = 1; q <= samples_per_segment; ++q) {
      double t0 = s * seg + (q - 1) * seg / samples_per_segment;
      double t1 = s * seg + q * seg / samples_per_segment;
      if (!integrate_segment(sys, us, y, t0, t1, cfg.rk_abs_tol, cfg.rk_rel_tol))
        throw SimulationQuality("rollout integration failed for sampled trajectory");
      curve.times.push_back(t1);
      curve.states.push_back(y);
    }
    curve.switch_times.push_back((s + 1) * seg);
  }
  return curve;
}

ControlCurve rescale_admissible_curve(const ControlCurve& curve, double eps,
                                      const std::vector<int>& weights) {
  if (eps <= 0) throw DomainError("rescale_admissible_curve: eps must be positive");
  ControlCurve out;
  const double t_scale = eps * eps;
  out.times.reserve(curve.times.size());
  for (double t : curve.times) out.times.push_back(t_scale * t);
  for (double t : curve.switch_times) out.switch_times.push_back(t_scale * t);
  out.states.reserve(curve.states.size());
  for (const auto& y : curve.states) {
    std::vector<double> z(y.size());
    for (size_t j = 0; j < y.size(); ++j) z[j] = std::pow(eps, weights[j]) * y[j];
    out.states.push_back(std::move(z));
  }
  for (const auto& us : curve.segment_controls) {
    std::vector<double> v(us.size());
    for (size_t i = 0; i < us.size(); ++i) v[i] = us[i] / eps;
    out.segment_controls.push_back(std::move(v));
  }
  return out;
}

double max_ode_residual(const ControlCurve& curve, const PolySystem& sys) {
  const int n = sys.n();
  double worst = 0.0;
  std::vector<double> rhs(n);
  for (size_t i = 1; i + 1 < curve.times.size(); ++i) {
    // Locate the segment holding this sample; skip samples at or next to a
    // control switch, where the one-sided derivatives differ.
    int seg = -1;
    for (size_t s = 0; s + 1 < curve.switch_times.size(); ++s) {
      if (curve.times[i - 1] > curve.switch_times[s] &&
          curve.times[i + 1] < curve.switch_times[s + 1]) {
        seg = static_cast<int>(s);
        break;
      }
    }
    if (seg < 0) continue;
    control_rhs(sys, curve.segment_controls[seg].data(), curve.states[i].data(), rhs.data());
    double dt = curve.times[i + 1] - curve.times[i - 1];
    for (int j = 0; j < n; ++j) {
      double fd = (curve.states[i + 1][j] - curve.states[i - 1][j]) / dt;
      worst = std::max(worst, std::fabs(fd - rhs[j]));
    }
  }
  return worst;
}

namespace {

Verdict aggregate(const std::vector<TestResult>& tests) {
  bool pos = false, neg = false;
  for (const auto& t : tests) {
    if (t.verdict == Verdict::Controllable) pos = true;
    if (t.verdict == Verdict::NotControllable) neg = true;
  }
  if (pos && neg)
    throw DomainError("contradictory sound controllability verdicts; this is a bug");
  if (neg) return Verdict::NotControllable;
  if (pos) return Verdict::Controllable;
  return Verdict::Undetermined;
}

}  // namespace

Classification classify(const PolySystem& original_centered, const NilpotentSystem& ns,
                        bool hormander, int weight_cap, double rank_tol) {
  Classification c;
  c.hormander = hormander;

  c.original_tests.push_back(symmetric_test(original_centered, weight_cap, rank_tol));
  c.original_tests.push_back(kalman_test(original_centered));
  c.original_tests.push_back(monotone_obstruction_test(original_centered));
  c.original = aggregate(c.original_tests);

  PolySystem napprox{ns.drift, ns.controlled};
  c.nilpotent_tests.push_back(symmetric_test(napprox, ns.step, rank_tol));
  c.nilpotent_tests.push_back(kalman_test(napprox));
  c.nilpotent_tests.push_back(monotone_obstruction_test(napprox));
  c.nilpotent_tests.push_back(bracket_span_test(ns, rank_tol));
  c.nilpotent = aggregate(c.nilpotent_tests);

  if (c.original == Verdict::NotControllable) {
    c.label = CaseLabel::KernelVanishes;
    c.rationale = "the original system has a proven controllability obstruction";
  } else if (c.nilpotent == Verdict::Controllable) {
    c.label = CaseLabel::FullScaling;
    c.rationale =
        "the nilpotent approximation is provably small-time locally controllable, "
        "which transfers to the original system near the base point";
  } else if (c.nilpotent == Verdict::NotControllable && hormander) {
    c.label = CaseLabel::DegenerateScaling;
    c.rationale =
        "the nilpotent approximation has a proven obstruction while the original "
        "system satisfies the full-rank bracket condition and has no proven "
        "obstruction" +
        std::string(c.original == Verdict::Controllable
                        ? " (and is provably controllable)"
                        : "; controllability of the original system is plausible but unproven");
  } else {
    c.label = CaseLabel::Undetermined;
    c.rationale = "no sound test decided either system";
  }
  return c;
}

}  // namespace nilheat

#include <doctest.h>

#include <cmath>
#include <vector>

#include "nilheat/chart.hpp"
#include "nilheat/control.hpp"
#include "nilheat/filtration.hpp"
#include "nilheat/graded.hpp"
#include "test_util.hpp"

using namespace nilheat;
using testutil::field;

namespace {

NilpotentSystem approx_of(const std::vector<VectorField>& fs, int cap = 8) {
  auto filt = compute_filtration(fs, testutil::origin(fs[0].n()), cap, 1e-10, RankMode::Float,
                                 2 * cap);
  auto chart = build_adapted_chart(fs, filt);
  return nilpotent_approximation(fs, chart, filt);
}

PolySystem sys_of(const std::vector<VectorField>& fs) {
  PolySystem s;
  s.drift = fs[0];
  s.controlled.assign(fs.begin() + 1, fs.end());
  return s;
}

PolySystem nilp_as_sys(const NilpotentSystem& ns) {
  PolySystem s;
  s.drift = ns.drift;
  s.controlled = ns.controlled;
  return s;
}

}  // namespace

TEST_SUITE("control") {

TEST_CASE("symmetric test: driftless bracket-generating systems pass") {
  auto r = symmetric_test(sys_of(testutil::heisenberg_fields()), 8, 1e-10);
  CHECK(r.verdict == Verdict::Controllable);
  // nonzero drift disables it
  auto r2 = symmetric_test(sys_of(testutil::planar_sine_fields()), 8, 1e-10);
  CHECK(r2.verdict == Verdict::Undetermined);
  // driftless but rank-deficient: never claims controllable
  auto r3 = symmetric_test(sys_of({field("0, 0", 2), field("1, 0", 2)}), 6, 1e-10);
  CHECK(r3.verdict == Verdict::Undetermined);
}

TEST_CASE("kalman test decides linear systems in both directions") {
  // chain of integrators: controllable
  auto r = kalman_test(sys_of({field("0, x1", 2), field("1, 0", 2)}));
  CHECK(r.verdict == Verdict::Controllable);
  // decoupled second coordinate: provably not controllable
  auto r2 = kalman_test(sys_of({field("x1, x2", 2), field("1, 0", 2)}));
  CHECK(r2.verdict == Verdict::NotControllable);
  // shape gate: nonlinear drift falls through
  auto r3 = kalman_test(sys_of(testutil::planar_sine_fields()));
  CHECK(r3.verdict == Verdict::Undetermined);
  // shape gate: non-constant controlled field falls through
  auto r4 = kalman_test(sys_of({field("0, x1", 2), field("1, x1", 2)}));
  CHECK(r4.verdict == Verdict::Undetermined);
}

TEST_CASE("kalman test against a directly built controllability matrix") {
  // 3x3 integer examples, verdict vs rank of [B AB A^2 B] assembled here
  struct Case {
    std::vector<std::vector<long>> A;
    std::vector<long> b;
  };
  std::vector<Case> cases = {
      {{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}, {0, 0, 1}},   // nilpotent chain: rank 3
      {{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}, {1, 1, 1}},   // distinct modes: rank 3
      {{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}, {1, 1, 0}},   // dead mode: rank 2
      {{{2, 0, 0}, {0, 2, 0}, {0, 0, 2}}, {1, 1, 1}},   // repeated eigenvalue: rank 1
  };
  for (auto& c : cases) {
    // assemble the system as fields
    std::vector<Polynomial> drift, ctrl;
    for (int i = 0; i < 3; ++i) {
      Polynomial row = Polynomial::zero(3);
      for (int j = 0; j < 3; ++j)
        row += Polynomial::variable(3, j + 1).scaled(Rational(c.A[i][j]));
      drift.push_back(row);
      ctrl.push_back(Polynomial::constant(3, Rational(c.b[i])));
    }
    PolySystem sys;
    sys.drift = VectorField(drift);
    sys.controlled = {VectorField(ctrl)};

    // independent construction of [B AB A^2B] with exact arithmetic
    std::vector<std::vector<Rational>> cols;
    std::vector<Rational> v(3);
    for (int i = 0; i < 3; ++i) v[i] = c.b[i];
    for (int p = 0; p < 3; ++p) {
      cols.push_back(v);
      std::vector<Rational> nv(3, Rational(0));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) nv[i] += Rational(c.A[i][j]) * v[j];
      v = nv;
    }
    int rank = exact_rank(cols);
    auto r = kalman_test(sys);
    CAPTURE(rank);
    CHECK(r.verdict == (rank == 3 ? Verdict::Controllable : Verdict::NotControllable));
  }
}

TEST_CASE("monotone obstruction fires exactly on one-sided uninfluenced coordinates") {
  // quadratic drift on an uninfluenced coordinate: obstruction
  auto r = monotone_obstruction_test(sys_of(testutil::planar_sine_model_fields()));
  CHECK(r.verdict == Verdict::NotControllable);
  // same with globally negative drift: still one-sided
  auto r2 = monotone_obstruction_test(sys_of({field("0, 0 - x1^2", 2), field("1, 0", 2)}));
  CHECK(r2.verdict == Verdict::NotControllable);
  // mixed signs: no claim
  auto r3 = monotone_obstruction_test(sys_of({field("0, x1^2 - x2^2", 2), field("1, 0", 2)}));
  CHECK(r3.verdict == Verdict::Undetermined);
  // odd power: no claim
  auto r4 = monotone_obstruction_test(sys_of({field("0, x1^3", 2), field("1, 0", 2)}));
  CHECK(r4.verdict == Verdict::Undetermined);
  // coordinate influenced by a control: no claim
  auto r5 = monotone_obstruction_test(sys_of({field("0, x1^2", 2), field("1, x1", 2)}));
  CHECK(r5.verdict == Verdict::Undetermined);
}

TEST_CASE("bracket-span test on homogeneous approximations") {
  // b = a + 1 member: controls alone generate, drift cannot obstruct
  auto ns = approx_of(testutil::two_input_family(2, 3), 6);
  CHECK(!ns.drift.is_zero());
  auto r = bracket_span_test(ns, 1e-10);
  CHECK(r.verdict == Verdict::Controllable);
  // quadratic model: single control spans one direction only
  auto ns2 = approx_of(testutil::planar_sine_model_fields());
  auto r2 = bracket_span_test(ns2, 1e-10);
  CHECK(r2.verdict == Verdict::Undetermined);
}

TEST_CASE("classification labels across the fixtures") {
  auto run = [](const std::vector<VectorField>& fs, int cap = 8) {
    auto filt = compute_filtration(fs, testutil::origin(fs[0].n()), cap, 1e-10,
                                   RankMode::Float, 2 * cap);
    auto chart = build_adapted_chart(fs, filt);
    auto ns = nilpotent_approximation(fs, chart, filt);
    return classify(sys_of(fs), ns, filt.full_rank(), cap, 1e-10);
  };

  auto heis = run(testutil::heisenberg_fields());
  CHECK(heis.label == CaseLabel::FullScaling);
  CHECK(case_label_str(heis.label) == "case-ii.1");
  CHECK(heis.nilpotent == Verdict::Controllable);

  auto sine_sys = run(testutil::planar_sine_fields());
  CHECK(sine_sys.label == CaseLabel::DegenerateScaling);
  CHECK(case_label_str(sine_sys.label) == "case-ii.2");
  CHECK(sine_sys.nilpotent == Verdict::NotControllable);
  CHECK(sine_sys.original == Verdict::Undetermined);
  CHECK(sine_sys.hormander);

  auto model = run(testutil::planar_sine_model_fields());
  CHECK(model.label == CaseLabel::KernelVanishes);
  CHECK(case_label_str(model.label) == "case-i");
  CHECK(model.original == Verdict::NotControllable);

  // family grid, pinned members
  for (int a = 1; a <= 4; ++a)
    for (int b = 1; b <= 4; ++b) {
      CAPTURE(a);
      CAPTURE(b);
      auto c = run(testutil::two_input_family(a, b), 6);
      if (b <= a + 1) CHECK(c.label == CaseLabel::FullScaling);
      if (b > a + 1 && a % 2 == 0) CHECK(c.label == CaseLabel::DegenerateScaling);
    }
}

TEST_CASE("reachability probe is deterministic and schedule-independent") {
  auto ns = approx_of(testutil::heisenberg_fields());
  McConfig cfg;
  cfg.rollouts = 256;
  auto sys = nilp_as_sys(ns);
  auto a = mc_reachability(sys, ns.weights, cfg);
  auto b = mc_reachability(sys, ns.weights, cfg);
  CHECK(a.kept == b.kept);
  CHECK(a.orthants_hit == b.orthants_hit);
  CHECK(a.radius_q50 == b.radius_q50);
  CHECK(a.hit_orthant_masks == b.hit_orthant_masks);
  cfg.parallel = false;
  auto c = mc_reachability(sys, ns.weights, cfg);
  CHECK(c.orthants_hit == a.orthants_hit);
  CHECK(c.radius_q50 == a.radius_q50);
  CHECK(c.hit_orthant_masks == a.hit_orthant_masks);
  // the step-2 system reaches every orthant even with few rollouts
  CHECK(a.orthants_total == 8);
  CHECK(a.orthants_hit == 8);
  CHECK(a.kept == 256);
  CHECK(a.min_scaled_radius > 0.0);
  CHECK(a.radius_q10 <= a.radius_q50);
  CHECK(a.radius_q50 <= a.radius_q90);
}

TEST_CASE("monotone coordinate never goes negative in the probe") {
  auto ns = approx_of(testutil::planar_sine_model_fields());
  McConfig cfg;
  cfg.rollouts = 512;
  auto rep = mc_reachability(nilp_as_sys(ns), ns.weights, cfg);
  CHECK(rep.kept == 512);
  for (uint32_t mask : rep.hit_orthant_masks) {
    // bit 1 = second coordinate negative; the drift is monotone upward
    CHECK((mask & 2u) == 0u);
  }
  CHECK(rep.orthants_hit <= 2);
}

TEST_CASE("sampled rollouts solve the control system; rescaling preserves that") {
  auto ns = approx_of(testutil::heisenberg_fields());
  auto sys = nilp_as_sys(ns);
  McConfig cfg;
  for (uint64_t idx : {0ull, 7ull}) {
    auto curve = sample_rollout(sys, cfg, idx, 32);
    REQUIRE(curve.times.size() == curve.states.size());
    REQUIRE(curve.segment_controls.size() + 1 == curve.switch_times.size());
    double res = max_ode_residual(curve, sys);
    CHECK(res < 1e-3);  // central-difference error, not solver error

    for (double eps : {0.5, 0.25, 2.0}) {
      auto scaled = rescale_admissible_curve(curve, eps, ns.weights);
      // time edges scale by eps^2, states by eps^{w_j}
      CHECK(scaled.times.back() == doctest::Approx(eps * eps * curve.times.back()));
      for (size_t s = 0; s < curve.states.size(); s += 11) {
        for (int j = 0; j < 3; ++j) {
          double want = std::pow(eps, ns.weights[j]) * curve.states[s][j];
          CHECK(scaled.states[s][j] == doctest::Approx(want).epsilon(1e-12));
        }
      }
      // drift absorbs eps^2 from the time change; controls pick up 1/eps
      CHECK(scaled.segment_controls[0][0] ==
            doctest::Approx(curve.segment_controls[0][0] / eps));
      // the rescaled curve still solves the system, to comparable accuracy
      double res2 = max_ode_residual(scaled, sys);
      CHECK(res2 <= 10.0 * res + 1e-12);
    }
  }
}

TEST_CASE("probe discards diverging rollouts instead of reporting junk") {
  // strongly superlinear uncontrolled growth: most rollouts blow up
  PolySystem sys;
  sys.drift = field("x1^3, 0", 2);
  sys.controlled = {field("0, 1", 2)};
  McConfig cfg;
  cfg.rollouts = 32;
  cfg.x0 = {3.0, 0.0};
  auto rep = mc_reachability(sys, {1, 1}, cfg);
  CHECK(rep.discarded > 0);
  CHECK(rep.kept + rep.discarded == 32);
}

}  // TEST_SUITE

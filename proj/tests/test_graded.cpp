#include <doctest.h>

#include <vector>

#include "nilheat/chart.hpp"
#include "nilheat/filtration.hpp"
#include "nilheat/graded.hpp"
#include "test_util.hpp"

using namespace nilheat;
using testutil::field;
using testutil::poly;

namespace {

NilpotentSystem approx_of(const std::vector<VectorField>& fs, int cap = 8) {
  auto filt = compute_filtration(fs, testutil::origin(fs[0].n()), cap, 1e-10, RankMode::Float,
                                 2 * cap);
  auto chart = build_adapted_chart(fs, filt);
  return nilpotent_approximation(fs, chart, filt);
}

}  // namespace

TEST_SUITE("graded") {

TEST_CASE("graded orders of functions and fields") {
  std::vector<int> w = {1, 4};
  CHECK(graded_order(poly("x1^3 + x2", 2), w) == 3);
  CHECK(graded_order(poly("x2^2", 2), w) == 8);
  CHECK(graded_order(poly("5", 2), w) == 0);
  CHECK(!graded_order(Polynomial::zero(2), w).has_value());

  // x1^2 d/dx2 has weight 4 - 2 = 2; d/dx1 has weight 1
  CHECK(field_graded_order(field("0, x1^2", 2), w) == 2);
  CHECK(field_graded_order(field("1, 0", 2), w) == 1);
  CHECK(field_graded_order(field("1, x1^2", 2), w) == 2);
  CHECK(!field_graded_order(VectorField::zero(2), w).has_value());
}

TEST_CASE("dilation pushforward scales homogeneous terms by their weight") {
  std::vector<int> w = {1, 4};
  Rational eps(1, 3);
  // weight-2 term scales by eps^2
  auto v = field("0, x1^2", 2);
  auto dv = dilate_pushforward(v, eps, w);
  CHECK(dv == v.scaled(eps * eps));
  // a mixed field splits across weights: d/dx1 (weight 1) + x2 d/dx1
  // (weight 1 - 4 = -3)
  auto m = field("1 + x2, 0", 2);
  auto dm = dilate_pushforward(m, eps, w);
  CHECK(dm.comp[0].coeff({0, 0}) == eps);
  CHECK(dm.comp[0].coeff({0, 1}) == rat_pow(eps, -3));
  // pushforward composes: delta_a after delta_b = delta_ab
  auto two_step = dilate_pushforward(dilate_pushforward(m, Rational(2), w), Rational(3), w);
  CHECK(two_step == dilate_pushforward(m, Rational(6), w));
}

TEST_CASE("graded_component partitions a field") {
  std::vector<int> w = {1, 2};
  auto v = field("1 + x2, x1 + x1^2 + x1*x2", 2);
  VectorField sum = VectorField::zero(2);
  for (long t = -4; t <= 2; ++t) {
    auto part = graded_component(v, t, w);
    if (!part.is_zero()) CHECK(field_graded_order(part, w) == t);
    sum = sum + part;
  }
  CHECK(sum == v);
}

TEST_CASE("approximation keeps exactly the principal graded parts") {
  auto fs = testutil::planar_sine_fields();
  auto ns = approx_of(fs);
  CHECK(ns.n == 2);
  CHECK(ns.k == 1);
  CHECK(ns.step == 4);
  CHECK(ns.weights == std::vector<int>{1, 4});
  CHECK(ns.homogeneity_order == 5);
  // principal parts in this chart: drift (1/2) y1^2 d/dy2, control d/dy1
  CHECK(ns.drift == field("0, 1/2*x1^2", 2));
  REQUIRE(ns.controlled.size() == 1);
  CHECK(ns.controlled[0] == field("1, 0", 2));
  CHECK(field_graded_order(ns.drift, ns.weights) == 2);
  CHECK(field_graded_order(ns.controlled[0], ns.weights) == 1);
}

TEST_CASE("degenerate family member loses its second control entirely") {
  auto fs = testutil::two_input_family(2, 4);  // b > a + 1
  auto ns = approx_of(fs, 6);
  REQUIRE(ns.controlled.size() == 2);
  CHECK(!ns.drift.is_zero());
  CHECK(ns.controlled[1].is_zero());
}

TEST_CASE("homogeneity holds for constructed approximations and not for fakes") {
  for (auto& fs : {testutil::heisenberg_fields(), testutil::planar_sine_fields(),
                   testutil::two_input_family(3, 2)}) {
    auto ns = approx_of(fs);
    for (auto eps : {Rational(1, 2), Rational(1, 3), Rational(2), Rational(-1)}) {
      CAPTURE(rat_str(eps));
      CHECK(check_homogeneity(ns, eps));
    }
  }
  // perturb a drift with an off-weight term: homogeneity must fail
  auto ns = approx_of(testutil::planar_sine_fields());
  ns.drift = ns.drift + field("0, x1^3", 2).scaled(Rational(1, 7));
  CHECK(!check_homogeneity(ns, Rational(1, 2)));
}

TEST_CASE("triangularity") {
  std::vector<int> w = {1, 2};
  CHECK(is_triangular(field("0, x1^2", 2), w));
  CHECK(is_triangular(field("1, 0", 2), w));
  CHECK(!is_triangular(field("x2, 0", 2), w));   // higher weight feeds lower
  CHECK(!is_triangular(field("0, x2", 2), w));   // same coordinate reappears
}

TEST_CASE("nilpotency of constructed approximations; failure for a fake") {
  for (auto& fs : {testutil::heisenberg_fields(), testutil::planar_sine_fields(),
                   testutil::two_input_family(2, 4)}) {
    auto ns = approx_of(fs);
    CHECK(check_nilpotency(ns));
  }
  // hand-built system whose brackets never die
  NilpotentSystem fake;
  fake.n = 2;
  fake.k = 2;
  fake.step = 1;
  fake.homogeneity_order = 2;
  fake.weights = {1, 1};
  fake.drift = field("x1*x2, 0", 2);
  fake.controlled = {field("1, 0", 2), field("0, 1", 2)};
  CHECK(!check_nilpotency(fake));
}

TEST_CASE("layer dimensions of the transformed fields match the approximation") {
  for (auto& fs : {testutil::heisenberg_fields(), testutil::planar_sine_fields(),
                   testutil::two_input_family(2, 4), testutil::two_input_family(1, 1)}) {
    auto filt = compute_filtration(fs, testutil::origin(fs[0].n()), 8, 1e-10, RankMode::Float,
                                   16);
    auto chart = build_adapted_chart(fs, filt);
    auto ns = nilpotent_approximation(fs, chart, filt);
    std::vector<VectorField> transformed;
    for (auto& f : fs) transformed.push_back(transform_field(f, chart));
    auto rep = lie_algebra_equality_check(transformed, ns, filt.step,
                                          std::max(chart.trunc_deg, filt.step));
    CAPTURE(rep.detail);
    CHECK(rep.ok);
    CHECK(rep.dims_original == rep.dims_nilpotent);
    CHECK(rep.step_original == rep.step_nilpotent);
  }
}

TEST_CASE("volume-correction adjustment") {
  // divergence-free controlled fields leave the drift unchanged
  auto hs = testutil::heisenberg_fields();
  CHECK(divergence_drift_adjust(hs) == hs[0]);
  // f1 = x1 d/dx1 has divergence 1, so the drift gains (1/2) x1 d/dx1
  std::vector<VectorField> fs = {field("0", 1), field("x1", 1)};
  auto adj = divergence_drift_adjust(fs);
  CHECK(adj == field("1/2*x1", 1));
}

TEST_CASE("diagonal rescaling equivalence is found when it exists") {
  auto ns = approx_of(testutil::planar_sine_fields());

  // oracle form of the same system: drift y1^2 d/dy2, control d/dy1
  NilpotentSystem target = ns;
  target.drift = field("0, x1^2", 2);
  target.controlled = {field("1, 0", 2)};

  auto s = diagonal_scaling_match(ns, target);
  REQUIRE(s.has_value());
  REQUIRE(s->size() == 2);
  CHECK((*s)[0] == Rational(1));
  CHECK((*s)[1] == Rational(2));  // y2 carries the factor-2 normalization

  // self-match is the identity scaling
  auto id = diagonal_scaling_match(ns, ns);
  REQUIRE(id.has_value());
  CHECK((*id)[0] == Rational(1));
  CHECK((*id)[1] == Rational(1));

  // no diagonal scaling maps y1^2 d/dy2 onto y1^3 d/dy2
  NilpotentSystem other = target;
  other.drift = field("0, x1^3", 2);
  CHECK(!diagonal_scaling_match(target, other).has_value());
}

}  // TEST_SUITE

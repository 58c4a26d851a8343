#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "nilheat/bracket.hpp"
#include "nilheat/filtration.hpp"
#include "nilheat/vector_field.hpp"
#include "test_util.hpp"

using namespace nilheat;
using testutil::field;
using testutil::poly;

TEST_SUITE("fields") {

TEST_CASE("apply is a derivation") {
  auto v = field("x2, 1 - x1^2", 2);
  auto f = poly("x1*x2 - 3", 2);
  auto g = poly("x2^2 + x1", 2);
  CHECK(v.apply(f * g) == v.apply(f) * g + f * v.apply(g));
  CHECK(v.apply(f + g) == v.apply(f) + v.apply(g));
  CHECK(v.apply(Polynomial::constant(2, Rational(5))).is_zero());
  // explicit: (x2 d1 + (1 - x1^2) d2)(x1*x2) = x2^2 + x1 - x1^3
  CHECK(v.apply(poly("x1*x2", 2)) == poly("x2^2 + x1 - x1^3", 2));
}

TEST_CASE("evaluate and evaluate_double agree") {
  auto v = field("1/2*x1^2 - x2, x1*x2", 2);
  std::vector<Rational> xr = {Rational(3, 4), Rational(-2)};
  std::vector<double> xd = {0.75, -2.0};
  auto er = v.evaluate(xr);
  double ed[2];
  v.evaluate_double(xd.data(), ed);
  for (int j = 0; j < 2; ++j) CHECK(ed[j] == doctest::Approx(to_double(er[j])).epsilon(1e-15));
}

TEST_CASE("lie_bracket: antisymmetry, bilinearity, Jacobi") {
  auto u = field("x2, x1^2", 2);
  auto v = field("1, x1*x2", 2);
  auto w = field("x1 - x2^2, 0", 2);

  auto zero = VectorField::zero(2);
  CHECK(lie_bracket(u, u) == zero);
  CHECK(lie_bracket(u, v) + lie_bracket(v, u) == zero);
  CHECK(lie_bracket(u + v, w) == lie_bracket(u, w) + lie_bracket(v, w));
  CHECK(lie_bracket(u.scaled(Rational(3, 2)), v) == lie_bracket(u, v).scaled(Rational(3, 2)));

  auto jacobi = lie_bracket(u, lie_bracket(v, w)) + lie_bracket(v, lie_bracket(w, u)) +
                lie_bracket(w, lie_bracket(u, v));
  CHECK(jacobi == zero);
}

TEST_CASE("bracket of the step-2 generators fills the third direction") {
  auto fs = testutil::heisenberg_fields();
  auto b = lie_bracket(fs[1], fs[2]);
  CHECK(b == field("0, 0, 1", 3));
}

TEST_CASE("divergence") {
  CHECK(divergence(field("x1, x2", 2)) == Polynomial::constant(2, Rational(2)));
  CHECK(divergence(field("x2, 0 - x1", 2)).is_zero());
  CHECK(divergence(field("1/2*x1^2, x1*x2", 2)) == poly("2*x1", 2));
}

TEST_CASE("apply_word_at_zero matches the direct computation") {
  auto fs = testutil::planar_sine_fields();
  auto x2 = Polynomial::variable(2, 2);
  // f1 f1 x2 = f1(x1) = 1 at every point, in particular at 0
  CHECK(apply_word_at_zero({&fs[1], &fs[1]}, x2) == Rational(1));
  // f1 x2 = x1 vanishes at 0
  CHECK(apply_word_at_zero({&fs[1]}, x2) == Rational(0));
  // direct full-polynomial computation as the oracle
  auto direct = fs[1].apply(fs[0].apply(fs[1].apply(x2)));
  CHECK(apply_word_at_zero({&fs[1], &fs[0], &fs[1]}, x2) == direct.constant_term());
}

TEST_CASE("shifted recenters the field") {
  auto v = field("x1*x2, x2^2 - 1", 2);
  std::vector<Rational> a = {Rational(1), Rational(-1, 2)};
  auto s = v.shifted(a);
  std::vector<Rational> u = {Rational(2, 3), Rational(4)};
  std::vector<Rational> x = {u[0] + a[0], u[1] + a[1]};
  auto su = s.evaluate(u);
  auto vx = v.evaluate(x);
  CHECK(su == vx);
}

TEST_CASE("bracket trees: weight, string form, evaluation") {
  auto x0 = Bracket::make_leaf(0);
  auto x1 = Bracket::make_leaf(1);
  auto x2 = Bracket::make_leaf(2);
  auto inner = Bracket::make_node(x1, x2);
  auto tree = Bracket::make_node(x0, inner);
  CHECK(bracket_weight(tree) == 4);  // drift counts double
  CHECK(bracket_str(tree) == "[X0,[X1,X2]]");
  auto lens = bracket_lengths(tree, 2);
  CHECK(lens == std::vector<int>{1, 1, 1});

  auto fs = testutil::heisenberg_fields();
  auto val = evaluate_bracket(tree, fs);
  CHECK(val == lie_bracket(fs[0], lie_bracket(fs[1], fs[2])));
}

TEST_CASE("enumeration is deterministic and weight-sorted") {
  auto en = enumerate_brackets(2, 5);
  REQUIRE(!en.empty());
  for (size_t i = 1; i < en.size(); ++i) CHECK(en[i - 1].weight <= en[i].weight);
  for (auto& wb : en) {
    CHECK(wb.weight == bracket_weight(wb.tree));
    CHECK(wb.weight <= 5);
  }
  // single letters come first
  CHECK(en[0].word.size() == 1);
  // repeated calls agree
  auto en2 = enumerate_brackets(2, 5);
  REQUIRE(en2.size() == en.size());
  for (size_t i = 0; i < en.size(); ++i) CHECK(bracket_str(en2[i].tree) == bracket_str(en[i].tree));
}

// The layer-span oracle: evaluating the enumerated family at a point must
// span, weight by weight, the same spaces as evaluating every bracket tree.
static void check_span_against_all_trees(const std::vector<VectorField>& fs, int cap,
                                         const std::vector<Rational>& x) {
  int k = static_cast<int>(fs.size()) - 1;
  auto lyndon = enumerate_brackets(k, cap);
  auto all = enumerate_all_trees(k, cap);
  for (int w = 1; w <= cap; ++w) {
    std::vector<std::vector<Rational>> a, b;
    for (auto& wb : lyndon)
      if (wb.weight <= w) a.push_back(evaluate_bracket(wb.tree, fs).evaluate(x));
    for (auto& wb : all)
      if (wb.weight <= w) b.push_back(evaluate_bracket(wb.tree, fs).evaluate(x));
    CAPTURE(w);
    CHECK(exact_rank(a) == exact_rank(b));
  }
}

TEST_CASE("enumerated family spans every layer spanned by arbitrary trees") {
  check_span_against_all_trees(testutil::heisenberg_fields(), 4, testutil::origin(3));
  check_span_against_all_trees(testutil::planar_sine_fields(), 5, testutil::origin(2));
  check_span_against_all_trees(testutil::two_input_family(1, 2), 5, testutil::origin(2));
  // off-origin point as well
  check_span_against_all_trees(testutil::heisenberg_fields(), 4,
                               {Rational(1), Rational(-1, 2), Rational(2)});
}

}  // TEST_SUITE

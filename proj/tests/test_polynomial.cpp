#include <doctest.h>

#include "nilheat/polynomial.hpp"
#include "nilheat/parser.hpp"
#include "test_util.hpp"

using namespace nilheat;
using testutil::poly;

TEST_SUITE("polynomial") {

TEST_CASE("constructors and canonical form") {
  auto z = Polynomial::zero(2);
  CHECK(z.is_zero());
  CHECK(z.degree() == -1);

  auto c = Polynomial::constant(2, Rational(3, 4));
  CHECK(c.degree() == 0);
  CHECK(c.constant_term() == Rational(3, 4));

  auto x1 = Polynomial::variable(2, 1);
  auto x2 = Polynomial::variable(2, 2);
  CHECK(x1.degree() == 1);
  CHECK(x1 != x2);

  // cancellation collapses to the canonical zero
  auto p = x1 * x2 + c;
  auto q = p - p;
  CHECK(q.is_zero());
  CHECK(q == Polynomial::zero(2));
}

TEST_CASE("ring identities on concrete polynomials") {
  auto a = poly("1 + x1*x2 - 2*x2^3", 2);
  auto b = poly("x1^2 - 1/3*x2", 2);
  auto c = poly("5 - x1", 2);

  CHECK(a + b == b + a);
  CHECK(a * b == b * a);
  CHECK((a + b) * c == a * c + b * c);
  CHECK((a - b) + b == a);
  CHECK(a * (b * c) == (a * b) * c);
  CHECK(-a == Polynomial::zero(2) - a);
}

TEST_CASE("coeff lookup") {
  auto p = poly("3*x1^2*x2 - 1/2", 2);
  CHECK(p.coeff({2, 1}) == Rational(3));
  CHECK(p.coeff({0, 0}) == Rational(-1, 2));
  CHECK(p.coeff({1, 1}) == Rational(0));
}

TEST_CASE("derivative is linear and satisfies the product rule") {
  auto a = poly("x1^3*x2 - 2*x2^2 + 7", 2);
  auto b = poly("1 - x1 + x1*x2^4", 2);
  for (int j = 1; j <= 2; ++j) {
    CHECK((a * b).derivative(j) == a.derivative(j) * b + a * b.derivative(j));
    CHECK((a + b).derivative(j) == a.derivative(j) + b.derivative(j));
  }
  CHECK(poly("x1^4", 2).derivative(1) == poly("4*x1^3", 2));
  CHECK(poly("x1^4", 2).derivative(2).is_zero());
}

TEST_CASE("pow matches repeated multiplication and honors the cap") {
  auto p = poly("1 + x1 + x2^2", 2);
  auto m = Polynomial::constant(2, Rational(1));
  for (unsigned e = 0; e <= 5; ++e) {
    CHECK(p.pow(e) == m);
    m = m * p;
  }
  CHECK(p.pow(4, 3) == (p * p * p * p).truncated(3));
}

TEST_CASE("truncated drops exactly the high-degree terms and is idempotent") {
  auto p = poly("1 + x1 + x1*x2 + x1^2*x2 + x2^5", 2);
  auto t = p.truncated(2);
  CHECK(t == poly("1 + x1 + x1*x2", 2));
  CHECK(t.truncated(2) == t);
  CHECK(p.truncated(-1) == p);
  CHECK(p.truncated(0) == Polynomial::constant(2, Rational(1)));
}

TEST_CASE("weighted_part partitions the polynomial") {
  std::vector<int> w = {1, 4};
  auto p = poly("x1 + x1^2 - 3*x2 + x1*x2 + 1/2*x2^2", 2);
  // weighted degrees present: 1, 2, 4, 5, 8
  Polynomial sum = Polynomial::zero(2);
  for (long d = 0; d <= 8; ++d) sum += p.weighted_part(w, d);
  CHECK(sum == p);
  CHECK(p.weighted_part(w, 4) == poly("0 - 3*x2", 2));
  CHECK(p.weighted_part(w, 5) == poly("x1*x2", 2));
  CHECK(p.weighted_part(w, 3).is_zero());
}

TEST_CASE("substituted equals composition at rational points") {
  auto p = poly("x1^2*x2 - x2 + 2", 2);
  std::vector<Polynomial> subs = {poly("x1 - x2^2", 2), poly("1/3*x1*x2", 2)};
  auto q = p.substituted(subs);
  std::vector<Rational> pt = {Rational(2, 3), Rational(-5, 7)};
  std::vector<Rational> inner = {subs[0].evaluate(pt), subs[1].evaluate(pt)};
  CHECK(q.evaluate(pt) == p.evaluate(inner));

  // capped substitution agrees with the exact one truncated
  CHECK(p.substituted(subs, 3) == q.truncated(3));
}

TEST_CASE("shifted recenters exactly") {
  auto p = poly("x1^3 - x1*x2 + 4", 2);
  std::vector<Rational> a = {Rational(1, 2), Rational(-2)};
  auto s = p.shifted(a);
  std::vector<Rational> u = {Rational(3), Rational(1, 5)};
  std::vector<Rational> x = {u[0] + a[0], u[1] + a[1]};
  CHECK(s.evaluate(u) == p.evaluate(x));
  CHECK(s.shifted({-a[0], -a[1]}) == p);
}

TEST_CASE("evaluate_double tracks the exact value") {
  auto p = poly("1/3*x1^2 - x2 + 7/2", 2);
  std::vector<double> xd = {0.25, -1.5};
  std::vector<Rational> xr = {Rational(1, 4), Rational(-3, 2)};
  CHECK(p.evaluate_double(xd) == doctest::Approx(to_double(p.evaluate(xr))).epsilon(1e-15));
}

TEST_CASE("str round-trips through the parser") {
  const char* cases[] = {"0", "1", "0 - 1", "x1", "3/4*x1^2*x2 - x2^5 + 1/7",
                         "x1*x2*x1", "2 - x1 + x1 - 1"};
  for (const char* c : cases) {
    auto p = poly(c, 2);
    CHECK(poly(p.str(), 2) == p);
  }
}

TEST_CASE("grlex ordering: total degree first, then lexicographic") {
  CHECK(grlex_cmp({1, 0}, {0, 1}) > 0);   // same degree, x1 heavier
  CHECK(grlex_cmp({0, 2}, {1, 0}) > 0);   // higher total degree wins
  CHECK(grlex_cmp({1, 1}, {1, 1}) == 0);
  CHECK(total_degree({2, 3}) == 5);
  CHECK(weighted_degree({2, 3}, {1, 4}) == 14);
}

}  // TEST_SUITE

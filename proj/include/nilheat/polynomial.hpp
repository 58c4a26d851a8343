#ifndef NILHEAT_POLYNOMIAL_HPP
#define NILHEAT_POLYNOMIAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nilheat/rational.hpp"

namespace nilheat {

// Exponent vector of a monomial x1^e1 * ... * xn^en.
using Monomial = std::vector<uint32_t>;

int total_degree(const Monomial& m);
// Weighted degree sum(e_j * w_j) for coordinate weights w.
long weighted_degree(const Monomial& m, const std::vector<int>& w);

// Graded lexicographic comparison: first by total degree, ties broken
// lexicographically with x1 heaviest. Returns <0, 0, >0.
int grlex_cmp(const Monomial& a, const Monomial& b);

struct Term {
  Monomial mono;
  Rational coeff;
};

// Multivariate polynomial with exact rational coefficients over variables
// x1..xn. Terms are kept canonical: sorted descending in graded-lex order,
// no zero coefficients, all exponent vectors of length nvars.
class Polynomial {
 public:
  Polynomial() : nvars_(0) {}
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial zero(int nvars) { return Polynomial(nvars); }
  static Polynomial constant(int nvars, const Rational& c);
  // x_{index} with 1-based index.
  static Polynomial variable(int nvars, int index);
  static Polynomial term(int nvars, const Monomial& m, const Rational& c);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  // Total degree; -1 for the zero polynomial.
  int degree() const;
  const std::vector<Term>& terms() const { return terms_; }
  Rational constant_term() const;
  // Coefficient of the (possibly absent) monomial m.
  Rational coeff(const Monomial& m) const;

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  bool operator==(const Polynomial& o) const;
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Polynomial scaled(const Rational& c) const;
  // this^e with the result truncated to total degree <= cap (cap < 0: no cap).
  Polynomial pow(unsigned e, int cap = -1) const;

  Polynomial derivative(int index) const;  // d/dx_{index}, 1-based
  // Drop terms of total degree > cap (cap < 0 keeps everything).
  Polynomial truncated(int cap) const;
  // Keep only terms whose weighted degree equals target.
  Polynomial weighted_part(const std::vector<int>& w, long target) const;
  // Substitute x_j -> subs[j-1]; intermediate and final results truncated to
  // total degree <= cap (cap < 0: exact). subs must have size nvars and all
  // entries share one variable count, which becomes the result's.
  Polynomial substituted(const std::vector<Polynomial>& subs, int cap = -1) const;
  // x -> x + a (exact recentering).
  Polynomial shifted(const std::vector<Rational>& a) const;

  Rational evaluate(const std::vector<Rational>& x) const;
  double evaluate_double(const std::vector<double>& x) const;

  // Canonical text form, parseable by parse_field_component.
  std::string str() const;

  // Internal: normalizes raw terms (sort + merge + drop zeros).
  static Polynomial from_terms(int nvars, std::vector<Term> terms);

 private:
  int nvars_;
  std::vector<Term> terms_;
};

}  // namespace nilheat

#endif

#ifndef NILHEAT_VECTOR_FIELD_HPP
#define NILHEAT_VECTOR_FIELD_HPP

#include <string>
#include <vector>

#include "nilheat/polynomial.hpp"

namespace nilheat {

// Polynomial vector field V = sum_j V^j d/dx_j on R^n; comp[j] is V^{j+1}.
struct VectorField {
  std::vector<Polynomial> comp;

  VectorField() = default;
  explicit VectorField(std::vector<Polynomial> c) : comp(std::move(c)) {}
  static VectorField zero(int n);

  int n() const { return static_cast<int>(comp.size()); }
  bool is_zero() const;

  // Directional derivative V(f) = sum_j V^j df/dx_j, truncated at cap if >= 0.
  Polynomial apply(const Polynomial& f, int cap = -1) const;

  std::vector<Rational> evaluate(const std::vector<Rational>& x) const;
  void evaluate_double(const double* x, double* out) const;

  VectorField operator+(const VectorField& o) const;
  VectorField operator-(const VectorField& o) const;
  VectorField scaled(const Rational& c) const;
  // Component-wise product with a scalar polynomial.
  VectorField scaled(const Polynomial& p, int cap = -1) const;
  VectorField truncated(int cap) const;
  // Recenter: returns the field in u-coordinates where x = a + u.
  VectorField shifted(const std::vector<Rational>& a) const;
  bool operator==(const VectorField& o) const { return comp == o.comp; }

  // "(p1, p2, ..., pn)"
  std::string str() const;
};

// Lie bracket [V,W]^j = V(W^j) - W(V^j), truncated at cap if >= 0.
VectorField lie_bracket(const VectorField& v, const VectorField& w, int cap = -1);

Polynomial divergence(const VectorField& v);

// Applies the differential-operator word Z_1 Z_2 ... Z_l to f and evaluates at
// x = 0, i.e. (Z_1 (Z_2 (... Z_l(f)))) (0). Exact: intermediates are truncated
// at the remaining derivation count, which cannot change the value at 0.
Rational apply_word_at_zero(const std::vector<const VectorField*>& word, const Polynomial& f);

}  // namespace nilheat

#endif

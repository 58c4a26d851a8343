#include "nilheat/vector_field.hpp"

#include <sstream>

#include "nilheat/errors.hpp"

namespace nilheat {

VectorField VectorField::zero(int n) {
  std::vector<Polynomial> c(n, Polynomial::zero(n));
  return VectorField(std::move(c));
}

bool VectorField::is_zero() const {
  for (const Polynomial& p : comp)
    if (!p.is_zero()) return false;
  return true;
}

Polynomial VectorField::apply(const Polynomial& f, int cap) const {
  Polynomial acc = Polynomial::zero(f.nvars());
  for (int j = 0; j < n(); ++j) {
    if (comp[j].is_zero()) continue;
    Polynomial d = f.derivative(j + 1);
    if (d.is_zero()) continue;
    acc += (comp[j] * d).truncated(cap);
  }
  return acc.truncated(cap);
}

std::vector<Rational> VectorField::evaluate(const std::vector<Rational>& x) const {
  std::vector<Rational> out;
  out.reserve(comp.size());
  for (const Polynomial& p : comp) out.push_back(p.evaluate(x));
  return out;
}

void VectorField::evaluate_double(const double* x, double* out) const {
  std::vector<double> xv(x, x + comp.size());
  for (size_t j = 0; j < comp.size(); ++j) out[j] = comp[j].evaluate_double(xv);
}

VectorField VectorField::operator+(const VectorField& o) const {
  VectorField r(*this);
  for (int j = 0; j < n(); ++j) r.comp[j] += o.comp[j];
  return r;
}

VectorField VectorField::operator-(const VectorField& o) const {
  VectorField r(*this);
  for (int j = 0; j < n(); ++j) r.comp[j] -= o.comp[j];
  return r;
}

VectorField VectorField::scaled(const Rational& c) const {
  VectorField r(*this);
  for (auto& p : r.comp) p = p.scaled(c);
  return r;
}

VectorField VectorField::scaled(const Polynomial& p, int cap) const {
  VectorField r(*this);
  for (auto& q : r.comp) q = (q * p).truncated(cap);
  return r;
}

VectorField VectorField::truncated(int cap) const {
  VectorField r(*this);
  for (auto& p : r.comp) p = p.truncated(cap);
  return r;
}

VectorField VectorField::shifted(const std::vector<Rational>& a) const {
  VectorField r(*this);
  for (auto& p : r.comp) p = p.shifted(a);
  return r;
}

std::string VectorField::str() const {
  std::ostringstream os;
  os << "(";
  for (int j = 0; j < n(); ++j) {
    if (j) os << ", ";
    os << comp[j].str();
  }
  os << ")";
  return os.str();
}

VectorField lie_bracket(const VectorField& v, const VectorField& w, int cap) {
  if (v.n() != w.n()) throw DomainError("lie_bracket: dimension mismatch");
  VectorField r = VectorField::zero(v.n());
  for (int j = 0; j < v.n(); ++j) r.comp[j] = v.apply(w.comp[j], cap) - w.apply(v.comp[j], cap);
  return r.truncated(cap);
}

Polynomial divergence(const VectorField& v) {
  Polynomial acc = Polynomial::zero(v.n());
  for (int j = 0; j < v.n(); ++j) acc += v.comp[j].derivative(j + 1);
  return acc;
}

Rational apply_word_at_zero(const std::vector<const VectorField*>& word, const Polynomial& f) {
  // Z_l acts first. A field application lowers a term's degree by at most 1,
  // so before applying word[s] (with s+1 applications still to go, this one
  // included) terms of degree > s+1 can never reach degree 0 and are dropped.
  Polynomial cur = f;
  for (size_t s = word.size(); s-- > 0;) {
    cur = cur.truncated(static_cast<int>(s) + 1);
    cur = word[s]->apply(cur);
  }
  return cur.constant_term();
}

}  // namespace nilheat

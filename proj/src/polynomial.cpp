#include "nilheat/polynomial.hpp"

#include <algorithm>
#include <sstream>

#include "nilheat/errors.hpp"

namespace nilheat {

Rational rat_pow(const Rational& q, long e) {
  if (e == 0) return Rational(1);
  if (q == 0) {
    if (e < 0) throw DomainError("rat_pow: zero base with negative exponent");
    return Rational(0);
  }
  Rational base = e < 0 ? Rational(1) / q : q;
  unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
  Rational acc(1);
  while (n) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

Rational rat_factorial(unsigned n) {
  Integer acc(1);
  for (unsigned i = 2; i <= n; ++i) acc *= i;
  return Rational(acc);
}

std::string rat_str(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

int total_degree(const Monomial& m) {
  int d = 0;
  for (uint32_t e : m) d += static_cast<int>(e);
  return d;
}

long weighted_degree(const Monomial& m, const std::vector<int>& w) {
  long d = 0;
  for (size_t j = 0; j < m.size(); ++j) d += static_cast<long>(m[j]) * w[j];
  return d;
}

int grlex_cmp(const Monomial& a, const Monomial& b) {
  int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db ? -1 : 1;
  for (size_t j = 0; j < a.size(); ++j) {
    if (a[j] != b[j]) return a[j] < b[j] ? -1 : 1;
  }
  return 0;
}

Polynomial Polynomial::from_terms(int nvars, std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& s, const Term& t) {
    return grlex_cmp(s.mono, t.mono) > 0;
  });
  Polynomial p(nvars);
  for (auto& t : terms) {
    if (t.coeff == 0) continue;
    if (!p.terms_.empty() && grlex_cmp(p.terms_.back().mono, t.mono) == 0) {
      p.terms_.back().coeff += t.coeff;
      if (p.terms_.back().coeff == 0) p.terms_.pop_back();
    } else {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial p(nvars);
  if (c != 0) p.terms_.push_back({Monomial(nvars, 0), c});
  return p;
}

Polynomial Polynomial::variable(int nvars, int index) {
  Monomial m(nvars, 0);
  m.at(index - 1) = 1;
  return term(nvars, m, Rational(1));
}

Polynomial Polynomial::term(int nvars, const Monomial& m, const Rational& c) {
  Polynomial p(nvars);
  if (c != 0) p.terms_.push_back({m, c});
  return p;
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  return total_degree(terms_.front().mono);
}

Rational Polynomial::constant_term() const {
  if (!terms_.empty() && total_degree(terms_.back().mono) == 0) return terms_.back().coeff;
  return Rational(0);
}

Rational Polynomial::coeff(const Monomial& m) const {
  for (const Term& t : terms_) {
    int c = grlex_cmp(t.mono, m);
    if (c == 0) return t.coeff;
    if (c < 0) break;
  }
  return Rational(0);
}

Polynomial Polynomial::operator-() const {
  Polynomial p(*this);
  for (auto& t : p.terms_) t.coeff = -t.coeff;
  return p;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  // Merge two canonically sorted term lists.
  Polynomial p(nvars_);
  size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() ||
        (i < terms_.size() && grlex_cmp(terms_[i].mono, o.terms_[j].mono) > 0)) {
      p.terms_.push_back(terms_[i++]);
    } else if (i == terms_.size() || grlex_cmp(terms_[i].mono, o.terms_[j].mono) < 0) {
      p.terms_.push_back(o.terms_[j++]);
    } else {
      Rational c = terms_[i].coeff + o.terms_[j].coeff;
      if (c != 0) p.terms_.push_back({terms_[i].mono, c});
      ++i, ++j;
    }
  }
  return p;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }
Polynomial& Polynomial::operator+=(const Polynomial& o) { return *this = *this + o; }
Polynomial& Polynomial::operator-=(const Polynomial& o) { return *this = *this - o; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  std::vector<Term> out;
  out.reserve(terms_.size() * o.terms_.size());
  for (const Term& s : terms_) {
    for (const Term& t : o.terms_) {
      Monomial m(nvars_);
      for (int j = 0; j < nvars_; ++j) m[j] = s.mono[j] + t.mono[j];
      out.push_back({std::move(m), s.coeff * t.coeff});
    }
  }
  return from_terms(nvars_, std::move(out));
}

bool Polynomial::operator==(const Polynomial& o) const {
  if (nvars_ != o.nvars_ || terms_.size() != o.terms_.size()) return false;
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (grlex_cmp(terms_[i].mono, o.terms_[i].mono) != 0) return false;
    if (terms_[i].coeff != o.terms_[i].coeff) return false;
  }
  return true;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  if (c == 0) return zero(nvars_);
  Polynomial p(*this);
  for (auto& t : p.terms_) t.coeff *= c;
  return p;
}

Polynomial Polynomial::pow(unsigned e, int cap) const {
  Polynomial acc = constant(nvars_, Rational(1));
  Polynomial base = cap >= 0 ? truncated(cap) : *this;
  while (e) {
    if (e & 1) {
      acc = acc * base;
      if (cap >= 0) acc = acc.truncated(cap);
    }
    e >>= 1;
    if (e) {
      base = base * base;
      if (cap >= 0) base = base.truncated(cap);
    }
  }
  return acc;
}

Polynomial Polynomial::derivative(int index) const {
  int j = index - 1;
  std::vector<Term> out;
  for (const Term& t : terms_) {
    if (t.mono[j] == 0) continue;
    Term d = t;
    d.coeff *= static_cast<int>(t.mono[j]);
    d.mono[j] -= 1;
    out.push_back(std::move(d));
  }
  return from_terms(nvars_, std::move(out));
}

Polynomial Polynomial::truncated(int cap) const {
  if (cap < 0) return *this;
  Polynomial p(nvars_);
  for (const Term& t : terms_) {
    if (total_degree(t.mono) <= cap) p.terms_.push_back(t);
  }
  return p;
}

Polynomial Polynomial::weighted_part(const std::vector<int>& w, long target) const {
  Polynomial p(nvars_);
  for (const Term& t : terms_) {
    if (weighted_degree(t.mono, w) == target) p.terms_.push_back(t);
  }
  return p;
}

Polynomial Polynomial::substituted(const std::vector<Polynomial>& subs, int cap) const {
  if (static_cast<int>(subs.size()) != nvars_)
    throw DomainError("substituted: wrong number of replacement polynomials");
  int out_nv = subs.empty() ? 0 : subs[0].nvars();
  // Memoize powers of each replacement polynomial.
  std::vector<std::vector<Polynomial>> pows(nvars_);
  for (int j = 0; j < nvars_; ++j) pows[j].push_back(constant(out_nv, Rational(1)));
  auto power = [&](int j, uint32_t e) -> const Polynomial& {
    while (pows[j].size() <= e) {
      Polynomial next = pows[j].back() * subs[j];
      if (cap >= 0) next = next.truncated(cap);
      pows[j].push_back(std::move(next));
    }
    return pows[j][e];
  };
  Polynomial acc = zero(out_nv);
  for (const Term& t : terms_) {
    Polynomial prod = constant(out_nv, t.coeff);
    for (int j = 0; j < nvars_ && !prod.is_zero(); ++j) {
      if (t.mono[j] == 0) continue;
      prod = prod * power(j, t.mono[j]);
      if (cap >= 0) prod = prod.truncated(cap);
    }
    acc += prod;
  }
  return acc;
}

Polynomial Polynomial::shifted(const std::vector<Rational>& a) const {
  std::vector<Polynomial> subs;
  subs.reserve(nvars_);
  for (int j = 0; j < nvars_; ++j)
    subs.push_back(variable(nvars_, j + 1) + constant(nvars_, a[j]));
  return substituted(subs, -1);
}

Rational Polynomial::evaluate(const std::vector<Rational>& x) const {
  Rational acc(0);
  for (const Term& t : terms_) {
    Rational v = t.coeff;
    for (int j = 0; j < nvars_; ++j)
      if (t.mono[j]) v *= rat_pow(x[j], t.mono[j]);
    acc += v;
  }
  return acc;
}

double Polynomial::evaluate_double(const std::vector<double>& x) const {
  double acc = 0;
  for (const Term& t : terms_) {
    double v = to_double(t.coeff);
    for (int j = 0; j < nvars_; ++j)
      for (uint32_t e = 0; e < t.mono[j]; ++e) v *= x[j];
    acc += v;
  }
  return acc;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const Term& t : terms_) {
    Rational c = t.coeff;
    bool neg = c < 0;
    if (first) {
      if (neg) os << "-";
      first = false;
    } else {
      os << (neg ? " - " : " + ");
    }
    if (neg) c = -c;
    bool has_vars = total_degree(t.mono) > 0;
    if (c != 1 || !has_vars) {
      os << rat_str(c);
      if (has_vars) os << "*";
    }
    bool first_var = true;
    for (int j = 0; j < nvars_; ++j) {
      if (t.mono[j] == 0) continue;
      if (!first_var) os << "*";
      first_var = false;
      os << "x" << (j + 1);
      if (t.mono[j] > 1) os << "^" << t.mono[j];
    }
  }
  return os.str();
}

}  // namespace nilheat

#include "nilheat/chart.hpp"

#include <algorithm>
#include <sstream>

#include "nilheat/errors.hpp"

namespace nilheat {

namespace {

using Matrix = std::vector<std::vector<Rational>>;

Matrix identity_matrix(int n) {
  Matrix m(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

Matrix invert_matrix(const Matrix& a) {
  int n = static_cast<int>(a.size());
  Matrix m = a;
  Matrix inv = identity_matrix(n);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) throw DomainError("invert_matrix: singular matrix");
    std::swap(m[pivot], m[col]);
    std::swap(inv[pivot], inv[col]);
    Rational p = m[col][col];
    for (int c = 0; c < n; ++c) {
      m[col][c] /= p;
      inv[col][c] /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Rational f = m[r][col];
      for (int c = 0; c < n; ++c) {
        m[r][c] -= f * m[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

// y = M u as substitution polynomials (per u-variable, in the y-variables).
std::vector<Polynomial> linear_substitution(const Matrix& m) {
  int n = static_cast<int>(m.size());
  std::vector<Polynomial> subs;
  subs.reserve(n);
  for (int j = 0; j < n; ++j) {
    Polynomial p = Polynomial::zero(n);
    for (int l = 0; l < n; ++l)
      if (m[j][l] != 0) p += Polynomial::variable(n, l + 1).scaled(m[j][l]);
    subs.push_back(std::move(p));
  }
  return subs;
}

// Pushforward of a (centered) field under the linear map u' = M u:
// g(u') = M f(M^{-1} u').
VectorField conjugate_linear(const VectorField& f, const Matrix& m, const Matrix& minv) {
  int n = f.n();
  std::vector<Polynomial> subs = linear_substitution(minv);
  VectorField g = VectorField::zero(n);
  for (int j = 0; j < n; ++j) {
    Polynomial fj = f.comp[j].substituted(subs, -1);
    for (int i = 0; i < n; ++i)
      if (m[i][j] != 0) g.comp[i] += fj.scaled(m[i][j]);
  }
  return g;
}

Matrix linear_part(const std::vector<Polynomial>& f) {
  int n = static_cast<int>(f.size());
  Matrix m(n, std::vector<Rational>(n, Rational(0)));
  for (int h = 0; h < n; ++h) {
    for (int l = 0; l < n; ++l) {
      Monomial mono(n, 0);
      mono[l] = 1;
      m[h][l] = f[h].coeff(mono);
    }
  }
  return m;
}

}  // namespace

std::vector<Polynomial> flow_compose(const std::vector<const VectorField*>& fields_in_order,
                                     int cap) {
  if (fields_in_order.empty()) throw DomainError("flow_compose: empty field list");
  const int n = fields_in_order[0]->n();
  // Current endpoint as polynomials in the flow times v1..vn; starts at 0, so
  // every component stays constant-term-free and total v-degree bounds hold.
  std::vector<Polynomial> point(n, Polynomial::zero(n));
  for (size_t i = 0; i < fields_in_order.size(); ++i) {
    const VectorField& y = *fields_in_order[i];
    // q[r][j] = Y^r applied to the coordinate function x_j, as a polynomial
    // in x; the flow is x_j(t) = sum_r t^r/r! q[r][j].
    std::vector<Polynomial> q(n);
    for (int j = 0; j < n; ++j) q[j] = Polynomial::variable(n, j + 1);
    std::vector<Polynomial> next(n, Polynomial::zero(n));
    Monomial tmono(n, 0);
    for (int r = 0; r <= cap; ++r) {
      bool all_zero = true;
      tmono[i] = static_cast<uint32_t>(r);
      Polynomial tpow = Polynomial::term(n, tmono, Rational(1) / rat_factorial(r));
      for (int j = 0; j < n; ++j) {
        if (q[j].is_zero()) continue;
        all_zero = false;
        // Substituting the (constant-free) current point can only raise the
        // v-degree, so q may be pre-truncated at cap - r.
        Polynomial contrib = q[j].truncated(cap - r).substituted(point, cap - r);
        next[j] += (tpow * contrib).truncated(cap);
      }
      if (all_zero) break;
      if (r < cap)
        for (int j = 0; j < n; ++j) q[j] = y.apply(q[j], cap);
    }
    point = std::move(next);
  }
  return point;
}

std::vector<Polynomial> invert_series(const std::vector<Polynomial>& f, int cap) {
  const int n = static_cast<int>(f.size());
  for (const auto& p : f)
    if (p.constant_term() != 0) throw DomainError("invert_series: map does not fix the origin");
  Matrix j = linear_part(f);
  Matrix jinv = invert_matrix(j);
  // Higher-order remainder R = F - J u.
  std::vector<Polynomial> rem(n, Polynomial::zero(n));
  for (int h = 0; h < n; ++h) {
    rem[h] = f[h];
    for (int l = 0; l < n; ++l)
      if (j[h][l] != 0) rem[h] -= Polynomial::variable(n, l + 1).scaled(j[h][l]);
  }
  // Fixed point iteration G <- Jinv (y - R(G)); each pass is exact to one
  // more total degree, so cap passes suffice.
  std::vector<Polynomial> g(n);
  for (int h = 0; h < n; ++h) {
    g[h] = Polynomial::zero(n);
    for (int l = 0; l < n; ++l)
      if (jinv[h][l] != 0) g[h] += Polynomial::variable(n, l + 1).scaled(jinv[h][l]);
  }
  for (int pass = 1; pass < cap; ++pass) {
    std::vector<Polynomial> next(n);
    for (int h = 0; h < n; ++h) {
      Polynomial acc = Polynomial::zero(n);
      for (int l = 0; l < n; ++l) {
        if (jinv[h][l] == 0) continue;
        Polynomial yl = Polynomial::variable(n, l + 1) - rem[l].substituted(g, cap);
        acc += yl.scaled(jinv[h][l]);
      }
      next[h] = acc.truncated(cap);
    }
    if (next == g) break;
    g = std::move(next);
  }
  // Self-check: F(G(y)) = y modulo degree > cap.
  for (int h = 0; h < n; ++h) {
    Polynomial check = f[h].substituted(g, cap);
    if (check != Polynomial::variable(n, h + 1))
      throw TruncationError("invert_series: truncated inverse failed the identity check");
  }
  return g;
}

std::vector<std::vector<int>> weighted_words(const std::vector<int>& gen_weights, int maxweight) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining) -> void {
    for (int g = 0; g < static_cast<int>(gen_weights.size()); ++g) {
      if (gen_weights[g] > remaining) continue;
      cur.push_back(g);
      out.push_back(cur);
      self(self, remaining - gen_weights[g]);
      cur.pop_back();
    }
  };
  rec(rec, maxweight);
  auto weight_of = [&](const std::vector<int>& w) {
    int s = 0;
    for (int g : w) s += gen_weights[g];
    return s;
  };
  std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    int wa = weight_of(a), wb = weight_of(b);
    if (wa != wb) return wa < wb;
    return a < b;
  });
  return out;
}

namespace {

// Applies the generator word (indices into gens) to phi and evaluates at 0.
Rational word_value(const std::vector<int>& word, const std::vector<const VectorField*>& gens,
                    const Polynomial& phi) {
  std::vector<const VectorField*> ptrs;
  ptrs.reserve(word.size());
  for (int g : word) ptrs.push_back(gens[g]);
  return apply_word_at_zero(ptrs, phi);
}

std::string word_description(const std::vector<int>& word, const Filtration& filt, int coordinate,
                             const Rational& value) {
  std::ostringstream os;
  for (int g : word) os << bracket_str(filt.generators[g].tree) << " ";
  os << "y" << coordinate << " at x0 = " << rat_str(value);
  return os.str();
}

}  // namespace

AdaptedChart build_adapted_chart(const std::vector<VectorField>& fields, const Filtration& filt,
                                 int trunc_deg) {
  if (!filt.full_rank())
    throw DomainError("build_adapted_chart: filtration is not full rank at the cap");
  if (static_cast<int>(fields.size()) != filt.k + 1 ||
      (filt.n > 0 && fields[0].n() != filt.n))
    throw DomainError("build_adapted_chart: fields do not match the filtration");
  const int n = filt.n;
  if (trunc_deg < 0) trunc_deg = filt.step + 2;

  // Columns of B are the basis bracket values; the linear chart u' = B^{-1} u
  // maps layer spans to coordinate spans and basis values to e_1..e_n.
  Matrix b(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r) b[r][i] = filt.basis[i].value[r];
  Matrix binv = invert_matrix(b);

  // Normalized basis and generator fields (pushforwards under u' = B^{-1} u).
  std::vector<VectorField> wfields;
  wfields.reserve(n);
  for (int i = 0; i < n; ++i) wfields.push_back(conjugate_linear(filt.basis[i].field, binv, b));
  std::vector<VectorField> gen_fields;
  std::vector<int> gen_weights;
  for (const auto& g : filt.generators) {
    gen_fields.push_back(conjugate_linear(g.field, binv, b));
    gen_weights.push_back(g.weight);
  }
  std::vector<const VectorField*> gen_ptrs;
  for (const auto& g : gen_fields) gen_ptrs.push_back(&g);

  // Per-coordinate correction in the normalized coordinates.
  std::vector<Polynomial> fwd_normalized(n);
  for (int h = 1; h <= n; ++h) {
    Polynomial coord = Polynomial::variable(n, h);
    int j = filt.weights[h - 1] - 1;
    bool needs_fix = false;
    if (j >= 1) {
      for (const auto& word : weighted_words(gen_weights, j)) {
        if (word_value(word, gen_ptrs, coord) != 0) {
          needs_fix = true;
          break;
        }
      }
    }
    if (!needs_fix) {
      fwd_normalized[h - 1] = coord;
      continue;
    }
    // Flow composition with W_h moved to the last (outermost) slot; the
    // corrected coordinate is the last component of the inverse series.
    std::vector<const VectorField*> order;
    for (int i = 1; i <= n; ++i)
      if (i != h) order.push_back(&wfields[i - 1]);
    order.push_back(&wfields[h - 1]);
    std::vector<Polynomial> phi = flow_compose(order, trunc_deg);
    std::vector<Polynomial> inv = invert_series(phi, trunc_deg);
    fwd_normalized[h - 1] = inv[n - 1];
  }

  AdaptedChart chart;
  chart.x0 = filt.x0;
  chart.weights = filt.weights;
  chart.trunc_deg = trunc_deg;
  // Fold the linear normalization in: F(u) = F_normalized(B^{-1} u).
  std::vector<Polynomial> binv_subs = linear_substitution(binv);
  chart.forward.reserve(n);
  for (int h = 0; h < n; ++h)
    chart.forward.push_back(fwd_normalized[h].substituted(binv_subs, trunc_deg));
  chart.inverse = invert_series(chart.forward, trunc_deg);
  return chart;
}

AdaptedChart identity_chart(const Filtration& filt, int trunc_deg) {
  AdaptedChart chart;
  chart.x0 = filt.x0;
  chart.weights = filt.weights;
  chart.trunc_deg = trunc_deg < 0 ? (filt.step > 0 ? filt.step + 2 : filt.cap + 2) : trunc_deg;
  for (int h = 1; h <= filt.n; ++h) {
    chart.forward.push_back(Polynomial::variable(filt.n, h));
    chart.inverse.push_back(Polynomial::variable(filt.n, h));
  }
  return chart;
}

ChartVerification verify_adapted(const Filtration& filt, const AdaptedChart& chart) {
  constexpr size_t kMaxWitnesses = 16;
  ChartVerification v;
  const int n = filt.n;

  // Round trip.
  for (int h = 0; h < n && v.roundtrip_ok; ++h) {
    Polynomial fg = chart.forward[h].substituted(chart.inverse, chart.trunc_deg);
    Polynomial gf = chart.inverse[h].substituted(chart.forward, chart.trunc_deg);
    if (fg != Polynomial::variable(n, h + 1) || gf != Polynomial::variable(n, h + 1))
      v.roundtrip_ok = false;
  }

  // Span property: the pushed-forward value of every bracket of weight <= j
  // must have zero components past dim L_j(x0).
  Matrix jac = linear_part(chart.forward);
  for (const auto& g : filt.generators) {
    int j = g.weight;
    if (j > filt.step) continue;
    int dj = filt.dims[j - 1];
    std::vector<Rational> pushed(n, Rational(0));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) pushed[r] += jac[r][c] * g.value[c];
    for (int r = dj; r < n; ++r) {
      if (pushed[r] != 0) {
        v.span_ok = false;
        if (v.failures.size() < kMaxWitnesses) {
          std::ostringstream os;
          os << bracket_str(g.tree) << " (weight " << g.weight << ") pushes to a vector with y"
             << (r + 1) << "-component " << rat_str(pushed[r]) << " but dim L_" << j << " = " << dj;
          v.failures.push_back({"span", r + 1, {}, os.str(), pushed[r]});
        }
      }
    }
  }

  // Derivative property: words of weight <= w_h - 1 annihilate y_h at 0.
  std::vector<int> gen_weights;
  for (const auto& g : filt.generators) gen_weights.push_back(g.weight);
  std::vector<const VectorField*> gen_ptrs;
  for (const auto& g : filt.generators) gen_ptrs.push_back(&g.field);
  for (int h = 1; h <= n; ++h) {
    int j = chart.weights[h - 1] - 1;
    if (j < 1) continue;
    for (const auto& word : weighted_words(gen_weights, j)) {
      Rational val = word_value(word, gen_ptrs, chart.forward[h - 1]);
      if (val != 0) {
        v.derivative_ok = false;
        if (v.failures.size() < kMaxWitnesses)
          v.failures.push_back(
              {"derivative", h, word, word_description(word, filt, h, val), val});
      }
    }
  }
  return v;
}

VectorField transform_field(const VectorField& vf, const AdaptedChart& chart) {
  const int n = vf.n();
  const int cap = chart.trunc_deg;
  VectorField centered = vf.shifted(chart.x0);
  // Pushforward: V~(y) = J_F(G(y)) V(G(y)).
  std::vector<Polynomial> v_at_g(n);
  for (int l = 0; l < n; ++l) v_at_g[l] = centered.comp[l].substituted(chart.inverse, cap);
  VectorField out = VectorField::zero(n);
  for (int h = 0; h < n; ++h) {
    Polynomial acc = Polynomial::zero(n);
    for (int l = 0; l < n; ++l) {
      Polynomial dfh = chart.forward[h].derivative(l + 1);
      if (dfh.is_zero() || v_at_g[l].is_zero()) continue;
      acc += (dfh.substituted(chart.inverse, cap) * v_at_g[l]).truncated(cap);
    }
    out.comp[h] = acc;
  }
  return out;
}

}  // namespace nilheat

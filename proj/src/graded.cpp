#include "nilheat/graded.hpp"

#include <algorithm>
#include <sstream>

#include "nilheat/errors.hpp"

namespace nilheat {

std::optional<long> graded_order(const Polynomial& p, const std::vector<int>& w) {
  std::optional<long> best;
  for (const Term& t : p.terms()) {
    long d = weighted_degree(t.mono, w);
    if (!best || d < *best) best = d;
  }
  return best;
}

std::optional<long> field_graded_order(const VectorField& v, const std::vector<int>& w) {
  std::optional<long> best;
  for (int h = 0; h < v.n(); ++h) {
    for (const Term& t : v.comp[h].terms()) {
      long d = w[h] - weighted_degree(t.mono, w);
      if (!best || d > *best) best = d;
    }
  }
  return best;
}

VectorField dilate_pushforward(const VectorField& v, const Rational& eps,
                               const std::vector<int>& w) {
  if (eps == 0) throw DomainError("dilate_pushforward: eps must be nonzero");
  VectorField out = VectorField::zero(v.n());
  for (int h = 0; h < v.n(); ++h) {
    std::vector<Term> terms;
    for (const Term& t : v.comp[h].terms()) {
      long hweight = w[h] - weighted_degree(t.mono, w);
      terms.push_back({t.mono, t.coeff * rat_pow(eps, hweight)});
    }
    out.comp[h] = Polynomial::from_terms(v.comp[h].nvars(), std::move(terms));
  }
  return out;
}

VectorField graded_component(const VectorField& v, long target, const std::vector<int>& w) {
  VectorField out = VectorField::zero(v.n());
  for (int h = 0; h < v.n(); ++h) out.comp[h] = v.comp[h].weighted_part(w, w[h] - target);
  return out;
}

std::vector<VectorField> NilpotentSystem::all_fields() const {
  std::vector<VectorField> fs{drift};
  fs.insert(fs.end(), controlled.begin(), controlled.end());
  return fs;
}

bool is_triangular(const VectorField& v, const std::vector<int>& w) {
  for (int h = 0; h < v.n(); ++h) {
    for (const Term& t : v.comp[h].terms()) {
      for (size_t j = 0; j < t.mono.size(); ++j)
        if (t.mono[j] > 0 && w[j] >= w[h]) return false;
    }
  }
  return true;
}

NilpotentSystem nilpotent_approximation(const std::vector<VectorField>& fields,
                                        const AdaptedChart& chart, const Filtration& filt) {
  if (!filt.full_rank())
    throw DomainError("nilpotent_approximation: filtration is not full rank");
  NilpotentSystem ns;
  ns.n = filt.n;
  ns.k = filt.k;
  ns.step = filt.step;
  ns.homogeneity_order = filt.homogeneity_order;
  ns.weights = filt.weights;
  VectorField drift_y = transform_field(fields[0], chart);
  ns.drift = graded_component(drift_y, 2, ns.weights);
  for (int i = 1; i <= ns.k; ++i) {
    VectorField fi_y = transform_field(fields[i], chart);
    ns.controlled.push_back(graded_component(fi_y, 1, ns.weights));
  }

  std::vector<Rational> origin(ns.n, Rational(0));
  for (const Rational& c : ns.drift.evaluate(origin))
    if (c != 0) throw DomainError("nilpotent_approximation: drift does not vanish at 0");
  for (const VectorField& f : ns.all_fields())
    if (!is_triangular(f, ns.weights))
      throw DomainError("nilpotent_approximation: non-triangular component");
  return ns;
}

bool check_homogeneity(const NilpotentSystem& ns, const Rational& eps) {
  if (dilate_pushforward(ns.drift, eps, ns.weights) != ns.drift.scaled(eps * eps)) return false;
  for (const VectorField& f : ns.controlled)
    if (dilate_pushforward(f, eps, ns.weights) != f.scaled(eps)) return false;
  return true;
}

bool check_nilpotency(const NilpotentSystem& ns, int slack) {
  std::vector<VectorField> fields = ns.all_fields();
  int cap = ns.step + slack;
  for (const WeightedBracket& wb : enumerate_all_trees(ns.k, cap)) {
    if (wb.weight <= ns.step) continue;
    if (!evaluate_bracket(wb.tree, fields, -1).is_zero()) return false;
  }
  return true;
}

LieEqualityReport lie_algebra_equality_check(const std::vector<VectorField>& transformed,
                                             const NilpotentSystem& ns, int cap,
                                             int taylor_cap) {
  LieEqualityReport rep;
  std::vector<Rational> origin(ns.n, Rational(0));
  Filtration a = compute_filtration(transformed, origin, cap, 0.0, RankMode::Exact, taylor_cap);
  Filtration b =
      compute_filtration(ns.all_fields(), origin, cap, 0.0, RankMode::Exact, taylor_cap);
  rep.step_original = a.step;
  rep.step_nilpotent = b.step;
  rep.dims_original = a.dims;
  rep.dims_nilpotent = b.dims;
  rep.ok = a.step == b.step && a.dims == b.dims;
  std::ostringstream os;
  os << "layer dims (transformed original vs approximating):";
  for (size_t i = 0; i < std::max(a.dims.size(), b.dims.size()); ++i) {
    os << " " << (i < a.dims.size() ? std::to_string(a.dims[i]) : "?") << "/"
       << (i < b.dims.size() ? std::to_string(b.dims[i]) : "?");
  }
  rep.detail = os.str();
  return rep;
}

VectorField divergence_drift_adjust(const std::vector<VectorField>& fields, int cap) {
  VectorField adj = fields[0];
  for (size_t i = 1; i < fields.size(); ++i) {
    Polynomial div = divergence(fields[i]);
    adj = adj + fields[i].scaled(div, cap).scaled(Rational(1, 2));
  }
  return adj.truncated(cap);
}

std::optional<std::vector<Rational>> diagonal_scaling_match(const NilpotentSystem& a,
                                                            const NilpotentSystem& b) {
  if (a.n != b.n || a.k != b.k || a.weights != b.weights) return std::nullopt;
  const int n = a.n;
  // Solve coordinates in increasing weight order; triangularity means every
  // term in component h only references strictly lower-weight variables.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a.weights[i] < a.weights[j]; });

  std::vector<Rational> s(n, Rational(0));  // 0 = undetermined
  std::vector<VectorField> af = a.all_fields(), bf = b.all_fields();
  for (int h : order) {
    // Find a pinning equation s_h * ca / prod(s^alpha) = cb.
    for (size_t f = 0; f < af.size() && s[h] == 0; ++f) {
      for (const Term& t : af[f].comp[h].terms()) {
        Rational cb = bf[f].comp[h].coeff(t.mono);
        if (cb == 0) return std::nullopt;  // zero/nonzero structure mismatch
        Rational denom(1);
        bool known = true;
        for (int j = 0; j < n; ++j) {
          if (t.mono[j] == 0) continue;
          if (s[j] == 0) {
            known = false;
            break;
          }
          denom *= rat_pow(s[j], t.mono[j]);
        }
        if (!known) continue;
        s[h] = cb * denom / t.coeff;
        break;
      }
    }
    if (s[h] == 0) s[h] = 1;  // unconstrained coordinate
  }
  // Verify the full systems map onto each other.
  auto scale_field = [&](const VectorField& v) {
    VectorField out = VectorField::zero(n);
    for (int h = 0; h < n; ++h) {
      std::vector<Term> terms;
      for (const Term& t : v.comp[h].terms()) {
        Rational c = t.coeff * s[h];
        for (int j = 0; j < n; ++j)
          if (t.mono[j]) c /= rat_pow(s[j], t.mono[j]);
        terms.push_back({t.mono, c});
      }
      out.comp[h] = Polynomial::from_terms(n, std::move(terms));
    }
    return out;
  };
  for (size_t f = 0; f < af.size(); ++f)
    if (scale_field(af[f]) != bf[f]) return std::nullopt;
  return s;
}

}  // namespace nilheat

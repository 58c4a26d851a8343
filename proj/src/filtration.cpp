#include "nilheat/filtration.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "nilheat/errors.hpp"

namespace nilheat {

int exact_rank(const std::vector<std::vector<Rational>>& rows) {
  std::vector<std::vector<Rational>> m = rows;
  size_t rank = 0;
  size_t ncols = m.empty() ? 0 : m[0].size();
  for (size_t col = 0; col < ncols && rank < m.size(); ++col) {
    size_t pivot = rank;
    while (pivot < m.size() && m[pivot][col] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[rank], m[pivot]);
    for (size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][col] == 0) continue;
      Rational f = m[r][col] / m[rank][col];
      for (size_t c = col; c < ncols; ++c) m[r][c] -= f * m[rank][c];
    }
    ++rank;
  }
  return static_cast<int>(rank);
}

int float_rank(const std::vector<std::vector<Rational>>& rows, double rank_tol) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[0].size(); ++c) m(r, c) = to_double(rows[r][c]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) >= rank_tol * sv(0)) ++rank;
  return rank;
}

namespace {

int rank_of(const std::vector<std::vector<Rational>>& rows, double rank_tol, RankMode mode) {
  return mode == RankMode::Exact ? exact_rank(rows) : float_rank(rows, rank_tol);
}

}  // namespace

Filtration compute_filtration(const std::vector<VectorField>& fields,
                              const std::vector<Rational>& x0, int cap, double rank_tol,
                              RankMode mode, int taylor_cap) {
  if (fields.empty()) throw ValidationError("compute_filtration: no fields");
  const int n = fields[0].n();
  const int k = static_cast<int>(fields.size()) - 1;
  for (const auto& f : fields)
    if (f.n() != n) throw ValidationError("compute_filtration: field dimension mismatch");
  if (static_cast<int>(x0.size()) != n)
    throw ValidationError("compute_filtration: base point dimension mismatch");
  if (taylor_cap < cap) taylor_cap = cap;

  Filtration filt;
  filt.n = n;
  filt.k = k;
  filt.cap = cap;
  filt.x0 = x0;

  // Work in centered coordinates u = x - x0 so that values at u = 0 are the
  // constant terms; bracket evaluation then only ever needs low-order jets.
  std::vector<VectorField> centered;
  centered.reserve(fields.size());
  for (const auto& f : fields) centered.push_back(f.shifted(x0).truncated(taylor_cap));

  std::vector<Rational> origin(n, Rational(0));
  std::vector<BracketEntry> all;
  for (const WeightedBracket& wb : enumerate_brackets(k, cap)) {
    BracketEntry e;
    e.tree = wb.tree;
    e.weight = wb.weight;
    e.word = wb.word;
    e.field = evaluate_bracket(wb.tree, centered, taylor_cap);
    e.value = e.field.evaluate(origin);
    all.push_back(std::move(e));
  }

  std::vector<std::vector<Rational>> chosen_rows;
  size_t idx = 0;
  for (int i = 1; i <= cap; ++i) {
    for (; idx < all.size() && all[idx].weight == i; ++idx) {
      if (static_cast<int>(chosen_rows.size()) == n) continue;
      chosen_rows.push_back(all[idx].value);
      if (rank_of(chosen_rows, rank_tol, mode) == static_cast<int>(chosen_rows.size())) {
        filt.basis.push_back(all[idx]);
      } else {
        chosen_rows.pop_back();
      }
    }
    filt.dims.push_back(static_cast<int>(chosen_rows.size()));
    if (filt.step == 0 && filt.dims.back() == n) {
      filt.step = i;
      break;
    }
  }

  if (filt.step > 0) {
    filt.weights.reserve(n);
    int prev = 0;
    for (int i = 1; i <= filt.step; ++i) {
      int di = filt.dims[i - 1];
      for (int j = prev; j < di; ++j) filt.weights.push_back(i);
      prev = di;
    }
    for (int w : filt.weights) filt.homogeneity_order += w;
    for (const auto& e : all)
      if (e.weight <= std::max(filt.step - 1, 1)) filt.generators.push_back(e);
  } else {
    filt.generators = all;
  }
  return filt;
}

}  // namespace nilheat

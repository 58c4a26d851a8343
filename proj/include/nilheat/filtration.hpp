#ifndef NILHEAT_FILTRATION_HPP
#define NILHEAT_FILTRATION_HPP

#include <string>
#include <vector>

#include "nilheat/bracket.hpp"
#include "nilheat/vector_field.hpp"

namespace nilheat {

enum class RankMode {
  Float,  // singular values with relative tolerance (default)
  Exact   // rational Gaussian elimination (slow verification mode)
};

// One enumerated bracket together with its induced field and its exact value
// at the base point (in centered coordinates: x = x0 + u).
struct BracketEntry {
  BracketPtr tree;
  int weight = 0;
  std::vector<int> word;
  VectorField field;           // in centered u-coordinates
  std::vector<Rational> value; // field at u = 0
};

// The weighted Lie filtration L_1 <= L_2 <= ... evaluated at x0, together
// with the greedily selected layer basis used by the chart construction.
struct Filtration {
  int n = 0;
  int k = 0;
  int cap = 0;
  std::vector<Rational> x0;

  // dims[i-1] = dim L_i(x0) for i = 1..dims.size(); computed up to the step
  // (full rank) or up to cap when undecided.
  std::vector<int> dims;
  int step = 0;  // smallest i with dim L_i(x0) = n; 0 = undecided at cap
  std::vector<int> weights;       // coordinate weights w_1 <= ... <= w_n
  long long homogeneity_order = 0;  // N = sum_j w_j

  // Basis brackets, one per coordinate, ordered by layer then enumeration
  // order; basis[j].value are the columns of the (invertible) matrix B.
  std::vector<BracketEntry> basis;
  // All enumerated brackets of weight <= min(step-1, cap) (everything when
  // undecided); generator alphabet for adaptedness words.
  std::vector<BracketEntry> generators;

  bool full_rank() const { return step > 0; }
};

// Computes the filtration of fields = {f0, f1, .., fk} at x0 (f0 is the
// drift, graded at weight 2). Evaluations are exact rationals; rank and
// basis-extension decisions use the requested mode. taylor_cap bounds the
// degree of intermediate bracket coefficients (exactness at u = 0 needs only
// jets of order <= cap, so any taylor_cap >= cap is safe).
Filtration compute_filtration(const std::vector<VectorField>& fields,
                              const std::vector<Rational>& x0, int cap, double rank_tol,
                              RankMode mode, int taylor_cap);

// Exact rank of a set of rational vectors (Gaussian elimination).
int exact_rank(const std::vector<std::vector<Rational>>& rows);
// Float rank: singular values >= rank_tol * sigma_max.
int float_rank(const std::vector<std::vector<Rational>>& rows, double rank_tol);

}  // namespace nilheat

#endif

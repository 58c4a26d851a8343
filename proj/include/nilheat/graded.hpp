#ifndef NILHEAT_GRADED_HPP
#define NILHEAT_GRADED_HPP

#include <optional>
#include <string>
#include <vector>

#include "nilheat/chart.hpp"

namespace nilheat {

// Graded order of a function: the minimal weighted degree of its monomials
// (nullopt for the zero polynomial).
std::optional<long> graded_order(const Polynomial& p, const std::vector<int>& w);

// A term x^a d/dx_h is homogeneous of weight w_h - sum(a_j w_j) under the
// anisotropic dilations; the graded order of a field is the maximum such
// weight over its terms (nullopt for the zero field).
std::optional<long> field_graded_order(const VectorField& v, const std::vector<int>& w);

// Pushforward under the dilation delta_eps(y)_j = eps^{w_j} y_j. Exact for
// rational eps != 0; scales a weight-h homogeneous term by eps^h.
VectorField dilate_pushforward(const VectorField& v, const Rational& eps,
                               const std::vector<int>& w);

// Keeps exactly the weight-`target` homogeneous part of the field.
VectorField graded_component(const VectorField& v, long target, const std::vector<int>& w);

// The approximating system in adapted coordinates: drift truncated to its
// weight-2 homogeneous part, controlled fields to weight 1.
struct NilpotentSystem {
  int n = 0;
  int k = 0;
  int step = 0;
  long long homogeneity_order = 0;
  std::vector<int> weights;
  VectorField drift;
  std::vector<VectorField> controlled;

  std::vector<VectorField> all_fields() const;  // {drift, controlled...}
};

// Transforms fields = {f0, f1, ..., fk} through the chart and truncates to
// the homogeneous parts. Validates that the drift vanishes at 0 and that the
// result is triangular (each component depends only on strictly lower-weight
// coordinates).
NilpotentSystem nilpotent_approximation(const std::vector<VectorField>& fields,
                                        const AdaptedChart& chart, const Filtration& filt);

// Exact identity delta_eps_* fhat_0 = eps^2 fhat_0 and delta_eps_* fhat_i =
// eps fhat_i for the given rational eps.
bool check_homogeneity(const NilpotentSystem& ns, const Rational& eps);

// Each component may only involve strictly lower-weight coordinates.
bool is_triangular(const VectorField& v, const std::vector<int>& w);

// Verifies that all iterated brackets of the approximating fields of weight
// > step vanish identically (checked exhaustively up to weight step + slack).
bool check_nilpotency(const NilpotentSystem& ns, int slack = 2);

struct LieEqualityReport {
  bool ok = false;
  int step_original = 0, step_nilpotent = 0;
  std::vector<int> dims_original, dims_nilpotent;
  std::string detail;
};

// The filtration layer dimensions at 0 of the transformed original fields and
// of the approximating fields must agree (exact rank mode).
LieEqualityReport lie_algebra_equality_check(const std::vector<VectorField>& transformed,
                                             const NilpotentSystem& ns, int cap,
                                             int taylor_cap);

// Volume-correction drift f0 + (1/2) sum_i div(f_i) f_i; the filtration and
// the approximating system are unchanged by this adjustment.
VectorField divergence_drift_adjust(const std::vector<VectorField>& fields, int cap = -1);

// Looks for a coordinate rescaling y_j -> s_j y_j (s_j nonzero rational)
// whose pushforward maps system a onto system b exactly. This decides
// equivalence under diagonal layer-preserving linear maps; returns the
// scalings on success. (Triangularity makes the solve well-ordered by
// weight; non-diagonal within-layer mixing is out of scope and returns
// nullopt.)
std::optional<std::vector<Rational>> diagonal_scaling_match(const NilpotentSystem& a,
                                                            const NilpotentSystem& b);

}  // namespace nilheat

#endif

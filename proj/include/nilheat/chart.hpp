#ifndef NILHEAT_CHART_HPP
#define NILHEAT_CHART_HPP

#include <string>
#include <vector>

#include "nilheat/filtration.hpp"

namespace nilheat {

// A polynomial chart y = F(u), u = x - x0, with F(0) = 0 and invertible
// linear part; `inverse` is the truncated series G with F(G(y)) = y and
// G(F(u)) = u modulo total degree > trunc_deg.
struct AdaptedChart {
  std::vector<Rational> x0;
  std::vector<int> weights;
  int trunc_deg = 0;
  std::vector<Polynomial> forward;  // in u-variables
  std::vector<Polynomial> inverse;  // in y-variables
};

// Composes the flows of `fields_in_order` (applied first-to-last) starting at
// u = 0, each flow expanded as the formal exponential series of its field and
// the whole composition truncated at total degree cap in the time variables
// v1..vn. Returns the n components of the composed endpoint as polynomials
// in v.
std::vector<Polynomial> flow_compose(const std::vector<const VectorField*>& fields_in_order,
                                     int cap);

// Inverse of a formal map F (F(0) = 0, invertible linear part) as a truncated
// series. Throws DomainError on a singular linear part and TruncationError if
// the self-check F(G) = id (mod degree > cap) fails.
std::vector<Polynomial> invert_series(const std::vector<Polynomial>& f, int cap);

// Builds a chart adapted to the filtration:
//  * linear normalization u' = B^{-1} u maps the selected bracket values to
//    the standard basis (layer spans become coordinate spans);
//  * every coordinate whose low-weight derivative words already vanish is
//    kept as-is, so already-adapted inputs get a purely linear chart;
//  * the rest are corrected by inverting the flow composition of the basis
//    fields with the coordinate's own field moved to the last (outermost)
//    flow slot.
// trunc_deg < 0 selects the default step+2.
AdaptedChart build_adapted_chart(const std::vector<VectorField>& fields, const Filtration& filt,
                                 int trunc_deg = -1);

AdaptedChart identity_chart(const Filtration& filt, int trunc_deg = -1);

struct ChartWitness {
  std::string property;       // "span" or "derivative"
  int coordinate = 0;         // 1-based y-coordinate
  std::vector<int> word;      // indices into filt.generators (derivative only)
  std::string description;    // human-readable, e.g. "X1 X1 y2 at x0 = 1"
  Rational value;
};

struct ChartVerification {
  bool span_ok = true;        // layer spans are coordinate spans at 0
  bool derivative_ok = true;  // low-weight derivative words annihilate high
                              // coordinates at 0
  bool roundtrip_ok = true;   // F(G) = G(F) = id modulo the truncation
  std::vector<ChartWitness> failures;  // first few failures, deterministic order
  bool ok() const { return span_ok && derivative_ok && roundtrip_ok; }
};

// Exact verification of adaptedness. Words are drawn from filt.generators
// (they span each layer, and the conditions are linear in each slot, so
// checking generator words suffices).
ChartVerification verify_adapted(const Filtration& filt, const AdaptedChart& chart);

// Pushforward of a vector field (given in original x-coordinates) through the
// chart, truncated at the chart's truncation degree.
VectorField transform_field(const VectorField& v, const AdaptedChart& chart);

// All nonempty words over generator indices with total weight <= maxweight,
// ordered by (weight, index sequence). Shared by verify_adapted and the
// chart construction.
std::vector<std::vector<int>> weighted_words(const std::vector<int>& gen_weights, int maxweight);

}  // namespace nilheat

#endif

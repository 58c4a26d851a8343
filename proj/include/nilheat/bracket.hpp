#ifndef NILHEAT_BRACKET_HPP
#define NILHEAT_BRACKET_HPP

#include <memory>
#include <string>
#include <vector>

#include "nilheat/vector_field.hpp"

namespace nilheat {

// Weight of the drift slot X0 in the bracket grading; controlled slots
// X1..Xk have weight 1.
inline constexpr int kDriftWeight = 2;

// Formal iterated bracket over generators X0..Xk: either a leaf (generator
// index) or [left, right]. Immutable, shared subtrees.
struct Bracket {
  int leaf = -1;  // >= 0 for leaves
  std::shared_ptr<const Bracket> left, right;

  static std::shared_ptr<const Bracket> make_leaf(int i);
  static std::shared_ptr<const Bracket> make_node(std::shared_ptr<const Bracket> l,
                                                  std::shared_ptr<const Bracket> r);
};
using BracketPtr = std::shared_ptr<const Bracket>;

// Number of occurrences of each generator (index 0..k).
std::vector<int> bracket_lengths(const BracketPtr& b, int k);
// Weighted length: 2*(#X0) + sum_{i>=1} (#Xi).
int bracket_weight(const BracketPtr& b);
// "[X0,[X1,X2]]"
std::string bracket_str(const BracketPtr& b);

// Substitutes concrete fields for the generators and evaluates the iterated
// Lie bracket, truncating every intermediate at total degree cap.
VectorField evaluate_bracket(const BracketPtr& b, const std::vector<VectorField>& fields,
                             int cap = -1);

// A spanning family for the weighted filtration: brackets of the Lyndon
// basis of the free Lie algebra on X0..Xk (X0 graded at weight 2), restricted
// to weight <= cap, ordered by (weight, word) — deterministic. Being a basis
// of the free Lie algebra, its evaluations span every layer that iterated
// brackets of weight <= cap can span.
struct WeightedBracket {
  BracketPtr tree;
  int weight;
  std::vector<int> word;  // the underlying Lyndon word over {0..k}
};
std::vector<WeightedBracket> enumerate_brackets(int k, int cap);

// Test oracle: every bracket tree (all shapes, all leaf labels) of weight
// <= cap. Exponential; only for small k and cap.
std::vector<WeightedBracket> enumerate_all_trees(int k, int cap);

}  // namespace nilheat

#endif

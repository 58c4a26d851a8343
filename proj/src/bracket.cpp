#include "nilheat/bracket.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "nilheat/errors.hpp"

namespace nilheat {

BracketPtr Bracket::make_leaf(int i) {
  auto b = std::make_shared<Bracket>();
  b->leaf = i;
  return b;
}

BracketPtr Bracket::make_node(BracketPtr l, BracketPtr r) {
  auto b = std::make_shared<Bracket>();
  b->left = std::move(l);
  b->right = std::move(r);
  return b;
}

std::vector<int> bracket_lengths(const BracketPtr& b, int k) {
  std::vector<int> len(k + 1, 0);
  auto walk = [&](auto&& self, const BracketPtr& t) -> void {
    if (t->leaf >= 0) {
      len.at(t->leaf) += 1;
      return;
    }
    self(self, t->left);
    self(self, t->right);
  };
  walk(walk, b);
  return len;
}

int bracket_weight(const BracketPtr& b) {
  if (b->leaf >= 0) return b->leaf == 0 ? kDriftWeight : 1;
  return bracket_weight(b->left) + bracket_weight(b->right);
}

std::string bracket_str(const BracketPtr& b) {
  if (b->leaf >= 0) {
    std::ostringstream os;
    os << "X" << b->leaf;
    return os.str();
  }
  return "[" + bracket_str(b->left) + "," + bracket_str(b->right) + "]";
}

VectorField evaluate_bracket(const BracketPtr& b, const std::vector<VectorField>& fields,
                             int cap) {
  if (b->leaf >= 0) {
    if (b->leaf >= static_cast<int>(fields.size()))
      throw DomainError("evaluate_bracket: generator index out of range");
    return fields[b->leaf].truncated(cap);
  }
  return lie_bracket(evaluate_bracket(b->left, fields, cap),
                     evaluate_bracket(b->right, fields, cap), cap);
}

namespace {

int word_weight(const std::vector<int>& w) {
  int s = 0;
  for (int c : w) s += (c == 0 ? kDriftWeight : 1);
  return s;
}

// w is Lyndon iff it is strictly smaller than each of its proper suffixes.
bool is_lyndon(const std::vector<int>& w) {
  for (size_t s = 1; s < w.size(); ++s) {
    std::vector<int> suf(w.begin() + s, w.end());
    if (!(w < suf)) return false;
  }
  return true;
}

// Standard (right) factorization: v is the longest proper suffix of w that is
// Lyndon; then u = w[:split] is Lyndon and u < v.
BracketPtr lyndon_bracketing(const std::vector<int>& w) {
  if (w.size() == 1) return Bracket::make_leaf(w[0]);
  for (size_t s = 1; s < w.size(); ++s) {
    std::vector<int> suf(w.begin() + s, w.end());
    if (is_lyndon(suf)) {
      std::vector<int> pre(w.begin(), w.begin() + s);
      return Bracket::make_node(lyndon_bracketing(pre), lyndon_bracketing(suf));
    }
  }
  throw DomainError("lyndon_bracketing: no Lyndon suffix (input not Lyndon?)");
}

}  // namespace

std::vector<WeightedBracket> enumerate_brackets(int k, int cap) {
  if (k < 0 || cap < 1) throw DomainError("enumerate_brackets: need k >= 0 and cap >= 1");
  const int nletters = k + 1;
  const int maxlen = cap;  // every letter has weight >= 1
  std::vector<WeightedBracket> out;
  // Duval's algorithm: all Lyndon words of length <= maxlen in lex order.
  std::vector<int> w{0};
  while (!w.empty()) {
    int wt = word_weight(w);
    if (wt <= cap) out.push_back({lyndon_bracketing(w), wt, w});
    // Next word: repeat to maxlen, strip trailing maximal letters, increment.
    std::vector<int> next;
    next.reserve(maxlen);
    for (int i = 0; i < maxlen; ++i) next.push_back(w[i % w.size()]);
    while (!next.empty() && next.back() == nletters - 1) next.pop_back();
    if (!next.empty()) next.back() += 1;
    w = std::move(next);
  }
  std::stable_sort(out.begin(), out.end(), [](const WeightedBracket& a, const WeightedBracket& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    return a.word < b.word;
  });
  return out;
}

std::vector<WeightedBracket> enumerate_all_trees(int k, int cap) {
  // trees_by_weight[w] = all trees of weight exactly w.
  std::vector<std::vector<BracketPtr>> by_weight(cap + 1);
  for (int i = 0; i <= k; ++i) {
    int w = i == 0 ? kDriftWeight : 1;
    if (w <= cap) by_weight[w].push_back(Bracket::make_leaf(i));
  }
  for (int w = 2; w <= cap; ++w) {
    for (int a = 1; a < w; ++a) {
      for (const auto& l : by_weight[a])
        for (const auto& r : by_weight[w - a]) by_weight[w].push_back(Bracket::make_node(l, r));
    }
  }
  std::vector<WeightedBracket> out;
  for (int w = 1; w <= cap; ++w)
    for (const auto& t : by_weight[w]) out.push_back({t, w, {}});
  return out;
}

}  // namespace nilheat

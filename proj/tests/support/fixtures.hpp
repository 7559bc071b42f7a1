#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "efq/formulas.hpp"
#include "efq/quantifiers.hpp"
#include "efq/structures.hpp"

namespace efq::testing {

inline StructurePtr make_structure(const std::string& name, std::shared_ptr<const Vocabulary> voc,
                                   int n, std::map<std::string, TupleSet> rels) {
  return std::make_shared<const Structure>(name, std::move(voc), n, rels);
}

inline QuantifierSet quantifiers(const std::vector<std::string>& specs) {
  QuantifierSet q;
  for (const auto& s : specs) q.add(builtin_quantifier(s));
  return q;
}

// Figure 1: 𝔄, 𝔅₁, 𝔅₂ over τ = {B, R}.
struct Fig1 {
  std::shared_ptr<const Vocabulary> voc =
      std::make_shared<Vocabulary>(std::vector<RelationSymbol>{{"B", 1}, {"R", 1}});
  StructurePtr A = make_structure("A", voc, 4, {{"B", {{0}, {1}, {2}}}});
  StructurePtr B1 = make_structure("B1", voc, 4, {{"B", {{0}, {1}, {2}}}, {"R", {{3}}}});
  StructurePtr B2 = make_structure("B2", voc, 4, {{"B", {{0}}}, {"R", {{1}}}});
  QuantifierSet q = quantifiers({"exactly=3"});
};

// Example 2: 𝔐 with three singleton predicates on a 4-element domain, 𝔑 a single point.
struct Example2 {
  std::shared_ptr<const Vocabulary> voc = std::make_shared<Vocabulary>(
      std::vector<RelationSymbol>{{"P1", 1}, {"P2", 1}, {"P3", 1}});
  StructurePtr M = make_structure("M", voc, 4, {{"P1", {{0}}}, {"P2", {{1}}}, {"P3", {{2}}}});
  StructurePtr N = make_structure("N", voc, 1, {});
  QuantifierSet q = quantifiers({"exactly=3"});
};

// A monadic quantifier that looks at which element is chosen, not how many:
// true iff 0 ∈ P. Not closed under isomorphism.
inline Quantifier broken_quantifier() {
  return Quantifier("contains0", QuantifierType{{1}}, [](int, std::span<const TupleSet> sets) {
    return !sets[0].empty() && sets[0].front() == Tuple{0};
  });
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& rng() { return rng_; }

  std::shared_ptr<const Vocabulary> vocabulary(int max_unary, int max_binary) {
    std::vector<RelationSymbol> syms;
    const int u = uniform(max_unary > 0 ? 1 : 0, max_unary), b = uniform(0, max_binary);
    for (int i = 0; i < u; ++i) syms.push_back({"P" + std::to_string(i + 1), 1});
    for (int i = 0; i < b; ++i) syms.push_back({"E" + std::to_string(i + 1), 2});
    return std::make_shared<Vocabulary>(syms);
  }

  StructurePtr structure(const std::string& name, std::shared_ptr<const Vocabulary> voc, int n,
                         double density = 0.4) {
    std::map<std::string, TupleSet> rels;
    for (const auto& sym : voc->symbols())
      for (const auto& t : all_tuples(n, sym.arity))
        if (coin(density)) rels[sym.name].push_back(t);
    return make_structure(name, voc, n, rels);
  }

  // A copy of s with elements shuffled and, with probability `flip`, one fact toggled.
  StructurePtr variant(const Structure& s, const std::string& name, double flip) {
    std::vector<int> perm(static_cast<std::size_t>(s.domain_size()));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    std::shuffle(perm.begin(), perm.end(), rng_);
    Structure p = s.permuted(perm, name);
    std::map<std::string, TupleSet> rels;
    for (const auto& sym : s.vocabulary().symbols()) rels[sym.name] = p.relation(sym.name);
    if (coin(flip) && s.vocabulary().size() > 0) {
      const auto& sym = s.vocabulary().symbols()[static_cast<std::size_t>(
          uniform(0, static_cast<int>(s.vocabulary().size()) - 1))];
      auto tuples = all_tuples(s.domain_size(), sym.arity);
      const Tuple t = tuples[static_cast<std::size_t>(uniform(0, static_cast<int>(tuples.size()) - 1))];
      auto& r = rels[sym.name];
      if (auto it = std::find(r.begin(), r.end(), t); it != r.end()) r.erase(it);
      else r.insert(std::lower_bound(r.begin(), r.end(), t), t);
    }
    return make_structure(name, s.vocabulary_ptr(), s.domain_size(), rels);
  }

  QuantifierSet quantifier_subset(const std::vector<std::string>& pool) {
    QuantifierSet q;
    while (q.size() == 0)
      for (const auto& spec : pool)
        if (coin()) q.add(builtin_quantifier(spec));
    return q;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace efq::testing

#include <gtest/gtest.h>

#include <numeric>

#include "efq/quantifiers.hpp"
#include "support/fixtures.hpp"

using namespace efq;
using namespace efq::testing;

namespace {

TupleSet points(std::initializer_list<int> xs) {
  TupleSet out;
  for (int x : xs) out.push_back({x});
  return out;
}

bool accepts1(const Quantifier& q, int n, const TupleSet& p) {
  const std::vector<TupleSet> sets{p};
  return q.accepts(n, sets);
}

// Hamiltonian path by trying every vertex order.
bool ham_by_permutation(int n, const TupleSet& edges) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; i + 1 < n && ok; ++i)
      ok = std::binary_search(edges.begin(), edges.end(), Tuple{order[i], order[i + 1]});
    if (ok) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

TupleSet edges_from_mask(int n, unsigned long long mask) {
  TupleSet out;
  for (int i = 0; i < n * n; ++i)
    if (mask >> i & 1) out.push_back({i / n, i % n});
  return out;
}

}  // namespace

TEST(Quantifiers, BuiltinExamples) {
  EXPECT_FALSE(accepts1(builtin_quantifier("exists"), 4, {}));
  EXPECT_FALSE(accepts1(builtin_quantifier("exactly=3"), 4, points({0, 1, 2, 3})));
  EXPECT_TRUE(accepts1(builtin_quantifier("exactly=3"), 4, points({0, 1, 2})));
  EXPECT_TRUE(accepts1(builtin_quantifier("most"), 5, points({0, 1, 2})));
  EXPECT_FALSE(accepts1(builtin_quantifier("most"), 4, points({0, 1})));
  EXPECT_TRUE(accepts1(builtin_quantifier("forall"), 2, points({0, 1})));
  EXPECT_TRUE(accepts1(builtin_quantifier("atleast=2"), 3, points({0, 2})));
  EXPECT_FALSE(accepts1(builtin_quantifier("atmost=1"), 3, points({0, 2})));
}

TEST(Quantifiers, HaertigComparesCardinalities) {
  const Quantifier h = builtin_quantifier("haertig");
  const std::vector<TupleSet> same{points({0, 1}), points({2, 3})};
  const std::vector<TupleSet> differ{points({0}), points({2, 3})};
  EXPECT_TRUE(h.accepts(4, same));
  EXPECT_FALSE(h.accepts(4, differ));
}

TEST(Quantifiers, ShapeMismatchIsAnError) {
  const Quantifier e = builtin_quantifier("exists");
  const std::vector<TupleSet> two{{}, {}};
  EXPECT_THROW(e.accepts(3, two), Error);
  const std::vector<TupleSet> wide{TupleSet{{0, 1}}};
  EXPECT_THROW(e.accepts(3, wide), Error);
  EXPECT_THROW(builtin_quantifier("ham").accepts_count(3, 1), Error);
}

TEST(Quantifiers, UnknownSpecsAreRejected) {
  EXPECT_THROW(builtin_quantifier("sometimes"), ParseError);
  EXPECT_THROW(builtin_quantifier("exactly=x"), ParseError);
  EXPECT_THROW(builtin_quantifier("exactly=-1"), ParseError);
}

TEST(Quantifiers, CardinalityExpressions) {
  const Quantifier odd = cardinality_quantifier("odd", "size % 2 == 1");
  for (int k = 0; k <= 5; ++k) EXPECT_EQ(odd.accepts_count(5, k), k % 2 == 1);
  const Quantifier half = cardinality_quantifier("half", "2 * size >= domain && !(size == domain)");
  EXPECT_TRUE(half.accepts_count(4, 2));
  EXPECT_FALSE(half.accepts_count(4, 4));
  EXPECT_FALSE(half.accepts_count(4, 1));
  const Quantifier neg = cardinality_quantifier("neg", "-size + domain > 1 || size == 0");
  EXPECT_TRUE(neg.accepts_count(3, 0));
  EXPECT_TRUE(neg.accepts_count(3, 1));
  EXPECT_FALSE(neg.accepts_count(3, 2));
  EXPECT_THROW(cardinality_quantifier("bad", "size +"), ParseError);
  EXPECT_THROW(cardinality_quantifier("bad", "width > 1"), ParseError);
  EXPECT_THROW(cardinality_quantifier("bad", "(size"), ParseError);
  EXPECT_THROW(cardinality_quantifier("div", "domain / size").accepts_count(3, 0), InputError);
}

// Property: Ham agrees with an enumerate-all-orders checker on every digraph up to 3 vertices
// and on random digraphs with 4 and 5 vertices.
TEST(Quantifiers, HamMatchesPermutationChecker) {
  for (int n = 1; n <= 3; ++n)
    for (unsigned long long m = 0; m < (1ull << (n * n)); ++m) {
      const TupleSet e = edges_from_mask(n, m);
      ASSERT_EQ(has_hamiltonian_path(n, e), ham_by_permutation(n, e)) << "n=" << n << " mask=" << m;
    }
  Gen g(41);
  for (int i = 0; i < 400; ++i) {
    const int n = g.uniform(4, 5);
    TupleSet e;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (g.coin(0.35)) e.push_back({a, b});
    EXPECT_EQ(has_hamiltonian_path(n, e), ham_by_permutation(n, e));
  }
  EXPECT_TRUE(has_hamiltonian_path(1, {}));
}

TEST(Quantifiers, BuiltinsAreInvariantUpToDomainFour) {
  for (const char* spec : {"exists", "forall", "exactly=3", "atleast=2", "atmost=1", "most", "haertig", "ham"}) {
    const IsoReport r = check_iso_invariance(builtin_quantifier(spec), 4);
    EXPECT_TRUE(r.ok()) << spec;
    EXPECT_TRUE(r.exhaustive) << spec;
    EXPECT_GT(r.inputs_checked, 0) << spec;
  }
}

TEST(Quantifiers, BrokenQuantifierIsCaught) {
  const IsoReport r = check_iso_invariance(broken_quantifier(), 3);
  ASSERT_FALSE(r.ok());
  const IsoViolation& v = r.violations.front();
  const Quantifier q = broken_quantifier();
  std::vector<TupleSet> moved = v.sets;
  for (auto& set : moved) {
    for (auto& t : set)
      for (auto& e : t) e = v.permutation[static_cast<std::size_t>(e)];
    std::sort(set.begin(), set.end());
  }
  EXPECT_NE(q.accepts(v.domain_size, v.sets), q.accepts(v.domain_size, moved));
}

// Property: monadic built-ins depend only on (|P|, n); compare every subset with a prefix of the same size.
TEST(Quantifiers, MonadicAcceptanceDependsOnlyOnCardinality) {
  for (const char* spec : {"exists", "forall", "exactly=2", "atleast=2", "atmost=2", "most"}) {
    const Quantifier q = builtin_quantifier(spec);
    for (int n = 1; n <= 5; ++n)
      for (unsigned m = 0; m < (1u << n); ++m) {
        TupleSet p, prefix;
        for (int i = 0; i < n; ++i)
          if (m >> i & 1) p.push_back({i});
        for (std::size_t i = 0; i < p.size(); ++i) prefix.push_back({static_cast<int>(i)});
        EXPECT_EQ(accepts1(q, n, p), accepts1(q, n, prefix)) << spec;
        EXPECT_EQ(accepts1(q, n, p), q.accepts_count(n, static_cast<long long>(p.size()))) << spec;
      }
  }
}

#include <gtest/gtest.h>

#include <numeric>

#include "efq/structures.hpp"
#include "support/fixtures.hpp"

using namespace efq;
using namespace efq::testing;

TEST(Structures, RespectsRepetitions) {
  EXPECT_TRUE(respects_repetitions(Tuple{1, 1, 2}, VarTuple{"x", "x", "y"}));
  EXPECT_FALSE(respects_repetitions(Tuple{5, 3, 2}, VarTuple{"x", "x", "y"}));
  EXPECT_TRUE(respects_repetitions(Tuple{7}, VarTuple{"x"}));
  EXPECT_TRUE(respects_repetitions(Tuple{2, 2}, VarTuple{"x", "y"}));
}

TEST(Structures, ExtendAssignment) {
  EXPECT_EQ(extend_assignment({}, VarTuple{"x"}, Tuple{3}), (Assignment{{"x", 3}}));
  EXPECT_EQ(extend_assignment({{"x", 1}, {"z", 0}}, VarTuple{"x"}, Tuple{4}),
            (Assignment{{"x", 4}, {"z", 0}}));
  EXPECT_EQ(extend_assignment({}, VarTuple{"x", "y"}, Tuple{2, 2}), (Assignment{{"x", 2}, {"y", 2}}));
  EXPECT_THROW(extend_assignment({}, VarTuple{"x", "x"}, Tuple{0, 1}), Error);
  const Assignment once = extend_assignment({{"y", 1}}, VarTuple{"x"}, Tuple{2});
  EXPECT_EQ(extend_assignment(once, VarTuple{"x"}, Tuple{2}), once);
}

TEST(Structures, TuplesRespecting) {
  EXPECT_EQ(tuples_respecting(2, VarTuple{"x", "y"}), (std::vector<Tuple>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  EXPECT_EQ(tuples_respecting(2, VarTuple{"x", "x"}), (std::vector<Tuple>{{0, 0}, {1, 1}}));
  EXPECT_EQ(tuples_respecting(3, VarTuple{"x"}), (std::vector<Tuple>{{0}, {1}, {2}}));
}

// Property: tuples_respecting is exactly the filter of all tuples by respects_repetitions.
TEST(Structures, TuplesRespectingIsTheFilter) {
  for (int n = 1; n <= 3; ++n)
    for (const VarTuple& x : {VarTuple{"x", "y", "x"}, VarTuple{"x", "x", "x"}, VarTuple{"a", "b", "c"}}) {
      std::vector<Tuple> expected;
      for (const auto& t : all_tuples(n, 3))
        if (respects_repetitions(t, x)) expected.push_back(t);
      EXPECT_EQ(tuples_respecting(n, x), expected);
    }
}

TEST(Structures, RejectsMalformedInput) {
  auto voc = std::make_shared<Vocabulary>(std::vector<RelationSymbol>{{"E", 2}});
  EXPECT_THROW(make_structure("S", voc, 0, {}), InputError);
  EXPECT_THROW(make_structure("S", voc, 2, {{"F", {}}}), InputError);
  EXPECT_THROW(make_structure("S", voc, 2, {{"E", {{0}}}}), InputError);
  EXPECT_THROW(make_structure("S", voc, 2, {{"E", {{0, 2}}}}), InputError);
  EXPECT_THROW(Vocabulary({{"E", 2}, {"E", 1}}), InputError);
  EXPECT_THROW(Vocabulary({{"E", 0}}), InputError);
}

TEST(Structures, HoldsAndRelation) {
  Fig1 f;
  EXPECT_TRUE(f.A->holds(0, Tuple{2}));
  EXPECT_FALSE(f.A->holds(0, Tuple{3}));
  EXPECT_EQ(f.B1->relation("R"), (TupleSet{{3}}));
}

TEST(Structures, CanonicalKeyDistinguishesAssignments) {
  Fig1 f;
  EXPECT_EQ(canonical_key(Context(f.A, {{"x", 0}})), canonical_key(Context(f.A, {{"x", 0}})));
  EXPECT_NE(canonical_key(Context(f.A, {{"x", 0}})), canonical_key(Context(f.A, {{"x", 1}})));
  EXPECT_NE(canonical_key(Context(f.A)), canonical_key(Context(f.B1)));
}

// Property: iso_key is invariant under renaming elements and separates non-isomorphic contexts.
TEST(Structures, IsoKeyIsAnIsomorphismInvariant) {
  Gen g(3);
  for (int i = 0; i < 40; ++i) {
    auto voc = g.vocabulary(2, 1);
    const int n = g.uniform(1, 4);
    auto a = g.structure("A", voc, n);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g.rng());
    auto b = std::make_shared<const Structure>(a->permuted(perm, "B"));
    const int x = g.uniform(0, n - 1);
    EXPECT_EQ(iso_key(Context(a, {{"x", x}})), iso_key(Context(b, {{"x", perm[static_cast<std::size_t>(x)]}})));
  }
  Fig1 f;
  EXPECT_NE(iso_key(Context(f.A)), iso_key(Context(f.B1)));
  EXPECT_NE(iso_key(Context(f.A, {{"x", 0}})), iso_key(Context(f.A, {{"x", 3}})));
  EXPECT_EQ(iso_key(Context(f.A, {{"x", 0}})), iso_key(Context(f.A, {{"x", 2}})));
}

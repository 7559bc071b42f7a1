#include <gtest/gtest.h>

#include <map>

#include "efq/oracle.hpp"
#include "support/fixtures.hpp"

using namespace efq;
using namespace efq::testing;

namespace {

// Every formula of size exactly s over one unary relation P, variables `vars`
// and the quantifiers in q, built without any semantic deduplication.
std::vector<std::vector<FormulaPtr>> all_formulas(int max_size, const std::vector<std::string>& vars,
                                                  const QuantifierSet& q) {
  std::vector<std::vector<FormulaPtr>> by_size(static_cast<std::size_t>(max_size) + 1);
  for (const auto& a : vars) {
    by_size[1].push_back(Formula::rel("P", {a}));
    for (const auto& b : vars) by_size[1].push_back(Formula::eq(a, b));
  }
  for (int s = 2; s <= max_size; ++s) {
    auto& out = by_size[static_cast<std::size_t>(s)];
    for (const auto& f : by_size[static_cast<std::size_t>(s - 1)]) {
      out.push_back(Formula::negate(f));
      for (const auto& qu : q.items())
        for (const auto& x : vars) out.push_back(Formula::quant(qu, {VarTuple{x}}, {f}));
    }
    for (int u = 1; u < s; ++u)
      for (const auto& f : by_size[static_cast<std::size_t>(u)])
        for (const auto& g : by_size[static_cast<std::size_t>(s - u)]) out.push_back(Formula::conj(f, g));
  }
  return by_size;
}

// Least size of each distinct (truth table over (context, assignment of vars), free variables).
std::map<int, long long> brute_counts(const std::vector<Context>& universe, int max_size,
                                      const std::vector<std::string>& vars, const QuantifierSet& q) {
  const VarTuple x{std::vector<std::string>(vars)};
  std::map<std::pair<std::vector<bool>, std::set<std::string>>, int> least;
  const auto by_size = all_formulas(max_size, vars, q);
  for (int s = 1; s <= max_size; ++s)
    for (const auto& f : by_size[static_cast<std::size_t>(s)]) {
      std::vector<bool> table;
      for (const auto& c : universe)
        for (const auto& t : all_tuples(c.domain_size(), static_cast<int>(vars.size())))
          table.push_back(eval(extend_context(c, x, t), *f, q));
      least.emplace(std::make_pair(table, f->free_vars()), s);
    }
  std::map<int, long long> out;
  for (const auto& kv : least) ++out[kv.second];
  return out;
}

}  // namespace

TEST(Oracle, CountsMatchIndependentEnumerator) {
  auto voc = std::make_shared<Vocabulary>(std::vector<RelationSymbol>{{"P", 1}});
  const std::vector<Context> universe = {Context(make_structure("S", voc, 2, {{"P", {{0}}}})),
                                         Context(make_structure("T", voc, 3, {{"P", {{1}, {2}}}}))};
  for (const auto& specs : std::vector<std::vector<std::string>>{{"exists"}, {"exactly=2"}, {"exists", "most"}}) {
    const QuantifierSet q = quantifiers(specs);
    const int max_size = specs.front() == "exactly=2" ? 4 : 3;
    FormulaOracle oracle(universe, q, max_size);
    std::vector<std::string> vars = {"x", "y", "z"};
    vars.resize(static_cast<std::size_t>(max_size - 1));
    const auto expected = brute_counts(universe, max_size, vars, q);
    for (int s = 1; s <= max_size; ++s)
      EXPECT_EQ(oracle.count_at(s), expected.count(s) ? expected.at(s) : 0)
          << "size " << s << " with " << specs.front();
  }
}

TEST(Oracle, Fig1MinimalSeparators) {
  Fig1 f;
  const auto r = min_separating_size(Context(f.A), Context(f.B2), 4, f.q);
  ASSERT_EQ(r.size, 2);
  EXPECT_TRUE(eval(Context(f.A), *r.witness, f.q));
  EXPECT_FALSE(eval(Context(f.B2), *r.witness, f.q));
  const auto r1 = min_separating_size(Context(f.A), Context(f.B1), 5, f.q);
  ASSERT_EQ(r1.size, 4);
  EXPECT_EQ(r1.witness->size(), 4);
}

TEST(Oracle, Example2NeedsSizeThree) {
  Example2 e;
  const auto r = min_separating_size(Context(e.M), Context(e.N), 4, e.q);
  ASSERT_EQ(r.size, 3);
  EXPECT_EQ(to_string(r.witness), "exactly=3 x. !P1(x)");
  EXPECT_FALSE(min_separating_size(Context(e.M), Context(e.N), 2, e.q).size);
}

TEST(Oracle, EmptyClassesAreSeparatedBySizeOne) {
  Fig1 f;
  const auto r = min_separating_size(std::vector<Context>{}, std::vector<Context>{}, 3, f.q);
  EXPECT_EQ(r.size, 1);
}

TEST(Oracle, IsomorphicStructuresAreNeverSeparated) {
  Gen g(5);
  for (int i = 0; i < 10; ++i) {
    auto voc = g.vocabulary(2, 1);
    auto a = g.structure("A", voc, g.uniform(1, 3));
    auto b = g.variant(*a, "B", 0.0);
    const auto q = g.quantifier_subset({"exists", "most", "exactly=2"});
    EXPECT_FALSE(min_separating_size(Context(a), Context(b), 4, q).size);
    EXPECT_FALSE(separable_at_depth(Context(a), Context(b), 2, q).separable);
  }
}

// Property: every witness separates, and adding quantifiers never raises the minimum.
TEST(Oracle, WitnessesSeparateAndEnrichmentIsAntitone) {
  Gen g(17);
  for (int i = 0; i < 30; ++i) {
    auto voc = g.vocabulary(2, 1);
    auto a = g.structure("A", voc, g.uniform(1, 3));
    auto b = g.coin() ? g.variant(*a, "B", 0.9) : g.structure("B", voc, g.uniform(1, 3));
    const QuantifierSet small = quantifiers({"exists"});
    const QuantifierSet big = quantifiers({"exists", "most", "exactly=2"});
    const auto rs = min_separating_size(Context(a), Context(b), 4, small);
    const auto rb = min_separating_size(Context(a), Context(b), 4, big);
    for (const auto* r : {&rs, &rb})
      if (r->witness) {
        const QuantifierSet& q = r == &rs ? small : big;
        EXPECT_TRUE(eval(Context(a), *r->witness, q));
        EXPECT_FALSE(eval(Context(b), *r->witness, q));
        EXPECT_EQ(r->witness->size(), *r->size);
      }
    if (rs.size) {
      ASSERT_TRUE(rb.size);
      EXPECT_LE(*rb.size, *rs.size);
    }
  }
}

// Property: a least-size witness of depth d means depth-d separability.
TEST(Oracle, DepthSeparabilityAgreesWithSizeWitnesses) {
  Gen g(23);
  for (int i = 0; i < 30; ++i) {
    auto voc = g.vocabulary(2, 0);
    auto a = g.structure("A", voc, g.uniform(1, 3));
    auto b = g.coin() ? g.variant(*a, "B", 0.9) : g.structure("B", voc, g.uniform(1, 3));
    const QuantifierSet q = quantifiers({"exists", "exactly=2"});
    const auto r = min_separating_size(Context(a), Context(b), 4, q);
    if (r.witness) {
      const int d = r.witness->depth();
      const auto ds = separable_at_depth(Context(a), Context(b), d, q);
      EXPECT_TRUE(ds.separable);
      EXPECT_TRUE(eval(Context(a), *ds.witness, q));
      EXPECT_FALSE(eval(Context(b), *ds.witness, q));
      EXPECT_LE(ds.witness->depth(), d);
    }
  }
}

TEST(Oracle, OrPrimitiveNeverIncreasesTheMinimum) {
  Example2 e;
  const auto std_r = min_separating_size(Context(e.M), Context(e.N), 4, e.q);
  const auto or_r = min_separating_size(Context(e.M), Context(e.N), 4, e.q, {}, SizeMode::OrPrimitive);
  ASSERT_TRUE(or_r.size);
  EXPECT_LE(*or_r.size, *std_r.size);
}

TEST(Oracle, WeakVersusStrongOnFiniteClasses) {
  Fig1 f;
  const auto r = weak_vs_strong_report({Context(f.A)}, {Context(f.B1), Context(f.B2)}, 5, f.q);
  EXPECT_TRUE(r.weakly_separable);
  EXPECT_TRUE(r.strongly_separable);
  ASSERT_TRUE(r.combined);
  EXPECT_TRUE(r.combined_separates);
  ASSERT_EQ(r.pair_sizes.size(), 2u);
  EXPECT_EQ(r.pair_sizes[0], 4);
  EXPECT_EQ(r.pair_sizes[1], 2);
  EXPECT_EQ(r.weak_size, 4);
}

TEST(Oracle, RefusesBeyondRowCap) {
  Fig1 f;
  Caps caps;
  caps.max_oracle_rows = 10;
  EXPECT_THROW(min_separating_size(Context(f.A), Context(f.B1), 4, f.q, caps), CapExceeded);
}

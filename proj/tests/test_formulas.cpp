#include <gtest/gtest.h>

#include "efq/formulas.hpp"
#include "support/fixtures.hpp"

using namespace efq;
using namespace efq::testing;

namespace {

std::shared_ptr<const Vocabulary> graph_vocabulary() {
  return std::make_shared<Vocabulary>(std::vector<RelationSymbol>{{"P", 1}, {"E", 2}});
}

// A random formula with its expected metadata computed alongside, independent of Formula's bookkeeping.
struct Sample {
  FormulaPtr f;
  int size = 1;
  int or_size = 1;
  int depth = 0;
  std::set<std::string> free;
};

class FormulaGen {
 public:
  FormulaGen(Gen& g, const QuantifierSet& q) : g_(g), q_(q) {}

  Sample operator()(int budget) {
    const int pick = budget <= 1 ? g_.uniform(0, 1) : g_.uniform(0, 5);
    switch (pick) {
      case 0: {
        auto a = var(), b = var();
        return {Formula::eq(a, b), 1, 1, 0, {a, b}};
      }
      case 1: {
        if (g_.coin()) {
          auto a = var();
          return {Formula::rel("P", {a}), 1, 1, 0, {a}};
        }
        auto a = var(), b = var();
        return {Formula::rel("E", {a, b}), 1, 1, 0, {a, b}};
      }
      case 2: {
        Sample s = (*this)(budget - 1);
        return {Formula::negate(s.f), s.size + 1, s.or_size + 1, s.depth, s.free};
      }
      case 3:
      case 4: {
        Sample l = (*this)(budget / 2), r = (*this)(budget / 2);
        std::set<std::string> free = l.free;
        free.insert(r.free.begin(), r.free.end());
        if (pick == 3)
          return {Formula::conj(l.f, r.f), l.size + r.size, l.or_size + r.or_size, std::max(l.depth, r.depth), free};
        return {Formula::disj(l.f, r.f), l.size + r.size + 3, l.or_size + r.or_size, std::max(l.depth, r.depth),
                free};
      }
      default: {
        const Quantifier& q = q_[static_cast<std::size_t>(g_.uniform(0, static_cast<int>(q_.size()) - 1))];
        std::vector<VarTuple> bound;
        std::vector<FormulaPtr> subs;
        Sample out;
        out.size = out.or_size = 1;
        out.depth = 0;
        for (int j = 0; j < q.width(); ++j) {
          VarTuple x;
          for (int i = 0; i < q.type().arities[static_cast<std::size_t>(j)]; ++i) x.vars.push_back(var());
          Sample s = (*this)((budget - 1) / q.width());
          for (const auto& v : s.free)
            if (std::find(x.vars.begin(), x.vars.end(), v) == x.vars.end()) out.free.insert(v);
          out.size += s.size;
          out.or_size += s.or_size;
          out.depth = std::max(out.depth, s.depth + 1);
          bound.push_back(std::move(x));
          subs.push_back(s.f);
        }
        out.f = Formula::quant(q, bound, subs);
        return out;
      }
    }
  }

 private:
  std::string var() { return std::string(1, "xyz"[g_.uniform(0, 2)]); }

  Gen& g_;
  const QuantifierSet& q_;
};

QuantifierSet all_builtins() { return quantifiers({"exists", "forall", "most", "exactly=2", "haertig", "ham"}); }

Context closed(const StructurePtr& s) { return Context(s, {{"x", 0}, {"y", s->domain_size() - 1}, {"z", 0}}); }

}  // namespace

TEST(Formulas, SizeExamples) {
  auto voc = std::make_shared<Vocabulary>(std::vector<RelationSymbol>{{"P1", 1}, {"P2", 1}, {"P3", 1}, {"B", 1}});
  const QuantifierSet q = quantifiers({"exactly=3"});
  EXPECT_EQ(parse_formula("B(x)", *voc, q)->size(), 1);
  EXPECT_EQ(parse_formula("exactly=3 x. !P1(x)", *voc, q)->size(), 3);
  const auto d = parse_formula("P1(x)|P2(x)|P3(x)", *voc, q);
  EXPECT_EQ(d->size(), 9);
  EXPECT_EQ(d->size(SizeMode::OrPrimitive), 3);
  EXPECT_EQ(parse_formula("exactly=3 x. !(P1(x)|P2(x)|P3(x))", *voc, q)->size(), 11);
}

TEST(Formulas, DepthAndFreeVariableExamples) {
  auto voc = std::make_shared<Vocabulary>(std::vector<RelationSymbol>{{"B", 1}, {"R", 1}, {"P", 1}, {"E", 2}});
  const QuantifierSet q = quantifiers({"exists", "exactly=3", "haertig"});
  EXPECT_EQ(parse_formula("x = y", *voc, q)->depth(), 0);
  EXPECT_EQ(parse_formula("exactly=3 x. (B(x)|R(x))", *voc, q)->depth(), 1);
  EXPECT_EQ(parse_formula("exists x. exists y. E(x,y)", *voc, q)->depth(), 2);
  EXPECT_EQ(parse_formula("B(x)", *voc, q)->free_vars(), (std::set<std::string>{"x"}));
  EXPECT_EQ(parse_formula("exists x. E(x,y)", *voc, q)->free_vars(), (std::set<std::string>{"y"}));
  EXPECT_EQ(parse_formula("haertig (x)(y). (P(x), E(y,z))", *voc, q)->free_vars(), (std::set<std::string>{"z"}));
}

TEST(Formulas, ParseShapes) {
  Fig1 f;
  const auto g = parse_formula("exactly=3 x. (B(x) | R(x))", *f.voc, f.q);
  ASSERT_EQ(g->kind(), Formula::Kind::Quant);
  EXPECT_EQ(g->name(), "exactly=3");
  EXPECT_EQ(g->bound(), (std::vector<VarTuple>{VarTuple{"x"}}));
  EXPECT_TRUE(g->sub().is_or_sugar());
  EXPECT_EQ(*parse_formula("x = x", *f.voc, f.q), *Formula::eq("x", "x"));
  auto voc = std::make_shared<Vocabulary>(std::vector<RelationSymbol>{{"P", 1}, {"R", 1}});
  const auto h = parse_formula("haertig (x)(y). (P(x), R(y))", *voc, quantifiers({"haertig"}));
  EXPECT_EQ(h->bound().size(), 2u);
  EXPECT_EQ(h->subs().size(), 2u);
}

TEST(Formulas, ParseErrorsCarryOffsets) {
  const auto voc = graph_vocabulary();
  const QuantifierSet q = quantifiers({"exists", "haertig"});
  auto offset = [&](const std::string& text) -> long long {
    try {
      parse_formula(text, *voc, q);
    } catch (const ParseError& e) {
      return static_cast<long long>(e.position());
    }
    return -1;
  };
  EXPECT_EQ(offset("Q(x)"), 0);
  EXPECT_EQ(offset("P(x) & E(x)"), 7);
  EXPECT_EQ(offset("exists x. P(y"), 13);
  EXPECT_EQ(offset("most x. P(x)"), 5);
  EXPECT_EQ(offset("haertig (x). P(x)"), 0);
  EXPECT_EQ(offset("P(x) &"), 6);
  EXPECT_EQ(offset("P(x) P(y)"), 5);
}

TEST(Formulas, EvalAndExtensionExamples) {
  Fig1 f;
  const auto g = parse_formula("exactly=3 x. (B(x) | R(x))", *f.voc, f.q);
  EXPECT_TRUE(eval(Context(f.A), *g, f.q));
  EXPECT_FALSE(eval(Context(f.B1), *g, f.q));
  EXPECT_FALSE(eval(Context(f.B2), *g, f.q));
  EXPECT_TRUE(eval(Context(f.A, {{"x", 0}}), *Formula::eq("x", "x"), f.q));
  EXPECT_THROW(eval(Context(f.A), *Formula::eq("x", "x"), f.q), PreconditionError);
  EXPECT_EQ(extension(Context(f.A), g->sub(), VarTuple{"x"}, f.q), (TupleSet{{0}, {1}, {2}}));
  EXPECT_TRUE(extension(Context(f.A), *false_formula("x"), VarTuple{"x"}, f.q).empty());
  auto voc = graph_vocabulary();
  auto two = make_structure("T", voc, 2, {});
  EXPECT_EQ(extension(Context(two), *Formula::eq("x", "y"), VarTuple{"x", "y"}, f.q), (TupleSet{{0, 0}, {1, 1}}));
  EXPECT_EQ(extension(Context(two), *Formula::eq("x", "x"), VarTuple{"x", "x"}, f.q), (TupleSet{{0, 0}, {1, 1}}));
}

// Property: printing then parsing gives back the same AST.
TEST(Formulas, PrintParseRoundTrip) {
  Gen g(7);
  const QuantifierSet q = all_builtins();
  const auto voc = graph_vocabulary();
  FormulaGen gen(g, q);
  for (int i = 0; i < 500; ++i) {
    const Sample s = gen(g.uniform(1, 9));
    const std::string text = to_string(s.f);
    const auto back = parse_formula(text, *voc, q);
    EXPECT_EQ(*back, *s.f) << text;
    EXPECT_EQ(to_string(back), text);
  }
}

// Property: size, depth and free variables follow their recursive definitions.
TEST(Formulas, MetadataMatchesStructuralRecursion) {
  Gen g(11);
  const QuantifierSet q = all_builtins();
  FormulaGen gen(g, q);
  for (int i = 0; i < 500; ++i) {
    const Sample s = gen(g.uniform(1, 10));
    EXPECT_EQ(s.f->size(), s.size) << to_string(s.f);
    EXPECT_EQ(s.f->size(SizeMode::OrPrimitive), s.or_size) << to_string(s.f);
    EXPECT_EQ(s.f->depth(), s.depth) << to_string(s.f);
    EXPECT_EQ(s.f->free_vars(), s.free) << to_string(s.f);
  }
}

// Property: the boolean clauses hold and quantifier nodes agree with accepts() on the extensions.
TEST(Formulas, EvaluationClauses) {
  Gen g(13);
  const QuantifierSet q = all_builtins();
  const auto voc = graph_vocabulary();
  FormulaGen gen(g, q);
  for (int i = 0; i < 300; ++i) {
    const auto s = g.structure("S", voc, g.uniform(1, 4));
    const Context c = closed(s);
    const Sample a = gen(g.uniform(1, 6)), b = gen(g.uniform(1, 6));
    const bool va = eval(c, *a.f, q), vb = eval(c, *b.f, q);
    EXPECT_EQ(eval(c, *Formula::negate(a.f), q), !va);
    EXPECT_EQ(eval(c, *Formula::conj(a.f, b.f), q), va && vb);
    EXPECT_EQ(eval(c, *Formula::disj(a.f, b.f), q), va || vb);
    const Quantifier& qu = q[static_cast<std::size_t>(g.uniform(0, static_cast<int>(q.size()) - 1))];
    std::vector<VarTuple> bound;
    std::vector<FormulaPtr> subs;
    std::vector<TupleSet> ext;
    for (int j = 0; j < qu.width(); ++j) {
      VarTuple x = qu.type().arities[static_cast<std::size_t>(j)] == 1 ? VarTuple{"x"} : VarTuple{"y", "z"};
      const FormulaPtr sub = j ? b.f : a.f;
      ext.push_back(extension(c, *sub, x, q));
      bound.push_back(x);
      subs.push_back(sub);
    }
    EXPECT_EQ(eval(c, *Formula::quant(qu, bound, subs), q), qu.accepts(s->domain_size(), ext));
  }
}

TEST(Formulas, TraceReportsQuantifierNodes) {
  Fig1 f;
  const auto g = parse_formula("exactly=3 x. B(x)", *f.voc, f.q);
  int calls = 0;
  eval(Context(f.A), *g, f.q, [&](const Formula& node, const Assignment&, const std::vector<TupleSet>& ext, bool ok) {
    ++calls;
    EXPECT_EQ(node.name(), "exactly=3");
    EXPECT_EQ(ext.front(), (TupleSet{{0}, {1}, {2}}));
    EXPECT_TRUE(ok);
  });
  EXPECT_EQ(calls, 1);
}

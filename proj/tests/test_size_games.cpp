#include <gtest/gtest.h>

#include <functional>

#include "efq/oracle.hpp"
#include "efq/size_games.hpp"
#include "support/fixtures.hpp"

using namespace efq;
using namespace efq::testing;

namespace {

struct Instance {
  std::vector<Context> a, b;
  QuantifierSet q;
};

// Classes of at most two contexts over one unary and at most one binary relation.
Instance random_instance(Gen& g) {
  auto voc = g.vocabulary(1, g.uniform(0, 1));
  Instance out;
  auto base = g.structure("S", voc, g.uniform(1, 3));
  for (auto* side : {&out.a, &out.b}) {
    const int k = g.uniform(1, 2);
    for (int i = 0; i < k; ++i)
      side->push_back(Context(g.coin() ? g.variant(*base, "V", 0.7) : g.structure("T", voc, g.uniform(1, 3))));
  }
  out.q = g.quantifier_subset({"exists", "forall", "exactly=2"});
  return out;
}

bool separates(const FormulaPtr& f, const std::vector<Context>& a, const std::vector<Context>& b,
               const QuantifierSet& q) {
  for (const auto& c : a)
    if (!eval(c, *f, q)) return false;
  for (const auto& c : b)
    if (eval(c, *f, q)) return false;
  return true;
}

// Walks random lines of play and checks that the solver's values are consistent with its moves.
template <class Position, class Move>
void check_play(SizeGameSolver& solver, const Position& start, Gen& g, int lines) {
  std::function<void(const Position&, int)> walk = [&](const Position& p, int steps) {
    if (p.phase == Position::Phase::Terminal || steps == 0) return;
    std::vector<Move> moves;
    try {
      moves = solver.legal_moves(p);
    } catch (const CapExceeded&) {
      return;
    }
    const Player mover = p.to_move();
    const Player w = solver.winner(p);
    if (moves.empty()) {
      EXPECT_EQ(w, other(mover));
      return;
    }
    bool some_move_wins = false;
    for (const auto& m : moves) some_move_wins = some_move_wins || solver.winner(solver.apply(p, m)) == mover;
    EXPECT_EQ(some_move_wins, w == mover) << solver.describe(p);
    const auto best = solver.best_move(p);
    ASSERT_TRUE(best);
    ASSERT_NE(std::find(moves.begin(), moves.end(), *best), moves.end());
    if (w == mover) EXPECT_EQ(solver.winner(solver.apply(p, *best)), mover) << solver.describe(p, *best);
    walk(solver.apply(p, moves[static_cast<std::size_t>(g.uniform(0, static_cast<int>(moves.size()) - 1))]), steps - 1);
  };
  for (int i = 0; i < lines; ++i) walk(start, 10);
}

}  // namespace

TEST(SizeGames, AtomicSeparationExamples) {
  auto voc = std::make_shared<Vocabulary>(std::vector<RelationSymbol>{{"B", 1}});
  const Context a(make_structure("A", voc, 2, {{"B", {{0}}}}), {{"x", 0}});
  const Context b(make_structure("B", voc, 2, {}), {{"x", 0}});
  const auto f = atomic_separation({a}, {b});
  ASSERT_TRUE(f);
  EXPECT_EQ(to_string(f), "B(x)");
  EXPECT_TRUE(atomic_separation({}, {}));
  EXPECT_FALSE(atomic_separation({a}, {a}));
}

TEST(SizeGames, Fig1ClassGame) {
  Fig1 f;
  const std::vector<Context> a{Context(f.A)}, b{Context(f.B2)};
  EXPECT_EQ(solve_class_game(a, b, 1, f.q).winner, Player::II);
  const auto r = solve_class_game(a, b, 2, f.q);
  ASSERT_EQ(r.winner, Player::I);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(separates(r.witness, a, b, f.q));
  EXPECT_LE(r.witness->size(), 2);
  EXPECT_FALSE(r.strategy.empty());
  SizeGameSolver solver(f.q);
  EXPECT_EQ(solver.min_class_budget(a, b, 4), 2);
  for (int s = 1; s <= 4; ++s) EXPECT_FALSE(solver.class_game(a, a, s));
  // With empty assignments there is no atomic formula to play at budget 1, even against the empty class;
  // the least separator `exactly=3 x. x = x` has size 2.
  EXPECT_FALSE(solver.class_game({}, b, 1));
  EXPECT_TRUE(solver.class_game({}, b, 2));
  EXPECT_EQ(min_separating_size(std::vector<Context>{}, b, 2, f.q).size, 2);
  EXPECT_TRUE(solver.class_game({}, {Context(f.A, {{"x", 0}})}, 1));
}

TEST(SizeGames, Example2PairGameGap) {
  Example2 e;
  SizeGameSolver solver(e.q);
  EXPECT_FALSE(solver.pair_game(Context(e.M), Context(e.N), 1));
  EXPECT_TRUE(solver.pair_game(Context(e.M), Context(e.N), 2));
  EXPECT_EQ(solver.min_pair_budget(Context(e.M), Context(e.N), 4), 2);
  EXPECT_EQ(min_separating_size(Context(e.M), Context(e.N), 3, e.q).size, 3);
  EXPECT_FALSE(solver.class_game({Context(e.M)}, {Context(e.N)}, 2));
  EXPECT_TRUE(solver.class_game({Context(e.M)}, {Context(e.N)}, 3));
}

TEST(SizeGames, IsomorphicPairsAreNeverWon) {
  Gen g(53);
  for (int i = 0; i < 6; ++i) {
    auto voc = g.vocabulary(2, 0);
    auto a = g.structure("A", voc, g.uniform(1, 4));
    auto b = g.variant(*a, "B", 0.0);
    SizeGameSolver solver(quantifiers({"exists", "exactly=2"}));
    EXPECT_FALSE(solver.min_pair_budget(Context(a), Context(b), 5));
  }
}

TEST(SizeGames, WeakGameBasics) {
  Fig1 f;
  SizeGameSolver solver(f.q);
  const auto r = solver.solve_weak_game({Context(f.A)}, {Context(f.B1), Context(f.B2)}, 4);
  ASSERT_EQ(r.winner, Player::I);
  ASSERT_EQ(r.witnesses.size(), 2u);
  EXPECT_TRUE(separates(r.witnesses[0], {Context(f.A)}, {Context(f.B1)}, f.q));
  EXPECT_TRUE(separates(r.witnesses[1], {Context(f.A)}, {Context(f.B2)}, f.q));
  const auto lose = solver.solve_weak_game({Context(f.A)}, {Context(f.B1), Context(f.B2)}, 3);
  EXPECT_EQ(lose.winner, Player::II);
  EXPECT_EQ(lose.left_index, 0);
  EXPECT_EQ(lose.right_index, 0);
  EXPECT_EQ(solver.solve_weak_game({}, {Context(f.A)}, 1).winner, Player::I);
}

// Property: class game agrees with the oracle, is monotone in the budget, and singleton classes
// make the weak and class games coincide.
TEST(SizeGames, ClassGameAgreesWithOracle) {
  Gen g(59);
  for (int i = 0; i < 30; ++i) {
    const Instance in = random_instance(g);
    SizeGameSolver solver(in.q);
    const auto least = min_separating_size(in.a, in.b, 4, in.q).size;
    bool won = false;
    for (int s = 1; s <= 4; ++s) {
      const auto r = solver.solve_class_game(in.a, in.b, s);
      EXPECT_EQ(r.winner == Player::I, least && *least <= s) << "instance " << i << " s=" << s;
      if (won) EXPECT_EQ(r.winner, Player::I);
      won = won || r.winner == Player::I;
      if (r.witness) {
        EXPECT_TRUE(separates(r.witness, in.a, in.b, in.q));
        EXPECT_LE(r.witness->size(), s);
      }
      if (in.a.size() == 1 && in.b.size() == 1)
        EXPECT_EQ(solver.solve_weak_game(in.a, in.b, s).winner, r.winner);
    }
  }
}

// Property: removing the budget-splitting move from the pair game never changes the winner,
// and an oracle separation at size s means Player I wins at s.
TEST(SizeGames, PairGameSplitRedundancyAndSoundness) {
  Gen g(61);
  for (int i = 0; i < 30; ++i) {
    const Instance in = random_instance(g);
    SizeGameSolver with(in.q), without(in.q, {}, SizeGameOptions{false, false});
    const auto least = min_separating_size(in.a[0], in.b[0], 4, in.q).size;
    for (int s = 1; s <= 4; ++s) {
      const bool w = with.pair_game(in.a[0], in.b[0], s);
      EXPECT_EQ(w, without.pair_game(in.a[0], in.b[0], s));
      if (least && *least <= s) EXPECT_TRUE(w);
    }
  }
}

TEST(SizeGames, ClassPlayIsConsistentWithWinner) {
  Gen g(67);
  Fig1 f;
  SizeGameSolver fig(f.q);
  check_play<ClassGamePosition, ClassGameMove>(fig, fig.class_initial({Context(f.A)}, {Context(f.B2)}, 2), g, 4);
  check_play<ClassGamePosition, ClassGameMove>(fig, fig.class_initial({Context(f.A)}, {Context(f.B1)}, 3), g, 4);
  for (int i = 0; i < 10; ++i) {
    const Instance in = random_instance(g);
    SizeGameSolver solver(in.q);
    const auto start = solver.class_initial(in.a, in.b, g.uniform(1, 3));
    EXPECT_EQ(solver.winner(start) == Player::I, solver.class_game(in.a, in.b, start.budget));
    check_play<ClassGamePosition, ClassGameMove>(solver, start, g, 2);
  }
}

TEST(SizeGames, PairPlayIsConsistentWithWinner) {
  Gen g(71);
  Example2 e;
  SizeGameSolver ex(e.q);
  check_play<PairGamePosition, PairGameMove>(ex, ex.pair_initial(Context(e.M), Context(e.N), 2), g, 6);
  for (int i = 0; i < 10; ++i) {
    const Instance in = random_instance(g);
    SizeGameSolver solver(in.q);
    const auto start = solver.pair_initial(in.a[0], in.b[0], g.uniform(1, 3));
    EXPECT_EQ(solver.winner(start) == Player::I, solver.pair_game(in.a[0], in.b[0], start.budget));
    check_play<PairGamePosition, PairGameMove>(solver, start, g, 2);
  }
}

TEST(SizeGames, ClassSizeCap) {
  Fig1 f;
  Caps caps;
  caps.max_class_size = 1;
  EXPECT_THROW(solve_class_game({Context(f.A)}, {Context(f.B1), Context(f.B2)}, 2, f.q, caps), CapExceeded);
}

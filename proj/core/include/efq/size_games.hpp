#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "efq/caps.hpp"
#include "efq/formulas.hpp"
#include "efq/player.hpp"

namespace efq {

/// An atomic formula true on every context of `a` and false on every context
/// of `b`, over the variables bound in all of them; nullptr if there is none.
/// Two empty classes are separated by any atomic formula and yield `w = w`.
FormulaPtr atomic_separation(const std::vector<Context>& a, const std::vector<Context>& b);

struct SizeGameOptions {
  // Let Player I bind variables the contexts already carry. Fresh names are
  // always available, and renaming a bound variable never changes the size of
  // a formula, so this only widens the search.
  bool rebind_existing = false;
  // Pair game only: offer the budget-splitting (conjunction) move.
  bool allow_split = true;
};

struct ClassGameResult {
  Player winner = Player::II;
  int budget = 0;
  // Player I wins: the separating formula read off the winning strategy.
  FormulaPtr witness;
  // Player I wins: the strategy tree, one move per line, indented by depth.
  std::vector<std::string> strategy;
};

struct WeakGameResult {
  Player winner = Player::II;
  int budget = 0;
  // Player II wins: indices of the pair Player II picks.
  int left_index = -1;
  int right_index = -1;
  // Player I wins: one separating formula per pair, row-major over (left, right).
  std::vector<FormulaPtr> witnesses;
};

struct PairGameResult {
  Player winner = Player::II;
  int budget = 0;
  // Player I wins: the winning strategy, one line per reachable position.
  std::vector<std::string> strategy;
};

/// A move of the class game for the interactive front end. Context indices
/// refer to the position's left and right lists.
struct ClassGameMove {
  enum class Kind { Swap, Split, Quantifier, ChooseBranch, ChooseComponent };
  Kind kind = Kind::Swap;
  int u = 0;               // Split: budget of the 𝒞 branch
  std::vector<int> c, d;   // Split: indices into the right class
  std::size_t quantifier = 0;
  std::vector<VarTuple> vars;
  std::vector<int> budgets;
  std::vector<std::vector<TupleSet>> sets;  // Quantifier: [component][context of left ++ right]
  int choice = 0;          // ChooseBranch: 0 = 𝒞, 1 = 𝒟; ChooseComponent: j

  friend bool operator==(const ClassGameMove&, const ClassGameMove&) = default;
};

struct ClassGamePosition {
  enum class Phase { PlayerI, ChooseBranch, ChooseComponent, Terminal };
  int budget = 1;
  std::vector<Context> left, right;
  Phase phase = Phase::PlayerI;
  ClassGameMove pending;
  Player winner = Player::II;  // Terminal only
  std::string note;            // Terminal: why the game ended

  Player to_move() const { return phase == Phase::PlayerI ? Player::I : Player::II; }
};

/// A move of the model-pair game. Reply options follow the definition:
/// 1 = a∈M', b∈N∖N'; 2 = a∈M∖M', b∈N' (sides swap); 3 = a∈M', a'∈M∖M';
/// 4 = b∈N', b'∈N∖N'.
struct PairGameMove {
  enum class Kind { Swap, Split, Quantifier, ChooseBudget, Reply };
  Kind kind = Kind::Swap;
  int u = 0;  // Split: first part; ChooseBudget: the budget picked
  std::size_t quantifier = 0;
  std::vector<VarTuple> vars;
  std::vector<int> budgets;
  std::vector<TupleSet> left_sets, right_sets;  // M'_j, N'_j
  int component = 0;
  int option = 1;
  Tuple first, second;

  friend bool operator==(const PairGameMove&, const PairGameMove&) = default;
};

struct PairGamePosition {
  enum class Phase { PlayerI, ChooseBudget, Reply, Terminal };
  int budget = 1;
  Context left, right;
  Phase phase = Phase::PlayerI;
  PairGameMove pending;
  Player winner = Player::II;
  std::string note;

  Player to_move() const { return phase == Phase::PlayerI ? Player::I : Player::II; }
};

namespace detail {
struct SizeImpl;
}

/// Solver for the formula-size games: the class game EF_s(𝒜, ℬ), its weak
/// variant EF*_s and the model-pair game EF_s(𝔄, f, 𝔅, g). Positions are
/// memoized on isomorphism types; classes are deduplicated up to isomorphism.
class SizeGameSolver {
 public:
  explicit SizeGameSolver(QuantifierSet qset, Caps caps = {}, SizeGameOptions options = {});

  const QuantifierSet& quantifiers() const;

  bool class_game(const std::vector<Context>& a, const std::vector<Context>& b, int budget);
  ClassGameResult solve_class_game(const std::vector<Context>& a, const std::vector<Context>& b,
                                   int budget);
  WeakGameResult solve_weak_game(const std::vector<Context>& a, const std::vector<Context>& b,
                                 int budget);
  bool pair_game(const Context& a, const Context& b, int budget);
  PairGameResult solve_pair_game(const Context& a, const Context& b, int budget);

  /// Least budget in [1, max_budget] at which Player I wins; nullopt if none.
  std::optional<int> min_class_budget(const std::vector<Context>& a,
                                      const std::vector<Context>& b, int max_budget);
  std::optional<int> min_weak_budget(const std::vector<Context>& a,
                                     const std::vector<Context>& b, int max_budget);
  std::optional<int> min_pair_budget(const Context& a, const Context& b, int max_budget);

  long long positions_explored() const;

  // Move-level interface for interactive play. Legal moves are listed in full
  // and refused with the cap "play_moves" beyond `max_moves`.
  ClassGamePosition class_initial(const std::vector<Context>& a, const std::vector<Context>& b,
                                  int budget);
  std::vector<ClassGameMove> legal_moves(const ClassGamePosition& p, std::size_t max_moves = 4096);
  ClassGamePosition apply(const ClassGamePosition& p, const ClassGameMove& m);
  Player winner(const ClassGamePosition& p);
  /// Player I follows the solved strategy; Player II picks a winning answer
  /// when there is one.
  std::optional<ClassGameMove> best_move(const ClassGamePosition& p);
  std::string describe(const ClassGamePosition& p) const;
  std::string describe(const ClassGamePosition& p, const ClassGameMove& m) const;

  PairGamePosition pair_initial(const Context& a, const Context& b, int budget);
  std::vector<PairGameMove> legal_moves(const PairGamePosition& p, std::size_t max_moves = 4096);
  PairGamePosition apply(const PairGamePosition& p, const PairGameMove& m);
  Player winner(const PairGamePosition& p);
  std::optional<PairGameMove> best_move(const PairGamePosition& p);
  std::string describe(const PairGamePosition& p) const;
  std::string describe(const PairGamePosition& p, const PairGameMove& m) const;

 private:
  std::shared_ptr<detail::SizeImpl> impl_;
};

ClassGameResult solve_class_game(const std::vector<Context>& a, const std::vector<Context>& b,
                                 int budget, const QuantifierSet& qset, const Caps& caps = {},
                                 SizeGameOptions options = {});
WeakGameResult solve_weak_game(const std::vector<Context>& a, const std::vector<Context>& b,
                               int budget, const QuantifierSet& qset, const Caps& caps = {},
                               SizeGameOptions options = {});
PairGameResult solve_pair_game(const Context& a, const Context& b, int budget,
                               const QuantifierSet& qset, const Caps& caps = {},
                               SizeGameOptions options = {});

}  // namespace efq

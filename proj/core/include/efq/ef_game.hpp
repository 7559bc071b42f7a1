#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "efq/caps.hpp"
#include "efq/formulas.hpp"
#include "efq/player.hpp"

namespace efq {

/// True iff both contexts agree on every atomic formula over their shared variables.
bool partial_isomorphism(const Context& left, const Context& right);

struct EFOptions {
  // Let the attacker rebind variables already in the assignment, besides
  // choosing canonical fresh ones.
  bool rebind_existing = true;
  // The defender's reply from a spillover set moves play to (N, N, w/x, w'/x)
  // with the old assignment dropped. Setting this keeps h' on both sides.
  bool spillover_reply_keeps_assignment = false;
};

enum class EFPhase {
  RoundStart,            // attacker: quantifier, variable tuples, side, witness sets
  AfterWitness,          // defender: contest a witness set or pass
  ChooseSpillover,       // attacker: spillover sets
  AfterSpillover,        // defender: contest a spillover set or pass
  DefenderWitness,       // defender: witness sets on the other side
  AfterDefenderWitness,  // attacker: contest a defender witness set or pass
  AttackerPick,          // attacker: option (a) or (b)
  DefenderReply,         // defender: answer to option (b)
  Terminal,
};

std::string to_string(EFPhase phase);

struct EFMove {
  enum class Kind {
    Round,
    Pass,
    ContestWitness,
    Spillover,
    ContestSpillover,
    DefenderWitness,
    ContestDefenderWitness,
    PickOutside,  // option (a)
    PickInside,   // option (b)
    ReplyWitness,
    ReplySpillover,
  };
  Kind kind = Kind::Pass;
  std::size_t quantifier = 0;
  std::vector<VarTuple> vars;
  int side = 0;  // Round: 0 = witness sets on the left context, 1 = on the right
  std::vector<TupleSet> sets;
  int component = 0;
  Tuple first;   // u / w
  Tuple second;  // u' / w'

  friend bool operator==(const EFMove&, const EFMove&) = default;
};

/// A position of the EF{𝒬} game, including the within-round stage.
struct EFPosition {
  Context left, right;
  Player attacker = Player::I;
  int rounds_left = 0;
  EFPhase phase = EFPhase::RoundStart;
  // Round data, filled as the round progresses.
  std::size_t quantifier = 0;
  std::vector<VarTuple> vars;
  int side = 0;
  std::vector<TupleSet> witness, spillover, defender_witness;
  int component = 0;
  Tuple picked;  // w' chosen under option (b)
  Player winner = Player::II;  // Terminal only

  Player defender() const { return other(attacker); }
  Player to_move() const;
  // Sides of the current round: M carries the attacker's witness sets.
  const Context& M() const { return side == 0 ? left : right; }
  const Context& N() const { return side == 0 ? right : left; }
};

namespace detail {
struct EFImpl;
}

/// Exact solver for the EF{𝒬} game. Round boundaries are memoized on the
/// pair of contexts and the number of rounds left; the value at a round
/// boundary depends only on those, since the attacker may pick either side.
class EFSolver {
 public:
  explicit EFSolver(QuantifierSet qset, Caps caps = {}, EFOptions options = {});

  const QuantifierSet& quantifiers() const;

  /// Does the player currently attacking win the rounds-round game from (left, right)?
  bool attacker_wins(const Context& left, const Context& right, int rounds);

  EFPosition initial(const Context& left, const Context& right, int rounds) const;
  std::vector<EFMove> legal_moves(const EFPosition& p);
  /// Throws PreconditionError when the move is not legal.
  EFPosition apply(const EFPosition& p, const EFMove& m);
  /// Winner under optimal play from p.
  Player winner(const EFPosition& p);
  /// A move that keeps the win for the player to move when one exists,
  /// otherwise some legal move; nullopt when there is none.
  std::optional<EFMove> best_move(const EFPosition& p);
  /// Winner by plain minimax over legal_moves; slow, for cross-checking.
  Player winner_by_enumeration(const EFPosition& p);

  std::string describe(const EFPosition& p) const;
  std::string describe(const EFPosition& p, const EFMove& m) const;

  long long memo_size() const;

 private:
  std::shared_ptr<detail::EFImpl> impl_;
};

struct EFOutcome {
  Player winner = Player::II;
  EFPosition start;
  std::shared_ptr<EFSolver> solver;

  /// The stored strategy: the winner's move at p.
  std::optional<EFMove> strategy(const EFPosition& p) const;
};

EFOutcome solve_ef(const Context& left, const Context& right, int rounds,
                   const QuantifierSet& qset, const Caps& caps = {}, EFOptions options = {});

/// Plays the winner's strategy against the given moves for the loser.
/// Stops when the game ends or the supplied moves run out.
std::vector<TranscriptEntry> replay(const EFOutcome& outcome, const std::vector<EFMove>& opponent);

}  // namespace efq

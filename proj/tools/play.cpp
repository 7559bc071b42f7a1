#include <istream>
#include <ostream>

#include "cli.hpp"
#include "efq/ef_game.hpp"
#include "efq/oracle.hpp"
#include "efq/size_games.hpp"

namespace efq::cli {

namespace {

bool terminal(const EFPosition& p) { return p.phase == EFPhase::Terminal; }
bool terminal(const ClassGamePosition& p) { return p.phase == ClassGamePosition::Phase::Terminal; }
bool terminal(const PairGamePosition& p) { return p.phase == PairGamePosition::Phase::Terminal; }

// Reads a selection in [1, n]; nullopt on end of input or "q".
std::optional<std::size_t> ask(Session& s, std::size_t n) {
  while (true) {
    *s.out << "> " << std::flush;
    std::string line;
    if (!std::getline(*s.in, line)) return std::nullopt;
    if (line == "q" || line == "quit") return std::nullopt;
    try {
      std::size_t used = 0;
      const long long k = std::stoll(line, &used);
      if (used == line.size() && k >= 1 && static_cast<std::size_t>(k) <= n)
        return static_cast<std::size_t>(k - 1);
    } catch (const std::exception&) {
    }
    *s.out << "enter a number from 1 to " << n << " (q quits)\n";
  }
}

// Returns the winner, or nullopt when the human quits.
template <class Solver, class Position>
std::optional<Player> play_out(Session& s, Solver& solver, Position p, Player human) {
  *s.out << "with optimal play " << to_string(solver.winner(p)) << " wins\n";
  while (!terminal(p)) {
    *s.out << solver.describe(p) << "\n";
    const Player mover = p.to_move();
    if (mover == human) {
      const auto moves = solver.legal_moves(p);
      if (moves.empty()) break;
      for (std::size_t i = 0; i < moves.size(); ++i)
        *s.out << "  " << i + 1 << ") " << solver.describe(p, moves[i]) << "\n";
      const auto k = ask(s, moves.size());
      if (!k) {
        *s.out << "session aborted\n";
        return std::nullopt;
      }
      p = solver.apply(p, moves[*k]);
    } else {
      const auto m = solver.best_move(p);
      if (!m) break;
      *s.out << "engine (" << to_string(mover) << "): " << solver.describe(p, *m) << "\n";
      p = solver.apply(p, *m);
    }
  }
  *s.out << solver.describe(p) << "\n" << to_string(p.winner) << " wins\n";
  return p.winner;
}

void print_witness(Session& s, const std::vector<Context>& a, const std::vector<Context>& b) {
  const int max = s.ws.caps.max_budget;
  int reached = 0;
  SeparationResult r;
  try {
    r = least_separator(s, a, b, max, SizeMode::Standard, &reached);
  } catch (const CapExceeded& e) {
    *s.out << "witness search stopped after size " << reached << ": " << e.what() << "\n";
    return;
  }
  if (r.witness)
    *s.out << "least separating formula (size " << *r.size << "): " << to_string(r.witness) << "\n";
  else
    *s.out << "no separating formula of size <= " << max << "\n";
}

}  // namespace

int cmd_play(Session& s, const PlayArgs& a) {
  const Player human = a.human == "I" ? Player::I : Player::II;
  const GameArgs& g = a.game;
  std::optional<Player> w;
  std::vector<Context> left, right;
  if (a.kind == "class") {
    left = s.contexts(g.left_class);
    right = s.contexts(g.right_class);
  } else {
    left = {s.context(g.left, 0)};
    right = {s.context(g.right, 1)};
  }
  if (a.kind == "ef") {
    if (g.rounds < 0) throw InputError("--rounds is required for the EF game");
    EFSolver solver(s.ws.quantifiers, s.ws.caps);
    w = play_out(s, solver, solver.initial(left[0], right[0], g.rounds), human);
  } else {
    if (g.budget < 1) throw InputError("--budget is required for the size games");
    SizeGameSolver solver(s.ws.quantifiers, s.ws.caps, {false, !g.no_split});
    if (a.kind == "pair")
      w = play_out(s, solver, solver.pair_initial(left[0], right[0], g.budget), human);
    else
      w = play_out(s, solver, solver.class_initial(left, right, g.budget), human);
  }
  if (!w) return kOk;
  if (a.witness) print_witness(s, left, right);
  return s.verdict(*w);
}

}  // namespace efq::cli

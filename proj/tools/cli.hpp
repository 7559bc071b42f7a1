#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "efq/formulas.hpp"
#include "efq/oracle.hpp"
#include "efq/player.hpp"
#include "efq/workspace.hpp"

namespace efq::cli {

enum ExitCode { kOk = 0, kInputError = 1, kPlayerIIWins = 2, kCapRefusal = 3 };

/// Runs the efq command line with the given streams; returns the exit code.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

struct Session {
  Workspace ws;
  bool json = false;
  bool expect_player_i = false;
  std::istream* in = nullptr;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  /// Context by reference; an empty reference picks the `fallback`-th structure loaded.
  Context context(const std::string& ref, std::size_t fallback) const;
  std::vector<Context> contexts(const std::vector<std::string>& refs) const;
  /// kPlayerIIWins when Player II wins under --expect-player-i, else kOk.
  int verdict(Player winner) const;
};

struct EvalArgs {
  std::string structure;
  std::string assign;
  std::string formula;
  bool trace = false;
};

struct GameArgs {
  std::string left, right;
  std::vector<std::string> left_class, right_class;
  int rounds = -1;
  int budget = -1;
  bool find_min = false;
  bool transcript = false;
  bool strategy = false;
  bool no_split = false;
  bool rebind = false;
};

struct SynthArgs {
  GameArgs sides;
  std::string mode = "size";
  int max = -1;
  bool or_primitive = false;
  bool report = false;
};

struct TypesArgs {
  std::vector<std::string> contexts;
  std::string vars = "x";
  int depth = 0;
};

struct PlayArgs {
  GameArgs game;
  std::string kind = "ef";
  std::string human = "II";
  bool witness = false;
};

struct CheckArgs {
  std::vector<std::string> names;
  int max_domain = 4;
};

int cmd_eval(Session& s, const EvalArgs& a);
int cmd_ef_game(Session& s, const GameArgs& a);
int cmd_size_game(Session& s, const GameArgs& a);
int cmd_pair_game(Session& s, const GameArgs& a);
int cmd_weak_game(Session& s, const GameArgs& a);
int cmd_synth(Session& s, const SynthArgs& a);
int cmd_types(Session& s, const TypesArgs& a);
int cmd_play(Session& s, const PlayArgs& a);
int cmd_check_quantifier(Session& s, const CheckArgs& a);

/// Least separating formula by size, raising the size bound one step at a
/// time so the variable pool grows only as needed. `reached` is the largest
/// bound searched completely; a cap refusal is rethrown.
SeparationResult least_separator(const Session& s, const std::vector<Context>& a,
                                 const std::vector<Context>& b, int max, SizeMode mode,
                                 int* reached = nullptr);

/// True when f holds on every context of `a` and fails on every context of `b`.
bool separates(const Formula& f, const std::vector<Context>& a, const std::vector<Context>& b,
               const QuantifierSet& qset);

}  // namespace efq::cli

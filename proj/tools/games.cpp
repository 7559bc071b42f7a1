#include <ostream>

#include "cli.hpp"
#include "efq/ef_game.hpp"
#include "efq/oracle.hpp"
#include "efq/size_games.hpp"
#include "json.hpp"

namespace efq::cli {

using nlohmann::json;

namespace {

std::string name_of(const Context& c) {
  return c.structure->name() + assignment_to_string(c.assignment);
}

json names_of(const std::vector<Context>& cs) {
  json out = json::array();
  for (const auto& c : cs) out.push_back(name_of(c));
  return out;
}

json transcript_json(const std::vector<TranscriptEntry>& t) {
  json out = json::array();
  for (const auto& e : t)
    out.push_back({{"position", e.position}, {"actor", e.actor}, {"move", e.move}, {"note", e.note}});
  return out;
}

// Upper end of a --find-min search, or the single parameter to solve.
int parameter(int given, bool find_min, int cap, const char* flag) {
  if (given >= 0) return given;
  if (find_min) return cap;
  throw InputError(std::string(flag) + " is required unless --find-min is given");
}

void check_witness(const FormulaPtr& f, const std::vector<Context>& a,
                   const std::vector<Context>& b, const QuantifierSet& qset) {
  if (f && !separates(*f, a, b, qset))
    throw Error("witness " + to_string(f) + " failed re-evaluation as a separator");
}

void print_min(std::ostream& out, const std::optional<int>& m, const char* what, int bound) {
  if (m) out << "least " << what << ": " << *m << "\n";
  else out << "Player I does not win with " << what << " up to " << bound << "\n";
}

json opt(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

SeparationResult least_separator(const Session& s, const std::vector<Context>& a,
                                 const std::vector<Context>& b, int max, SizeMode mode,
                                 int* reached) {
  SeparationResult r;
  for (int m = 1; m <= max; ++m) {
    r = min_separating_size(a, b, m, s.ws.quantifiers, s.ws.caps, mode);
    if (reached) *reached = m;
    if (r.size) break;
  }
  return r;
}

int cmd_ef_game(Session& s, const GameArgs& a) {
  const Context left = s.context(a.left, 0), right = s.context(a.right, 1);
  const int rounds = parameter(a.rounds, a.find_min, s.ws.caps.max_depth, "--rounds");
  EFSolver solver(s.ws.quantifiers, s.ws.caps);
  std::optional<int> least;
  if (a.find_min)
    for (int d = 0; d <= rounds && !least; ++d)
      if (solver.attacker_wins(left, right, d)) least = d;
  EFPosition p = solver.initial(left, right, rounds);
  const Player w = solver.winner(p);
  std::vector<TranscriptEntry> transcript;
  if (a.transcript) {
    while (p.phase != EFPhase::Terminal) {
      const auto m = solver.best_move(p);
      if (!m) break;
      transcript.push_back({solver.describe(p), to_string(p.to_move()), solver.describe(p, *m), ""});
      p = solver.apply(p, *m);
    }
    transcript.push_back({solver.describe(p), "", "", to_string(p.winner) + " wins"});
  }
  if (s.json) {
    json out = {{"game", "ef-game"},   {"left", name_of(left)}, {"right", name_of(right)},
                {"rounds", rounds},    {"winner", to_string(w)}};
    if (a.find_min) out["min_rounds"] = opt(least);
    if (a.transcript) out["transcript"] = transcript_json(transcript);
    *s.out << out.dump(2) << "\n";
  } else {
    *s.out << to_string(w) << " wins\n";
    if (a.find_min) print_min(*s.out, least, "rounds", rounds);
    for (const auto& e : transcript)
      if (e.actor.empty()) *s.out << "  " << e.position << "\n";
      else *s.out << "  " << e.position << "\n    " << e.actor << ": " << e.move << "\n";
  }
  return s.verdict(w);
}

int cmd_size_game(Session& s, const GameArgs& a) {
  const auto left = s.contexts(a.left_class), right = s.contexts(a.right_class);
  const int budget = parameter(a.budget, a.find_min, s.ws.caps.max_budget, "--budget");
  SizeGameSolver solver(s.ws.quantifiers, s.ws.caps, {a.rebind, true});
  std::optional<int> least;
  if (a.find_min) least = solver.min_class_budget(left, right, budget);
  // With --find-min the witness and strategy are read at the least winning budget.
  const ClassGameResult r = solver.solve_class_game(left, right, least.value_or(budget));
  check_witness(r.witness, left, right, s.ws.quantifiers);
  if (s.json) {
    json out = {{"game", "size-game"},        {"left", names_of(left)},
                {"right", names_of(right)},   {"budget", budget},
                {"winner", to_string(r.winner)}};
    if (r.witness) {
      out["witness"] = to_string(r.witness);
      out["witness_size"] = r.witness->size();
    }
    if (a.find_min) out["min_budget"] = opt(least);
    if (a.strategy) out["strategy"] = r.strategy;
    *s.out << out.dump(2) << "\n";
  } else {
    *s.out << to_string(r.winner) << " wins\n";
    if (r.witness)
      *s.out << "separating formula (size " << r.witness->size() << ", verified): "
             << to_string(r.witness) << "\n";
    if (a.find_min) print_min(*s.out, least, "budget", budget);
    if (a.strategy)
      for (const auto& l : r.strategy) *s.out << "  " << l << "\n";
  }
  return s.verdict(r.winner);
}

int cmd_pair_game(Session& s, const GameArgs& a) {
  const Context left = s.context(a.left, 0), right = s.context(a.right, 1);
  const int budget = parameter(a.budget, a.find_min, s.ws.caps.max_budget, "--budget");
  SizeGameSolver solver(s.ws.quantifiers, s.ws.caps, {a.rebind, !a.no_split});
  std::optional<int> least;
  if (a.find_min) least = solver.min_pair_budget(left, right, budget);
  const PairGameResult r = solver.solve_pair_game(left, right, least.value_or(budget));
  if (s.json) {
    json out = {{"game", "pair-game"},      {"left", name_of(left)},
                {"right", name_of(right)},  {"budget", budget},
                {"split", !a.no_split},     {"winner", to_string(r.winner)}};
    if (a.find_min) out["min_budget"] = opt(least);
    if (a.strategy) out["strategy"] = r.strategy;
    *s.out << out.dump(2) << "\n";
  } else {
    *s.out << to_string(r.winner) << " wins\n";
    if (a.find_min) print_min(*s.out, least, "budget", budget);
    if (a.strategy)
      for (const auto& l : r.strategy) *s.out << "  " << l << "\n";
  }
  return s.verdict(r.winner);
}

int cmd_weak_game(Session& s, const GameArgs& a) {
  const auto left = s.contexts(a.left_class), right = s.contexts(a.right_class);
  const int budget = parameter(a.budget, a.find_min, s.ws.caps.max_budget, "--budget");
  SizeGameSolver solver(s.ws.quantifiers, s.ws.caps);
  std::optional<int> least;
  if (a.find_min) least = solver.min_weak_budget(left, right, budget);
  const WeakGameResult r = solver.solve_weak_game(left, right, least.value_or(budget));
  json witnesses = json::array();
  for (std::size_t k = 0; k < r.witnesses.size(); ++k) {
    const std::size_t i = k / right.size(), j = k % right.size();
    check_witness(r.witnesses[k], {left[i]}, {right[j]}, s.ws.quantifiers);
    witnesses.push_back({{"left", name_of(left[i])},
                         {"right", name_of(right[j])},
                         {"formula", r.witnesses[k] ? to_string(r.witnesses[k]) : ""}});
  }
  if (s.json) {
    json out = {{"game", "weak-game"},       {"left", names_of(left)},
                {"right", names_of(right)},  {"budget", budget},
                {"winner", to_string(r.winner)}, {"witnesses", witnesses}};
    if (r.winner == Player::II && r.left_index >= 0)
      out["pair"] = {name_of(left[static_cast<std::size_t>(r.left_index)]),
                     name_of(right[static_cast<std::size_t>(r.right_index)])};
    if (a.find_min) out["min_budget"] = opt(least);
    *s.out << out.dump(2) << "\n";
  } else {
    *s.out << to_string(r.winner) << " wins\n";
    if (r.winner == Player::II && r.left_index >= 0)
      *s.out << "Player II picks " << name_of(left[static_cast<std::size_t>(r.left_index)])
             << " and " << name_of(right[static_cast<std::size_t>(r.right_index)]) << "\n";
    for (const auto& w : witnesses)
      *s.out << "  " << w["left"].get<std::string>() << " vs " << w["right"].get<std::string>()
             << ": " << w["formula"].get<std::string>() << "\n";
    if (a.find_min) print_min(*s.out, least, "budget", budget);
  }
  return s.verdict(r.winner);
}

int cmd_synth(Session& s, const SynthArgs& a) {
  std::vector<Context> left, right;
  if (a.sides.left_class.empty() && a.sides.right_class.empty()) {
    left = {s.context(a.sides.left, 0)};
    right = {s.context(a.sides.right, 1)};
  } else {
    left = s.contexts(a.sides.left_class);
    right = s.contexts(a.sides.right_class);
  }
  const SizeMode mode = a.or_primitive ? SizeMode::OrPrimitive : SizeMode::Standard;
  const QuantifierSet& qset = s.ws.quantifiers;
  json out = {{"left", names_of(left)}, {"right", names_of(right)}, {"mode", a.mode}};
  bool found = false;
  if (a.mode == "depth") {
    const int max = a.max >= 0 ? a.max : s.ws.caps.max_depth;
    out["max"] = max;
    for (int d = 0; d <= max && !found; ++d) {
      const DepthSeparation r = separable_at_depth(left, right, d, qset, s.ws.caps);
      if (!r.separable) continue;
      check_witness(r.witness, left, right, qset);
      found = true;
      out["depth"] = d;
      out["witness"] = to_string(r.witness);
      if (!s.json)
        *s.out << "least depth: " << d << "\nseparating formula (verified): "
               << to_string(r.witness) << "\n";
    }
    if (!found && !s.json) *s.out << "no separating formula of depth <= " << max << "\n";
  } else {
    const int max = a.max >= 1 ? a.max : s.ws.caps.max_budget;
    out["max"] = max;
    int reached = 0;
    SeparationResult r;
    try {
      r = least_separator(s, left, right, max, mode, &reached);
    } catch (const CapExceeded&) {
      *s.err << "no separating formula of size <= " << reached << "\n";
      throw;
    }
    check_witness(r.witness, left, right, qset);
    found = r.size.has_value();
    out["size"] = opt(r.size);
    out["rows"] = r.rows;
    out["entries"] = r.entries;
    if (r.witness) out["witness"] = to_string(r.witness);
    if (!s.json) {
      if (r.witness)
        *s.out << "least size: " << *r.size << "\nseparating formula (verified): "
               << to_string(r.witness) << "\n";
      else
        *s.out << "no separating formula of size <= " << max << "\n";
      *s.out << "searched " << r.entries << " formula classes over " << r.rows << " rows\n";
    }
    if (a.report) {
      const WeakStrongReport w = weak_vs_strong_report(left, right, max, qset, s.ws.caps, mode);
      json pairs = json::array();
      for (auto v : w.pair_sizes) pairs.push_back(opt(v));
      out["report"] = {{"pair_sizes", pairs},
                       {"weak_size", opt(w.weak_size)},
                       {"strong_size", opt(w.strong_size)},
                       {"weakly_separable", w.weakly_separable},
                       {"strongly_separable", w.strongly_separable},
                       {"combined", w.combined ? to_string(w.combined) : ""},
                       {"combined_separates", w.combined_separates}};
      if (!s.json) {
        *s.out << "pair minima:";
        for (auto v : w.pair_sizes) *s.out << " " << (v ? std::to_string(*v) : "-");
        *s.out << "\nweakly separable: " << (w.weakly_separable ? "yes" : "no")
               << ", strongly separable: " << (w.strongly_separable ? "yes" : "no") << "\n";
        if (w.combined)
          *s.out << "combined formula (" << (w.combined_separates ? "separates" : "does not separate")
                 << "): " << to_string(w.combined) << "\n";
      }
    }
  }
  if (s.json) *s.out << out.dump(2) << "\n";
  return s.verdict(found ? Player::I : Player::II);
}

}  // namespace efq::cli

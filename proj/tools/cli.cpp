#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "efq/quantifiers.hpp"
#include "efq/types_engine.hpp"
#include "json.hpp"

namespace efq::cli {

using nlohmann::json;

Context Session::context(const std::string& ref, std::size_t fallback) const {
  if (!ref.empty()) return ws.context(ref);
  if (fallback >= ws.structure_order.size())
    throw InputError(fallback == 0 ? "no structure given and none loaded"
                                   : "pass --left and --right, or load two structures");
  return ws.context(ws.structure_order[fallback]);
}

std::vector<Context> Session::contexts(const std::vector<std::string>& refs) const {
  std::vector<Context> out;
  for (const auto& r : refs) out.push_back(ws.context(r));
  return out;
}

int Session::verdict(Player winner) const {
  return expect_player_i && winner == Player::II ? kPlayerIIWins : kOk;
}

bool separates(const Formula& f, const std::vector<Context>& a, const std::vector<Context>& b,
               const QuantifierSet& qset) {
  for (const auto& c : a)
    if (!eval(c, f, qset)) return false;
  for (const auto& c : b)
    if (eval(c, f, qset)) return false;
  return true;
}

namespace {

std::string sets_string(const std::vector<TupleSet>& sets) {
  std::string out;
  for (std::size_t j = 0; j < sets.size(); ++j) {
    out += j ? " " : "";
    out += "{";
    for (std::size_t i = 0; i < sets[j].size(); ++i)
      out += (i ? "," : "") + tuple_to_string(sets[j][i]);
    out += "}";
  }
  return out;
}

VarTuple parse_vars(const std::string& text) {
  std::vector<std::string> vars;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',' || ch == ' ') {
      if (!cur.empty()) vars.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (vars.empty()) throw InputError("--vars: expected at least one variable");
  return VarTuple(vars);
}

}  // namespace

int cmd_eval(Session& s, const EvalArgs& a) {
  Context c = s.context(a.structure, 0);
  for (const auto& [var, val] : parse_assignment(a.assign)) c.assignment[var] = val;
  c = s.ws.context(c.structure->name(), c.assignment);
  FormulaPtr f;
  try {
    f = parse_formula(a.formula, *s.ws.vocabulary, s.ws.quantifiers);
  } catch (const ParseError& e) {
    *s.err << "error: " << e.what() << "\n  " << a.formula << "\n  "
           << std::string(std::min(e.position(), a.formula.size()), ' ') << "^\n";
    return kInputError;
  }
  json trace = json::array();
  std::vector<std::string> lines;
  EvalTrace tracer;
  if (a.trace)
    tracer = [&](const Formula& node, const Assignment& asg, const std::vector<TupleSet>& ext,
                 bool accepted) {
      trace.push_back({{"formula", to_string(node)},
                       {"assignment", asg},
                       {"extensions", ext},
                       {"accepted", accepted}});
      lines.push_back(to_string(node) + " under " + assignment_to_string(asg) + ": " +
                      sets_string(ext) + (accepted ? " accepted" : " rejected"));
    };
  const bool value = eval(c, *f, s.ws.quantifiers, tracer);
  if (s.json) {
    json out = {{"structure", c.structure->name()},
                {"assignment", c.assignment},
                {"formula", to_string(f)},
                {"value", value}};
    if (a.trace) out["trace"] = trace;
    *s.out << out.dump(2) << "\n";
  } else {
    *s.out << (value ? "true" : "false") << "\n";
    for (const auto& l : lines) *s.out << "  " << l << "\n";
  }
  return kOk;
}

int cmd_types(Session& s, const TypesArgs& a) {
  std::vector<Context> cs;
  if (a.contexts.empty()) cs.push_back(s.context("", 0));
  else cs = s.contexts(a.contexts);
  const VarTuple x = parse_vars(a.vars);
  if (a.depth < 0) throw InputError("--depth must be non-negative");
  Caps::check("max_depth", s.ws.caps.max_depth, a.depth);
  TypesEngine engine(s.ws.quantifiers, s.ws.caps);
  // Past the refinement fixpoint every later stratum is the same, so report
  // the fixpoint partition.
  int used = 0;
  TypePartition part = engine.joint_partition(cs, x, 0);
  while (used < a.depth) {
    TypePartition next = engine.joint_partition(cs, x, used + 1);
    if (next.stable()) break;
    part = std::move(next);
    ++used;
  }
  json cells = json::array();
  std::ostringstream text;
  for (std::size_t k = 0; k < part.cell_count(); ++k) {
    FormulaPtr chi = part.type_formula(k);
    bool verified = chi->depth() <= a.depth;
    for (std::size_t ci = 0; ci < cs.size(); ++ci)
      for (const auto& t : tuples_respecting(cs[ci].domain_size(), x)) {
        const bool in = part.cell_of(static_cast<int>(ci), t) == static_cast<int>(k);
        if (eval(extend_context(cs[ci], x, t), *chi, s.ws.quantifiers) != in) verified = false;
      }
    if (!verified) throw Error("type formula of cell " + std::to_string(k) + " failed re-evaluation");
    json members = json::object();
    text << "cell " << k << ":";
    for (std::size_t ci = 0; ci < cs.size(); ++ci) {
      json ts = json::array();
      std::string line;
      for (const auto& m : part.cells()[k])
        if (m.context == static_cast<int>(ci)) {
          ts.push_back(m.tuple);
          line += (line.empty() ? "" : ",") + tuple_to_string(m.tuple);
        }
      const std::string name = cs[ci].structure->name() + assignment_to_string(cs[ci].assignment);
      members[name] = ts;
      text << " " << name << "={" << line << "}";
    }
    text << "\n  " << to_string(chi) << "\n";
    cells.push_back({{"members", members}, {"formula", to_string(chi)}});
  }
  const std::string note = used < a.depth ? "refinement reaches its fixpoint at depth " +
                                                std::to_string(used) + "; deeper types coincide"
                                          : "";
  if (s.json) {
    json out = {{"vars", x.to_string()}, {"depth", a.depth}, {"fixpoint_depth", used}, {"cells", cells}};
    if (!note.empty()) out["note"] = note;
    *s.out << out.dump(2) << "\n";
  } else {
    *s.out << part.cell_count() << " cells of " << x.to_string() << " at depth " << a.depth << "\n"
           << text.str();
    if (!note.empty()) *s.out << "note: " << note << "\n";
  }
  return kOk;
}

int cmd_check_quantifier(Session& s, const CheckArgs& a) {
  std::vector<Quantifier> qs;
  if (a.names.empty()) qs = s.ws.quantifiers.items();
  for (const auto& name : a.names)
    if (const Quantifier* q = s.ws.quantifiers.find(name)) qs.push_back(*q);
    else qs.push_back(builtin_quantifier(name));
  if (qs.empty()) throw InputError("no quantifier to check");
  bool all_ok = true;
  json out = json::array();
  for (const auto& q : qs) {
    IsoReport r = check_iso_invariance(q, a.max_domain);
    all_ok = all_ok && r.ok();
    json viol = json::array();
    for (const auto& v : r.violations)
      viol.push_back({{"domain", v.domain_size}, {"sets", v.sets}, {"permutation", v.permutation}});
    out.push_back({{"quantifier", r.quantifier},
                   {"max_domain", r.max_domain},
                   {"inputs_checked", r.inputs_checked},
                   {"exhaustive", r.exhaustive},
                   {"ok", r.ok()},
                   {"violations", viol}});
    if (!s.json) {
      *s.out << r.quantifier << ": " << (r.ok() ? "isomorphism invariant" : "NOT invariant")
             << " (" << r.inputs_checked << " inputs, domains <= " << r.max_domain
             << (r.exhaustive ? ", exhaustive" : ", sampled") << ")\n";
      for (const auto& v : r.violations) {
        std::string perm;
        for (int p : v.permutation) perm += (perm.empty() ? "" : " ") + std::to_string(p);
        *s.out << "  domain " << v.domain_size << ", sets " << sets_string(v.sets)
               << ", permutation [" << perm << "]\n";
      }
    }
  }
  if (s.json) *s.out << out.dump(2) << "\n";
  return all_ok ? kOk : kInputError;
}

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  Session s;
  s.in = &in;
  s.out = &out;
  s.err = &err;

  CLI::App app{"efq: first-order logic with generalized quantifiers and its comparison games"};
  app.require_subcommand(1);
  std::vector<std::string> files;
  std::string quantifiers, dump;
  app.add_option("-w,--workspace", files, "workspace JSON files, merged in order");
  app.add_option("-q,--quantifiers", quantifiers, "extra quantifiers, comma separated (e.g. exists,exactly=3)");
  app.add_flag("--json", s.json, "machine-readable output");
  app.add_flag("--expect-player-i", s.expect_player_i, "exit with 2 when Player II wins");
  app.add_option("--dump-workspace", dump, "write the merged workspace to this file");
  std::map<std::string, long long> cap_values;
  for (const char* cap : {"max-domain", "max-class-size", "max-budget", "max-depth", "fresh-pool",
                          "max-type-cells", "max-tuple-universe", "max-oracle-rows",
                          "max-oracle-entries"})
    app.add_option(std::string("--") + cap, cap_values[cap], std::string("cap override: ") + cap)
        ->check(CLI::NonNegativeNumber);

  auto sub = [&](const char* name, const char* help) {
    auto* c = app.add_subcommand(name, help);
    c->fallthrough();
    return c;
  };
  auto add_pair = [](CLI::App* c, GameArgs& g) {
    c->add_option("--left", g.left, "left context: A, A:f or A{x=0}");
    c->add_option("--right", g.right, "right context");
  };
  auto add_classes = [](CLI::App* c, GameArgs& g) {
    c->add_option("--left-class", g.left_class, "context of the left class (repeatable)");
    c->add_option("--right-class", g.right_class, "context of the right class (repeatable)");
  };

  EvalArgs eval_args;
  auto* eval_cmd = sub("eval", "evaluate a formula");
  eval_cmd->add_option("formula", eval_args.formula, "formula text")->required();
  eval_cmd->add_option("-s,--structure", eval_args.structure, "context: A, A:f or A{x=0}");
  eval_cmd->add_option("-a,--assign", eval_args.assign, "extra assignment, e.g. x=0,y=1");
  eval_cmd->add_flag("--trace", eval_args.trace, "print each quantifier node's extensions");

  GameArgs ef_args;
  auto* ef_cmd = sub("ef-game", "solve the EF game with contestation");
  add_pair(ef_cmd, ef_args);
  ef_cmd->add_option("-d,--rounds", ef_args.rounds, "number of rounds");
  ef_cmd->add_flag("--find-min", ef_args.find_min, "least number of rounds Player I needs");
  ef_cmd->add_flag("--transcript", ef_args.transcript, "print an optimal line of play");

  GameArgs size_args;
  auto* size_cmd = sub("size-game", "solve the class formula-size game");
  add_classes(size_cmd, size_args);
  size_cmd->add_option("-s,--budget", size_args.budget, "size budget");
  size_cmd->add_flag("--find-min", size_args.find_min, "least budget Player I needs");
  size_cmd->add_flag("--strategy", size_args.strategy, "print Player I's strategy tree");
  size_cmd->add_flag("--rebind", size_args.rebind, "let Player I rebind bound variables");

  GameArgs pair_args;
  auto* pair_cmd = sub("pair-game", "solve the model-pair formula-size game");
  add_pair(pair_cmd, pair_args);
  pair_cmd->add_option("-s,--budget", pair_args.budget, "size budget");
  pair_cmd->add_flag("--find-min", pair_args.find_min, "least budget Player I needs");
  pair_cmd->add_flag("--strategy", pair_args.strategy, "print Player I's strategy");
  pair_cmd->add_flag("--no-split", pair_args.no_split, "disable the budget-splitting move");
  pair_cmd->add_flag("--rebind", pair_args.rebind, "let Player I rebind bound variables");

  GameArgs weak_args;
  auto* weak_cmd = sub("weak-game", "solve the weak class game");
  add_classes(weak_cmd, weak_args);
  weak_cmd->add_option("-s,--budget", weak_args.budget, "size budget");
  weak_cmd->add_flag("--find-min", weak_args.find_min, "least budget Player I needs");

  SynthArgs synth_args;
  auto* synth_cmd = sub("synth", "find a least separating formula by brute force");
  add_pair(synth_cmd, synth_args.sides);
  add_classes(synth_cmd, synth_args.sides);
  synth_cmd->add_option("--mode", synth_args.mode, "size or depth")
      ->check(CLI::IsMember({"size", "depth"}));
  synth_cmd->add_option("--max", synth_args.max, "largest size or depth to try");
  synth_cmd->add_flag("--or-primitive", synth_args.or_primitive, "count disjunction as one symbol");
  synth_cmd->add_flag("--report", synth_args.report, "weak versus strong separation report");

  TypesArgs types_args;
  auto* types_cmd = sub("types", "list the d-types of a variable tuple");
  types_cmd->add_option("-s,--structure", types_args.contexts, "context (repeatable; joint partition)");
  types_cmd->add_option("--vars", types_args.vars, "variable tuple, e.g. x or x,y");
  types_cmd->add_option("-d,--depth", types_args.depth, "quantifier depth");

  PlayArgs play_args;
  auto* play_cmd = sub("play", "play a game against the solver");
  play_cmd->add_option("--game", play_args.kind, "ef, pair or class")
      ->check(CLI::IsMember({"ef", "pair", "class"}));
  play_cmd->add_option("--human", play_args.human, "side you play: I or II")
      ->check(CLI::IsMember({"I", "II"}));
  add_pair(play_cmd, play_args.game);
  add_classes(play_cmd, play_args.game);
  play_cmd->add_option("-d,--rounds", play_args.game.rounds, "rounds (ef)");
  play_cmd->add_option("-s,--budget", play_args.game.budget, "budget (pair, class)");
  play_cmd->add_flag("--no-split", play_args.game.no_split, "disable the split move (pair)");
  play_cmd->add_flag("--witness", play_args.witness, "print a least separating formula at the end");

  CheckArgs check_args;
  auto* check_cmd = sub("check-quantifier", "check isomorphism invariance");
  check_cmd->add_option("names", check_args.names, "builtin specs or workspace quantifier names");
  check_cmd->add_option("--max-domain", check_args.max_domain, "largest domain to check")
      ->check(CLI::Range(1, 6));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    s.ws = load_workspace(files);
    std::stringstream qs(quantifiers);
    for (std::string q; std::getline(qs, q, ',');)
      if (!q.empty()) s.ws.add_quantifier(q);
    Caps& c = s.ws.caps;
    const std::map<std::string, int*> ints = {
        {"max-domain", &c.max_domain},     {"max-class-size", &c.max_class_size},
        {"max-budget", &c.max_budget},     {"max-depth", &c.max_depth},
        {"fresh-pool", &c.fresh_pool},     {"max-type-cells", &c.max_type_cells},
        {"max-tuple-universe", &c.max_tuple_universe}};
    for (const auto& [name, value] : cap_values) {
      if (app.get_option("--" + name)->count() == 0) continue;
      if (value < 1 && name != "fresh-pool") throw InputError("--" + name + " must be positive");
      if (auto it = ints.find(name); it != ints.end()) *it->second = static_cast<int>(value);
      else if (name == "max-oracle-rows") c.max_oracle_rows = value;
      else c.max_oracle_entries = value;
    }
    if (!dump.empty()) {
      std::ofstream f(dump);
      if (!f) throw InputError("cannot write '" + dump + "'");
      f << dump_workspace(s.ws) << "\n";
    }

    if (*eval_cmd) return cmd_eval(s, eval_args);
    if (*ef_cmd) return cmd_ef_game(s, ef_args);
    if (*size_cmd) return cmd_size_game(s, size_args);
    if (*pair_cmd) return cmd_pair_game(s, pair_args);
    if (*weak_cmd) return cmd_weak_game(s, weak_args);
    if (*synth_cmd) return cmd_synth(s, synth_args);
    if (*types_cmd) return cmd_types(s, types_args);
    if (*play_cmd) return cmd_play(s, play_args);
    return cmd_check_quantifier(s, check_args);
  } catch (const CapExceeded& e) {
    err << "refused: " << e.what() << "\n";
    return kCapRefusal;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace efq::cli

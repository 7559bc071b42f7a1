#pragma once

// Solver internals shared by the size-game solver and its interactive front end.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "efq/size_games.hpp"

namespace efq::detail {

// An atomic formula: equality when rel < 0, otherwise rel(args).
struct Atom {
  int rel = -1;
  std::vector<std::string> args;
};

inline std::vector<std::string> common_variables(const std::vector<const Context*>& cs) {
  if (cs.empty()) return {};
  std::vector<std::string> out = cs.front()->variables();
  for (const Context* c : cs) {
    std::vector<std::string> keep;
    for (const auto& v : out)
      if (c->assignment.count(v)) keep.push_back(v);
    out = std::move(keep);
  }
  return out;
}

inline std::vector<Atom> atoms_over(const Vocabulary& voc, const std::vector<std::string>& vars) {
  std::vector<Atom> out;
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i; j < vars.size(); ++j) out.push_back({-1, {vars[i], vars[j]}});
  if (vars.empty()) return out;
  for (std::size_t r = 0; r < voc.size(); ++r) {
    const int ar = voc.arity(r);
    std::vector<std::size_t> idx(static_cast<std::size_t>(ar), 0);
    while (true) {
      Atom a{static_cast<int>(r), {}};
      for (std::size_t i : idx) a.args.push_back(vars[i]);
      out.push_back(std::move(a));
      int p = ar - 1;
      while (p >= 0 && ++idx[static_cast<std::size_t>(p)] == vars.size()) idx[static_cast<std::size_t>(p--)] = 0;
      if (p < 0) break;
    }
  }
  return out;
}

inline bool atom_holds(const Atom& a, const Context& c) {
  if (a.rel < 0) return c.value(a.args[0]) == c.value(a.args[1]);
  Tuple t;
  for (const auto& v : a.args) t.push_back(c.value(v));
  return c.structure->holds(static_cast<std::size_t>(a.rel), t);
}

inline FormulaPtr atom_formula(const Atom& a, const Vocabulary& voc) {
  if (a.rel < 0) return Formula::eq(a.args[0], a.args[1]);
  return Formula::rel(voc.symbols()[static_cast<std::size_t>(a.rel)].name, a.args);
}

inline FormulaPtr atomic_separation_ptrs(const std::vector<const Context*>& a,
                                  const std::vector<const Context*>& b) {
  if (a.empty() && b.empty()) return Formula::eq("w", "w");
  std::vector<const Context*> all(a);
  all.insert(all.end(), b.begin(), b.end());
  const Vocabulary& voc = all.front()->structure->vocabulary();
  for (const Atom& atom : atoms_over(voc, common_variables(all))) {
    bool ok = true;
    for (const Context* c : a)
      if (!atom_holds(atom, *c)) { ok = false; break; }
    for (std::size_t i = 0; ok && i < b.size(); ++i)
      if (atom_holds(atom, *b[i])) ok = false;
    if (ok) return atom_formula(atom, voc);
  }
  return nullptr;
}

inline std::vector<std::string> fresh_pool(const std::set<std::string>& used, int count) {
  static const char* const base[] = {"x", "y", "z", "u", "v"};
  std::vector<std::string> out;
  for (const char* n : base) {
    if (static_cast<int>(out.size()) == count) return out;
    if (!used.count(n)) out.push_back(n);
  }
  for (int i = 1; static_cast<int>(out.size()) < count; ++i) {
    std::string n = "x" + std::to_string(i);
    if (!used.count(n)) out.push_back(n);
  }
  return out;
}

// Variable tuples for one component: fresh names in first-use order, and the
// existing variables when rebinding is allowed.
inline std::vector<VarTuple> var_choices(int arity, const std::set<std::string>& used, bool rebind) {
  auto fresh = fresh_pool(used, arity);
  std::vector<VarTuple> out;
  VarTuple cur;
  std::function<void(int, int)> rec = [&](int pos, int used_fresh) {
    if (pos == arity) {
      out.push_back(cur);
      return;
    }
    if (rebind)
      for (const auto& v : used) {
        cur.vars.push_back(v);
        rec(pos + 1, used_fresh);
        cur.vars.pop_back();
      }
    for (int f = 0; f <= used_fresh && f < arity; ++f) {
      cur.vars.push_back(fresh[static_cast<std::size_t>(f)]);
      rec(pos + 1, std::max(used_fresh, f + 1));
      cur.vars.pop_back();
    }
  };
  rec(0, 0);
  return out;
}

// Every choice of one variable tuple per component.
inline std::vector<std::vector<VarTuple>> component_choices(const QuantifierType& type,
                                                     const std::set<std::string>& used,
                                                     bool rebind) {
  std::vector<std::vector<VarTuple>> out{{}};
  for (int ar : type.arities) {
    auto opts = var_choices(ar, used, rebind);
    std::vector<std::vector<VarTuple>> next;
    for (const auto& prefix : out)
      for (const auto& x : opts) {
        next.push_back(prefix);
        next.back().push_back(x);
      }
    out = std::move(next);
  }
  return out;
}

// Compositions of total into k positive parts.
inline std::vector<std::vector<int>> compositions(int total, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int left, int parts) {
    if (parts == 1) {
      cur.push_back(left);
      out.push_back(cur);
      cur.pop_back();
      return;
    }
    for (int u = 1; u <= left - (parts - 1); ++u) {
      cur.push_back(u);
      rec(left - u, parts - 1);
      cur.pop_back();
    }
  };
  if (k >= 1 && total >= k) rec(total, k);
  return out;
}

inline std::string vars_to_string(const std::vector<VarTuple>& vars) {
  std::string out;
  for (const auto& x : vars) out += x.to_string();
  return out;
}

inline std::string budgets_to_string(const std::vector<int>& budgets) {
  std::string out;
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (i) out += "+";
    out += std::to_string(budgets[i]);
  }
  return out;
}


using Mask = std::uint32_t;

using Class = std::vector<int>;  // sorted ids of isomorphism types

struct ClassMove {
  enum class Kind { None, Atomic, Negation, Conjunction, Quantifier } kind = Kind::None;
  FormulaPtr atom;
  int u = 0, v = 0;
  Class c, d;
  std::size_t quantifier = 0;
  std::vector<VarTuple> vars;
  std::vector<int> budgets;
  std::vector<Class> plus, minus;
};

struct ClassEntry {
  bool win = false;
  ClassMove move;
};

struct PairMove {
  enum class Kind { None, Atomic, Negation, Split, Quantifier } kind = Kind::None;
  FormulaPtr atom;
  int u = 0;
  std::size_t quantifier = 0;
  std::vector<VarTuple> vars;
  std::vector<int> budgets;
  std::vector<Mask> left_sets, right_sets;  // M'_j and N'_j over tuples_respecting order
};

struct PairEntry {
  bool win = false;
  PairMove move;
};

struct SizeImpl {
  QuantifierSet qset;
  Caps caps;
  SizeGameOptions opts;
  long long positions = 0;

  std::unordered_map<std::string, int> ids;
  std::vector<Context> reps;
  std::map<std::pair<int, std::string>, std::vector<int>> ext_memo;
  std::unordered_map<std::string, ClassEntry> class_memo;
  std::map<std::tuple<int, int, int>, PairEntry> pair_memo;
  std::shared_ptr<const Vocabulary> vocab;

  SizeImpl(QuantifierSet q, Caps c, SizeGameOptions o)
      : qset(std::move(q)), caps(c), opts(o) {}

  int intern(const Context& c) {
    if (!vocab) vocab = c.structure->vocabulary_ptr();
    else if (!(c.structure->vocabulary() == *vocab))
      throw InputError("size game: contexts over different vocabularies");
    Caps::check("max_domain", caps.max_domain, c.domain_size());
    auto key = iso_key(c);
    auto [it, fresh] = ids.emplace(std::move(key), static_cast<int>(reps.size()));
    if (fresh) reps.push_back(c);
    return it->second;
  }

  Class intern_class(const std::vector<Context>& cs) {
    Class out;
    for (const auto& c : cs) out.push_back(intern(c));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Isomorphism-type ids of base extended by every tuple respecting x, in tuple order.
  const std::vector<int>& extensions(int base, const VarTuple& x) {
    auto key = std::make_pair(base, x.to_string());
    auto it = ext_memo.find(key);
    if (it != ext_memo.end()) return it->second;
    std::vector<int> out;
    const Context c = reps[static_cast<std::size_t>(base)];
    for (const auto& t : tuples_respecting(c.domain_size(), x))
      out.push_back(intern(extend_context(c, x, t)));
    return ext_memo.emplace(std::move(key), std::move(out)).first->second;
  }

  std::vector<const Context*> ptrs(const Class& cls) const {
    std::vector<const Context*> out;
    for (int id : cls) out.push_back(&reps[static_cast<std::size_t>(id)]);
    return out;
  }

  std::set<std::string> used_variables(const Class& a, const Class& b) const {
    std::set<std::string> out;
    for (const Class* cls : {&a, &b})
      for (int id : *cls)
        for (const auto& kv : reps[static_cast<std::size_t>(id)].assignment) out.insert(kv.first);
    return out;
  }

  std::string describe(int id) const {
    const Context& c = reps[static_cast<std::size_t>(id)];
    return c.structure->name() + assignment_to_string(c.assignment);
  }

  std::string describe(const Class& cls) const {
    std::string out = "{";
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (i) out += ", ";
      out += describe(cls[i]);
    }
    return out + "}";
  }

  // ---------------------------------------------------------------- class game

  static std::string class_key(int s, const Class& a, const Class& b) {
    std::string k = std::to_string(s) + ":";
    for (int id : a) k += std::to_string(id) + ",";
    k += "|";
    for (int id : b) k += std::to_string(id) + ",";
    return k;
  }

  bool class_win(int s, const Class& a, const Class& b) {
    auto key = class_key(s, a, b);
    auto it = class_memo.find(key);
    if (it != class_memo.end()) return it->second.win;
    ++positions;
    Caps::check("max_class_size", caps.max_class_size,
                static_cast<long long>(std::max(a.size(), b.size())));
    ClassEntry e;
    bool shared = false;
    for (int id : a)
      if (std::binary_search(b.begin(), b.end(), id)) shared = true;
    if (!shared) {
      if (auto atom = atomic_separation_ptrs(ptrs(a), ptrs(b))) {
        e.win = true;
        e.move.kind = ClassMove::Kind::Atomic;
        e.move.atom = atom;
      } else if (s > 1) {
        e.win = negation(s, a, b, e.move) || conjunction(s, a, b, e.move) ||
                quantifier_move(s, a, b, e.move);
      }
    }
    class_memo.emplace(std::move(key), e);
    return e.win;
  }

  bool negation(int s, const Class& a, const Class& b, ClassMove& m) {
    if (!class_win(s - 1, b, a)) return false;
    m.kind = ClassMove::Kind::Negation;
    return true;
  }

  // Winning against a class means winning against each subclass, so a cover
  // C ∪ D = B can be shrunk to a partition. Contexts that lose alone on one
  // side are forced to the other; the rest are placed by a DFS in which C and
  // D only grow, so a lost partial branch stays lost.
  bool conjunction(int s, const Class& a, const Class& b, ClassMove& m) {
    for (int u = 1; u < s; ++u) {
      const int v = s - u;
      Class c, d, free;
      bool possible = true;
      for (int id : b) {
        const bool in_c = class_win(u, a, {id}), in_d = class_win(v, a, {id});
        if (!in_c && !in_d) possible = false;
        else if (!in_d) c.push_back(id);
        else if (!in_c) d.push_back(id);
        else free.push_back(id);
        if (!possible) break;
      }
      if (!possible || (c.size() > 1 && !class_win(u, a, c)) || (d.size() > 1 && !class_win(v, a, d)))
        continue;
      auto with = [](Class cls, int id) {
        cls.insert(std::lower_bound(cls.begin(), cls.end(), id), id);
        return cls;
      };
      std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
        if (i == free.size()) return class_win(u, a, c) && class_win(v, a, d);
        for (Class* side : {&c, &d}) {
          Class next = with(*side, free[i]);
          if (!class_win(side == &c ? u : v, a, next)) continue;
          std::swap(*side, next);
          if (rec(i + 1)) return true;
          std::swap(*side, next);
        }
        return false;
      };
      if (rec(0)) {
        m.kind = ClassMove::Kind::Conjunction;
        m.u = u;
        m.v = v;
        m.c = c;
        m.d = d;
        return true;
      }
    }
    return false;
  }

  bool quantifier_move(int s, const Class& a, const Class& b, ClassMove& m) {
    const auto used = used_variables(a, b);
    for (std::size_t qi = 0; qi < qset.size(); ++qi) {
      const Quantifier& q = qset[qi];
      if (q.width() > s - 1) continue;
      for (const auto& vars : component_choices(q.type(), used, opts.rebind_existing))
        for (const auto& budgets : compositions(s - 1, q.width()))
          if (quantifier_search(qi, vars, budgets, a, b, m)) return true;
    }
    return false;
  }

  struct Component {
    std::vector<int> universe;                  // local class -> id
    std::vector<std::vector<int>> tuple_class;  // [base][tuple] -> local class
    std::vector<std::vector<Tuple>> tuples;     // [base]
    std::vector<std::vector<std::pair<int, int>>> occurrences;  // [local] -> (base, count)
    std::vector<Atom> atoms;
    std::vector<std::vector<char>> truth;  // [local][atom]
  };

  // Player I's choice of P: each isomorphism type of extended context goes
  // wholly in or out, since splitting one hands Player II an isomorphic pair.
  bool quantifier_search(std::size_t qi, const std::vector<VarTuple>& vars,
                         const std::vector<int>& budgets, const Class& a, const Class& b,
                         ClassMove& m) {
    const Quantifier& q = qset[qi];
    const std::size_t k = vars.size();
    std::vector<int> bases(a);
    bases.insert(bases.end(), b.begin(), b.end());
    std::vector<char> want(bases.size(), 0);
    std::fill(want.begin(), want.begin() + static_cast<long>(a.size()), 1);

    std::vector<Component> comps(k);
    long long universe_total = 0;
    for (std::size_t j = 0; j < k; ++j) {
      Component& comp = comps[j];
      std::unordered_map<int, int> local;
      comp.tuple_class.resize(bases.size());
      comp.tuples.resize(bases.size());
      for (std::size_t i = 0; i < bases.size(); ++i) {
        const auto& ext = extensions(bases[i], vars[j]);
        comp.tuples[i] = tuples_respecting(reps[static_cast<std::size_t>(bases[i])].domain_size(),
                                           vars[j]);
        for (int id : ext) {
          auto [it, fresh] = local.emplace(id, static_cast<int>(comp.universe.size()));
          if (fresh) {
            comp.universe.push_back(id);
            comp.occurrences.emplace_back();
          }
          comp.tuple_class[i].push_back(it->second);
          auto& occ = comp.occurrences[static_cast<std::size_t>(it->second)];
          if (!occ.empty() && occ.back().first == static_cast<int>(i)) ++occ.back().second;
          else occ.emplace_back(static_cast<int>(i), 1);
        }
      }
      universe_total += static_cast<long long>(comp.universe.size());
      if (budgets[j] == 1) {
        std::vector<const Context*> cs;
        for (int id : comp.universe) cs.push_back(&reps[static_cast<std::size_t>(id)]);
        comp.atoms = atoms_over(*vocab, common_variables(cs));
        for (const Context* c : cs) {
          std::vector<char> row;
          for (const auto& atom : comp.atoms) row.push_back(atom_holds(atom, *c) ? 1 : 0);
          comp.truth.push_back(std::move(row));
        }
      }
    }
    Caps::check("max_class_size", 2LL * caps.max_class_size, universe_total);

    // Decision order: by base context, so each base completes as early as possible.
    std::vector<std::pair<std::size_t, int>> order;
    std::vector<std::vector<char>> placed(k);
    for (std::size_t j = 0; j < k; ++j) placed[j].assign(comps[j].universe.size(), 0);
    std::vector<int> completes_at(bases.size(), -1);
    for (std::size_t i = 0; i < bases.size(); ++i)
      for (std::size_t j = 0; j < k; ++j)
        for (int l : comps[j].tuple_class[i]) {
          if (!placed[j][static_cast<std::size_t>(l)]) {
            placed[j][static_cast<std::size_t>(l)] = 1;
            order.emplace_back(j, l);
          }
        }
    std::vector<std::vector<int>> position(k);
    for (std::size_t j = 0; j < k; ++j) position[j].assign(comps[j].universe.size(), 0);
    for (std::size_t p = 0; p < order.size(); ++p)
      position[order[p].first][static_cast<std::size_t>(order[p].second)] = static_cast<int>(p);
    std::vector<std::vector<int>> completed(order.size());
    for (std::size_t i = 0; i < bases.size(); ++i) {
      int last = 0;
      for (std::size_t j = 0; j < k; ++j)
        for (int l : comps[j].tuple_class[i])
          last = std::max(last, position[j][static_cast<std::size_t>(l)]);
      completed[static_cast<std::size_t>(last)].push_back(static_cast<int>(i));
    }

    const bool counting = q.monadic();
    std::vector<int> count_in(bases.size(), 0), remaining(bases.size(), 0);
    if (counting)
      for (std::size_t i = 0; i < bases.size(); ++i)
        remaining[i] = static_cast<int>(comps[0].tuple_class[i].size());

    std::vector<std::vector<signed char>> in(k);
    for (std::size_t j = 0; j < k; ++j) in[j].assign(comps[j].universe.size(), -1);

    auto split = [&](std::size_t j, Class& plus, Class& minus) {
      plus.clear();
      minus.clear();
      for (std::size_t l = 0; l < comps[j].universe.size(); ++l) {
        if (in[j][l] == 1) plus.push_back(comps[j].universe[l]);
        else if (in[j][l] == 0) minus.push_back(comps[j].universe[l]);
      }
      std::sort(plus.begin(), plus.end());
      std::sort(minus.begin(), minus.end());
    };

    auto base_ok = [&](int i) {
      const int n = reps[static_cast<std::size_t>(bases[static_cast<std::size_t>(i)])].domain_size();
      std::vector<TupleSet> sets(k);
      for (std::size_t j = 0; j < k; ++j) {
        const auto& tc = comps[j].tuple_class[static_cast<std::size_t>(i)];
        for (std::size_t t = 0; t < tc.size(); ++t)
          if (in[j][static_cast<std::size_t>(tc[t])] == 1)
            sets[j].push_back(comps[j].tuples[static_cast<std::size_t>(i)][t]);
      }
      return q.accepts(n, sets) == static_cast<bool>(want[static_cast<std::size_t>(i)]);
    };

    auto count_feasible = [&](int i) {
      const std::size_t ui = static_cast<std::size_t>(i);
      const int n = reps[static_cast<std::size_t>(bases[ui])].domain_size();
      for (int c = count_in[ui]; c <= count_in[ui] + remaining[ui]; ++c)
        if (q.accepts_count(n, c) == static_cast<bool>(want[ui])) return true;
      return false;
    };

    Class plus, minus;
    std::function<bool(std::size_t, std::vector<std::vector<int>>&)> dfs =
        [&](std::size_t pos, std::vector<std::vector<int>>& survivors) -> bool {
      if (pos == order.size()) {
        for (std::size_t j = 0; j < k; ++j) {
          split(j, plus, minus);
          if (!class_win(budgets[j], plus, minus)) return false;
        }
        return true;
      }
      const auto [j, l] = order[pos];
      const std::size_t ul = static_cast<std::size_t>(l);
      for (signed char val : {1, 0}) {
        in[j][ul] = val;
        bool ok = true;
        if (counting)
          for (const auto& [i, cnt] : comps[j].occurrences[ul]) {
            remaining[static_cast<std::size_t>(i)] -= cnt;
            if (val) count_in[static_cast<std::size_t>(i)] += cnt;
            if (!count_feasible(i)) ok = false;
          }
        std::vector<std::vector<int>> next;
        if (ok && budgets[j] == 1) {
          next = survivors;
          auto& sv = next[j];
          sv.erase(std::remove_if(sv.begin(), sv.end(),
                                  [&](int at) {
                                    return comps[j].truth[ul][static_cast<std::size_t>(at)] != val;
                                  }),
                   sv.end());
          if (sv.empty()) ok = false;
        }
        if (ok && !counting)
          for (int i : completed[pos])
            if (!base_ok(i)) { ok = false; break; }
        if (ok && !completed[pos].empty())
          for (std::size_t jj = 0; jj < k && ok; ++jj) {
            if (budgets[jj] == 1) continue;
            split(jj, plus, minus);
            if (!class_win(budgets[jj], plus, minus)) ok = false;
          }
        if (ok && dfs(pos + 1, budgets[j] == 1 ? next : survivors)) return true;
        if (counting)
          for (const auto& [i, cnt] : comps[j].occurrences[ul]) {
            remaining[static_cast<std::size_t>(i)] += cnt;
            if (val) count_in[static_cast<std::size_t>(i)] -= cnt;
          }
      }
      in[j][ul] = -1;
      return false;
    };

    std::vector<std::vector<int>> survivors(k);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t at = 0; at < comps[j].atoms.size(); ++at)
        survivors[j].push_back(static_cast<int>(at));
    if (!dfs(0, survivors)) return false;

    m.kind = ClassMove::Kind::Quantifier;
    m.quantifier = qi;
    m.vars = vars;
    m.budgets = budgets;
    m.plus.assign(k, {});
    m.minus.assign(k, {});
    for (std::size_t j = 0; j < k; ++j) split(j, m.plus[j], m.minus[j]);
    return true;
  }

  const ClassEntry& class_entry(int s, const Class& a, const Class& b) {
    class_win(s, a, b);
    return class_memo.at(class_key(s, a, b));
  }

  FormulaPtr class_formula(int s, const Class& a, const Class& b,
                           std::vector<std::string>* lines, int indent) {
    const ClassEntry& e = class_entry(s, a, b);
    if (!e.win) throw PreconditionError("size game: no winning strategy to read a formula from");
    const ClassMove m = e.move;
    const std::string pad(static_cast<std::size_t>(2 * indent), ' ');
    auto say = [&](const std::string& text) {
      if (lines) lines->push_back(pad + "[" + std::to_string(s) + "] " + text);
    };
    switch (m.kind) {
      case ClassMove::Kind::Atomic:
        say("atomic " + to_string(*m.atom) + " separates " + describe(a) + " from " + describe(b));
        return m.atom;
      case ClassMove::Kind::Negation:
        say("swap classes");
        return Formula::negate(class_formula(s - 1, b, a, lines, indent + 1));
      case ClassMove::Kind::Conjunction: {
        say("split right class " + std::to_string(m.u) + "+" + std::to_string(m.v) + ": " +
            describe(m.c) + " | " + describe(m.d));
        auto f = class_formula(m.u, a, m.c, lines, indent + 1);
        auto g = class_formula(m.v, a, m.d, lines, indent + 1);
        return Formula::conj(f, g);
      }
      case ClassMove::Kind::Quantifier: {
        const Quantifier& q = qset[m.quantifier];
        say("supplement with " + q.name() + " " + vars_to_string(m.vars) + ", budgets " +
            budgets_to_string(m.budgets));
        std::vector<FormulaPtr> subs;
        for (std::size_t j = 0; j < m.vars.size(); ++j)
          subs.push_back(class_formula(m.budgets[j], m.plus[j], m.minus[j], lines, indent + 1));
        return Formula::quant(q, m.vars, subs);
      }
      case ClassMove::Kind::None:
        break;
    }
    throw PreconditionError("size game: corrupt strategy entry");
  }

  // ----------------------------------------------------------------- pair game

  bool pair_win(int s, int a, int b) {
    auto key = std::make_tuple(s, a, b);
    auto it = pair_memo.find(key);
    if (it != pair_memo.end()) return it->second.win;
    ++positions;
    PairEntry e;
    if (a != b) {
      if (auto atom = atomic_separation_ptrs({&reps[static_cast<std::size_t>(a)]},
                                             {&reps[static_cast<std::size_t>(b)]})) {
        e.win = true;
        e.move.kind = PairMove::Kind::Atomic;
        e.move.atom = atom;
      } else if (s > 1) {
        if (pair_win(s - 1, b, a)) {
          e.win = true;
          e.move.kind = PairMove::Kind::Negation;
        }
        for (int u = 1; !e.win && opts.allow_split && u <= s / 2; ++u)
          if (pair_win(u, a, b) && pair_win(s - u, a, b)) {
            e.win = true;
            e.move.kind = PairMove::Kind::Split;
            e.move.u = u;
          }
        if (!e.win) e.win = pair_quantifier(s, a, b, e.move);
      }
    }
    pair_memo[key] = e;
    return e.win;
  }

  struct PairSide {
    std::vector<Tuple> left, right;
    std::vector<int> left_ids, right_ids;
  };

  // Pairs (M', N') for one component that survive every answer of Player II at budget u.
  std::vector<std::pair<Mask, Mask>> safe_pairs(int u, const PairSide& side,
                                                const std::function<bool(Mask, Mask)>& filter) {
    const std::size_t m = side.left.size(), n = side.right.size();
    const Mask full_m = m == 32 ? ~Mask{0} : ((Mask{1} << m) - 1);
    const Mask full_n = n == 32 ? ~Mask{0} : ((Mask{1} << n) - 1);
    std::vector<Mask> w1(m, 0), w2t(m, 0), w3(m, 0), w4(n, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t t = 0; t < n; ++t) {
        if (pair_win(u, side.left_ids[i], side.right_ids[t])) w1[i] |= Mask{1} << t;
        if (pair_win(u, side.right_ids[t], side.left_ids[i])) w2t[i] |= Mask{1} << t;
      }
      for (std::size_t i2 = 0; i2 < m; ++i2)
        if (i2 != i && pair_win(u, side.left_ids[i], side.left_ids[i2])) w3[i] |= Mask{1} << i2;
    }
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t t2 = 0; t2 < n; ++t2)
        if (t2 != t && pair_win(u, side.right_ids[t], side.right_ids[t2])) w4[t] |= Mask{1} << t2;

    std::vector<Mask> lefts, rights;
    for (Mask x = 0;; ++x) {
      bool ok = true;
      for (std::size_t i = 0; i < m && ok; ++i)
        if ((x >> i & 1) && (~x & full_m & ~w3[i])) ok = false;
      if (ok) lefts.push_back(x);
      if (x == full_m) break;
    }
    for (Mask y = 0;; ++y) {
      bool ok = true;
      for (std::size_t t = 0; t < n && ok; ++t)
        if ((y >> t & 1) && (~y & full_n & ~w4[t])) ok = false;
      if (ok) rights.push_back(y);
      if (y == full_n) break;
    }
    std::vector<std::pair<Mask, Mask>> out;
    for (Mask x : lefts)
      for (Mask y : rights) {
        if (filter && !filter(x, y)) continue;
        bool ok = true;
        for (std::size_t i = 0; i < m && ok; ++i) {
          if (x >> i & 1) ok = (~y & full_n & ~w1[i]) == 0;
          else ok = (y & ~w2t[i]) == 0;
        }
        if (ok) out.emplace_back(x, y);
      }
    return out;
  }

  static TupleSet mask_set(const std::vector<Tuple>& tuples, Mask x) {
    TupleSet out;
    for (std::size_t i = 0; i < tuples.size(); ++i)
      if (x >> i & 1) out.push_back(tuples[i]);
    return out;
  }

  bool pair_quantifier(int s, int a, int b, PairMove& m) {
    // Copies: recursive calls intern new contexts and may move reps.
    const int dom_a = reps[static_cast<std::size_t>(a)].domain_size();
    const int dom_b = reps[static_cast<std::size_t>(b)].domain_size();
    const auto used = used_variables({a}, {b});
    for (std::size_t qi = 0; qi < qset.size(); ++qi) {
      const Quantifier& q = qset[qi];
      const std::size_t k = static_cast<std::size_t>(q.width());
      if (q.width() > s - 1) continue;
      for (const auto& vars : component_choices(q.type(), used, opts.rebind_existing)) {
        std::vector<PairSide> sides(k);
        for (std::size_t j = 0; j < k; ++j) {
          sides[j].left = tuples_respecting(dom_a, vars[j]);
          sides[j].right = tuples_respecting(dom_b, vars[j]);
          Caps::check("max_tuple_universe", caps.max_tuple_universe,
                      static_cast<long long>(std::max(sides[j].left.size(), sides[j].right.size())));
          sides[j].left_ids = extensions(a, vars[j]);
          sides[j].right_ids = extensions(b, vars[j]);
        }
        for (const auto& budgets : compositions(s - 1, q.width())) {
          std::function<bool(Mask, Mask)> filter;
          if (k == 1)
            filter = [&](Mask x, Mask y) {
              std::vector<TupleSet> sx{mask_set(sides[0].left, x)}, sy{mask_set(sides[0].right, y)};
              return q.accepts(dom_a, sx) && !q.accepts(dom_b, sy);
            };
          std::vector<std::vector<std::pair<Mask, Mask>>> safe(k);
          bool empty = false;
          for (std::size_t j = 0; j < k && !empty; ++j) {
            safe[j] = safe_pairs(budgets[j], sides[j], filter);
            empty = safe[j].empty();
          }
          if (empty) continue;
          std::vector<std::size_t> pick(k, 0);
          std::function<bool(std::size_t)> rec = [&](std::size_t j) -> bool {
            if (j == k) {
              std::vector<TupleSet> sx, sy;
              for (std::size_t c = 0; c < k; ++c) {
                sx.push_back(mask_set(sides[c].left, safe[c][pick[c]].first));
                sy.push_back(mask_set(sides[c].right, safe[c][pick[c]].second));
              }
              return q.accepts(dom_a, sx) && !q.accepts(dom_b, sy);
            }
            for (pick[j] = 0; pick[j] < safe[j].size(); ++pick[j])
              if (rec(j + 1)) return true;
            return false;
          };
          if (rec(0)) {
            m.kind = PairMove::Kind::Quantifier;
            m.quantifier = qi;
            m.vars = vars;
            m.budgets = budgets;
            for (std::size_t j = 0; j < k; ++j) {
              m.left_sets.push_back(safe[j][pick[j]].first);
              m.right_sets.push_back(safe[j][pick[j]].second);
            }
            return true;
          }
        }
      }
    }
    return false;
  }

  void pair_strategy(int s, int a, int b, std::vector<std::string>& lines, int indent,
                     std::set<std::tuple<int, int, int>>& seen) {
    constexpr std::size_t kMaxLines = 400;
    if (lines.size() >= kMaxLines) {
      if (lines.size() == kMaxLines) lines.push_back("...");
      return;
    }
    const std::string pad(static_cast<std::size_t>(2 * indent), ' ');
    const std::string head =
        pad + "[" + std::to_string(s) + "] " + describe(a) + " vs " + describe(b) + ": ";
    if (!seen.insert({s, a, b}).second) {
      lines.push_back(head + "as above");
      return;
    }
    pair_win(s, a, b);
    const PairMove m = pair_memo.at({s, a, b}).move;
    switch (m.kind) {
      case PairMove::Kind::Atomic:
        lines.push_back(head + "atomic " + to_string(*m.atom));
        return;
      case PairMove::Kind::Negation:
        lines.push_back(head + "swap models");
        pair_strategy(s - 1, b, a, lines, indent + 1, seen);
        return;
      case PairMove::Kind::Split:
        lines.push_back(head + "split budget " + std::to_string(m.u) + "+" +
                        std::to_string(s - m.u));
        pair_strategy(s - m.u, a, b, lines, indent + 1, seen);
        return;
      case PairMove::Kind::Quantifier: {
        const Context& ca = reps[static_cast<std::size_t>(a)];
        const Context& cb = reps[static_cast<std::size_t>(b)];
        std::string text = head + "supplement with " + qset[m.quantifier].name() + " " +
                           vars_to_string(m.vars) + ", budgets " + budgets_to_string(m.budgets);
        std::vector<std::vector<Tuple>> lt, rt;
        for (std::size_t j = 0; j < m.vars.size(); ++j) {
          lt.push_back(tuples_respecting(ca.domain_size(), m.vars[j]));
          rt.push_back(tuples_respecting(cb.domain_size(), m.vars[j]));
          auto show = [](const TupleSet& ts) {
            std::string out = "{";
            for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? "," : "") + tuple_to_string(ts[i]);
            return out + "}";
          };
          text += ", M'=" + show(mask_set(lt[j], m.left_sets[j])) +
                  " N'=" + show(mask_set(rt[j], m.right_sets[j]));
        }
        lines.push_back(text);
        for (std::size_t j = 0; j < m.vars.size(); ++j) {
          const int u = m.budgets[j];
          const auto& li = extensions(a, m.vars[j]);
          const auto& ri = extensions(b, m.vars[j]);
          const Mask x = m.left_sets[j], y = m.right_sets[j];
          std::set<std::pair<int, int>> next;
          for (std::size_t i = 0; i < li.size(); ++i) {
            for (std::size_t t = 0; t < ri.size(); ++t) {
              if ((x >> i & 1) && !(y >> t & 1)) next.insert({li[i], ri[t]});
              if (!(x >> i & 1) && (y >> t & 1)) next.insert({ri[t], li[i]});
            }
            for (std::size_t i2 = 0; i2 < li.size(); ++i2)
              if ((x >> i & 1) && !(x >> i2 & 1)) next.insert({li[i], li[i2]});
          }
          for (std::size_t t = 0; t < ri.size(); ++t)
            for (std::size_t t2 = 0; t2 < ri.size(); ++t2)
              if ((y >> t & 1) && !(y >> t2 & 1)) next.insert({ri[t], ri[t2]});
          for (const auto& [p, r] : next) pair_strategy(u, p, r, lines, indent + 1, seen);
        }
        return;
      }
      case PairMove::Kind::None:
        break;
    }
    lines.push_back(head + "no winning move");
  }
};

}  // namespace efq::detail

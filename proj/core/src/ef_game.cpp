#include "efq/ef_game.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <unordered_map>

namespace efq {

bool partial_isomorphism(const Context& left, const Context& right) {
  auto vars = left.variables();
  if (vars != right.variables())
    throw PreconditionError("partial isomorphism needs equal assignment domains");
  const Vocabulary& voc = left.structure->vocabulary();
  if (!(voc == right.structure->vocabulary()))
    throw PreconditionError("contexts have different vocabularies");
  const int n = static_cast<int>(vars.size());
  std::vector<int> a, b;
  for (const auto& [v, e] : left.assignment) a.push_back(e);
  for (const auto& [v, e] : right.assignment) b.push_back(e);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  if (n == 0) return true;
  Tuple ta, tb;
  for (std::size_t r = 0; r < voc.size(); ++r)
    for (const auto& idx : all_tuples(n, voc.arity(r))) {
      ta.clear();
      tb.clear();
      for (int i : idx) {
        ta.push_back(a[i]);
        tb.push_back(b[i]);
      }
      if (left.structure->holds(r, ta) != right.structure->holds(r, tb)) return false;
    }
  return true;
}

std::string to_string(EFPhase phase) {
  switch (phase) {
    case EFPhase::RoundStart: return "round-start";
    case EFPhase::AfterWitness: return "after-witness";
    case EFPhase::ChooseSpillover: return "choose-spillover";
    case EFPhase::AfterSpillover: return "after-spillover";
    case EFPhase::DefenderWitness: return "defender-witness";
    case EFPhase::AfterDefenderWitness: return "after-defender-witness";
    case EFPhase::AttackerPick: return "attacker-pick";
    case EFPhase::DefenderReply: return "defender-reply";
    case EFPhase::Terminal: return "terminal";
  }
  return "?";
}

Player EFPosition::to_move() const {
  switch (phase) {
    case EFPhase::RoundStart:
    case EFPhase::ChooseSpillover:
    case EFPhase::AfterDefenderWitness:
    case EFPhase::AttackerPick:
      return attacker;
    case EFPhase::Terminal:
      return winner;
    default:
      return defender();
  }
}

namespace detail {

using Mask = std::uint64_t;

inline bool has(Mask m, int i) { return (m >> i) & 1; }
inline Mask full_mask(std::size_t n) { return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1; }

// Everything about one round that depends only on (M, N, rounds, Q, x̄).
struct Tables {
  int k = 0;
  std::vector<std::vector<Tuple>> TM, TN;
  std::vector<std::vector<Mask>> EM, EN;   // u -> {u' : attacker loses at (W_u, W_u')}
  std::vector<std::vector<Mask>> cross;    // w in TM -> {w' in TN : attacker loses at (M_w, N_w')}
  std::vector<std::vector<Mask>> crossT;   // w' in TN -> {w in TM : same}
  std::vector<std::vector<Mask>> dropT;    // w' in TN -> {w in TN : attacker loses after reply w from P}
  std::vector<Mask> good;                  // spillover material that survives contest
  std::vector<std::vector<Mask>> closedM, closedN;
};

struct RoundChoice {
  int side = 0;
  std::size_t q = 0;
  std::vector<VarTuple> vars;
  std::vector<Mask> X, P;
};

struct EFImpl {
  QuantifierSet qset;
  Caps caps;
  EFOptions opts;
  std::unordered_map<std::string, int> sids;
  std::unordered_map<std::string, char> memo;
  std::unordered_map<std::string, char> enum_memo;

  std::string ckey(const Context& c) {
    auto it = sids.find(c.structure->key());
    int id;
    if (it == sids.end()) {
      id = static_cast<int>(sids.size());
      sids.emplace(c.structure->key(), id);
    } else {
      id = it->second;
    }
    return std::to_string(id) + assignment_to_string(c.assignment);
  }

  std::string pkey(const Context& a, const Context& b, int r) {
    auto ka = ckey(a), kb = ckey(b);
    if (kb < ka) std::swap(ka, kb);
    return ka + "#" + kb + "#" + std::to_string(r);
  }

  // Does the current attacker win from the round boundary (a, b) with r rounds left?
  bool W(const Context& a, const Context& b, int r) {
    if (!partial_isomorphism(a, b)) return true;
    if (r == 0) return false;
    auto key = pkey(a, b, r);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool v = round_win(a, b, r, nullptr);
    memo.emplace(std::move(key), v);
    return v;
  }

  // Bound tuples the attacker may use: canonical fresh names, optionally
  // mixed with variables already bound.
  std::vector<VarTuple> var_choices(const Context& c, int arity) {
    auto bound = c.variables();
    std::vector<std::string> fresh;
    for (int i = 1; static_cast<int>(fresh.size()) < arity; ++i) {
      std::string name = "z" + std::to_string(i);
      if (!c.assignment.count(name)) fresh.push_back(name);
    }
    std::vector<VarTuple> out;
    VarTuple cur;
    std::function<void(int, int)> rec = [&](int pos, int used_fresh) {
      if (pos == arity) {
        out.push_back(cur);
        return;
      }
      if (opts.rebind_existing)
        for (const auto& v : bound) {
          cur.vars.push_back(v);
          rec(pos + 1, used_fresh);
          cur.vars.pop_back();
        }
      for (int f = 0; f <= used_fresh && f < arity; ++f) {
        cur.vars.push_back(fresh[f]);
        rec(pos + 1, std::max(used_fresh, f + 1));
        cur.vars.pop_back();
      }
    };
    rec(0, 0);
    return out;
  }

  Context reply_context(const Context& base, const VarTuple& x, const Tuple& t) {
    if (opts.spillover_reply_keeps_assignment) return extend_context(base, x, t);
    return Context(base.structure, extend_assignment({}, x, t));
  }

  std::vector<Mask> closed_subsets(const std::vector<Mask>& E) {
    const std::size_t n = E.size();
    std::vector<Mask> out;
    for (Mask y = 0; y <= full_mask(n); ++y) {
      bool ok = true;
      for (std::size_t u = 0; u < n && ok; ++u)
        if (has(y, static_cast<int>(u)) && (E[u] & ~y)) ok = false;
      if (ok) out.push_back(y);
      if (y == full_mask(n)) break;
    }
    return out;
  }

  Tables tables(const Context& M, const Context& N, int r, std::size_t qi,
                const std::vector<VarTuple>& xs) {
    const Quantifier& q = qset[qi];
    Tables t;
    t.k = q.width();
    for (int j = 0; j < t.k; ++j) {
      const VarTuple& x = xs[j];
      auto tm = tuples_respecting(M.domain_size(), x);
      auto tn = tuples_respecting(N.domain_size(), x);
      Caps::check("max_tuple_universe", caps.max_tuple_universe,
                  static_cast<long long>(std::max(tm.size(), tn.size())));
      std::vector<Context> cm, cn;
      for (const auto& w : tm) cm.push_back(extend_context(M, x, w));
      for (const auto& w : tn) cn.push_back(extend_context(N, x, w));
      auto same = [&](const std::vector<Context>& cs) {
        std::vector<Mask> E(cs.size(), 0);
        for (std::size_t u = 0; u < cs.size(); ++u)
          for (std::size_t v = u; v < cs.size(); ++v)
            if (!W(cs[u], cs[v], r - 1)) {
              E[u] |= Mask{1} << v;
              E[v] |= Mask{1} << u;
            }
        return E;
      };
      t.EM.push_back(same(cm));
      t.EN.push_back(same(cn));
      std::vector<Mask> cross(tm.size(), 0), crossT(tn.size(), 0);
      for (std::size_t a = 0; a < tm.size(); ++a)
        for (std::size_t b = 0; b < tn.size(); ++b)
          if (!W(cm[a], cn[b], r - 1)) {
            cross[a] |= Mask{1} << b;
            crossT[b] |= Mask{1} << a;
          }
      Mask good = 0;
      for (std::size_t b = 0; b < tn.size(); ++b)
        if (crossT[b] == 0) good |= Mask{1} << b;
      std::vector<Context> cd;
      for (const auto& w : tn) cd.push_back(reply_context(N, x, w));
      std::vector<Mask> dropT(tn.size(), 0);
      for (std::size_t b = 0; b < tn.size(); ++b)
        for (std::size_t a = b; a < tn.size(); ++a)
          if (!W(cd[a], cd[b], r - 1)) {
            dropT[b] |= Mask{1} << a;
            dropT[a] |= Mask{1} << b;
          }
      t.TM.push_back(std::move(tm));
      t.TN.push_back(std::move(tn));
      t.cross.push_back(std::move(cross));
      t.crossT.push_back(std::move(crossT));
      t.dropT.push_back(std::move(dropT));
      t.good.push_back(good);
      t.closedM.push_back(closed_subsets(t.EM.back()));
      t.closedN.push_back(closed_subsets(t.EN.back()));
    }
    return t;
  }

  static TupleSet to_set(const std::vector<Tuple>& universe, Mask m) {
    TupleSet out;
    for (std::size_t i = 0; i < universe.size(); ++i)
      if (has(m, static_cast<int>(i))) out.push_back(universe[i]);
    return out;
  }

  static Mask to_mask(const std::vector<Tuple>& universe, const TupleSet& s) {
    Mask m = 0;
    for (const auto& t : s) {
      auto it = std::find(universe.begin(), universe.end(), t);
      if (it == universe.end())
        throw PreconditionError("tuple " + tuple_to_string(t) + " is not available here");
      m |= Mask{1} << (it - universe.begin());
    }
    return m;
  }

  bool accepted(const Quantifier& q, int n, const std::vector<std::vector<Tuple>>& U,
                const std::vector<Mask>& masks) {
    if (q.monadic()) return q.accepts_count(n, std::popcount(masks[0]));
    std::vector<TupleSet> sets;
    for (std::size_t j = 0; j < masks.size(); ++j) sets.push_back(to_set(U[j], masks[j]));
    return q.accepts(n, sets);
  }

  // Calls f on every element of the product of the lists until f returns true.
  static bool any_product(const std::vector<std::vector<Mask>>& lists,
                          const std::function<bool(const std::vector<Mask>&)>& f) {
    for (const auto& l : lists)
      if (l.empty()) return false;
    std::vector<std::size_t> idx(lists.size(), 0);
    std::vector<Mask> cur(lists.size());
    while (true) {
      for (std::size_t j = 0; j < lists.size(); ++j) cur[j] = lists[j][idx[j]];
      if (f(cur)) return true;
      std::size_t j = lists.size();
      while (j > 0) {
        --j;
        if (++idx[j] < lists[j].size()) break;
        idx[j] = 0;
        if (j == 0) return false;
      }
      if (lists.empty()) return false;
    }
  }

  static std::vector<Mask> submasks(Mask m) {
    std::vector<Mask> out;
    Mask s = m;
    while (true) {
      out.push_back(s);
      if (s == 0) break;
      s = (s - 1) & m;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  // Option (b) candidates the attacker can use against the defender: w' with
  // no partner in X and no partner in P.
  static Mask inside_attacks(const Tables& t, int j, Mask X, Mask P) {
    Mask out = 0;
    for (std::size_t b = 0; b < t.TN[j].size(); ++b)
      if ((t.crossT[j][b] & X) == 0 && (t.dropT[j][b] & P) == 0) out |= Mask{1} << b;
    return out;
  }

  static Mask outside_needed(const Tables& t, int j, Mask X) {
    Mask need = 0;
    for (std::size_t a = 0; a < t.TM[j].size(); ++a)
      if (has(X, static_cast<int>(a))) need |= t.cross[j][a];
    return need;
  }

  // Is there a defender witness tuple that survives contest and both attacker options?
  bool defender_safe(const Tables& t, const Quantifier& q, int nN, const std::vector<Mask>& X,
                     const std::vector<Mask>& P, std::vector<Mask>* out) {
    std::vector<std::vector<Mask>> cands(t.k);
    for (int j = 0; j < t.k; ++j) {
      Mask lower = P[j] | outside_needed(t, j, X[j]);
      Mask allowed = full_mask(t.TN[j].size()) & ~inside_attacks(t, j, X[j], P[j]);
      if (lower & ~allowed) return false;
      for (Mask y : t.closedN[j])
        if ((y & lower) == lower && (y & ~allowed) == 0) cands[j].push_back(y);
    }
    return any_product(cands, [&](const std::vector<Mask>& y) {
      if (!accepted(q, nN, t.TN, y)) return false;
      if (out) *out = y;
      return true;
    });
  }

  bool spillover_win(const Tables& t, const Quantifier& q, int nN, const std::vector<Mask>& X,
                     std::vector<Mask>* out) {
    std::vector<std::vector<Mask>> ps;
    for (int j = 0; j < t.k; ++j) ps.push_back(submasks(t.good[j]));
    return any_product(ps, [&](const std::vector<Mask>& P) {
      if (defender_safe(t, q, nN, X, P, nullptr)) return false;
      if (out) *out = P;
      return true;
    });
  }

  bool round_win(const Context& a, const Context& b, int r, RoundChoice* out) {
    for (int side = 0; side < 2; ++side) {
      const Context& M = side == 0 ? a : b;
      const Context& N = side == 0 ? b : a;
      for (std::size_t qi = 0; qi < qset.size(); ++qi) {
        const Quantifier& q = qset[qi];
        std::vector<std::vector<VarTuple>> choices;
        for (int j = 0; j < q.width(); ++j) choices.push_back(var_choices(M, q.type().arities[j]));
        std::vector<std::size_t> pick(choices.size(), 0);
        while (true) {
          std::vector<VarTuple> xs;
          for (std::size_t j = 0; j < choices.size(); ++j) xs.push_back(choices[j][pick[j]]);
          Tables t = tables(M, N, r, qi, xs);
          std::vector<Mask> P;
          std::vector<Mask> Xwin;
          bool win = any_product(t.closedM, [&](const std::vector<Mask>& X) {
            if (!accepted(q, M.domain_size(), t.TM, X)) return false;
            if (!spillover_win(t, q, N.domain_size(), X, &P)) return false;
            Xwin = X;
            return true;
          });
          if (win) {
            if (out) *out = RoundChoice{side, qi, xs, Xwin, P};
            return true;
          }
          std::size_t j = choices.size();
          bool done = true;
          while (j > 0) {
            --j;
            if (++pick[j] < choices[j].size()) {
              done = false;
              break;
            }
            pick[j] = 0;
          }
          if (done) break;
        }
      }
    }
    return false;
  }

  // ---- explicit positions ----

  Tables tables_for(const EFPosition& p) {
    return tables(p.M(), p.N(), p.rounds_left, p.quantifier, p.vars);
  }

  std::vector<Mask> masks(const std::vector<std::vector<Tuple>>& U, const std::vector<TupleSet>& s) {
    std::vector<Mask> out;
    for (std::size_t j = 0; j < s.size(); ++j) out.push_back(to_mask(U[j], s[j]));
    return out;
  }

  EFPosition next_round(const EFPosition& p, Context a, Context b, bool swap) {
    EFPosition n;
    n.left = std::move(a);
    n.right = std::move(b);
    n.attacker = swap ? other(p.attacker) : p.attacker;
    n.rounds_left = p.rounds_left - 1;
    if (!partial_isomorphism(n.left, n.right)) {
      n.phase = EFPhase::Terminal;
      n.winner = n.attacker;
    } else if (n.rounds_left == 0) {
      n.phase = EFPhase::Terminal;
      n.winner = n.defender();
    } else {
      n.phase = EFPhase::RoundStart;
    }
    return n;
  }

  Player winner(const EFPosition& p) {
    if (p.phase == EFPhase::Terminal) return p.winner;
    if (p.phase == EFPhase::RoundStart)
      return round_win(p.left, p.right, p.rounds_left, nullptr) ? p.attacker : p.defender();
    Tables t = tables_for(p);
    const Quantifier& q = qset[p.quantifier];
    const int nN = p.N().domain_size();
    auto X = masks(t.TM, p.witness);
    auto closed = [](const std::vector<Mask>& E, Mask y) {
      for (std::size_t u = 0; u < E.size(); ++u)
        if (has(y, static_cast<int>(u)) && (E[u] & ~y)) return false;
      return true;
    };
    switch (p.phase) {
      case EFPhase::AfterWitness:
        for (int j = 0; j < t.k; ++j)
          if (!closed(t.EM[j], X[j])) return p.defender();
        [[fallthrough]];
      case EFPhase::ChooseSpillover:
        return spillover_win(t, q, nN, X, nullptr) ? p.attacker : p.defender();
      case EFPhase::AfterSpillover: {
        auto P = masks(t.TN, p.spillover);
        for (int j = 0; j < t.k; ++j)
          if (P[j] & ~t.good[j]) return p.defender();
        return defender_safe(t, q, nN, X, P, nullptr) ? p.defender() : p.attacker;
      }
      case EFPhase::DefenderWitness: {
        auto P = masks(t.TN, p.spillover);
        return defender_safe(t, q, nN, X, P, nullptr) ? p.defender() : p.attacker;
      }
      case EFPhase::AfterDefenderWitness:
      case EFPhase::AttackerPick: {
        auto P = masks(t.TN, p.spillover);
        auto Y = masks(t.TN, p.defender_witness);
        for (int j = 0; j < t.k; ++j) {
          if (p.phase == EFPhase::AfterDefenderWitness && !closed(t.EN[j], Y[j]))
            return p.attacker;
          if (outside_needed(t, j, X[j]) & ~Y[j]) return p.attacker;
          if (inside_attacks(t, j, X[j], P[j]) & Y[j]) return p.attacker;
        }
        return p.defender();
      }
      case EFPhase::DefenderReply: {
        auto P = masks(t.TN, p.spillover);
        const int j = p.component;
        Mask w2 = to_mask(t.TN[j], {p.picked});
        int b = std::countr_zero(w2);
        if (t.crossT[j][b] & X[j]) return p.defender();
        if (t.dropT[j][b] & P[j]) return p.defender();
        return p.attacker;
      }
      default:
        break;
    }
    return p.defender();
  }

  std::vector<EFMove> legal_moves(const EFPosition& p) {
    std::vector<EFMove> out;
    if (p.phase == EFPhase::Terminal) return out;
    if (p.phase == EFPhase::RoundStart) {
      for (int side = 0; side < 2; ++side) {
        const Context& M = side == 0 ? p.left : p.right;
        for (std::size_t qi = 0; qi < qset.size(); ++qi) {
          const Quantifier& q = qset[qi];
          std::vector<std::vector<VarTuple>> choices;
          for (int j = 0; j < q.width(); ++j)
            choices.push_back(var_choices(M, q.type().arities[j]));
          std::vector<std::size_t> pick(choices.size(), 0);
          while (true) {
            std::vector<VarTuple> xs;
            std::vector<std::vector<Tuple>> U;
            std::vector<std::vector<Mask>> all;
            long long bits = 0;
            for (std::size_t j = 0; j < choices.size(); ++j) {
              xs.push_back(choices[j][pick[j]]);
              U.push_back(tuples_respecting(M.domain_size(), xs.back()));
              bits += static_cast<long long>(U.back().size());
              Caps::check("max_tuple_universe", caps.max_tuple_universe,
                          static_cast<long long>(U.back().size()));
              all.push_back(submasks(full_mask(U.back().size())));
            }
            Caps::check("ef_move_bits", 24, bits);
            any_product(all, [&](const std::vector<Mask>& X) {
              if (accepted(q, M.domain_size(), U, X)) {
                EFMove m;
                m.kind = EFMove::Kind::Round;
                m.quantifier = qi;
                m.vars = xs;
                m.side = side;
                for (std::size_t j = 0; j < X.size(); ++j) m.sets.push_back(to_set(U[j], X[j]));
                out.push_back(std::move(m));
              }
              return false;
            });
            std::size_t j = choices.size();
            bool done = true;
            while (j > 0) {
              --j;
              if (++pick[j] < choices[j].size()) {
                done = false;
                break;
              }
              pick[j] = 0;
            }
            if (done) break;
          }
        }
      }
      return out;
    }
    const Quantifier& q = qset[p.quantifier];
    const int k = q.width();
    std::vector<std::vector<Tuple>> TM, TN;
    for (int j = 0; j < k; ++j) {
      TM.push_back(tuples_respecting(p.M().domain_size(), p.vars[j]));
      TN.push_back(tuples_respecting(p.N().domain_size(), p.vars[j]));
    }
    auto contains = [](const TupleSet& s, const Tuple& t) {
      return std::binary_search(s.begin(), s.end(), t);
    };
    auto contest = [&](EFMove::Kind kind, const std::vector<std::vector<Tuple>>& U,
                       const std::vector<TupleSet>& sets) {
      for (int j = 0; j < k; ++j)
        for (const auto& u : sets[j])
          for (const auto& v : U[j])
            if (!contains(sets[j], v)) {
              EFMove m;
              m.kind = kind;
              m.component = j;
              m.first = u;
              m.second = v;
              out.push_back(std::move(m));
            }
    };
    auto subsets_product = [&](const std::vector<std::vector<Tuple>>& U,
                               const std::function<void(const std::vector<Mask>&)>& f) {
      std::vector<std::vector<Mask>> all;
      for (const auto& u : U) all.push_back(submasks(full_mask(u.size())));
      any_product(all, [&](const std::vector<Mask>& m) {
        f(m);
        return false;
      });
    };
    switch (p.phase) {
      case EFPhase::AfterWitness:
        out.push_back(EFMove{});
        contest(EFMove::Kind::ContestWitness, TM, p.witness);
        break;
      case EFPhase::ChooseSpillover:
        subsets_product(TN, [&](const std::vector<Mask>& P) {
          EFMove m;
          m.kind = EFMove::Kind::Spillover;
          for (int j = 0; j < k; ++j) m.sets.push_back(to_set(TN[j], P[j]));
          out.push_back(std::move(m));
        });
        break;
      case EFPhase::AfterSpillover:
        out.push_back(EFMove{});
        for (int j = 0; j < k; ++j)
          for (const auto& w2 : p.spillover[j])
            for (const auto& w : TM[j]) {
              EFMove m;
              m.kind = EFMove::Kind::ContestSpillover;
              m.component = j;
              m.first = w;
              m.second = w2;
              out.push_back(std::move(m));
            }
        break;
      case EFPhase::DefenderWitness:
        subsets_product(TN, [&](const std::vector<Mask>& Y) {
          for (int j = 0; j < k; ++j)
            for (const auto& t : p.spillover[j])
              if (!has(Y[j], static_cast<int>(std::find(TN[j].begin(), TN[j].end(), t) -
                                              TN[j].begin())))
                return;
          if (!accepted(q, p.N().domain_size(), TN, Y)) return;
          EFMove m;
          m.kind = EFMove::Kind::DefenderWitness;
          for (int j = 0; j < k; ++j) m.sets.push_back(to_set(TN[j], Y[j]));
          out.push_back(std::move(m));
        });
        break;
      case EFPhase::AfterDefenderWitness:
        out.push_back(EFMove{});
        contest(EFMove::Kind::ContestDefenderWitness, TN, p.defender_witness);
        break;
      case EFPhase::AttackerPick:
        for (int j = 0; j < k; ++j) {
          for (const auto& w2 : TN[j]) {
            if (contains(p.defender_witness[j], w2)) continue;
            for (const auto& w : p.witness[j]) {
              EFMove m;
              m.kind = EFMove::Kind::PickOutside;
              m.component = j;
              m.first = w;
              m.second = w2;
              out.push_back(std::move(m));
            }
          }
          for (const auto& w2 : p.defender_witness[j]) {
            EFMove m;
            m.kind = EFMove::Kind::PickInside;
            m.component = j;
            m.second = w2;
            out.push_back(std::move(m));
          }
        }
        break;
      case EFPhase::DefenderReply: {
        const int j = p.component;
        for (const auto& w : p.witness[j]) {
          EFMove m;
          m.kind = EFMove::Kind::ReplyWitness;
          m.component = j;
          m.first = w;
          m.second = p.picked;
          out.push_back(std::move(m));
        }
        for (const auto& w : p.spillover[j]) {
          EFMove m;
          m.kind = EFMove::Kind::ReplySpillover;
          m.component = j;
          m.first = w;
          m.second = p.picked;
          out.push_back(std::move(m));
        }
        break;
      }
      default:
        break;
    }
    return out;
  }

  EFPosition apply(const EFPosition& p, const EFMove& m) {
    EFPosition n = p;
    const VarTuple* x = m.component < static_cast<int>(p.vars.size()) ? &p.vars[m.component] : nullptr;
    switch (m.kind) {
      case EFMove::Kind::Round:
        n.phase = EFPhase::AfterWitness;
        n.quantifier = m.quantifier;
        n.vars = m.vars;
        n.side = m.side;
        n.witness = m.sets;
        n.spillover.clear();
        n.defender_witness.clear();
        return n;
      case EFMove::Kind::Pass:
        n.phase = p.phase == EFPhase::AfterWitness      ? EFPhase::ChooseSpillover
                  : p.phase == EFPhase::AfterSpillover ? EFPhase::DefenderWitness
                                                        : EFPhase::AttackerPick;
        return n;
      case EFMove::Kind::ContestWitness:
        return next_round(p, extend_context(p.M(), *x, m.first), extend_context(p.M(), *x, m.second),
                          false);
      case EFMove::Kind::Spillover:
        n.phase = EFPhase::AfterSpillover;
        n.spillover = m.sets;
        return n;
      case EFMove::Kind::ContestSpillover:
        return next_round(p, extend_context(p.M(), *x, m.first), extend_context(p.N(), *x, m.second),
                          false);
      case EFMove::Kind::DefenderWitness:
        n.phase = EFPhase::AfterDefenderWitness;
        n.defender_witness = m.sets;
        return n;
      case EFMove::Kind::ContestDefenderWitness:
        return next_round(p, extend_context(p.N(), *x, m.first), extend_context(p.N(), *x, m.second),
                          true);
      case EFMove::Kind::PickOutside:
        return next_round(p, extend_context(p.M(), *x, m.first), extend_context(p.N(), *x, m.second),
                          true);
      case EFMove::Kind::PickInside:
        n.phase = EFPhase::DefenderReply;
        n.component = m.component;
        n.picked = m.second;
        return n;
      case EFMove::Kind::ReplyWitness:
        return next_round(p, extend_context(p.M(), *x, m.first), extend_context(p.N(), *x, m.second),
                          false);
      case EFMove::Kind::ReplySpillover:
        return next_round(p, reply_context(p.N(), *x, m.first), reply_context(p.N(), *x, m.second),
                          false);
    }
    return n;
  }

  Player by_enumeration(const EFPosition& p) {
    if (p.phase == EFPhase::Terminal) return p.winner;
    std::string key;
    if (p.phase == EFPhase::RoundStart) {
      key = pkey(p.left, p.right, p.rounds_left);
      auto it = enum_memo.find(key);
      if (it != enum_memo.end()) return it->second ? p.attacker : p.defender();
    }
    const Player mover = p.to_move();
    Player result = other(mover);
    for (const auto& m : legal_moves(p))
      if (by_enumeration(apply(p, m)) == mover) {
        result = mover;
        break;
      }
    if (!key.empty()) enum_memo.emplace(key, result == p.attacker);
    return result;
  }

  std::string set_string(const TupleSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ",";
      out += s[i].size() == 1 ? std::to_string(s[i][0]) : tuple_to_string(s[i]);
    }
    return out + "}";
  }

  std::string sets_string(const std::vector<TupleSet>& s) {
    std::string out;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j) out += " ";
      out += set_string(s[j]);
    }
    return out;
  }

  std::string ctx_string(const Context& c) {
    return c.structure->name() + assignment_to_string(c.assignment);
  }
};

}  // namespace detail

EFSolver::EFSolver(QuantifierSet qset, Caps caps, EFOptions options)
    : impl_(std::make_shared<detail::EFImpl>()) {
  impl_->qset = std::move(qset);
  impl_->caps = caps;
  impl_->opts = options;
}

const QuantifierSet& EFSolver::quantifiers() const { return impl_->qset; }

bool EFSolver::attacker_wins(const Context& left, const Context& right, int rounds) {
  initial(left, right, rounds);
  return impl_->W(left, right, rounds);
}

EFPosition EFSolver::initial(const Context& left, const Context& right, int rounds) const {
  if (rounds < 0) throw PreconditionError("rounds must be nonnegative");
  Caps::check("max_depth", impl_->caps.max_depth, rounds);
  Caps::check("max_domain", impl_->caps.max_domain, left.domain_size());
  Caps::check("max_domain", impl_->caps.max_domain, right.domain_size());
  EFPosition p;
  p.left = left;
  p.right = right;
  p.rounds_left = rounds;
  p.attacker = Player::I;
  if (!partial_isomorphism(left, right)) {
    p.phase = EFPhase::Terminal;
    p.winner = Player::I;
  } else if (rounds == 0) {
    p.phase = EFPhase::Terminal;
    p.winner = Player::II;
  }
  return p;
}

std::vector<EFMove> EFSolver::legal_moves(const EFPosition& p) { return impl_->legal_moves(p); }

EFPosition EFSolver::apply(const EFPosition& p, const EFMove& m) {
  auto moves = legal_moves(p);
  if (std::find(moves.begin(), moves.end(), m) == moves.end())
    throw PreconditionError("illegal move: " + describe(p, m));
  return impl_->apply(p, m);
}

Player EFSolver::winner(const EFPosition& p) { return impl_->winner(p); }

std::optional<EFMove> EFSolver::best_move(const EFPosition& p) {
  auto moves = legal_moves(p);
  if (moves.empty()) return std::nullopt;
  const Player mover = p.to_move();
  for (const auto& m : moves)
    if (impl_->winner(impl_->apply(p, m)) == mover) return m;
  return moves.front();
}

Player EFSolver::winner_by_enumeration(const EFPosition& p) { return impl_->by_enumeration(p); }

long long EFSolver::memo_size() const { return static_cast<long long>(impl_->memo.size()); }

std::string EFSolver::describe(const EFPosition& p) const {
  auto& I = *impl_;
  std::string s = "[" + to_string(p.phase) + "] rounds left " + std::to_string(p.rounds_left) +
                  ", attacker " + to_string(p.attacker) + ": " + I.ctx_string(p.left) + " vs " +
                  I.ctx_string(p.right);
  if (p.phase == EFPhase::Terminal) return s + ", winner " + to_string(p.winner);
  if (p.phase == EFPhase::RoundStart) return s;
  s += "; " + I.qset[p.quantifier].name() + " ";
  for (const auto& x : p.vars) s += x.to_string();
  s += ", X on " + p.M().structure->name() + " = " + I.sets_string(p.witness);
  if (!p.spillover.empty()) s += ", P = " + I.sets_string(p.spillover);
  if (!p.defender_witness.empty()) s += ", X' = " + I.sets_string(p.defender_witness);
  if (p.phase == EFPhase::DefenderReply) s += ", w' = " + tuple_to_string(p.picked);
  return s;
}

std::string EFSolver::describe(const EFPosition& p, const EFMove& m) const {
  auto& I = *impl_;
  auto comp = [&](int j) {
    return p.vars.size() > 1 ? " in component " + std::to_string(j + 1) : std::string();
  };
  switch (m.kind) {
    case EFMove::Kind::Round: {
      std::string s = "play " + I.qset[m.quantifier].name() + " ";
      for (const auto& x : m.vars) s += x.to_string();
      const Context& M = m.side == 0 ? p.left : p.right;
      return s + " with witness sets on " + M.structure->name() + ": " + I.sets_string(m.sets);
    }
    case EFMove::Kind::Pass:
      return "pass";
    case EFMove::Kind::ContestWitness:
      return "contest witness set" + comp(m.component) + " with " + tuple_to_string(m.first) +
             " in X and " + tuple_to_string(m.second) + " outside";
    case EFMove::Kind::Spillover:
      return "spillover sets " + I.sets_string(m.sets);
    case EFMove::Kind::ContestSpillover:
      return "contest spillover" + comp(m.component) + " with " + tuple_to_string(m.second) +
             " in P against " + tuple_to_string(m.first);
    case EFMove::Kind::DefenderWitness:
      return "answer with witness sets " + I.sets_string(m.sets);
    case EFMove::Kind::ContestDefenderWitness:
      return "contest defender witness set" + comp(m.component) + " with " +
             tuple_to_string(m.first) + " in X' and " + tuple_to_string(m.second) + " outside";
    case EFMove::Kind::PickOutside:
      return "option (a)" + comp(m.component) + ": " + tuple_to_string(m.second) +
             " outside X' against " + tuple_to_string(m.first) + " in X";
    case EFMove::Kind::PickInside:
      return "option (b)" + comp(m.component) + ": " + tuple_to_string(m.second) + " in X'";
    case EFMove::Kind::ReplyWitness:
      return "reply " + tuple_to_string(m.first) + " from X";
    case EFMove::Kind::ReplySpillover:
      return "reply " + tuple_to_string(m.first) + " from P";
  }
  return "?";
}

std::optional<EFMove> EFOutcome::strategy(const EFPosition& p) const {
  if (p.phase == EFPhase::Terminal || p.to_move() != winner) return std::nullopt;
  return solver->best_move(p);
}

EFOutcome solve_ef(const Context& left, const Context& right, int rounds, const QuantifierSet& qset,
                   const Caps& caps, EFOptions options) {
  EFOutcome out;
  out.solver = std::make_shared<EFSolver>(qset, caps, options);
  out.winner = out.solver->attacker_wins(left, right, rounds) ? Player::I : Player::II;
  out.start = out.solver->initial(left, right, rounds);
  return out;
}

std::vector<TranscriptEntry> replay(const EFOutcome& outcome, const std::vector<EFMove>& opponent) {
  std::vector<TranscriptEntry> log;
  EFSolver& solver = *outcome.solver;
  EFPosition p = outcome.start;
  std::size_t next = 0;
  while (true) {
    if (p.phase == EFPhase::Terminal) {
      log.push_back({solver.describe(p), "", "", to_string(p.winner) + " wins"});
      break;
    }
    const Player mover = p.to_move();
    auto moves = solver.legal_moves(p);
    if (moves.empty()) {
      log.push_back({solver.describe(p), to_string(mover), "",
                     to_string(mover) + " cannot move; " + to_string(other(mover)) + " wins"});
      break;
    }
    EFMove m;
    if (mover == outcome.winner) {
      m = *outcome.strategy(p);
    } else {
      if (next >= opponent.size()) {
        log.push_back({solver.describe(p), to_string(mover), "", "opponent moves exhausted"});
        break;
      }
      m = opponent[next++];
      if (std::find(moves.begin(), moves.end(), m) == moves.end()) {
        std::string legal;
        for (std::size_t i = 0; i < moves.size() && i < 20; ++i)
          legal += "\n  " + solver.describe(p, moves[i]);
        throw PreconditionError("illegal opponent move '" + solver.describe(p, m) +
                                "'; legal moves include:" + legal);
      }
    }
    log.push_back({solver.describe(p), to_string(mover), solver.describe(p, m), ""});
    p = solver.apply(p, m);
  }
  return log;
}

}  // namespace efq

#include <algorithm>
#include <set>

#include "efq/size_games.hpp"
#include "size_games_internal.hpp"

namespace efq {

namespace {

using detail::Class;
using detail::SizeImpl;

std::string ctx_string(const Context& c) {
  return c.structure->name() + assignment_to_string(c.assignment);
}

std::string list_string(const std::vector<Context>& cs) {
  std::string out = "{";
  for (std::size_t i = 0; i < cs.size(); ++i) out += (i ? ", " : "") + ctx_string(cs[i]);
  return out + "}";
}

std::string set_string(const TupleSet& ts) {
  std::string out = "{";
  for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? "," : "") + tuple_to_string(ts[i]);
  return out + "}";
}

std::string quantifier_head(const QuantifierSet& qset, std::size_t qi,
                            const std::vector<VarTuple>& vars, const std::vector<int>& budgets) {
  std::string out = qset[qi].name() + " ";
  for (const auto& x : vars) out += x.to_string();
  out += ", budgets ";
  for (std::size_t j = 0; j < budgets.size(); ++j) out += (j ? "+" : "") + std::to_string(budgets[j]);
  return out;
}

void check_budget(const Caps& caps, int budget) {
  if (budget < 1) throw PreconditionError("size game: budget must be positive");
  Caps::check("max_budget", caps.max_budget, budget);
}

// All subsets of `tuples`, as sorted tuple sets.
std::vector<TupleSet> all_subsets(const std::vector<Tuple>& tuples, const Caps& caps) {
  Caps::check("max_tuple_universe", caps.max_tuple_universe, static_cast<long long>(tuples.size()));
  std::vector<TupleSet> out;
  const std::size_t m = tuples.size();
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << m); ++x) {
    TupleSet s;
    for (std::size_t i = 0; i < m; ++i)
      if (x >> i & 1) s.push_back(tuples[i]);
    out.push_back(std::move(s));
  }
  return out;
}

// Joint choices (S_1, ..., S_k) of subsets per component with Q's verdict equal to `want`.
std::vector<std::vector<TupleSet>> joint_choices(const Quantifier& q, int n,
                                                 const std::vector<VarTuple>& vars, bool want,
                                                 const Caps& caps, std::size_t max_moves) {
  std::vector<std::vector<TupleSet>> per(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j)
    per[j] = all_subsets(tuples_respecting(n, vars[j]), caps);
  std::vector<std::vector<TupleSet>> out;
  std::vector<TupleSet> cur(vars.size());
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == vars.size()) {
      if (q.accepts(n, cur) == want) {
        out.push_back(cur);
        Caps::check("play_moves", static_cast<long long>(max_moves),
                    static_cast<long long>(out.size()));
      }
      return;
    }
    for (const auto& s : per[j]) {
      cur[j] = s;
      rec(j + 1);
    }
  };
  rec(0);
  return out;
}

bool is_subset_of_respecting(const TupleSet& s, int n, const VarTuple& x) {
  auto all = tuples_respecting(n, x);
  for (const auto& t : s)
    if (!std::binary_search(all.begin(), all.end(), t)) return false;
  return std::is_sorted(s.begin(), s.end()) &&
         std::adjacent_find(s.begin(), s.end()) == s.end();
}

void check_shape(const QuantifierSet& qset, std::size_t qi, const std::vector<VarTuple>& vars,
                 const std::vector<int>& budgets, int total) {
  if (qi >= qset.size()) throw PreconditionError("move names an unknown quantifier");
  const Quantifier& q = qset[qi];
  if (static_cast<int>(vars.size()) != q.width() || static_cast<int>(budgets.size()) != q.width())
    throw PreconditionError("move does not match the width of " + q.name());
  int sum = 0;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (static_cast<int>(vars[j].size()) != q.type().arities[j])
      throw PreconditionError("move does not match the type of " + q.name());
    if (budgets[j] < 1) throw PreconditionError("move has a non-positive budget");
    sum += budgets[j];
  }
  if (sum != total) throw PreconditionError("move budgets do not sum to the budget minus one");
}

}  // namespace

// ------------------------------------------------------------------ class game

namespace {

ClassGamePosition normalize(ClassGamePosition p, SizeImpl& impl) {
  if (p.phase != ClassGamePosition::Phase::PlayerI) return p;
  impl.intern_class(p.left);
  impl.intern_class(p.right);
  if (auto atom = atomic_separation(p.left, p.right)) {
    p.phase = ClassGamePosition::Phase::Terminal;
    p.winner = Player::I;
    p.note = "atomic " + to_string(*atom) + " separates the classes";
  } else if (p.budget == 1) {
    p.phase = ClassGamePosition::Phase::Terminal;
    p.winner = Player::II;
    p.note = "budget 1 and no atomic formula separates the classes";
  }
  return p;
}

}  // namespace

ClassGamePosition SizeGameSolver::class_initial(const std::vector<Context>& a,
                                                const std::vector<Context>& b, int budget) {
  check_budget(impl_->caps, budget);
  ClassGamePosition p;
  p.budget = budget;
  p.left = a;
  p.right = b;
  return normalize(p, *impl_);
}

std::vector<ClassGameMove> SizeGameSolver::legal_moves(const ClassGamePosition& p,
                                                       std::size_t max_moves) {
  using Phase = ClassGamePosition::Phase;
  using Kind = ClassGameMove::Kind;
  std::vector<ClassGameMove> out;
  auto push = [&](ClassGameMove m) {
    out.push_back(std::move(m));
    Caps::check("play_moves", static_cast<long long>(max_moves), static_cast<long long>(out.size()));
  };
  switch (p.phase) {
    case Phase::Terminal:
      return out;
    case Phase::ChooseBranch:
      for (int c : {0, 1}) push({Kind::ChooseBranch, 0, {}, {}, 0, {}, {}, {}, c});
      return out;
    case Phase::ChooseComponent:
      for (std::size_t j = 0; j < p.pending.vars.size(); ++j)
        push({Kind::ChooseComponent, 0, {}, {}, 0, {}, {}, {}, static_cast<int>(j)});
      return out;
    case Phase::PlayerI:
      break;
  }
  const int s = p.budget;
  push({});  // swap
  const std::size_t n = p.right.size();
  for (int u = 1; u < s; ++u) {
    std::vector<int> where(n, 0);
    while (true) {
      ClassGameMove m;
      m.kind = Kind::Split;
      m.u = u;
      for (std::size_t i = 0; i < n; ++i) {
        if (where[i] != 1) m.c.push_back(static_cast<int>(i));
        if (where[i] != 0) m.d.push_back(static_cast<int>(i));
      }
      push(std::move(m));
      std::size_t i = 0;
      while (i < n && ++where[i] == 3) where[i++] = 0;
      if (i == n) break;
    }
  }
  std::vector<Context> bases(p.left);
  bases.insert(bases.end(), p.right.begin(), p.right.end());
  std::set<std::string> used;
  for (const auto& c : bases)
    for (const auto& kv : c.assignment) used.insert(kv.first);
  for (std::size_t qi = 0; qi < impl_->qset.size(); ++qi) {
    const Quantifier& q = impl_->qset[qi];
    if (q.width() > s - 1) continue;
    for (const auto& vars : detail::component_choices(q.type(), used, impl_->opts.rebind_existing)) {
      std::vector<std::vector<std::vector<TupleSet>>> per_base;
      bool empty = false;
      for (std::size_t i = 0; i < bases.size() && !empty; ++i) {
        per_base.push_back(joint_choices(q, bases[i].domain_size(), vars, i < p.left.size(),
                                         impl_->caps, max_moves));
        empty = per_base.back().empty();
      }
      if (empty) continue;
      for (const auto& budgets : detail::compositions(s - 1, q.width())) {
        std::vector<std::size_t> pick(bases.size(), 0);
        while (true) {
          ClassGameMove m;
          m.kind = Kind::Quantifier;
          m.quantifier = qi;
          m.vars = vars;
          m.budgets = budgets;
          m.sets.assign(vars.size(), std::vector<TupleSet>(bases.size()));
          for (std::size_t i = 0; i < bases.size(); ++i)
            for (std::size_t j = 0; j < vars.size(); ++j) m.sets[j][i] = per_base[i][pick[i]][j];
          push(std::move(m));
          std::size_t i = 0;
          while (i < bases.size() && ++pick[i] == per_base[i].size()) pick[i++] = 0;
          if (i == bases.size()) break;
        }
      }
    }
  }
  return out;
}

ClassGamePosition SizeGameSolver::apply(const ClassGamePosition& p, const ClassGameMove& m) {
  using Phase = ClassGamePosition::Phase;
  using Kind = ClassGameMove::Kind;
  ClassGamePosition next = p;
  next.note.clear();
  switch (p.phase) {
    case Phase::Terminal:
      throw PreconditionError("the game is over");
    case Phase::ChooseBranch: {
      if (m.kind != Kind::ChooseBranch || (m.choice != 0 && m.choice != 1))
        throw PreconditionError("Player II must pick branch 0 or 1");
      const auto& idx = m.choice == 0 ? p.pending.c : p.pending.d;
      next.budget = m.choice == 0 ? p.pending.u : p.budget - p.pending.u;
      next.right.clear();
      for (int i : idx) next.right.push_back(p.right[static_cast<std::size_t>(i)]);
      next.phase = Phase::PlayerI;
      return normalize(next, *impl_);
    }
    case Phase::ChooseComponent: {
      const auto& pm = p.pending;
      if (m.kind != Kind::ChooseComponent || m.choice < 0 ||
          m.choice >= static_cast<int>(pm.vars.size()))
        throw PreconditionError("Player II must pick a component");
      const std::size_t j = static_cast<std::size_t>(m.choice);
      std::vector<Context> bases(p.left);
      bases.insert(bases.end(), p.right.begin(), p.right.end());
      std::vector<Context> plus, minus;
      std::set<std::string> seen_plus, seen_minus;
      for (std::size_t i = 0; i < bases.size(); ++i)
        for (const auto& t : tuples_respecting(bases[i].domain_size(), pm.vars[j])) {
          Context c = extend_context(bases[i], pm.vars[j], t);
          const bool in = std::binary_search(pm.sets[j][i].begin(), pm.sets[j][i].end(), t);
          auto& seen = in ? seen_plus : seen_minus;
          if (seen.insert(canonical_key(c)).second) (in ? plus : minus).push_back(std::move(c));
        }
      next.budget = pm.budgets[j];
      next.left = std::move(plus);
      next.right = std::move(minus);
      next.phase = Phase::PlayerI;
      return normalize(next, *impl_);
    }
    case Phase::PlayerI:
      break;
  }
  switch (m.kind) {
    case Kind::Swap:
      next.budget = p.budget - 1;
      std::swap(next.left, next.right);
      return normalize(next, *impl_);
    case Kind::Split: {
      if (m.u < 1 || m.u >= p.budget) throw PreconditionError("split budgets must be positive");
      std::vector<char> covered(p.right.size(), 0);
      for (const auto* idx : {&m.c, &m.d})
        for (int i : *idx) {
          if (i < 0 || i >= static_cast<int>(p.right.size()))
            throw PreconditionError("split names a context outside the right class");
          covered[static_cast<std::size_t>(i)] = 1;
        }
      if (std::count(covered.begin(), covered.end(), 0))
        throw PreconditionError("split parts must cover the right class");
      next.phase = Phase::ChooseBranch;
      next.pending = m;
      return next;
    }
    case Kind::Quantifier: {
      check_shape(impl_->qset, m.quantifier, m.vars, m.budgets, p.budget - 1);
      const Quantifier& q = impl_->qset[m.quantifier];
      const std::size_t nb = p.left.size() + p.right.size();
      if (m.sets.size() != m.vars.size()) throw PreconditionError("one set family per component");
      for (std::size_t i = 0; i < nb; ++i) {
        const Context& c = i < p.left.size() ? p.left[i] : p.right[i - p.left.size()];
        std::vector<TupleSet> sets;
        for (std::size_t j = 0; j < m.vars.size(); ++j) {
          if (m.sets[j].size() != nb) throw PreconditionError("one set per context and component");
          if (!is_subset_of_respecting(m.sets[j][i], c.domain_size(), m.vars[j]))
            throw PreconditionError("sets must be sorted repetition-respecting tuples");
          sets.push_back(m.sets[j][i]);
        }
        if (q.accepts(c.domain_size(), sets) != (i < p.left.size()))
          throw PreconditionError("sets violate the acceptance condition of " + q.name());
      }
      next.phase = Phase::ChooseComponent;
      next.pending = m;
      return next;
    }
    default:
      throw PreconditionError("Player I cannot make that move");
  }
}

Player SizeGameSolver::winner(const ClassGamePosition& p) {
  using Phase = ClassGamePosition::Phase;
  switch (p.phase) {
    case Phase::Terminal:
      return p.winner;
    case Phase::PlayerI:
      return impl_->class_win(p.budget, impl_->intern_class(p.left), impl_->intern_class(p.right))
                 ? Player::I
                 : Player::II;
    default:
      for (const auto& m : legal_moves(p))
        if (winner(apply(p, m)) == Player::II) return Player::II;
      return Player::I;
  }
}

std::optional<ClassGameMove> SizeGameSolver::best_move(const ClassGamePosition& p) {
  using Phase = ClassGamePosition::Phase;
  using Kind = ClassGameMove::Kind;
  if (p.phase == Phase::Terminal) return std::nullopt;
  if (p.phase != Phase::PlayerI) {
    auto moves = legal_moves(p);
    for (const auto& m : moves)
      if (winner(apply(p, m)) == Player::II) return m;
    return moves.front();
  }
  const Class ca = impl_->intern_class(p.left), cb = impl_->intern_class(p.right);
  if (!impl_->class_win(p.budget, ca, cb)) return ClassGameMove{};
  const detail::ClassMove sm = impl_->class_entry(p.budget, ca, cb).move;
  ClassGameMove m;
  switch (sm.kind) {
    case detail::ClassMove::Kind::Negation:
      return m;
    case detail::ClassMove::Kind::Conjunction:
      m.kind = Kind::Split;
      m.u = sm.u;
      for (std::size_t i = 0; i < p.right.size(); ++i) {
        const int id = impl_->intern(p.right[i]);
        if (std::binary_search(sm.c.begin(), sm.c.end(), id)) m.c.push_back(static_cast<int>(i));
        if (std::binary_search(sm.d.begin(), sm.d.end(), id)) m.d.push_back(static_cast<int>(i));
      }
      return m;
    case detail::ClassMove::Kind::Quantifier: {
      m.kind = Kind::Quantifier;
      m.quantifier = sm.quantifier;
      m.vars = sm.vars;
      m.budgets = sm.budgets;
      std::vector<Context> bases(p.left);
      bases.insert(bases.end(), p.right.begin(), p.right.end());
      m.sets.assign(sm.vars.size(), std::vector<TupleSet>(bases.size()));
      // The stored sets are unions of isomorphism types; pull them back.
      for (std::size_t j = 0; j < sm.vars.size(); ++j)
        for (std::size_t i = 0; i < bases.size(); ++i)
          for (const auto& t : tuples_respecting(bases[i].domain_size(), sm.vars[j])) {
            const int id = impl_->intern(extend_context(bases[i], sm.vars[j], t));
            if (std::binary_search(sm.plus[j].begin(), sm.plus[j].end(), id))
              m.sets[j][i].push_back(t);
          }
      return m;
    }
    default:
      throw PreconditionError("size game: stored strategy does not apply to this position");
  }
}

std::string SizeGameSolver::describe(const ClassGamePosition& p) const {
  using Phase = ClassGamePosition::Phase;
  std::string s = "[budget " + std::to_string(p.budget) + "] " + list_string(p.left) + " vs " +
                  list_string(p.right);
  switch (p.phase) {
    case Phase::Terminal:
      return s + ": " + to_string(p.winner) + " wins (" + p.note + ")";
    case Phase::ChooseBranch:
      return s + ": Player II picks a branch of " + describe(p, p.pending);
    case Phase::ChooseComponent:
      return s + ": Player II picks a component of " + describe(p, p.pending);
    case Phase::PlayerI:
      break;
  }
  return s + ": Player I to move";
}

std::string SizeGameSolver::describe(const ClassGamePosition& p, const ClassGameMove& m) const {
  using Kind = ClassGameMove::Kind;
  auto pick = [&](const std::vector<int>& idx) {
    std::vector<Context> cs;
    for (int i : idx) cs.push_back(p.right[static_cast<std::size_t>(i)]);
    return list_string(cs);
  };
  switch (m.kind) {
    case Kind::Swap:
      return "swap classes";
    case Kind::Split:
      return "split " + std::to_string(m.u) + "+" + std::to_string(p.budget - m.u) + ": C=" +
             pick(m.c) + " D=" + pick(m.d);
    case Kind::Quantifier: {
      std::string s = "supplement with " + quantifier_head(impl_->qset, m.quantifier, m.vars, m.budgets);
      for (std::size_t j = 0; j < m.sets.size(); ++j)
        for (std::size_t i = 0; i < m.sets[j].size(); ++i) {
          const Context& c = i < p.left.size() ? p.left[i] : p.right[i - p.left.size()];
          s += "; P" + (m.sets.size() > 1 ? std::to_string(j + 1) : std::string()) + "(" +
               ctx_string(c) + ")=" + set_string(m.sets[j][i]);
        }
      return s;
    }
    case Kind::ChooseBranch:
      return m.choice == 0 ? "take branch C" : "take branch D";
    case Kind::ChooseComponent:
      return "take component " + std::to_string(m.choice + 1);
  }
  return "?";
}

// ------------------------------------------------------------------- pair game

namespace {

PairGamePosition normalize(PairGamePosition p, SizeImpl& impl) {
  if (p.phase != PairGamePosition::Phase::PlayerI) return p;
  impl.intern(p.left);
  impl.intern(p.right);
  if (auto atom = atomic_separation({p.left}, {p.right})) {
    p.phase = PairGamePosition::Phase::Terminal;
    p.winner = Player::I;
    p.note = "atomic " + to_string(*atom) + " separates the pair";
  } else if (p.budget == 1) {
    p.phase = PairGamePosition::Phase::Terminal;
    p.winner = Player::II;
    p.note = "budget 1 and no atomic formula separates the pair";
  }
  return p;
}

std::vector<PairGameMove> replies(const PairGamePosition& p) {
  std::vector<PairGameMove> out;
  const PairGameMove& q = p.pending;
  for (std::size_t j = 0; j < q.vars.size(); ++j) {
    const auto lt = tuples_respecting(p.left.domain_size(), q.vars[j]);
    const auto rt = tuples_respecting(p.right.domain_size(), q.vars[j]);
    auto in = [](const TupleSet& s, const Tuple& t) { return std::binary_search(s.begin(), s.end(), t); };
    auto add = [&](int option, const Tuple& a, const Tuple& b) {
      PairGameMove m;
      m.kind = PairGameMove::Kind::Reply;
      m.component = static_cast<int>(j);
      m.option = option;
      m.first = a;
      m.second = b;
      out.push_back(std::move(m));
    };
    const TupleSet& mp = q.left_sets[j];
    const TupleSet& np = q.right_sets[j];
    for (const auto& a : lt)
      for (const auto& b : rt) {
        if (in(mp, a) && !in(np, b)) add(1, a, b);
        if (!in(mp, a) && in(np, b)) add(2, a, b);
      }
    for (const auto& a : lt)
      for (const auto& a2 : lt)
        if (in(mp, a) && !in(mp, a2)) add(3, a, a2);
    for (const auto& b : rt)
      for (const auto& b2 : rt)
        if (in(np, b) && !in(np, b2)) add(4, b, b2);
  }
  return out;
}

}  // namespace

PairGamePosition SizeGameSolver::pair_initial(const Context& a, const Context& b, int budget) {
  check_budget(impl_->caps, budget);
  PairGamePosition p;
  p.budget = budget;
  p.left = a;
  p.right = b;
  return normalize(p, *impl_);
}

std::vector<PairGameMove> SizeGameSolver::legal_moves(const PairGamePosition& p,
                                                      std::size_t max_moves) {
  using Phase = PairGamePosition::Phase;
  using Kind = PairGameMove::Kind;
  std::vector<PairGameMove> out;
  auto push = [&](PairGameMove m) {
    out.push_back(std::move(m));
    Caps::check("play_moves", static_cast<long long>(max_moves), static_cast<long long>(out.size()));
  };
  switch (p.phase) {
    case Phase::Terminal:
      return out;
    case Phase::ChooseBudget: {
      PairGameMove m;
      m.kind = Kind::ChooseBudget;
      m.u = p.pending.u;
      push(m);
      if (p.budget - p.pending.u != p.pending.u) {
        m.u = p.budget - p.pending.u;
        push(m);
      }
      return out;
    }
    case Phase::Reply:
      for (auto& m : replies(p)) push(std::move(m));
      return out;
    case Phase::PlayerI:
      break;
  }
  const int s = p.budget;
  push({});  // swap
  if (impl_->opts.allow_split)
    for (int u = 1; u <= s / 2; ++u) {
      PairGameMove m;
      m.kind = Kind::Split;
      m.u = u;
      push(m);
    }
  std::set<std::string> used;
  for (const auto* c : {&p.left, &p.right})
    for (const auto& kv : c->assignment) used.insert(kv.first);
  for (std::size_t qi = 0; qi < impl_->qset.size(); ++qi) {
    const Quantifier& q = impl_->qset[qi];
    if (q.width() > s - 1) continue;
    for (const auto& vars : detail::component_choices(q.type(), used, impl_->opts.rebind_existing)) {
      auto lefts = joint_choices(q, p.left.domain_size(), vars, true, impl_->caps, max_moves);
      auto rights = joint_choices(q, p.right.domain_size(), vars, false, impl_->caps, max_moves);
      for (const auto& budgets : detail::compositions(s - 1, q.width()))
        for (const auto& l : lefts)
          for (const auto& r : rights) {
            PairGameMove m;
            m.kind = Kind::Quantifier;
            m.quantifier = qi;
            m.vars = vars;
            m.budgets = budgets;
            m.left_sets = l;
            m.right_sets = r;
            push(std::move(m));
          }
    }
  }
  return out;
}

PairGamePosition SizeGameSolver::apply(const PairGamePosition& p, const PairGameMove& m) {
  using Phase = PairGamePosition::Phase;
  using Kind = PairGameMove::Kind;
  PairGamePosition next = p;
  next.note.clear();
  switch (p.phase) {
    case Phase::Terminal:
      throw PreconditionError("the game is over");
    case Phase::ChooseBudget:
      if (m.kind != Kind::ChooseBudget || (m.u != p.pending.u && m.u != p.budget - p.pending.u))
        throw PreconditionError("Player II must pick one of the two budgets");
      next.budget = m.u;
      next.phase = Phase::PlayerI;
      return normalize(next, *impl_);
    case Phase::Reply: {
      auto options = replies(p);
      if (m.kind != Kind::Reply || std::find(options.begin(), options.end(), m) == options.end())
        throw PreconditionError("not one of Player II's four kinds of answer");
      const VarTuple& x = p.pending.vars[static_cast<std::size_t>(m.component)];
      next.budget = p.pending.budgets[static_cast<std::size_t>(m.component)];
      switch (m.option) {
        case 1:
          next.left = extend_context(p.left, x, m.first);
          next.right = extend_context(p.right, x, m.second);
          break;
        case 2:
          next.left = extend_context(p.right, x, m.second);
          next.right = extend_context(p.left, x, m.first);
          break;
        case 3:
          next.left = extend_context(p.left, x, m.first);
          next.right = extend_context(p.left, x, m.second);
          break;
        default:
          next.left = extend_context(p.right, x, m.first);
          next.right = extend_context(p.right, x, m.second);
          break;
      }
      next.phase = Phase::PlayerI;
      return normalize(next, *impl_);
    }
    case Phase::PlayerI:
      break;
  }
  switch (m.kind) {
    case Kind::Swap:
      next.budget = p.budget - 1;
      std::swap(next.left, next.right);
      return normalize(next, *impl_);
    case Kind::Split:
      if (!impl_->opts.allow_split) throw PreconditionError("the split move is disabled");
      if (m.u < 1 || m.u >= p.budget) throw PreconditionError("split budgets must be positive");
      next.phase = Phase::ChooseBudget;
      next.pending = m;
      return next;
    case Kind::Quantifier: {
      check_shape(impl_->qset, m.quantifier, m.vars, m.budgets, p.budget - 1);
      const Quantifier& q = impl_->qset[m.quantifier];
      if (m.left_sets.size() != m.vars.size() || m.right_sets.size() != m.vars.size())
        throw PreconditionError("one set per component on each side");
      for (std::size_t j = 0; j < m.vars.size(); ++j)
        if (!is_subset_of_respecting(m.left_sets[j], p.left.domain_size(), m.vars[j]) ||
            !is_subset_of_respecting(m.right_sets[j], p.right.domain_size(), m.vars[j]))
          throw PreconditionError("sets must be sorted repetition-respecting tuples");
      if (!q.accepts(p.left.domain_size(), m.left_sets) ||
          q.accepts(p.right.domain_size(), m.right_sets))
        throw PreconditionError("sets violate the acceptance condition of " + q.name());
      next.phase = Phase::Reply;
      next.pending = m;
      if (replies(next).empty()) {
        next.phase = Phase::Terminal;
        next.winner = Player::I;
        next.note = "Player II has no answer";
      }
      return next;
    }
    default:
      throw PreconditionError("Player I cannot make that move");
  }
}

Player SizeGameSolver::winner(const PairGamePosition& p) {
  using Phase = PairGamePosition::Phase;
  switch (p.phase) {
    case Phase::Terminal:
      return p.winner;
    case Phase::PlayerI:
      return impl_->pair_win(p.budget, impl_->intern(p.left), impl_->intern(p.right)) ? Player::I
                                                                                     : Player::II;
    default:
      for (const auto& m : legal_moves(p))
        if (winner(apply(p, m)) == Player::II) return Player::II;
      return Player::I;
  }
}

std::optional<PairGameMove> SizeGameSolver::best_move(const PairGamePosition& p) {
  using Phase = PairGamePosition::Phase;
  using Kind = PairGameMove::Kind;
  if (p.phase == Phase::Terminal) return std::nullopt;
  if (p.phase != Phase::PlayerI) {
    auto moves = legal_moves(p);
    for (const auto& m : moves)
      if (winner(apply(p, m)) == Player::II) return m;
    return moves.front();
  }
  const int a = impl_->intern(p.left), b = impl_->intern(p.right);
  if (!impl_->pair_win(p.budget, a, b)) return PairGameMove{};
  const detail::PairMove sm = impl_->pair_memo.at({p.budget, a, b}).move;
  PairGameMove m;
  switch (sm.kind) {
    case detail::PairMove::Kind::Negation:
      return m;
    case detail::PairMove::Kind::Split:
      m.kind = Kind::Split;
      m.u = sm.u;
      return m;
    case detail::PairMove::Kind::Quantifier: {
      m.kind = Kind::Quantifier;
      m.quantifier = sm.quantifier;
      m.vars = sm.vars;
      m.budgets = sm.budgets;
      // Winning sets never split an isomorphism type, so they pull back from
      // the stored representatives along isomorphism types.
      for (std::size_t j = 0; j < sm.vars.size(); ++j) {
        auto pull = [&](int rep, detail::Mask mask, const Context& actual) {
          std::set<int> ids;
          const auto& ext = impl_->extensions(rep, sm.vars[j]);
          for (std::size_t t = 0; t < ext.size(); ++t)
            if (mask >> t & 1) ids.insert(ext[t]);
          TupleSet out;
          for (const auto& t : tuples_respecting(actual.domain_size(), sm.vars[j]))
            if (ids.count(impl_->intern(extend_context(actual, sm.vars[j], t)))) out.push_back(t);
          return out;
        };
        m.left_sets.push_back(pull(a, sm.left_sets[j], p.left));
        m.right_sets.push_back(pull(b, sm.right_sets[j], p.right));
      }
      return m;
    }
    default:
      throw PreconditionError("pair game: stored strategy does not apply to this position");
  }
}

std::string SizeGameSolver::describe(const PairGamePosition& p) const {
  using Phase = PairGamePosition::Phase;
  std::string s = "[budget " + std::to_string(p.budget) + "] " + ctx_string(p.left) + " vs " +
                  ctx_string(p.right);
  switch (p.phase) {
    case Phase::Terminal:
      return s + ": " + to_string(p.winner) + " wins (" + p.note + ")";
    case Phase::ChooseBudget:
      return s + ": Player II picks a budget of " + describe(p, p.pending);
    case Phase::Reply:
      return s + ": Player II answers " + describe(p, p.pending);
    case Phase::PlayerI:
      break;
  }
  return s + ": Player I to move";
}

std::string SizeGameSolver::describe(const PairGamePosition& p, const PairGameMove& m) const {
  using Kind = PairGameMove::Kind;
  switch (m.kind) {
    case Kind::Swap:
      return "swap models";
    case Kind::Split:
      return "split budget " + std::to_string(m.u) + "+" + std::to_string(p.budget - m.u);
    case Kind::ChooseBudget:
      return "continue with budget " + std::to_string(m.u);
    case Kind::Quantifier: {
      std::string s = "supplement with " + quantifier_head(impl_->qset, m.quantifier, m.vars, m.budgets);
      for (std::size_t j = 0; j < m.vars.size(); ++j) {
        const std::string k = m.vars.size() > 1 ? std::to_string(j + 1) : std::string();
        s += "; M'" + k + "=" + set_string(m.left_sets[j]) + " N'" + k + "=" +
             set_string(m.right_sets[j]);
      }
      return s;
    }
    case Kind::Reply: {
      static const char* const kinds[] = {"a in M', b outside N'", "a outside M', b in N'",
                                          "a in M', a' outside M'", "b in N', b' outside N'"};
      std::string s = std::string(kinds[std::clamp(m.option, 1, 4) - 1]) + ": " +
                      tuple_to_string(m.first) + ", " + tuple_to_string(m.second);
      if (p.pending.vars.size() > 1) s += " in component " + std::to_string(m.component + 1);
      return s;
    }
  }
  return "?";
}

}  // namespace efq

#include "efq/types_engine.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

namespace efq {

namespace detail {

struct Strat;

// A universe extended by a fresh bound tuple: point p of the parent owns the
// extended points begin[p] .. begin[p] + count[p] - 1, in tuples_respecting order.
struct Extension {
  Strat* strat = nullptr;
  VarTuple bound;
  std::vector<int> begin, count;
};

// A depth-(l+1) formula Q ȳ (ψ_1..ψ_k) telling two level-(l+1) classes apart.
struct Witness {
  std::size_t q = 0;
  std::vector<Extension*> ext;
  std::vector<std::vector<int>> cells;  // level-l cells of ext[j] making up ψ_j
  bool true_at_new = false;
};

struct Strat {
  std::vector<std::string> vars;  // sorted; every point binds exactly these
  std::vector<Context> points;
  std::vector<std::vector<int>> values;  // values[p][i] = value of vars[i]
  std::vector<FormulaPtr> atoms;         // atoms that vary across the universe
  std::vector<std::vector<char>> atom_value;  // per level-0 class
  std::vector<std::vector<int>> cls, reps, parent;
  std::vector<std::map<std::pair<int, int>, Witness>> witnesses;
  std::map<VarTuple, std::unique_ptr<Extension>> exts;
  std::vector<std::vector<std::optional<FormulaPtr>>> chi;

  int levels() const { return static_cast<int>(cls.size()); }
};

struct TypesImpl {
  QuantifierSet qset;
  Caps caps;
  std::unordered_map<std::string, int> struct_ids;
  std::unordered_map<std::string, std::unique_ptr<Strat>> strats;

  int struct_id(const Structure& s) {
    auto it = struct_ids.find(s.key());
    if (it != struct_ids.end()) return it->second;
    int id = static_cast<int>(struct_ids.size());
    struct_ids.emplace(s.key(), id);
    return id;
  }

  Strat* universe(const std::vector<std::string>& vars, std::vector<Context> points) {
    std::string key;
    for (const auto& v : vars) key += v + ",";
    key += "|";
    std::vector<std::vector<int>> values;
    for (const auto& p : points) {
      key += std::to_string(struct_id(*p.structure)) + ":";
      std::vector<int> vals;
      for (const auto& v : vars) {
        int val = p.value(v);
        vals.push_back(val);
        key += std::to_string(val) + ",";
      }
      key += ";";
      values.push_back(std::move(vals));
    }
    auto it = strats.find(key);
    if (it != strats.end()) return it->second.get();
    auto s = std::make_unique<Strat>();
    s->vars = vars;
    s->points = std::move(points);
    s->values = std::move(values);
    Strat* raw = s.get();
    strats.emplace(key, std::move(s));
    return raw;
  }

  static std::vector<std::string> fresh_names(const std::vector<std::string>& used, int count) {
    std::vector<std::string> out;
    for (int i = 1; static_cast<int>(out.size()) < count; ++i) {
      std::string name = "y" + std::to_string(i);
      if (std::find(used.begin(), used.end(), name) == used.end()) out.push_back(name);
    }
    return out;
  }

  // Bound tuples of the given arity up to renaming: one per repetition pattern.
  static std::vector<VarTuple> patterns(const std::vector<std::string>& used, int arity) {
    auto names = fresh_names(used, arity);
    std::vector<VarTuple> out;
    std::vector<int> rgs(static_cast<std::size_t>(arity), 0);
    while (true) {
      VarTuple t;
      for (int i : rgs) t.vars.push_back(names[i]);
      out.push_back(std::move(t));
      // next restricted growth string
      int i = arity - 1;
      for (; i > 0; --i) {
        int mx = *std::max_element(rgs.begin(), rgs.begin() + i);
        if (rgs[i] <= mx) {
          ++rgs[i];
          std::fill(rgs.begin() + i + 1, rgs.end(), 0);
          break;
        }
      }
      if (i == 0) break;
    }
    return out;
  }

  Extension* extension(Strat& s, const VarTuple& y) {
    auto it = s.exts.find(y);
    if (it != s.exts.end()) return it->second.get();
    auto e = std::make_unique<Extension>();
    e->bound = y;
    std::vector<std::string> vars = s.vars;
    for (const auto& v : y.distinct())
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    std::vector<Context> points;
    for (const auto& p : s.points) {
      e->begin.push_back(static_cast<int>(points.size()));
      auto tuples = tuples_respecting(p.domain_size(), y);
      e->count.push_back(static_cast<int>(tuples.size()));
      for (const auto& t : tuples) points.push_back(extend_context(p, y, t));
    }
    e->strat = universe(vars, std::move(points));
    Extension* raw = e.get();
    s.exts.emplace(y, std::move(e));
    return raw;
  }

  void build_level0(Strat& s) {
    const int np = static_cast<int>(s.points.size());
    const int nv = static_cast<int>(s.vars.size());
    std::vector<FormulaPtr> candidates;
    std::vector<std::vector<char>> truth;  // per candidate, per point
    for (int i = 0; i < nv; ++i)
      for (int j = i + 1; j < nv; ++j) {
        std::vector<char> row(np);
        for (int p = 0; p < np; ++p) row[p] = s.values[p][i] == s.values[p][j];
        candidates.push_back(Formula::eq(s.vars[i], s.vars[j]));
        truth.push_back(std::move(row));
      }
    if (np > 0 && nv > 0) {
      const Vocabulary& voc = s.points[0].structure->vocabulary();
      for (std::size_t r = 0; r < voc.size(); ++r) {
        for (const auto& idx : all_tuples(nv, voc.arity(r))) {
          std::vector<char> row(np);
          Tuple args(idx.size());
          for (int p = 0; p < np; ++p) {
            for (std::size_t i = 0; i < idx.size(); ++i) args[i] = s.values[p][idx[i]];
            row[p] = s.points[p].structure->holds(r, args);
          }
          std::vector<std::string> names;
          for (int i : idx) names.push_back(s.vars[i]);
          candidates.push_back(Formula::rel(voc.symbols()[r].name, std::move(names)));
          truth.push_back(std::move(row));
        }
      }
    }
    std::vector<std::size_t> varying;
    for (std::size_t a = 0; a < candidates.size(); ++a)
      if (std::find(truth[a].begin(), truth[a].end(), !truth[a][0]) != truth[a].end())
        varying.push_back(a);
    for (auto a : varying) s.atoms.push_back(candidates[a]);
    std::map<std::vector<char>, int> ids;
    std::vector<int> cls(np);
    std::vector<int> reps;
    for (int p = 0; p < np; ++p) {
      std::vector<char> sig;
      for (auto a : varying) sig.push_back(truth[a][p]);
      auto [it, fresh] = ids.emplace(sig, static_cast<int>(reps.size()));
      if (fresh) {
        reps.push_back(p);
        s.atom_value.push_back(sig);
      }
      cls[p] = it->second;
    }
    s.cls.push_back(std::move(cls));
    s.reps.push_back(std::move(reps));
    s.parent.emplace_back();
    s.witnesses.emplace_back();
    s.chi.emplace_back(s.reps[0].size());
  }

  void ensure(Strat& s, int level) {
    if (s.levels() == 0) build_level0(s);
    while (s.levels() <= level) build_next(s);
  }

  void build_next(Strat& s) {
    const int l = s.levels() - 1;
    const int np = static_cast<int>(s.points.size());
    std::vector<int> cls(np, -1), reps, parent;
    std::map<std::pair<int, int>, Witness> witnesses;
    std::vector<std::vector<int>> children(s.reps[l].size());
    for (int p = 0; p < np; ++p) {
      const int par = s.cls[l][p];
      std::vector<std::pair<int, Witness>> pending;
      for (int c : children[par]) {
        auto w = find_witness(s, l, p, reps[c]);
        if (!w) {
          cls[p] = c;
          break;
        }
        pending.emplace_back(c, std::move(*w));
      }
      if (cls[p] >= 0) continue;
      const int id = static_cast<int>(reps.size());
      reps.push_back(p);
      parent.push_back(par);
      children[par].push_back(id);
      cls[p] = id;
      for (auto& [c, w] : pending) witnesses.emplace(std::make_pair(c, id), std::move(w));
    }
    s.cls.push_back(std::move(cls));
    s.chi.emplace_back(reps.size());
    s.reps.push_back(std::move(reps));
    s.parent.push_back(std::move(parent));
    s.witnesses.push_back(std::move(witnesses));
  }

  struct Component {
    Extension* ext = nullptr;
    std::vector<int> cells;                   // cells realized by a or b
    std::vector<std::vector<Tuple>> a_tuples;  // per cell
    std::vector<std::vector<Tuple>> b_tuples;
  };

  Component component(Strat& s, int l, int a, int b, const VarTuple& y) {
    Component comp;
    comp.ext = extension(s, y);
    Strat& e = *comp.ext->strat;
    ensure(e, l);
    std::map<int, int> slot;
    auto collect = [&](int p, bool is_a) {
      auto tuples = tuples_respecting(s.points[p].domain_size(), y);
      for (int i = 0; i < comp.ext->count[p]; ++i) {
        int c = e.cls[l][comp.ext->begin[p] + i];
        auto [it, fresh] = slot.emplace(c, static_cast<int>(comp.cells.size()));
        if (fresh) {
          comp.cells.push_back(c);
          comp.a_tuples.emplace_back();
          comp.b_tuples.emplace_back();
        }
        (is_a ? comp.a_tuples : comp.b_tuples)[it->second].push_back(tuples[i]);
      }
    };
    collect(a, true);
    collect(b, false);
    return comp;
  }

  // Monadic quantifiers only see |X|, so it suffices to know which pairs of
  // counts (|X_a|, |X_b|) unions of cells can produce.
  std::optional<std::pair<std::vector<int>, bool>> monadic_search(const Quantifier& q,
                                                                 const Component& comp, int na,
                                                                 int nb) {
    std::map<std::pair<int, int>, std::vector<int>> states{{{0, 0}, {}}};
    for (std::size_t c = 0; c < comp.cells.size(); ++c) {
      auto next = states;
      int ca = static_cast<int>(comp.a_tuples[c].size());
      int cb = static_cast<int>(comp.b_tuples[c].size());
      for (const auto& [st, chosen] : states) {
        auto key = std::make_pair(st.first + ca, st.second + cb);
        if (!next.count(key)) {
          auto more = chosen;
          more.push_back(comp.cells[c]);
          next.emplace(key, std::move(more));
        }
      }
      states = std::move(next);
    }
    for (const auto& [st, chosen] : states) {
      bool qa = q.accepts_count(na, st.first);
      if (qa != q.accepts_count(nb, st.second)) return std::make_pair(chosen, qa);
    }
    return std::nullopt;
  }

  std::optional<Witness> find_witness(Strat& s, int l, int a, int b) {
    const int na = s.points[a].domain_size();
    const int nb = s.points[b].domain_size();
    for (std::size_t qi = 0; qi < qset.size(); ++qi) {
      const Quantifier& q = qset[qi];
      const int k = q.width();
      std::vector<std::vector<VarTuple>> choices;
      for (int j = 0; j < k; ++j) choices.push_back(patterns(s.vars, q.type().arities[j]));
      std::vector<std::size_t> pick(static_cast<std::size_t>(k), 0);
      while (true) {
        std::vector<Component> comps;
        for (int j = 0; j < k; ++j) comps.push_back(component(s, l, a, b, choices[j][pick[j]]));
        if (k == 1 && q.monadic()) {
          if (auto found = monadic_search(q, comps[0], na, nb)) {
            Witness w;
            w.q = qi;
            w.ext = {comps[0].ext};
            w.cells = {found->first};
            w.true_at_new = found->second;
            return w;
          }
        } else if (auto w = general_search(q, comps, na, nb)) {
          w->q = qi;
          return w;
        }
        int j = k - 1;
        while (j >= 0 && ++pick[j] == choices[j].size()) pick[j--] = 0;
        if (j < 0) break;
      }
    }
    return std::nullopt;
  }

  std::optional<Witness> general_search(const Quantifier& q, const std::vector<Component>& comps,
                                        int na, int nb) {
    int total = 0;
    for (const auto& c : comps) total += static_cast<int>(c.cells.size());
    Caps::check("max_type_cells", caps.max_type_cells, total);
    const int k = static_cast<int>(comps.size());
    std::vector<TupleSet> xa(k), xb(k);
    for (long long mask = 0; mask < (1LL << total); ++mask) {
      int bit = 0;
      for (int j = 0; j < k; ++j) {
        xa[j].clear();
        xb[j].clear();
        for (std::size_t c = 0; c < comps[j].cells.size(); ++c, ++bit) {
          if (!(mask >> bit & 1)) continue;
          xa[j].insert(xa[j].end(), comps[j].a_tuples[c].begin(), comps[j].a_tuples[c].end());
          xb[j].insert(xb[j].end(), comps[j].b_tuples[c].begin(), comps[j].b_tuples[c].end());
        }
        std::sort(xa[j].begin(), xa[j].end());
        std::sort(xb[j].begin(), xb[j].end());
      }
      bool qa = q.accepts(na, xa);
      if (qa == q.accepts(nb, xb)) continue;
      Witness w;
      w.true_at_new = qa;
      bit = 0;
      for (int j = 0; j < k; ++j) {
        w.ext.push_back(comps[j].ext);
        std::vector<int> chosen;
        for (std::size_t c = 0; c < comps[j].cells.size(); ++c, ++bit)
          if (mask >> bit & 1) chosen.push_back(comps[j].cells[c]);
        w.cells.push_back(std::move(chosen));
      }
      return w;
    }
    return std::nullopt;
  }

  // nullptr stands for a formula true on the whole universe.
  FormulaPtr chi(Strat& s, int l, int c) {
    auto& slot = s.chi[l][c];
    if (slot) return *slot;
    std::vector<FormulaPtr> parts;
    if (l == 0) {
      for (std::size_t i = 0; i < s.atoms.size(); ++i)
        parts.push_back(s.atom_value[c][i] ? s.atoms[i] : Formula::negate(s.atoms[i]));
    } else {
      if (auto base = chi(s, l - 1, s.parent[l][c])) parts.push_back(base);
      for (const auto& [key, w] : s.witnesses[l]) {
        if (key.first != c && key.second != c) continue;
        bool truth = key.second == c ? w.true_at_new : !w.true_at_new;
        auto theta = witness_formula(w, l - 1);
        parts.push_back(truth ? theta : Formula::negate(theta));
      }
    }
    slot = conj_all(parts);
    return *slot;
  }

  FormulaPtr witness_formula(const Witness& w, int l) {
    std::vector<VarTuple> bound;
    std::vector<FormulaPtr> subs;
    for (std::size_t j = 0; j < w.ext.size(); ++j) {
      bound.push_back(w.ext[j]->bound);
      subs.push_back(closed_set(*w.ext[j]->strat, l, w.cells[j]));
    }
    return Formula::quant(qset[w.q], std::move(bound), std::move(subs));
  }

  FormulaPtr closed_set(Strat& s, int l, const std::vector<int>& cells) {
    if (s.vars.empty()) throw PreconditionError("closed sets need at least one variable");
    const int total = static_cast<int>(s.reps[l].size());
    std::set<int> in(cells.begin(), cells.end());
    const std::string& w = s.vars[0];
    if (in.empty()) return false_formula(w);
    if (static_cast<int>(in.size()) == total) return Formula::eq(w, w);
    std::vector<int> rest;
    for (int c = 0; c < total; ++c)
      if (!in.count(c)) rest.push_back(c);
    const bool complement = rest.size() < in.size();
    std::vector<FormulaPtr> parts;
    for (int c : complement ? rest : std::vector<int>(in.begin(), in.end()))
      parts.push_back(chi(s, l, c));
    auto f = disj_all(parts);
    return complement ? Formula::negate(f) : f;
  }

  void check_contexts(const std::vector<Context>& contexts, int d) {
    if (d < 0) throw PreconditionError("depth must be nonnegative");
    Caps::check("max_depth", caps.max_depth, d);
    if (contexts.empty()) return;
    const auto vars = contexts[0].variables();
    for (const auto& c : contexts) {
      if (!(c.structure->vocabulary() == contexts[0].structure->vocabulary()))
        throw PreconditionError("contexts have different vocabularies");
      if (c.variables() != vars)
        throw PreconditionError("contexts bind different variables");
      Caps::check("max_domain", caps.max_domain, c.domain_size());
    }
  }

  Strat* pair_universe(const Context& c1, const Context& c2, int d) {
    check_contexts({c1, c2}, d);
    Strat* s = universe(c1.variables(), {c1, c2});
    ensure(*s, d);
    return s;
  }
};

}  // namespace detail

int TypePartition::cell_of(int context, const Tuple& t) const {
  auto tuples = tuples_respecting(contexts_.at(context).domain_size(), x_);
  auto it = std::find(tuples.begin(), tuples.end(), t);
  if (it == tuples.end()) throw PreconditionError("tuple does not respect " + x_.to_string());
  return cell_index_[context][it - tuples.begin()];
}

FormulaPtr TypePartition::type_formula(std::size_t cell) const {
  if (cell >= cells_.size()) throw PreconditionError("cell index out of range");
  auto f = impl_->chi(*strat_, depth_, static_cast<int>(cell));
  if (!f) return Formula::eq(strat_->vars[0], strat_->vars[0]);
  return f;
}

FormulaPtr TypePartition::closed_set_formula(const std::vector<int>& cells) const {
  for (int c : cells)
    if (c < 0 || c >= static_cast<int>(cells_.size()))
      throw PreconditionError("cell index out of range");
  return impl_->closed_set(*strat_, depth_, cells);
}

TypesEngine::TypesEngine(QuantifierSet qset, Caps caps)
    : impl_(std::make_shared<detail::TypesImpl>()) {
  impl_->qset = std::move(qset);
  impl_->caps = caps;
}

const QuantifierSet& TypesEngine::quantifiers() const { return impl_->qset; }

TypePartition TypesEngine::joint_partition(const std::vector<Context>& contexts, const VarTuple& x,
                                           int d) {
  if (x.vars.empty()) throw PreconditionError("variable tuple must be nonempty");
  impl_->check_contexts(contexts, d);
  std::vector<std::string> vars = contexts.empty() ? std::vector<std::string>{}
                                                   : contexts[0].variables();
  for (const auto& v : x.distinct())
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  std::sort(vars.begin(), vars.end());

  TypePartition out;
  out.impl_ = impl_;
  out.depth_ = d;
  out.x_ = x;
  out.contexts_ = contexts;
  std::vector<Context> points;
  std::vector<CellMember> members;
  for (std::size_t i = 0; i < contexts.size(); ++i)
    for (const auto& t : tuples_respecting(contexts[i].domain_size(), x)) {
      points.push_back(extend_context(contexts[i], x, t));
      members.push_back({static_cast<int>(i), t});
    }
  out.strat_ = impl_->universe(vars, std::move(points));
  impl_->ensure(*out.strat_, d);
  const auto& cls = out.strat_->cls[d];
  out.cells_.resize(out.strat_->reps[d].size());
  out.cell_index_.resize(contexts.size());
  for (std::size_t p = 0; p < members.size(); ++p) {
    out.cells_[cls[p]].push_back(members[p]);
    out.cell_index_[members[p].context].push_back(cls[p]);
  }
  out.stable_ = d > 0 && out.strat_->reps[d].size() == out.strat_->reps[d - 1].size();
  return out;
}

bool TypesEngine::d_equivalent(const Context& c1, const Context& c2, int d) {
  auto* s = impl_->pair_universe(c1, c2, d);
  return s->cls[d][0] == s->cls[d][1];
}

FormulaPtr TypesEngine::separating_formula(const Context& c1, const Context& c2, int d) {
  auto* s = impl_->pair_universe(c1, c2, d);
  if (s->cls[d][0] == s->cls[d][1]) return nullptr;
  return impl_->chi(*s, d, s->cls[d][0]);
}

TypePartition joint_partition(const std::vector<Context>& contexts, const VarTuple& x, int d,
                              const QuantifierSet& qset, const Caps& caps) {
  TypesEngine engine(qset, caps);
  return engine.joint_partition(contexts, x, d);
}

bool d_equivalent(const Context& c1, const Context& c2, int d, const QuantifierSet& qset,
                  const Caps& caps) {
  TypesEngine engine(qset, caps);
  return engine.d_equivalent(c1, c2, d);
}

}  // namespace efq

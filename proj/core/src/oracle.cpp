#include "efq/oracle.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <unordered_map>

#include "efq/types_engine.hpp"

namespace efq {

namespace detail {

namespace {

using Table = std::vector<std::uint64_t>;

bool bit(const Table& t, std::size_t i) { return (t[i >> 6] >> (i & 63)) & 1; }
void set_bit(Table& t, std::size_t i) { t[i >> 6] |= std::uint64_t{1} << (i & 63); }

std::vector<std::string> pool_names(const std::set<std::string>& used, int count) {
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

std::vector<std::vector<int>> compositions(int total, int k) {
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

}  // namespace

struct OracleEntry {
  Table table;
  std::uint64_t free = 0;  // bit v: variables()[v] occurs free
  FormulaPtr formula;
};

struct OracleImpl {
  std::vector<Context> universe;
  QuantifierSet qset;
  int max_size;
  Caps caps;
  SizeMode mode;

  std::vector<std::string> vars;  // base variables, then the pool
  std::size_t base_count = 0;
  std::vector<std::size_t> row_start;  // per context
  std::size_t rows = 0;
  std::size_t words = 0;
  std::uint64_t base_mask = 0;

  std::vector<std::vector<OracleEntry>> levels;  // levels[s] for s >= 1
  std::unordered_map<std::string, int> seen;
  long long total = 0;

  OracleImpl(std::vector<Context> u, QuantifierSet q, int ms, Caps c, SizeMode m)
      : universe(std::move(u)), qset(std::move(q)), max_size(ms), caps(c), mode(m) {
    if (universe.empty()) throw PreconditionError("oracle: empty universe");
    if (max_size < 1) throw PreconditionError("oracle: max_size must be positive");
    Caps::check("max_budget", caps.max_budget, max_size);
    const Vocabulary& voc = universe.front().structure->vocabulary();
    std::set<std::string> used;
    std::vector<std::string> common = universe.front().variables();
    for (const auto& ctx : universe) {
      if (!(ctx.structure->vocabulary() == voc))
        throw InputError("oracle: contexts over different vocabularies");
      Caps::check("max_domain", caps.max_domain, ctx.domain_size());
      for (const auto& kv : ctx.assignment) used.insert(kv.first);
      std::vector<std::string> keep;
      for (const auto& v : common)
        if (ctx.assignment.count(v)) keep.push_back(v);
      common = std::move(keep);
    }
    const int pool = caps.fresh_pool > 0 ? caps.fresh_pool
                                         : std::max(0, max_size - 1) * std::max(1, qset.max_arity());
    vars = common;
    base_count = vars.size();
    for (auto& n : pool_names(used, pool)) vars.push_back(n);
    Caps::check("variables", 64, static_cast<long long>(vars.size()));
    base_mask = base_count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << base_count) - 1;
    for (const auto& ctx : universe) {
      row_start.push_back(rows);
      long long r = 1;
      for (int p = 0; p < pool; ++p) {
        r *= ctx.domain_size();
        Caps::check("max_oracle_rows", caps.max_oracle_rows, r);
      }
      rows += static_cast<std::size_t>(r);
      Caps::check("max_oracle_rows", caps.max_oracle_rows, static_cast<long long>(rows));
    }
    words = (rows + 63) / 64;
    levels.resize(1);
  }

  std::size_t pool_size() const { return vars.size() - base_count; }

  // Value of variable v at row r of context i.
  int value(std::size_t i, std::size_t r, std::size_t v) const {
    const Context& c = universe[i];
    if (v < base_count) return c.value(vars[v]);
    std::size_t off = r - row_start[i];
    const std::size_t n = static_cast<std::size_t>(c.domain_size());
    for (std::size_t p = base_count; p < v; ++p) off /= n;
    return static_cast<int>(off % n);
  }

  std::size_t stride(std::size_t i, std::size_t v) const {
    std::size_t s = 1;
    const std::size_t n = static_cast<std::size_t>(universe[i].domain_size());
    for (std::size_t p = base_count; p < v; ++p) s *= n;
    return s;
  }

  void add(std::vector<OracleEntry>& level, Table table, std::uint64_t free, FormulaPtr f) {
    std::string key(reinterpret_cast<const char*>(table.data()), table.size() * 8);
    key.append(reinterpret_cast<const char*>(&free), sizeof free);
    if (!seen.emplace(std::move(key), static_cast<int>(levels.size())).second) return;
    ++total;
    Caps::check("max_oracle_entries", caps.max_oracle_entries, total);
    level.push_back({std::move(table), free, std::move(f)});
  }

  void build_atoms(std::vector<OracleEntry>& out) {
    const Vocabulary& voc = universe.front().structure->vocabulary();
    const std::size_t nv = vars.size();
    for (std::size_t a = 0; a < nv; ++a)
      for (std::size_t b = a; b < nv; ++b) {
        Table t(words, 0);
        for (std::size_t i = 0; i < universe.size(); ++i) {
          const std::size_t end = i + 1 < universe.size() ? row_start[i + 1] : rows;
          for (std::size_t r = row_start[i]; r < end; ++r)
            if (value(i, r, a) == value(i, r, b)) set_bit(t, r);
        }
        add(out, std::move(t), (std::uint64_t{1} << a) | (std::uint64_t{1} << b),
            Formula::eq(vars[a], vars[b]));
      }
    if (nv == 0) return;
    for (std::size_t rel = 0; rel < voc.size(); ++rel) {
      const int ar = voc.arity(rel);
      std::vector<std::size_t> idx(static_cast<std::size_t>(ar), 0);
      while (true) {
        Table t(words, 0);
        Tuple args(static_cast<std::size_t>(ar));
        std::uint64_t free = 0;
        std::vector<std::string> names;
        for (std::size_t v : idx) {
          free |= std::uint64_t{1} << v;
          names.push_back(vars[v]);
        }
        for (std::size_t i = 0; i < universe.size(); ++i) {
          const std::size_t end = i + 1 < universe.size() ? row_start[i + 1] : rows;
          for (std::size_t r = row_start[i]; r < end; ++r) {
            for (std::size_t p = 0; p < idx.size(); ++p) args[p] = value(i, r, idx[p]);
            if (universe[i].structure->holds(rel, args)) set_bit(t, r);
          }
        }
        add(out, std::move(t), free, Formula::rel(voc.symbols()[rel].name, names));
        int p = ar - 1;
        while (p >= 0 && ++idx[static_cast<std::size_t>(p)] == nv) idx[static_cast<std::size_t>(p--)] = 0;
        if (p < 0) break;
      }
    }
  }

  Table negate(const Table& t) const {
    Table out(words);
    for (std::size_t w = 0; w < words; ++w) out[w] = ~t[w];
    if (rows % 64) out.back() &= (std::uint64_t{1} << (rows % 64)) - 1;
    return out;
  }

  // All tuples over pool variables of the given arity.
  std::vector<std::vector<std::size_t>> pool_tuples(int arity) const {
    std::vector<std::vector<std::size_t>> out;
    if (pool_size() == 0) return out;
    std::vector<std::size_t> idx(static_cast<std::size_t>(arity), base_count);
    while (true) {
      out.push_back(idx);
      int p = arity - 1;
      while (p >= 0 && ++idx[static_cast<std::size_t>(p)] == vars.size())
        idx[static_cast<std::size_t>(p--)] = base_count;
      if (p < 0) break;
    }
    return out;
  }

  // Q x̄_1..x̄_k (φ_1..φ_k) as a table.
  Table apply_quantifier(const Quantifier& q, const std::vector<std::vector<std::size_t>>& xs,
                         const std::vector<const OracleEntry*>& subs) const {
    Table out(words, 0);
    const std::size_t k = xs.size();
    std::vector<TupleSet> sets(k);
    for (std::size_t i = 0; i < universe.size(); ++i) {
      const int n = universe[i].domain_size();
      const std::size_t end = i + 1 < universe.size() ? row_start[i + 1] : rows;
      std::vector<std::vector<Tuple>> tuples(k);
      std::vector<std::vector<std::size_t>> strides(k);
      for (std::size_t j = 0; j < k; ++j) {
        VarTuple xv;
        for (std::size_t v : xs[j]) xv.vars.push_back(vars[v]);
        tuples[j] = tuples_respecting(n, xv);
        for (std::size_t v : xs[j]) strides[j].push_back(stride(i, v));
      }
      for (std::size_t r = row_start[i]; r < end; ++r) {
        long long count = 0;
        for (std::size_t j = 0; j < k; ++j) {
          sets[j].clear();
          // Clear the bound positions of r, then add each tuple's offsets.
          std::size_t cleared = r;
          std::vector<char> done(vars.size(), 0);
          for (std::size_t p = 0; p < xs[j].size(); ++p) {
            const std::size_t v = xs[j][p];
            if (done[v]) continue;
            done[v] = 1;
            cleared -= static_cast<std::size_t>(value(i, r, v)) * strides[j][p];
          }
          for (const auto& t : tuples[j]) {
            std::size_t target = cleared;
            std::fill(done.begin(), done.end(), 0);
            for (std::size_t p = 0; p < xs[j].size(); ++p) {
              const std::size_t v = xs[j][p];
              if (done[v]) continue;
              done[v] = 1;
              target += static_cast<std::size_t>(t[p]) * strides[j][p];
            }
            if (bit(subs[j]->table, target)) {
              if (q.monadic()) ++count;
              else sets[j].push_back(t);
            }
          }
        }
        const bool acc = q.monadic() ? q.accepts_count(n, count) : q.accepts(n, sets);
        if (acc) set_bit(out, r);
      }
    }
    return out;
  }

  void build_level(int s) {
    std::vector<OracleEntry> out;
    if (s == 1) {
      build_atoms(out);
      levels.push_back(std::move(out));
      return;
    }
    for (const auto& e : levels[static_cast<std::size_t>(s - 1)])
      add(out, negate(e.table), e.free, Formula::negate(e.formula));
    for (int u = 1; u <= s / 2; ++u) {
      const int v = s - u;
      const auto& lu = levels[static_cast<std::size_t>(u)];
      const auto& lv = levels[static_cast<std::size_t>(v)];
      for (std::size_t a = 0; a < lu.size(); ++a)
        for (std::size_t b = (u == v ? a : 0); b < lv.size(); ++b) {
          Table t(words);
          for (std::size_t w = 0; w < words; ++w) t[w] = lu[a].table[w] & lv[b].table[w];
          add(out, std::move(t), lu[a].free | lv[b].free, Formula::conj(lu[a].formula, lv[b].formula));
          if (mode == SizeMode::OrPrimitive) {
            Table o(words);
            for (std::size_t w = 0; w < words; ++w) o[w] = lu[a].table[w] | lv[b].table[w];
            add(out, std::move(o), lu[a].free | lv[b].free,
                Formula::disj(lu[a].formula, lv[b].formula));
          }
        }
    }
    for (std::size_t qi = 0; qi < qset.size(); ++qi) {
      const Quantifier& q = qset[qi];
      const std::size_t k = static_cast<std::size_t>(q.width());
      std::vector<std::vector<std::vector<std::size_t>>> choices(k);
      for (std::size_t j = 0; j < k; ++j) choices[j] = pool_tuples(q.type().arities[j]);
      for (const auto& budgets : compositions(s - 1, q.width())) {
        std::vector<std::vector<std::size_t>> xs(k);
        std::vector<const OracleEntry*> subs(k);
        std::function<void(std::size_t)> rec = [&](std::size_t j) {
          if (j == k) {
            std::uint64_t free = 0;
            std::vector<VarTuple> bound;
            std::vector<FormulaPtr> fs;
            for (std::size_t c = 0; c < k; ++c) {
              std::uint64_t mask = 0;
              VarTuple xv;
              for (std::size_t v : xs[c]) {
                mask |= std::uint64_t{1} << v;
                xv.vars.push_back(vars[v]);
              }
              free |= subs[c]->free & ~mask;
              bound.push_back(std::move(xv));
              fs.push_back(subs[c]->formula);
            }
            add(out, apply_quantifier(q, xs, subs), free, Formula::quant(q, bound, fs));
            return;
          }
          for (const auto& x : choices[j]) {
            xs[j] = x;
            for (const auto& e : levels[static_cast<std::size_t>(budgets[j])]) {
              subs[j] = &e;
              rec(j + 1);
            }
          }
        };
        rec(0);
      }
    }
    levels.push_back(std::move(out));
  }

  void build_to(int s) {
    if (s > max_size) throw PreconditionError("oracle: size beyond the configured maximum");
    while (static_cast<int>(levels.size()) <= s) build_level(static_cast<int>(levels.size()));
  }

  bool separates(const OracleEntry& e, const std::vector<int>& a, const std::vector<int>& b) const {
    if (e.free & ~base_mask) return false;
    for (int i : a)
      if (!bit(e.table, row_start[static_cast<std::size_t>(i)])) return false;
    for (int i : b)
      if (bit(e.table, row_start[static_cast<std::size_t>(i)])) return false;
    return true;
  }
};

}  // namespace detail

FormulaOracle::FormulaOracle(std::vector<Context> universe, QuantifierSet qset, int max_size,
                             Caps caps, SizeMode mode)
    : impl_(std::make_shared<detail::OracleImpl>(std::move(universe), std::move(qset), max_size,
                                                 caps, mode)) {}

const std::vector<Context>& FormulaOracle::universe() const { return impl_->universe; }
std::size_t FormulaOracle::rows() const { return impl_->rows; }
int FormulaOracle::max_size() const { return impl_->max_size; }
long long FormulaOracle::entries() const { return impl_->total; }

long long FormulaOracle::count_at(int size) {
  impl_->build_to(size);
  return static_cast<long long>(impl_->levels[static_cast<std::size_t>(size)].size());
}

FormulaPtr FormulaOracle::separate(const std::vector<int>& a, const std::vector<int>& b) {
  for (int s = 1; s <= impl_->max_size; ++s) {
    impl_->build_to(s);
    for (const auto& e : impl_->levels[static_cast<std::size_t>(s)])
      if (impl_->separates(e, a, b)) return e.formula;
  }
  return nullptr;
}

SeparationResult min_separating_size(const std::vector<Context>& a, const std::vector<Context>& b,
                                     int max_size, const QuantifierSet& qset, const Caps& caps,
                                     SizeMode mode) {
  SeparationResult r;
  std::vector<Context> all(a);
  all.insert(all.end(), b.begin(), b.end());
  if (all.empty()) {
    r.size = 1;
    r.witness = Formula::eq("w", "w");
    return r;
  }
  FormulaOracle oracle(all, qset, max_size, caps, mode);
  std::vector<int> ia, ib;
  for (std::size_t i = 0; i < a.size(); ++i) ia.push_back(static_cast<int>(i));
  for (std::size_t i = 0; i < b.size(); ++i) ib.push_back(static_cast<int>(a.size() + i));
  r.witness = oracle.separate(ia, ib);
  if (r.witness) r.size = r.witness->size(mode);
  r.entries = oracle.entries();
  r.rows = oracle.rows();
  return r;
}

SeparationResult min_separating_size(const Context& a, const Context& b, int max_size,
                                     const QuantifierSet& qset, const Caps& caps, SizeMode mode) {
  return min_separating_size(std::vector<Context>{a}, std::vector<Context>{b}, max_size, qset,
                             caps, mode);
}

DepthSeparation separable_at_depth(const std::vector<Context>& a, const std::vector<Context>& b,
                                   int d, const QuantifierSet& qset, const Caps& caps) {
  TypesEngine engine(qset, caps);
  DepthSeparation r;
  std::vector<FormulaPtr> disjuncts;
  for (const auto& ca : a) {
    std::vector<FormulaPtr> conjuncts;
    for (const auto& cb : b) {
      auto f = engine.separating_formula(ca, cb, d);
      if (!f) return r;
      conjuncts.push_back(f);
    }
    if (auto c = conj_all(conjuncts)) disjuncts.push_back(c);
  }
  r.separable = true;
  if (a.empty()) r.witness = false_formula("w");
  else if (b.empty()) r.witness = Formula::eq("w", "w");
  else r.witness = disj_all(disjuncts);
  return r;
}

DepthSeparation separable_at_depth(const Context& a, const Context& b, int d,
                                   const QuantifierSet& qset, const Caps& caps) {
  return separable_at_depth(std::vector<Context>{a}, std::vector<Context>{b}, d, qset, caps);
}

WeakStrongReport weak_vs_strong_report(const std::vector<Context>& a,
                                       const std::vector<Context>& b, int max_size,
                                       const QuantifierSet& qset, const Caps& caps,
                                       SizeMode mode) {
  WeakStrongReport r;
  std::vector<Context> all(a);
  all.insert(all.end(), b.begin(), b.end());
  if (all.empty()) {
    r.weakly_separable = r.strongly_separable = r.combined_separates = true;
    r.weak_size = r.strong_size = 1;
    r.combined = Formula::eq("w", "w");
    return r;
  }
  FormulaOracle oracle(all, qset, max_size, caps, mode);
  const int na = static_cast<int>(a.size());
  r.weakly_separable = true;
  int worst = 1;
  std::vector<FormulaPtr> disjuncts;
  for (int i = 0; i < na; ++i) {
    std::vector<FormulaPtr> conjuncts;
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto f = oracle.separate({i}, {na + static_cast<int>(j)});
      r.pair_sizes.push_back(f ? std::optional<int>(f->size(mode)) : std::nullopt);
      if (!f) {
        r.weakly_separable = false;
        continue;
      }
      worst = std::max(worst, f->size(mode));
      conjuncts.push_back(f);
    }
    if (auto c = conj_all(conjuncts)) disjuncts.push_back(c);
  }
  if (r.weakly_separable) {
    r.weak_size = worst;
    if (a.empty()) r.combined = false_formula("w");
    else if (b.empty()) r.combined = Formula::eq("w", "w");
    else r.combined = disj_all(disjuncts);
    r.combined_separates = true;
    for (int i = 0; i < na && !b.empty(); ++i)
      if (!eval(a[static_cast<std::size_t>(i)], *r.combined, qset)) r.combined_separates = false;
    for (std::size_t j = 0; j < b.size() && na > 0; ++j)
      if (eval(b[j], *r.combined, qset)) r.combined_separates = false;
  }
  std::vector<int> ia, ib;
  for (int i = 0; i < na; ++i) ia.push_back(i);
  for (std::size_t j = 0; j < b.size(); ++j) ib.push_back(na + static_cast<int>(j));
  if (auto f = oracle.separate(ia, ib)) {
    r.strongly_separable = true;
    r.strong_size = f->size(mode);
  }
  return r;
}

}  // namespace efq

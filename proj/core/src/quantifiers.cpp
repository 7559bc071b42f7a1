#include "efq/quantifiers.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace efq {

int QuantifierType::max_arity() const {
  int m = 0;
  for (int a : arities) m = std::max(m, a);
  return m;
}

Quantifier::Quantifier(std::string name, QuantifierType type, Predicate predicate)
    : name_(std::move(name)), type_(std::move(type)), predicate_(std::move(predicate)) {
  if (type_.arities.empty()) throw InputError("quantifier '" + name_ + "' needs width >= 1");
  for (int a : type_.arities)
    if (a < 1) throw InputError("quantifier '" + name_ + "' has a nonpositive arity");
}

Quantifier::Quantifier(std::string name, CardinalityPredicate predicate)
    : name_(std::move(name)), type_{{1}}, cardinality_(std::move(predicate)) {
  predicate_ = [card = cardinality_](int n, std::span<const TupleSet> sets) {
    return card(n, static_cast<long long>(sets[0].size()));
  };
}

bool Quantifier::accepts(int domain_size, std::span<const TupleSet> sets) const {
  if (static_cast<int>(sets.size()) != width())
    throw PreconditionError("quantifier '" + name_ + "' has width " + std::to_string(width()) +
                            " but received " + std::to_string(sets.size()) + " sets");
  for (std::size_t j = 0; j < sets.size(); ++j)
    for (const auto& t : sets[j]) {
      if (static_cast<int>(t.size()) != type_.arities[j])
        throw PreconditionError("quantifier '" + name_ + "': tuple arity mismatch in component " +
                                std::to_string(j));
      for (Element e : t)
        if (e < 0 || e >= domain_size)
          throw PreconditionError("quantifier '" + name_ + "': element outside domain");
    }
  return predicate_(domain_size, sets);
}

bool Quantifier::accepts_count(int domain_size, long long size) const {
  if (!cardinality_) throw PreconditionError("quantifier '" + name_ + "' is not monadic");
  return cardinality_(domain_size, size);
}

QuantifierSet::QuantifierSet(std::vector<Quantifier> quantifiers) {
  for (auto& q : quantifiers) add(std::move(q));
}

void QuantifierSet::add(Quantifier q) {
  if (find(q.name())) throw InputError("duplicate quantifier '" + q.name() + "'");
  items_.push_back(std::move(q));
}

const Quantifier* QuantifierSet::find(const std::string& name) const {
  for (const auto& q : items_)
    if (q.name() == name) return &q;
  return nullptr;
}

std::optional<std::size_t> QuantifierSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < items_.size(); ++i)
    if (items_[i].name() == name) return i;
  return std::nullopt;
}

int QuantifierSet::max_arity() const {
  int m = 1;
  for (const auto& q : items_) m = std::max(m, q.type().max_arity());
  return m;
}

std::vector<std::string> QuantifierSet::names() const {
  std::vector<std::string> out;
  for (const auto& q : items_) out.push_back(q.name());
  return out;
}

bool has_hamiltonian_path(int n, const TupleSet& edges) {
  if (n <= 0) return false;
  if (n > 20) throw CapExceeded("ham_domain", 20, n);
  std::vector<unsigned> adj(static_cast<std::size_t>(n), 0);
  for (const auto& e : edges)
    if (e[0] != e[1]) adj[e[0]] |= 1u << e[1];
  // reach[mask] = set of end vertices of paths covering exactly mask.
  const unsigned full = (1u << n) - 1;
  std::vector<unsigned> reach(std::size_t{1} << n, 0);
  for (int v = 0; v < n; ++v) reach[1u << v] = 1u << v;
  for (unsigned mask = 1; mask <= full; ++mask) {
    unsigned ends = reach[mask];
    if (!ends) continue;
    for (int v = 0; v < n; ++v) {
      if (!(ends >> v & 1)) continue;
      unsigned next = adj[v] & ~mask;
      for (int w = 0; w < n; ++w)
        if (next >> w & 1) reach[mask | (1u << w)] |= 1u << w;
    }
  }
  return reach[full] != 0;
}

namespace {

long long parse_count(const std::string& spec, const std::string& text) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || v < 0)
    throw ParseError("bad count in quantifier spec '" + spec + "'", spec.size() - text.size());
  return v;
}

}  // namespace

Quantifier builtin_quantifier(const std::string& spec) {
  if (spec == "exists")
    return Quantifier(spec, [](int, long long k) { return k >= 1; });
  if (spec == "forall")
    return Quantifier(spec, [](int n, long long k) { return k == n; });
  if (spec == "most")
    return Quantifier(spec, [](int n, long long k) { return 2 * k > n; });
  if (spec == "haertig")
    return Quantifier(spec, QuantifierType{{1, 1}}, [](int, std::span<const TupleSet> sets) {
      return sets[0].size() == sets[1].size();
    });
  if (spec == "ham")
    return Quantifier(spec, QuantifierType{{2}}, [](int n, std::span<const TupleSet> sets) {
      return has_hamiltonian_path(n, sets[0]);
    });
  auto eq = spec.find('=');
  if (eq != std::string::npos) {
    std::string head = spec.substr(0, eq);
    long long n = parse_count(spec, spec.substr(eq + 1));
    if (head == "exactly") return Quantifier(spec, [n](int, long long k) { return k == n; });
    if (head == "atleast") return Quantifier(spec, [n](int, long long k) { return k >= n; });
    if (head == "atmost") return Quantifier(spec, [n](int, long long k) { return k <= n; });
  }
  throw ParseError("unknown quantifier spec '" + spec + "'", 0);
}

Quantifier cardinality_quantifier(const std::string& name, const std::string& expression) {
  auto expr = std::make_shared<detail::CardinalityExpr>(expression);
  return Quantifier(name, [expr](int n, long long k) { return expr->evaluate(k, n) != 0; });
}

namespace {

struct IsoChecker {
  const Quantifier& q;
  int n;
  std::vector<std::vector<Tuple>> universes;  // all tuples per component
  IsoReport& report;
  std::size_t max_violations;

  std::vector<TupleSet> decode(const std::vector<unsigned long long>& masks) const {
    std::vector<TupleSet> sets(universes.size());
    for (std::size_t j = 0; j < universes.size(); ++j)
      for (std::size_t i = 0; i < universes[j].size(); ++i)
        if (masks[j] >> i & 1) sets[j].push_back(universes[j][i]);
    return sets;
  }

  void check(const std::vector<unsigned long long>& masks) {
    auto sets = decode(masks);
    bool base = q.accepts(n, sets);
    ++report.inputs_checked;
    for (int a = 0; a + 1 < n; ++a) {
      std::vector<int> perm(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) perm[i] = i;
      std::swap(perm[a], perm[a + 1]);
      std::vector<TupleSet> moved(sets.size());
      for (std::size_t j = 0; j < sets.size(); ++j) {
        for (auto t : sets[j]) {
          for (auto& e : t) e = perm[e];
          moved[j].push_back(std::move(t));
        }
        std::sort(moved[j].begin(), moved[j].end());
      }
      if (q.accepts(n, moved) != base) {
        if (report.violations.size() < max_violations)
          report.violations.push_back({n, sets, perm});
        return;
      }
    }
  }
};

}  // namespace

IsoReport check_iso_invariance(const Quantifier& q, int max_domain, long long max_inputs,
                               std::size_t max_violations) {
  IsoReport report;
  report.quantifier = q.name();
  report.max_domain = max_domain;
  for (int n = 1; n <= max_domain; ++n) {
    IsoChecker checker{q, n, {}, report, max_violations};
    int total_bits = 0;
    for (int a : q.type().arities) {
      checker.universes.push_back(all_tuples(n, a));
      total_bits += static_cast<int>(checker.universes.back().size());
    }
    const int k = q.width();
    if (total_bits <= 40 && (1LL << total_bits) <= max_inputs) {
      std::vector<unsigned long long> masks(static_cast<std::size_t>(k), 0);
      for (long long code = 0; code < (1LL << total_bits); ++code) {
        long long rest = code;
        for (int j = 0; j < k; ++j) {
          int bits = static_cast<int>(checker.universes[j].size());
          masks[j] = static_cast<unsigned long long>(rest) & ((1ULL << bits) - 1);
          rest >>= bits;
        }
        checker.check(masks);
      }
    } else {
      report.exhaustive = false;
      // Deterministic xorshift sample.
      unsigned long long state = 0x9E3779B97F4A7C15ULL ^ static_cast<unsigned long long>(n);
      auto next = [&state] {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
      };
      std::vector<unsigned long long> masks(static_cast<std::size_t>(k), 0);
      for (long long s = 0; s < max_inputs; ++s) {
        for (int j = 0; j < k; ++j) {
          std::size_t bits = checker.universes[j].size();
          masks[j] = bits >= 64 ? next() : next() & ((1ULL << bits) - 1);
        }
        checker.check(masks);
      }
    }
  }
  return report;
}

}  // namespace efq

#include "efq/structures.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace efq {

Vocabulary::Vocabulary(std::vector<RelationSymbol> symbols) : symbols_(std::move(symbols)) {
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (s.arity < 1) throw InputError("relation '" + s.name + "' must have arity >= 1");
    if (s.name.empty()) throw InputError("relation name must be nonempty");
    if (!seen.insert(s.name).second) throw InputError("duplicate relation name '" + s.name + "'");
  }
}

std::optional<std::size_t> Vocabulary::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i].name == name) return i;
  return std::nullopt;
}

int Vocabulary::max_arity() const {
  int m = 0;
  for (const auto& s : symbols_) m = std::max(m, s.arity);
  return m;
}

bool operator==(const Vocabulary& a, const Vocabulary& b) {
  if (a.symbols_.size() != b.symbols_.size()) return false;
  for (std::size_t i = 0; i < a.symbols_.size(); ++i)
    if (a.symbols_[i].name != b.symbols_[i].name || a.symbols_[i].arity != b.symbols_[i].arity)
      return false;
  return true;
}

namespace {

std::size_t encode(std::span<const Element> t, int n) {
  std::size_t code = 0;
  for (Element e : t) code = code * static_cast<std::size_t>(n) + static_cast<std::size_t>(e);
  return code;
}

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

}  // namespace

Structure::Structure(std::string name, std::shared_ptr<const Vocabulary> vocabulary,
                     int domain_size, const std::map<std::string, TupleSet>& relations)
    : name_(std::move(name)), vocabulary_(std::move(vocabulary)), domain_size_(domain_size) {
  if (!vocabulary_) throw InputError("structure '" + name_ + "' has no vocabulary");
  if (domain_size_ < 1) throw InputError("structure '" + name_ + "' must have a nonempty domain");
  for (const auto& [rel, tuples] : relations) {
    if (!vocabulary_->index_of(rel))
      throw InputError("structure '" + name_ + "': unknown relation '" + rel + "'");
    (void)tuples;
  }
  tables_.resize(vocabulary_->size());
  std::ostringstream key;
  key << "n" << domain_size_;
  for (std::size_t r = 0; r < vocabulary_->size(); ++r) {
    const auto& sym = vocabulary_->symbols()[r];
    tables_[r].assign(ipow(domain_size_, sym.arity), 0);
    auto it = relations.find(sym.name);
    if (it != relations.end()) {
      for (const auto& t : it->second) {
        if (static_cast<int>(t.size()) != sym.arity)
          throw InputError("structure '" + name_ + "': tuple arity mismatch in '" + sym.name + "'");
        for (Element e : t)
          if (e < 0 || e >= domain_size_)
            throw InputError("structure '" + name_ + "': element " + std::to_string(e) +
                             " outside domain in '" + sym.name + "'");
        tables_[r][encode(t, domain_size_)] = 1;
      }
    }
    key << '|' << sym.name << '/' << sym.arity << ':';
    for (auto b : tables_[r]) key << static_cast<char>('0' + b);
  }
  key_ = key.str();
}

bool Structure::holds(std::size_t relation, std::span<const Element> args) const {
  return tables_[relation][encode(args, domain_size_)] != 0;
}

TupleSet Structure::relation(std::size_t index) const {
  TupleSet out;
  for (auto& t : all_tuples(domain_size_, vocabulary_->arity(index)))
    if (holds(index, t)) out.push_back(t);
  return out;
}

TupleSet Structure::relation(const std::string& name) const {
  auto idx = vocabulary_->index_of(name);
  if (!idx) throw InputError("unknown relation '" + name + "'");
  return relation(*idx);
}

Structure Structure::permuted(std::span<const int> perm, std::string name) const {
  std::map<std::string, TupleSet> rels;
  for (std::size_t r = 0; r < vocabulary_->size(); ++r) {
    TupleSet ts;
    for (auto t : relation(r)) {
      for (auto& e : t) e = perm[e];
      ts.push_back(std::move(t));
    }
    std::sort(ts.begin(), ts.end());
    rels[vocabulary_->symbols()[r].name] = std::move(ts);
  }
  return Structure(std::move(name), vocabulary_, domain_size_, rels);
}

std::vector<std::string> VarTuple::distinct() const {
  std::vector<std::string> out;
  for (const auto& v : vars)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

std::string VarTuple::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) s += ",";
    s += vars[i];
  }
  return s + ")";
}

Context::Context(StructurePtr s, Assignment a) : structure(std::move(s)), assignment(std::move(a)) {
  if (!structure) throw PreconditionError("context without structure");
  for (const auto& [var, val] : assignment)
    if (val < 0 || val >= structure->domain_size())
      throw PreconditionError("assignment " + var + "=" + std::to_string(val) +
                              " outside domain of '" + structure->name() + "'");
}

std::vector<std::string> Context::variables() const {
  std::vector<std::string> out;
  for (const auto& kv : assignment) out.push_back(kv.first);
  return out;
}

Element Context::value(const std::string& var) const {
  auto it = assignment.find(var);
  if (it == assignment.end()) throw PreconditionError("unbound variable '" + var + "'");
  return it->second;
}

bool respects_repetitions(std::span<const Element> t, const VarTuple& x) {
  if (t.size() != x.vars.size())
    throw PreconditionError("tuple length " + std::to_string(t.size()) +
                            " does not match variable tuple length " +
                            std::to_string(x.vars.size()));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j)
      if (x.vars[i] == x.vars[j] && t[i] != t[j]) return false;
  return true;
}

Assignment extend_assignment(const Assignment& f, const VarTuple& x, std::span<const Element> t) {
  if (!respects_repetitions(t, x))
    throw PreconditionError("tuple " + tuple_to_string(t) + " does not respect repetitions of " +
                            x.to_string());
  Assignment out = f;
  for (std::size_t i = 0; i < t.size(); ++i) out[x.vars[i]] = t[i];
  return out;
}

Context extend_context(const Context& c, const VarTuple& x, std::span<const Element> t) {
  Context out;
  out.structure = c.structure;
  out.assignment = extend_assignment(c.assignment, x, t);
  for (Element e : t)
    if (e < 0 || e >= c.domain_size()) throw PreconditionError("element outside domain");
  return out;
}

std::vector<Tuple> all_tuples(int domain_size, int length) {
  std::vector<Tuple> out;
  Tuple t(static_cast<std::size_t>(length), 0);
  while (true) {
    out.push_back(t);
    int i = length - 1;
    while (i >= 0 && t[i] == domain_size - 1) t[i--] = 0;
    if (i < 0) break;
    ++t[i];
  }
  return out;
}

std::vector<Tuple> tuples_respecting(int domain_size, const VarTuple& x) {
  if (x.vars.empty()) throw PreconditionError("variable tuple must be nonempty");
  auto distinct = x.distinct();
  std::vector<std::size_t> slot(x.vars.size());
  for (std::size_t i = 0; i < x.vars.size(); ++i)
    slot[i] = static_cast<std::size_t>(
        std::find(distinct.begin(), distinct.end(), x.vars[i]) - distinct.begin());
  std::vector<Tuple> out;
  for (const auto& base : all_tuples(domain_size, static_cast<int>(distinct.size()))) {
    Tuple t(x.vars.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = base[slot[i]];
    out.push_back(std::move(t));
  }
  return out;
}

std::string tuple_to_string(std::span<const Element> t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t[i]);
  }
  return s + ")";
}

std::string assignment_to_string(const Assignment& a) {
  std::string s = "{";
  bool first = true;
  for (const auto& [k, v] : a) {
    if (!first) s += ",";
    first = false;
    s += k + "=" + std::to_string(v);
  }
  return s + "}";
}

std::string canonical_key(const Context& c) {
  return c.structure->key() + "#" + assignment_to_string(c.assignment);
}

std::string iso_key(const Context& c, int max_domain) {
  const Structure& s = *c.structure;
  const int n = s.domain_size();
  if (n > max_domain) return "C" + canonical_key(c);
  const Vocabulary& voc = s.vocabulary();
  std::vector<TupleSet> rels;
  for (std::size_t r = 0; r < voc.size(); ++r) rels.push_back(s.relation(r));

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  bool have = false;
  do {
    std::string k;
    k.reserve(64);
    k += std::to_string(n);
    for (std::size_t r = 0; r < voc.size(); ++r) {
      TupleSet mapped;
      mapped.reserve(rels[r].size());
      for (auto t : rels[r]) {
        for (auto& e : t) e = perm[e];
        mapped.push_back(std::move(t));
      }
      std::sort(mapped.begin(), mapped.end());
      k += '|';
      for (const auto& t : mapped) {
        for (Element e : t) k += static_cast<char>('0' + e);
        k += ',';
      }
    }
    k += '#';
    for (const auto& [var, val] : c.assignment) {
      k += var;
      k += '=';
      k += static_cast<char>('0' + perm[val]);
      k += ';';
    }
    if (!have || k < best) {
      best = std::move(k);
      have = true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  // Vocabulary identity is part of the key so contexts over different
  // vocabularies never collide.
  std::string vkey;
  for (const auto& sym : voc.symbols()) vkey += sym.name + "/" + std::to_string(sym.arity) + ";";
  return "I" + vkey + best;
}

}  // namespace efq

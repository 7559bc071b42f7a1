#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "efq/error.hpp"

namespace efq {

using Element = int;
using Tuple = std::vector<Element>;
// Sorted, duplicate-free list of equal-length tuples.
using TupleSet = std::vector<Tuple>;

struct RelationSymbol {
  std::string name;
  int arity = 1;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<RelationSymbol> symbols);

  const std::vector<RelationSymbol>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  std::optional<std::size_t> index_of(const std::string& name) const;
  int arity(std::size_t index) const { return symbols_[index].arity; }
  int max_arity() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b);

 private:
  std::vector<RelationSymbol> symbols_;
};

bool operator==(const Vocabulary& a, const Vocabulary& b);

/// Finite relational structure over the domain {0, ..., domain_size - 1}.
/// Immutable once built; relation tables are dense bit tables indexed by the
/// base-n encoding of a tuple.
class Structure {
 public:
  Structure(std::string name, std::shared_ptr<const Vocabulary> vocabulary, int domain_size,
            const std::map<std::string, TupleSet>& relations);

  const std::string& name() const { return name_; }
  const Vocabulary& vocabulary() const { return *vocabulary_; }
  const std::shared_ptr<const Vocabulary>& vocabulary_ptr() const { return vocabulary_; }
  int domain_size() const { return domain_size_; }

  bool holds(std::size_t relation, std::span<const Element> args) const;
  TupleSet relation(std::size_t index) const;
  TupleSet relation(const std::string& name) const;

  // Content-based key: equal iff vocabulary, domain and relations coincide.
  const std::string& key() const { return key_; }

  // A copy with elements renamed by `perm` (perm[old] = new).
  Structure permuted(std::span<const int> perm, std::string name) const;

 private:
  std::string name_;
  std::shared_ptr<const Vocabulary> vocabulary_;
  int domain_size_;
  std::vector<std::vector<std::uint8_t>> tables_;
  std::string key_;
};

using StructurePtr = std::shared_ptr<const Structure>;

using Assignment = std::map<std::string, Element>;

/// A nonempty variable tuple; repeated variables are allowed.
struct VarTuple {
  std::vector<std::string> vars;

  VarTuple() = default;
  VarTuple(std::initializer_list<std::string> v) : vars(v) {}
  explicit VarTuple(std::vector<std::string> v) : vars(std::move(v)) {}

  std::size_t size() const { return vars.size(); }
  std::vector<std::string> distinct() const;
  std::string to_string() const;

  friend bool operator==(const VarTuple&, const VarTuple&) = default;
  friend auto operator<=>(const VarTuple&, const VarTuple&) = default;
};

/// A structure paired with an assignment over it.
struct Context {
  StructurePtr structure;
  Assignment assignment;

  Context() = default;
  Context(StructurePtr s, Assignment a = {});

  int domain_size() const { return structure->domain_size(); }
  std::vector<std::string> variables() const;
  Element value(const std::string& var) const;
};

bool respects_repetitions(std::span<const Element> t, const VarTuple& x);

Assignment extend_assignment(const Assignment& f, const VarTuple& x, std::span<const Element> t);
Context extend_context(const Context& c, const VarTuple& x, std::span<const Element> t);

/// Every tuple over the domain that respects the repetitions of x, in
/// lexicographic order.
std::vector<Tuple> tuples_respecting(int domain_size, const VarTuple& x);
inline std::vector<Tuple> tuples_respecting(const Structure& s, const VarTuple& x) {
  return tuples_respecting(s.domain_size(), x);
}

/// All tuples of the given length over the domain.
std::vector<Tuple> all_tuples(int domain_size, int length);

std::string canonical_key(const Context& c);

/// Key invariant under renaming domain elements: equal keys iff the contexts
/// are isomorphic. Falls back to canonical_key above `max_domain`.
std::string iso_key(const Context& c, int max_domain = 7);

std::string tuple_to_string(std::span<const Element> t);
std::string assignment_to_string(const Assignment& a);

}  // namespace efq

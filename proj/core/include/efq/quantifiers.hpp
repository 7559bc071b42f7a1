#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "efq/structures.hpp"

namespace efq {

/// Width k = arities.size(); component j binds arities[j]-tuples.
struct QuantifierType {
  std::vector<int> arities;

  int width() const { return static_cast<int>(arities.size()); }
  int max_arity() const;
  bool monadic() const { return arities.size() == 1 && arities[0] == 1; }
  friend bool operator==(const QuantifierType&, const QuantifierType&) = default;
};

/// A generalized quantifier: an acceptance predicate over (domain size, k
/// tuple sets). Isomorphism closure is the author's obligation; see
/// check_iso_invariance.
class Quantifier {
 public:
  using Predicate = std::function<bool(int domain_size, std::span<const TupleSet> sets)>;
  using CardinalityPredicate = std::function<bool(int domain_size, long long size)>;

  Quantifier(std::string name, QuantifierType type, Predicate predicate);
  // Monadic quantifier evaluated through (|P|, domain size) only.
  Quantifier(std::string name, CardinalityPredicate predicate);

  const std::string& name() const { return name_; }
  const QuantifierType& type() const { return type_; }
  int width() const { return type_.width(); }
  bool monadic() const { return static_cast<bool>(cardinality_); }

  /// Validates shapes, then evaluates the predicate.
  bool accepts(int domain_size, std::span<const TupleSet> sets) const;
  /// Fast path for monadic quantifiers; throws for any other kind.
  bool accepts_count(int domain_size, long long size) const;

 private:
  std::string name_;
  QuantifierType type_;
  Predicate predicate_;
  CardinalityPredicate cardinality_;
};

using QuantifierPtr = std::shared_ptr<const Quantifier>;

class QuantifierSet {
 public:
  QuantifierSet() = default;
  explicit QuantifierSet(std::vector<Quantifier> quantifiers);

  void add(Quantifier q);
  const std::vector<Quantifier>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  const Quantifier& operator[](std::size_t i) const { return items_[i]; }
  const Quantifier* find(const std::string& name) const;
  std::optional<std::size_t> index_of(const std::string& name) const;
  int max_arity() const;
  std::vector<std::string> names() const;

 private:
  std::vector<Quantifier> items_;
};

/// exists, forall, exactly=N, atleast=N, atmost=N, most, haertig, ham.
Quantifier builtin_quantifier(const std::string& spec);

/// Compiles a cardinality expression over `size` and `domain` into a monadic quantifier.
Quantifier cardinality_quantifier(const std::string& name, const std::string& expression);

/// True iff the directed graph ({0..n-1}, edges) has a path visiting every
/// vertex exactly once. A one-vertex graph always has one.
bool has_hamiltonian_path(int n, const TupleSet& edges);

struct IsoViolation {
  int domain_size = 0;
  std::vector<TupleSet> sets;
  std::vector<int> permutation;  // permutation[old] = new
};

struct IsoReport {
  std::string quantifier;
  int max_domain = 0;
  long long inputs_checked = 0;
  bool exhaustive = true;
  std::vector<IsoViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks accepts(n, P) == accepts(n, pi(P)) for every input with n <= max_domain.
/// Invariance under the adjacent transpositions generates invariance under
/// every permutation, so those are the only permutations tried. Inputs above
/// `max_inputs` per domain size are sampled deterministically.
IsoReport check_iso_invariance(const Quantifier& q, int max_domain,
                               long long max_inputs = 1 << 22, std::size_t max_violations = 8);

namespace detail {
// Small arithmetic/boolean expression language over `size` and `domain`.
class CardinalityExpr {
 public:
  explicit CardinalityExpr(const std::string& text);
  long long evaluate(long long size, long long domain) const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
};
}  // namespace detail

}  // namespace efq

#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "efq/quantifiers.hpp"
#include "efq/structures.hpp"

namespace efq {

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class SizeMode {
  Standard,     // disjunction is ¬(¬φ∧¬ψ) and costs s(φ)+s(ψ)+3
  OrPrimitive,  // disjunction counted like conjunction
};

/// Immutable FO(𝒬) syntax tree. There is no Or node: a disjunction is stored
/// as Not(And(Not a, Not b)) with the outer Not flagged as sugar, so printing
/// can restore `|` and the OrPrimitive size mode can find it.
class Formula {
 public:
  enum class Kind { Eq, Rel, Not, And, Quant };

  Kind kind() const { return kind_; }
  // Eq: the two variables; Rel: the arguments.
  const std::vector<std::string>& vars() const { return vars_; }
  // Rel: relation name; Quant: quantifier name.
  const std::string& name() const { return name_; }
  const std::vector<VarTuple>& bound() const { return bound_; }
  const std::vector<FormulaPtr>& subs() const { return subs_; }
  const Formula& sub(std::size_t i = 0) const { return *subs_[i]; }
  bool is_or_sugar() const { return or_sugar_; }

  int size(SizeMode mode = SizeMode::Standard) const;
  int depth() const { return depth_; }
  const std::set<std::string>& free_vars() const { return free_; }

  friend bool operator==(const Formula& a, const Formula& b);

  static FormulaPtr eq(std::string x, std::string y);
  static FormulaPtr rel(std::string name, std::vector<std::string> args);
  static FormulaPtr negate(FormulaPtr f);
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr quant(const Quantifier& q, std::vector<VarTuple> bound,
                          std::vector<FormulaPtr> subs);
  // Unchecked variant for callers that already validated the shape.
  static FormulaPtr quant(std::string name, std::vector<VarTuple> bound,
                          std::vector<FormulaPtr> subs);

 private:
  Kind kind_ = Kind::Eq;
  std::vector<std::string> vars_;
  std::string name_;
  std::vector<VarTuple> bound_;
  std::vector<FormulaPtr> subs_;
  bool or_sugar_ = false;
  int size_ = 1;
  int or_size_ = 1;
  int depth_ = 0;
  std::set<std::string> free_;

  void finish();
};

/// Conjunction of a list (left-nested); nullptr for an empty list.
FormulaPtr conj_all(const std::vector<FormulaPtr>& parts);
/// Disjunction of a list (left-nested); nullptr for an empty list.
FormulaPtr disj_all(const std::vector<FormulaPtr>& parts);
/// ¬(x = x), the canonical false formula over x.
FormulaPtr false_formula(const std::string& x);

std::string to_string(const Formula& f);
inline std::string to_string(const FormulaPtr& f) { return to_string(*f); }

/// Parses the concrete syntax; checks relation arities against `vocab` and
/// quantifier shapes against `qset`. Errors carry the offending offset.
FormulaPtr parse_formula(const std::string& text, const Vocabulary& vocab,
                         const QuantifierSet& qset);

/// Throws InputError unless every relation and quantifier in f is known and
/// used with the right shape.
void validate(const Formula& f, const Vocabulary& vocab, const QuantifierSet& qset);

/// Called for every evaluated quantifier node with the computed extensions.
using EvalTrace = std::function<void(const Formula& node, const Assignment& assignment,
                                     const std::vector<TupleSet>& extensions, bool accepted)>;

bool eval(const Context& c, const Formula& f, const QuantifierSet& qset,
          const EvalTrace& trace = nullptr);

/// Repetition-respecting tuples t with c[x := t] |= f, in lexicographic order.
TupleSet extension(const Context& c, const Formula& f, const VarTuple& x,
                   const QuantifierSet& qset);

}  // namespace efq

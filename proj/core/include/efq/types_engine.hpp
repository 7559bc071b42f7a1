#pragma once

#include <memory>
#include <vector>

#include "efq/caps.hpp"
#include "efq/formulas.hpp"

namespace efq {

struct CellMember {
  int context = 0;
  Tuple tuple;
  friend bool operator==(const CellMember&, const CellMember&) = default;
};

namespace detail {
struct TypesImpl;
struct Strat;
}  // namespace detail

/// The d-types of every repetition-respecting tuple of every context, computed
/// jointly. Cells are ordered by first appearance in the (context, tuple) order.
class TypePartition {
 public:
  int depth() const { return depth_; }
  const VarTuple& var_tuple() const { return x_; }
  const std::vector<Context>& contexts() const { return contexts_; }
  const std::vector<std::vector<CellMember>>& cells() const { return cells_; }
  std::size_t cell_count() const { return cells_.size(); }
  int cell_of(int context, const Tuple& t) const;

  /// True when the cells at depth d coincide with those at depth d-1.
  bool stable() const { return stable_; }

  /// χ^d for the cell: true exactly on the cell across the whole universe.
  FormulaPtr type_formula(std::size_t cell) const;
  /// Disjunction of the cells' type formulas; ¬(x=x) for the empty set.
  FormulaPtr closed_set_formula(const std::vector<int>& cells) const;

 private:
  friend class TypesEngine;
  std::shared_ptr<detail::TypesImpl> impl_;
  detail::Strat* strat_ = nullptr;
  int depth_ = 0;
  VarTuple x_;
  std::vector<Context> contexts_;
  std::vector<std::vector<CellMember>> cells_;
  std::vector<std::vector<int>> cell_index_;  // [context][tuple position] -> cell
  bool stable_ = false;
};

/// Decides ≡^d by stratified refinement (Lemma 1) and builds the defining
/// formulas on demand. Results are memoized per engine instance.
class TypesEngine {
 public:
  explicit TypesEngine(QuantifierSet qset, Caps caps = {});

  TypePartition joint_partition(const std::vector<Context>& contexts, const VarTuple& x, int d);
  bool d_equivalent(const Context& c1, const Context& c2, int d);
  /// A formula of depth <= d true on c1 and false on c2, or nullptr if they
  /// are d-equivalent.
  FormulaPtr separating_formula(const Context& c1, const Context& c2, int d);

  const QuantifierSet& quantifiers() const;

 private:
  std::shared_ptr<detail::TypesImpl> impl_;
};

TypePartition joint_partition(const std::vector<Context>& contexts, const VarTuple& x, int d,
                              const QuantifierSet& qset, const Caps& caps = {});
bool d_equivalent(const Context& c1, const Context& c2, int d, const QuantifierSet& qset,
                  const Caps& caps = {});

}  // namespace efq

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "efq/caps.hpp"
#include "efq/formulas.hpp"

namespace efq {

namespace detail {
struct OracleImpl;
}

/// Brute-force enumeration of FO(𝒬) formulas by size over a fixed universe of
/// contexts. Formulas are kept as truth tables over rows (context, values of
/// a pool of bound variables) and deduplicated on (table, free variables), so
/// each level holds one representative per meaning.
///
/// Free variables of a result are restricted to those bound in every context.
/// Bound variables come from the pool; a pool of (max_size - 1) times the
/// largest quantifier arity suffices for every formula of size <= max_size.
class FormulaOracle {
 public:
  FormulaOracle(std::vector<Context> universe, QuantifierSet qset, int max_size, Caps caps = {},
                SizeMode mode = SizeMode::Standard);

  const std::vector<Context>& universe() const;
  std::size_t rows() const;
  int max_size() const;

  /// Number of (table, free variables) classes whose least size is exactly `size`.
  long long count_at(int size);

  /// The first formula (in enumeration order) of least size that is true on
  /// every context in `a` and false on every context in `b`; indices refer to
  /// the universe. nullptr when none exists within max_size.
  FormulaPtr separate(const std::vector<int>& a, const std::vector<int>& b);

  long long entries() const;

 private:
  std::shared_ptr<detail::OracleImpl> impl_;
};

struct SeparationResult {
  std::optional<int> size;
  FormulaPtr witness;
  long long entries = 0;
  std::size_t rows = 0;
};

SeparationResult min_separating_size(const std::vector<Context>& a, const std::vector<Context>& b,
                                     int max_size, const QuantifierSet& qset,
                                     const Caps& caps = {}, SizeMode mode = SizeMode::Standard);
SeparationResult min_separating_size(const Context& a, const Context& b, int max_size,
                                     const QuantifierSet& qset, const Caps& caps = {},
                                     SizeMode mode = SizeMode::Standard);

struct DepthSeparation {
  bool separable = false;
  // ⋁_a ⋀_b of the types engine's depth-d separating formulas.
  FormulaPtr witness;
};

/// Separability of two classes by a formula of quantifier depth <= d.
DepthSeparation separable_at_depth(const std::vector<Context>& a, const std::vector<Context>& b,
                                   int d, const QuantifierSet& qset, const Caps& caps = {});
DepthSeparation separable_at_depth(const Context& a, const Context& b, int d,
                                   const QuantifierSet& qset, const Caps& caps = {});

struct WeakStrongReport {
  // Least size separating each pair, row-major over (a, b); nullopt above max_size.
  std::vector<std::optional<int>> pair_sizes;
  std::optional<int> weak_size;    // max over pairs
  std::optional<int> strong_size;  // least size of one formula separating the classes
  bool weakly_separable = false;
  bool strongly_separable = false;
  // ψ = ⋁_a ⋀_b φ_ab built from the pair witnesses, and whether it separates.
  FormulaPtr combined;
  bool combined_separates = false;
};

WeakStrongReport weak_vs_strong_report(const std::vector<Context>& a,
                                       const std::vector<Context>& b, int max_size,
                                       const QuantifierSet& qset, const Caps& caps = {},
                                       SizeMode mode = SizeMode::Standard);

}  // namespace efq

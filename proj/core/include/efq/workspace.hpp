#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "efq/caps.hpp"
#include "efq/quantifiers.hpp"
#include "efq/structures.hpp"

namespace efq {

/// Everything the command-line front end loads: one vocabulary, named
/// structures and assignments, a quantifier set and the caps.
///
/// JSON layout (every key optional, files merge in order):
///   {"vocabulary": {"B": 1, "R": 1},
///    "structures": {"A": {"domain": 4, "relations": {"B": [[0],[1],[2]], "R": []}}},
///    "assignments": {"f": {"x": 0}},
///    "quantifiers": ["exists", "exactly=3",
///                    {"name": "odd", "width": 1, "type": [1],
///                     "cardinality_predicate": "size % 2 == 1"}],
///    "caps": {"max_domain": 6}}
struct Workspace {
  std::shared_ptr<const Vocabulary> vocabulary = std::make_shared<Vocabulary>();
  std::vector<std::string> structure_order;
  std::map<std::string, StructurePtr> structures;
  std::map<std::string, Assignment> assignments;
  QuantifierSet quantifiers;
  // Source form of each quantifier, kept so dumps reproduce the input:
  // a builtin spec, or "name\x1fexpression" for a cardinality quantifier.
  std::vector<std::string> quantifier_sources;
  Caps caps;

  const Structure& structure(const std::string& name) const;
  StructurePtr structure_ptr(const std::string& name) const;

  /// Resolves "A", "A:f" (named assignment f) or "A{x=0,y=1}".
  Context context(const std::string& ref) const;
  Context context(const std::string& structure, const Assignment& assignment) const;

  void add_quantifier(const std::string& spec);
  void add_cardinality_quantifier(const std::string& name, const std::string& expression);
};

/// Parses one JSON document and merges it into `ws`. Throws InputError.
void merge_workspace_json(Workspace& ws, const std::string& text);
Workspace load_workspace(const std::vector<std::string>& paths);
std::string dump_workspace(const Workspace& ws);

/// "x=0,y=1" -> {x: 0, y: 1}; empty text gives the empty assignment.
Assignment parse_assignment(const std::string& text);

}  // namespace efq

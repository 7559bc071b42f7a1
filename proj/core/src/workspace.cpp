#include "efq/workspace.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace efq {

using nlohmann::json;

namespace {

constexpr char kSep = '\x1f';

int as_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw InputError(what + ": expected an integer");
  return j.get<int>();
}

TupleSet parse_tuples(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": expected an array of tuples");
  TupleSet out;
  for (const auto& t : j) {
    if (!t.is_array()) throw InputError(what + ": each tuple must be an array");
    Tuple tuple;
    for (const auto& e : t) tuple.push_back(as_int(e, what));
    out.push_back(std::move(tuple));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void merge_caps(Caps& caps, const json& j) {
  if (!j.is_object()) throw InputError("caps: expected an object");
  const std::map<std::string, int*> ints = {
      {"max_domain", &caps.max_domain},         {"max_class_size", &caps.max_class_size},
      {"max_budget", &caps.max_budget},         {"max_depth", &caps.max_depth},
      {"fresh_pool", &caps.fresh_pool},         {"max_type_cells", &caps.max_type_cells},
      {"max_tuple_universe", &caps.max_tuple_universe}};
  const std::map<std::string, long long*> longs = {
      {"max_oracle_rows", &caps.max_oracle_rows},
      {"max_oracle_entries", &caps.max_oracle_entries}};
  for (const auto& [key, value] : j.items()) {
    if (auto it = ints.find(key); it != ints.end()) {
      *it->second = as_int(value, "caps." + key);
      if (*it->second < (key == "fresh_pool" ? 0 : 1))
        throw InputError("caps." + key + " must be positive");
    } else if (auto lt = longs.find(key); lt != longs.end()) {
      if (!value.is_number_integer() || value.get<long long>() < 1)
        throw InputError("caps." + key + " must be a positive integer");
      *lt->second = value.get<long long>();
    } else {
      throw InputError("caps: unknown cap '" + key + "'");
    }
  }
}

}  // namespace

const Structure& Workspace::structure(const std::string& name) const {
  return *structure_ptr(name);
}

StructurePtr Workspace::structure_ptr(const std::string& name) const {
  auto it = structures.find(name);
  if (it == structures.end()) throw InputError("unknown structure '" + name + "'");
  return it->second;
}

Context Workspace::context(const std::string& structure_name, const Assignment& assignment) const {
  auto s = structure_ptr(structure_name);
  for (const auto& [var, val] : assignment)
    if (val < 0 || val >= s->domain_size())
      throw InputError("assignment " + var + "=" + std::to_string(val) + " outside the domain of '" +
                       structure_name + "'");
  return Context(s, assignment);
}

Context Workspace::context(const std::string& ref) const {
  if (auto brace = ref.find('{'); brace != std::string::npos) {
    if (ref.back() != '}') throw InputError("context '" + ref + "': missing '}'");
    return context(ref.substr(0, brace),
                   parse_assignment(ref.substr(brace + 1, ref.size() - brace - 2)));
  }
  if (auto colon = ref.find(':'); colon != std::string::npos) {
    const std::string name = ref.substr(colon + 1);
    auto it = assignments.find(name);
    if (it == assignments.end()) throw InputError("unknown assignment '" + name + "'");
    return context(ref.substr(0, colon), it->second);
  }
  return context(ref, Assignment{});
}

void Workspace::add_quantifier(const std::string& spec) {
  quantifiers.add(builtin_quantifier(spec));
  quantifier_sources.push_back(spec);
}

void Workspace::add_cardinality_quantifier(const std::string& name, const std::string& expression) {
  quantifiers.add(cardinality_quantifier(name, expression));
  quantifier_sources.push_back(name + kSep + expression);
}

void merge_workspace_json(Workspace& ws, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("workspace: top level must be an object");
  for (const auto& [key, value] : doc.items())
    if (key != "vocabulary" && key != "structures" && key != "assignments" &&
        key != "quantifiers" && key != "caps")
      throw InputError("workspace: unknown key '" + key + "'");

  if (doc.contains("vocabulary")) {
    const json& v = doc["vocabulary"];
    if (!v.is_object()) throw InputError("vocabulary: expected an object of arities");
    std::vector<RelationSymbol> symbols;
    for (const auto& [name, arity] : v.items()) {
      const int a = as_int(arity, "vocabulary." + name);
      if (a < 1) throw InputError("vocabulary." + name + ": arity must be positive");
      symbols.push_back({name, a});
    }
    auto voc = std::make_shared<Vocabulary>(symbols);
    if (!ws.structures.empty() && !(*voc == *ws.vocabulary))
      throw InputError("vocabulary differs from the one already loaded");
    ws.vocabulary = voc;
  }

  if (doc.contains("structures")) {
    const json& ss = doc["structures"];
    if (!ss.is_object()) throw InputError("structures: expected an object");
    for (const auto& [name, body] : ss.items()) {
      if (!body.is_object() || !body.contains("domain"))
        throw InputError("structure '" + name + "': needs a domain");
      for (const auto& [k, unused] : body.items())
        if (k != "domain" && k != "relations")
          throw InputError("structure '" + name + "': unknown key '" + k + "'");
      std::map<std::string, TupleSet> rels;
      if (body.contains("relations")) {
        if (!body["relations"].is_object())
          throw InputError("structure '" + name + "': relations must be an object");
        for (const auto& [rel, tuples] : body["relations"].items())
          rels[rel] = parse_tuples(tuples, name + "." + rel);
      }
      auto s = std::make_shared<const Structure>(name, ws.vocabulary,
                                                 as_int(body["domain"], name + ".domain"), rels);
      if (!ws.structures.count(name)) ws.structure_order.push_back(name);
      ws.structures[name] = s;
    }
  }

  if (doc.contains("assignments")) {
    const json& as = doc["assignments"];
    if (!as.is_object()) throw InputError("assignments: expected an object");
    for (const auto& [name, body] : as.items()) {
      if (!body.is_object()) throw InputError("assignment '" + name + "': expected an object");
      Assignment a;
      for (const auto& [var, val] : body.items()) a[var] = as_int(val, name + "." + var);
      ws.assignments[name] = a;
    }
  }

  if (doc.contains("quantifiers")) {
    const json& qs = doc["quantifiers"];
    if (!qs.is_array()) throw InputError("quantifiers: expected an array");
    for (const auto& q : qs) {
      if (q.is_string()) {
        ws.add_quantifier(q.get<std::string>());
        continue;
      }
      if (!q.is_object() || !q.contains("name") || !q.contains("cardinality_predicate"))
        throw InputError("quantifier: expected a builtin name or a cardinality_predicate object");
      if (q.contains("width") && as_int(q["width"], "quantifier.width") != 1)
        throw InputError("quantifier: cardinality predicates define width-1 quantifiers");
      if (q.contains("type") && q["type"] != json::array({1}))
        throw InputError("quantifier: cardinality predicates define type-(1) quantifiers");
      ws.add_cardinality_quantifier(q["name"].get<std::string>(),
                                    q["cardinality_predicate"].get<std::string>());
    }
  }

  if (doc.contains("caps")) merge_caps(ws.caps, doc["caps"]);
}

Workspace load_workspace(const std::vector<std::string>& paths) {
  Workspace ws;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      merge_workspace_json(ws, buf.str());
    } catch (const InputError& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  return ws;
}

std::string dump_workspace(const Workspace& ws) {
  json doc;
  json voc = json::object();
  for (const auto& sym : ws.vocabulary->symbols()) voc[sym.name] = sym.arity;
  doc["vocabulary"] = voc;
  json ss = json::object();
  for (const auto& name : ws.structure_order) {
    const Structure& s = *ws.structures.at(name);
    json rels = json::object();
    for (std::size_t r = 0; r < ws.vocabulary->size(); ++r) {
      json ts = json::array();
      for (const auto& t : s.relation(r)) ts.push_back(t);
      rels[ws.vocabulary->symbols()[r].name] = ts;
    }
    ss[name] = {{"domain", s.domain_size()}, {"relations", rels}};
  }
  doc["structures"] = ss;
  json as = json::object();
  for (const auto& [name, a] : ws.assignments) as[name] = a;
  doc["assignments"] = as;
  json qs = json::array();
  for (const auto& src : ws.quantifier_sources) {
    auto sep = src.find(kSep);
    if (sep == std::string::npos) qs.push_back(src);
    else
      qs.push_back({{"name", src.substr(0, sep)},
                    {"width", 1},
                    {"type", {1}},
                    {"cardinality_predicate", src.substr(sep + 1)}});
  }
  doc["quantifiers"] = qs;
  const Caps& c = ws.caps;
  doc["caps"] = {{"max_domain", c.max_domain},
                 {"max_class_size", c.max_class_size},
                 {"max_budget", c.max_budget},
                 {"max_depth", c.max_depth},
                 {"fresh_pool", c.fresh_pool},
                 {"max_type_cells", c.max_type_cells},
                 {"max_tuple_universe", c.max_tuple_universe},
                 {"max_oracle_rows", c.max_oracle_rows},
                 {"max_oracle_entries", c.max_oracle_entries}};
  return doc.dump(2);
}

Assignment parse_assignment(const std::string& text) {
  Assignment out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(" \t") - b + 1);
    };
    item = trim(item);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("assignment item '" + item + "' lacks '='");
    const std::string var = trim(item.substr(0, eq));
    const std::string val = trim(item.substr(eq + 1));
    if (var.empty()) throw InputError("assignment item '" + item + "' has no variable");
    try {
      std::size_t used = 0;
      const int v = std::stoi(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
      out[var] = v;
    } catch (const std::exception&) {
      throw InputError("assignment value '" + val + "' is not an integer");
    }
  }
  return out;
}

}  // namespace efq

#include <gtest/gtest.h>

#include "efq/workspace.hpp"
#include "support/fixtures.hpp"

using namespace efq;

namespace {

const char* kFig1 = R"({
  "vocabulary": {"B": 1, "R": 1},
  "structures": {"A": {"domain": 4, "relations": {"B": [[0],[1],[2]], "R": []}},
                 "B2": {"domain": 4, "relations": {"B": [[0]], "R": [[1]]}}},
  "assignments": {"f": {"x": 0}},
  "quantifiers": ["exactly=3", {"name": "odd", "width": 1, "type": [1], "cardinality_predicate": "size % 2 == 1"}],
  "caps": {"max_domain": 5}
})";

Workspace loaded(const std::string& text) {
  Workspace ws;
  merge_workspace_json(ws, text);
  return ws;
}

}  // namespace

TEST(Workspace, LoadsStructuresAssignmentsAndQuantifiers) {
  const Workspace ws = loaded(kFig1);
  EXPECT_EQ(ws.structure_order, (std::vector<std::string>{"A", "B2"}));
  EXPECT_EQ(ws.structure("A").relation("B"), (TupleSet{{0}, {1}, {2}}));
  EXPECT_EQ(ws.quantifiers.names(), (std::vector<std::string>{"exactly=3", "odd"}));
  EXPECT_TRUE(ws.quantifiers.find("odd")->accepts_count(4, 3));
  EXPECT_EQ(ws.caps.max_domain, 5);
  EXPECT_EQ(ws.context("A:f").assignment, (Assignment{{"x", 0}}));
  EXPECT_EQ(ws.context("B2{x=1,y=3}").assignment, (Assignment{{"x", 1}, {"y", 3}}));
  EXPECT_EQ(ws.context("A").assignment, Assignment{});
}

TEST(Workspace, ReportsBadInput) {
  EXPECT_THROW(loaded("{"), InputError);
  EXPECT_THROW(loaded(R"({"vocabulary": {"B": 0}})"), InputError);
  EXPECT_THROW(loaded(R"({"vocabulary": {"B": 1}, "structures": {"A": {"domain": 2, "relations": {"C": []}}}})"),
               InputError);
  EXPECT_THROW(loaded(R"({"vocabulary": {"B": 1}, "structures": {"A": {"domain": 2, "relations": {"B": [[5]]}}}})"),
               InputError);
  EXPECT_THROW(loaded(R"({"quantifiers": [{"name": "bad", "width": 1, "type": [1], "cardinality_predicate": "size +"}]})"),
               Error);
  EXPECT_THROW(loaded(R"({"caps": {"max_domain": "six"}})"), InputError);
  const Workspace ws = loaded(kFig1);
  EXPECT_THROW(ws.context("Z"), InputError);
  EXPECT_THROW(ws.context("A:nope"), InputError);
  EXPECT_THROW(ws.context("A{x=9}"), Error);
  EXPECT_THROW(parse_assignment("x=,y"), InputError);
}

TEST(Workspace, ParseAssignment) {
  EXPECT_EQ(parse_assignment(""), Assignment{});
  EXPECT_EQ(parse_assignment("x=0,y=12"), (Assignment{{"x", 0}, {"y", 12}}));
}

TEST(Workspace, DumpRoundTrips) {
  const Workspace ws = loaded(kFig1);
  const std::string dumped = dump_workspace(ws);
  const Workspace again = loaded(dumped);
  EXPECT_EQ(again.structure_order, ws.structure_order);
  for (const auto& name : ws.structure_order) EXPECT_EQ(again.structure(name).key(), ws.structure(name).key());
  EXPECT_EQ(again.assignments, ws.assignments);
  EXPECT_EQ(again.quantifiers.names(), ws.quantifiers.names());
  EXPECT_EQ(again.caps.max_domain, ws.caps.max_domain);
  EXPECT_EQ(dump_workspace(again), dumped);
}

TEST(Workspace, FilesMergeInOrder) {
  Workspace ws = loaded(kFig1);
  merge_workspace_json(ws, R"({"structures": {"C": {"domain": 1, "relations": {}}}, "quantifiers": ["exists"]})");
  EXPECT_EQ(ws.structure_order.back(), "C");
  EXPECT_TRUE(ws.quantifiers.find("exists"));
  EXPECT_TRUE(ws.quantifiers.find("exactly=3"));
}

TEST(Workspace, LoadsTestData) {
  const Workspace ws = load_workspace({std::string(EFQ_TEST_DATA) + "/fig1.json"});
  EXPECT_EQ(ws.structures.size(), 3u);
  EXPECT_THROW(load_workspace({std::string(EFQ_TEST_DATA) + "/missing.json"}), InputError);
}

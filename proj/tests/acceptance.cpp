// One line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "efq/ef_game.hpp"
#include "efq/oracle.hpp"
#include "efq/size_games.hpp"
#include "efq/types_engine.hpp"
#include "support/fixtures.hpp"

using namespace efq;
using namespace efq::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Fail {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Fail{why};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Caps wide_caps() {
  Caps c;
  c.max_class_size = 128;
  c.max_oracle_rows = 200000;
  return c;
}

// Small instances shared by criteria 6 and 7: a quantifier set and contexts
// over one vocabulary.
struct Instance {
  std::string name;
  QuantifierSet q;
  std::vector<Context> contexts;
};

std::vector<Instance> corpus() {
  std::vector<Instance> out;
  Fig1 f;
  out.push_back({"fig1", f.q, {Context(f.A), Context(f.B1), Context(f.B2)}});
  Example2 e;
  out.push_back({"example2", e.q, {Context(e.M), Context(e.N)}});
  Gen g(2024);
  for (int i = 0; i < 16; ++i) {
    auto voc = g.vocabulary(2, 1);
    auto a = g.structure("R" + std::to_string(i) + "a", voc, g.uniform(1, 3));
    auto b = g.coin() ? g.variant(*a, "R" + std::to_string(i) + "b", 0.8)
                      : g.structure("R" + std::to_string(i) + "b", voc, g.uniform(1, 3));
    out.push_back({"random" + std::to_string(i),
                   g.quantifier_subset({"exists", "forall", "exactly=2", "most"}),
                   {Context(a), Context(b)}});
  }
  return out;
}

Outcome fig1() {
  Fig1 f;
  const auto t0 = std::chrono::steady_clock::now();
  auto phi = parse_formula("exactly=3 x. (B(x)|R(x))", *f.voc, f.q);
  const bool a = eval(Context(f.A), *phi, f.q), b1 = eval(Context(f.B1), *phi, f.q),
             b2 = eval(Context(f.B2), *phi, f.q);
  const Player w1 = solve_ef(Context(f.A), Context(f.B1), 1, f.q).winner;
  const Player w2 = solve_ef(Context(f.A), Context(f.B2), 1, f.q).winner;
  const double dt = seconds_since(t0);
  require(a && !b1 && !b2, "eval is not true/false/false");
  require(w1 == Player::I && w2 == Player::I, "EF_1 is not won by Player I on both pairs");
  require(dt < 1.0, "took " + std::to_string(dt) + " s");
  std::ostringstream d;
  d << "eval true/false/false, EF_1 Player I on (A,B1) and (A,B2), " << dt << " s";
  return {true, d.str()};
}

Outcome theorem1() {
  Gen g(101);
  const int n = 240;
  int separable = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < n; ++i) {
    auto voc = g.vocabulary(2, 1);
    auto a = g.structure("A", voc, g.uniform(1, 4));
    auto b = g.coin() ? g.variant(*a, "B", 0.7) : g.structure("B", voc, g.uniform(1, 4));
    auto q = g.quantifier_subset({"exists", "forall", "exactly=2", "most"});
    const int d = g.uniform(0, 2);
    const bool game = solve_ef(Context(a), Context(b), d, q).winner == Player::I;
    const bool oracle = separable_at_depth(Context(a), Context(b), d, q).separable;
    require(game == oracle, "instance " + std::to_string(i) + " disagrees at d=" + std::to_string(d));
    separable += oracle;
  }
  std::ostringstream d;
  d << n << "/" << n << " agree (" << separable << " separable), " << seconds_since(t0) << " s";
  return {true, d.str()};
}

// Classes of one or two contexts, often near-isomorphic copies of one structure.
std::pair<std::vector<Context>, std::vector<Context>> random_classes(Gen& g,
                                                                     std::shared_ptr<const Vocabulary> voc,
                                                                     int max_domain) {
  std::vector<Context> a, b;
  const int na = g.uniform(1, 2), nb = g.uniform(1, 2);
  auto base = g.structure("S0", voc, g.uniform(1, max_domain));
  for (int k = 0; k < na + nb; ++k) {
    const std::string name = "S" + std::to_string(k + 1);
    auto s = g.coin() ? g.variant(*base, name, 0.8) : g.structure(name, voc, g.uniform(1, max_domain));
    (k < na ? a : b).push_back(Context(s));
  }
  return {a, b};
}

Outcome theorem2() {
  Gen g(202);
  const Caps caps = wide_caps();
  const int n = 120;
  int wins = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < n; ++i) {
    auto voc = g.vocabulary(2, 1);
    auto q = g.quantifier_subset({"exists", "forall", "exactly=2", "most"});
    auto [a, b] = random_classes(g, voc, 3);
    const int s = g.uniform(1, 5);
    const ClassGameResult r = solve_class_game(a, b, s, q, caps);
    const SeparationResult o = min_separating_size(a, b, s, q, caps);
    require((r.winner == Player::I) == o.size.has_value(),
            "instance " + std::to_string(i) + " disagrees at s=" + std::to_string(s));
    if (r.witness) {
      require(r.witness->size() <= s, "witness larger than the budget");
      for (const auto& c : a) require(eval(c, *r.witness, q), "witness fails on the left");
      for (const auto& c : b) require(!eval(c, *r.witness, q), "witness holds on the right");
    }
    wins += r.winner == Player::I;
  }
  std::ostringstream d;
  d << n << "/" << n << " agree (" << wins << " Player I), " << seconds_since(t0) << " s";
  return {true, d.str()};
}

Outcome corollary2_theorem3() {
  Gen g(303);
  const Caps caps = wide_caps();
  const int n = 60;
  int weak = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < n; ++i) {
    auto voc = g.vocabulary(2, 1);
    auto q = g.quantifier_subset({"exists", "forall", "exactly=2", "most"});
    auto [a, b] = random_classes(g, voc, 3);
    const int s = g.uniform(1, 5);
    // Per-pair oracle minima decide the weak game: Player I wins iff every pair separates within s.
    bool all_pairs = true;
    for (const auto& x : a)
      for (const auto& y : b) all_pairs = all_pairs && min_separating_size(x, y, s, q, caps).size;
    const WeakGameResult w = solve_weak_game(a, b, s, q, caps);
    require((w.winner == Player::I) == all_pairs,
            "weak game disagrees with pair minima on instance " + std::to_string(i));
    const WeakStrongReport r = weak_vs_strong_report(a, b, 5, q, caps);
    require(!r.strongly_separable || r.weakly_separable,
            "strongly but not weakly separable on instance " + std::to_string(i));
    if (r.weakly_separable) {
      require(r.combined && r.combined_separates, "combined formula fails on instance " + std::to_string(i));
      for (const auto& c : a) require(eval(c, *r.combined, q), "combined formula fails on the left");
      for (const auto& c : b) require(!eval(c, *r.combined, q), "combined formula holds on the right");
      ++weak;
    }
  }
  std::ostringstream d;
  d << n << "/" << n << " weak games agree; psi separates in all " << weak
    << " weakly separable cases, " << seconds_since(t0) << " s";
  return {true, d.str()};
}

Outcome example2() {
  Example2 e;
  const Context m(e.M), n(e.N);
  require(solve_pair_game(m, n, 2, e.q).winner == Player::I, "pair game at budget 2 not won by Player I");
  require(solve_pair_game(m, n, 1, e.q).winner == Player::II, "pair game at budget 1 not won by Player II");
  const SeparationResult o = min_separating_size(m, n, 4, e.q);
  require(o.size == 3, "oracle minimum is not 3");
  auto quoted = parse_formula("exactly=3 x. !P1(x)", *e.voc, e.q);
  require(quoted->size() == 3, "quoted witness does not have size 3");
  require(eval(m, *quoted, e.q) && !eval(n, *quoted, e.q), "quoted witness does not separate");
  require(eval(m, *o.witness, e.q) && !eval(n, *o.witness, e.q), "oracle witness does not separate");
  auto disj = parse_formula("P1(x) | P2(x) | P3(x)", *e.voc, e.q);
  const int std_size = disj->size(SizeMode::Standard), or_size = disj->size(SizeMode::OrPrimitive);
  require(or_size > 1 && std_size > 1, "the disjunction defining M' has size 1");
  const SeparationResult o2 = min_separating_size(m, n, 4, e.q, {}, SizeMode::OrPrimitive);
  require(o2.size && *o2.size > 2, "or-primitive minimum is within the budget");
  std::ostringstream d;
  d << "pair game I at 2, II at 1; oracle min 3 (" << to_string(o.witness)
    << "); disjunction size " << std_size << " standard, " << or_size << " or-primitive";
  return {true, d.str()};
}

Outcome lemma1() {
  int partitions = 0, formulas = 0;
  for (const auto& inst : corpus()) {
    TypesEngine engine(inst.q);
    for (const VarTuple& x : {VarTuple{"x"}, VarTuple{"x", "y"}})
      for (int d = 0; d <= 2; ++d) {
        const TypePartition p = engine.joint_partition(inst.contexts, x, d);
        ++partitions;
        const std::size_t k = p.cell_count();
        // Membership of every (context, tuple) in a set of cells, checked by evaluation.
        auto check = [&](const FormulaPtr& f, const std::vector<int>& cells, const std::string& what) {
          require(f->depth() <= d, inst.name + ": " + what + " deeper than " + std::to_string(d));
          for (std::size_t ci = 0; ci < inst.contexts.size(); ++ci)
            for (const auto& t : tuples_respecting(inst.contexts[ci].domain_size(), x)) {
              const int cell = p.cell_of(static_cast<int>(ci), t);
              const bool in = std::find(cells.begin(), cells.end(), cell) != cells.end();
              require(eval(extend_context(inst.contexts[ci], x, t), *f, inst.q) == in,
                      inst.name + ": " + what + " misclassifies a tuple at d=" + std::to_string(d));
            }
          ++formulas;
        };
        for (std::size_t c = 0; c < k; ++c) check(p.type_formula(c), {static_cast<int>(c)}, "cell formula");
        const std::uint64_t unions = k <= 6 ? (std::uint64_t{1} << k) : 64;
        for (std::uint64_t u = 0; u < unions; ++u) {
          const std::uint64_t mask = k <= 6 ? u : (u * 0x9E3779B97F4A7C15ull) >> (64 - k);
          std::vector<int> cells;
          for (std::size_t c = 0; c < k; ++c)
            if (mask >> c & 1) cells.push_back(static_cast<int>(c));
          check(p.closed_set_formula(cells), cells, "union formula");
        }
      }
  }
  std::ostringstream d;
  d << formulas << " cell and union formulas verified over " << partitions << " partitions";
  return {true, d.str()};
}

Outcome lemma5() {
  int checked = 0;
  for (const auto& inst : corpus())
    for (std::size_t i = 0; i < inst.contexts.size(); ++i)
      for (std::size_t j = 0; j < inst.contexts.size(); ++j) {
        if (i == j) continue;
        const Context &a = inst.contexts[i], &b = inst.contexts[j];
        const SeparationResult o = min_separating_size(a, b, 4, inst.q);
        if (!o.size) continue;
        SizeGameSolver solver(inst.q);
        for (int s = *o.size; s <= 4; ++s) {
          require(solver.pair_game(a, b, s),
                  inst.name + ": oracle separates at size " + std::to_string(*o.size) +
                      " but Player II wins the pair game at " + std::to_string(s));
          ++checked;
        }
      }
  Example2 e;
  const bool gap = solve_pair_game(Context(e.M), Context(e.N), 2, e.q).winner == Player::I &&
                   min_separating_size(Context(e.M), Context(e.N), 2, e.q).size == std::nullopt;
  require(gap, "Example 2 does not show the converse failing");
  std::ostringstream d;
  d << checked << " (pair, budget) cases with oracle separation all won by Player I; "
    << "converse fails on Example 2 (win at 2, no formula of size <= 2)";
  return {true, d.str()};
}

Outcome invariance() {
  std::string names;
  for (const std::string spec : {"exists", "forall", "exactly=2", "atleast=2", "atmost=2", "most",
                                 "haertig", "ham"}) {
    const IsoReport r = check_iso_invariance(builtin_quantifier(spec), 4);
    require(r.exhaustive, spec + " was only sampled");
    require(r.ok(), spec + " is not isomorphism invariant");
    names += (names.empty() ? "" : ", ") + spec;
  }
  const IsoReport broken = check_iso_invariance(broken_quantifier(), 4);
  require(!broken.ok(), "the broken fixture passed");
  return {true, names + " pass exhaustively up to domain 4; broken fixture fails"};
}

Outcome appendix_a() {
  // Repetition respect.
  require(tuples_respecting(2, VarTuple{"x", "x"}) == std::vector<Tuple>{{0, 0}, {1, 1}},
          "(x,x) tuples are not the diagonal");
  require(!respects_repetitions(Tuple{5, 3, 2}, VarTuple{"x", "x", "y"}), "(5,3,2) respects (x,x,y)");
  auto voc3 = std::make_shared<Vocabulary>(std::vector<RelationSymbol>{{"R", 3}, {"E", 2}, {"P", 1}, {"Q", 1}});
  QuantifierSet none;
  auto d2 = make_structure("D", voc3, 2, {{"R", {{0, 0, 1}, {0, 1, 1}, {1, 1, 0}}}});
  require(extension(Context(d2), *parse_formula("x = y", *voc3, none), VarTuple{"x", "y"}, none) ==
              TupleSet{{0, 0}, {1, 1}},
          "extension of x = y is not the diagonal");
  require(extension(Context(d2), *parse_formula("R(x,x,y)", *voc3, none), VarTuple{"x", "x", "y"}, none) ==
              TupleSet{{0, 0, 1}, {1, 1, 0}},
          "extension over (x,x,y) is wrong");
  bool rejected = false;
  try {
    extend_assignment({}, VarTuple{"x", "x"}, Tuple{0, 1});
  } catch (const Error&) {
    rejected = true;
  }
  require(rejected, "non-respecting extension was accepted");

  // Härtig and Ham on 4-element structures.
  QuantifierSet q = quantifiers({"haertig", "ham"});
  auto h = make_structure("H", voc3, 4, {{"P", {{0}, {1}}}, {"Q", {{2}, {3}}},
                                         {"E", {{0, 1}, {1, 2}, {2, 3}}}});
  auto h2 = make_structure("H2", voc3, 4, {{"P", {{0}, {1}, {2}}}, {"Q", {{3}}},
                                           {"E", {{0, 1}, {0, 2}, {0, 3}}}});
  auto haertig = parse_formula("haertig (x)(y). (P(x), Q(y))", *voc3, q);
  auto ham = parse_formula("ham (x,y). E(x,y)", *voc3, q);
  auto ham_sym = parse_formula("ham (x,y). (E(x,y) | E(y,x))", *voc3, q);
  auto ham_diag = parse_formula("ham (x,x). x = x", *voc3, q);
  require(eval(Context(h), *haertig, q) && !eval(Context(h2), *haertig, q), "Haertig misevaluates");
  require(eval(Context(h), *ham, q) && !eval(Context(h2), *ham, q), "Ham misevaluates on E");
  require(!eval(Context(h2), *ham_sym, q), "Ham misevaluates on the symmetric star");
  require(!eval(Context(h), *ham_diag, q), "Ham over (x,x) found a path in a diagonal relation");
  require(has_hamiltonian_path(4, {{0, 1}, {1, 2}, {2, 3}}) && !has_hamiltonian_path(4, {{0, 1}, {0, 2}, {0, 3}}),
          "Hamiltonian path checker");

  // Reduced Theorem 1/2 suites at width 2 and type (2).
  Gen g(909);
  const Caps caps = wide_caps();
  int instances = 0;
  for (const auto& [spec, smax] : std::vector<std::pair<std::string, int>>{{"haertig", 5}, {"ham", 3}})
    for (int i = 0; i < 25; ++i) {
      auto voc = g.vocabulary(1, 1);
      QuantifierSet qs = quantifiers({spec});
      auto a = g.structure("A", voc, g.uniform(1, 3));
      auto b = g.coin() ? g.variant(*a, "B", 0.8) : g.structure("B", voc, g.uniform(1, 3));
      const int d = g.uniform(0, 2), s = g.uniform(1, smax);
      require((solve_ef(Context(a), Context(b), d, qs, caps).winner == Player::I) ==
                  separable_at_depth(Context(a), Context(b), d, qs, caps).separable,
              spec + " EF instance " + std::to_string(i) + " disagrees");
      require((solve_class_game({Context(a)}, {Context(b)}, s, qs, caps).winner == Player::I) ==
                  min_separating_size(Context(a), Context(b), s, qs, caps).size.has_value(),
              spec + " size-game instance " + std::to_string(i) + " disagrees");
      ++instances;
    }
  std::ostringstream d;
  d << "repetition respect, Haertig and Ham semantics hold; " << instances
    << " width-2/type-(2) instances agree in both games";
  return {true, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Figure 1 reproduction", fig1},
      {"Theorem 1 agreement", theorem1},
      {"Theorem 2 agreement", theorem2},
      {"Corollary 2 and Theorem 3", corollary2_theorem3},
      {"Example 2 gap", example2},
      {"Lemma 1 and Corollary 1", lemma1},
      {"Lemma 5 soundness", lemma5},
      {"Quantifier invariance", invariance},
      {"Appendix A machinery", appendix_a},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const Fail& f) {
      o = {false, f.why};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

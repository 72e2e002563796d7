#include <catch2/catch_amalgamated.hpp>

#include "altbisim/agent_system.hpp"
#include "altbisim/common.hpp"
#include "altbisim/labeled_system.hpp"
#include "altbisim/lasso.hpp"
#include "altbisim/metric.hpp"
#include "fixtures.hpp"

namespace {

using namespace altbisim;

bool has_code(const std::vector<Violation>& vs, const std::string& code) {
  for (const auto& v : vs)
    if (v.code == code) return true;
  return false;
}

TEST_CASE("hbar enumerates per-coalition intersections", "[model]") {
  AgentAts g = fixtures::matrix_game();
  int s = g.state_index("s");

  // single agents see their own menus verbatim
  CHECK(hbar_set(g, s, {1}) == std::vector<IntSet>{{1, 2}, {3, 4}});
  CHECK(hbar_set(g, s, {2}) == std::vector<IntSet>{{1, 3}, {2, 4}});

  // the full coalition resolves every row/column pair to one outcome,
  // in lexicographic selection order
  CHECK(hbar_set(g, s, {1, 2}) ==
        std::vector<IntSet>{{1}, {2}, {3}, {4}});

  // the empty coalition cannot constrain anything
  CHECK(hbar_set(g, s, {}) == std::vector<IntSet>{{0, 1, 2, 3, 4}});

  CHECK_THROWS_AS(hbar_set(g, s, {3}), input_error);
}

TEST_CASE("hbar deduplicates equal intersections", "[model]") {
  AgentAts t;
  t.name = "D";
  t.obs = make_table_space({"p"}, {});
  t.agent_count = 2;
  t.state_names = {"a", "b", "c"};
  t.obs_of = {0, 0, 0};
  // both of agent 1's selections cut down to {a} against agent 2
  t.choices = {{{{0, 1}, {0, 2}}, {{0}}},
               {{{1}}, {{1}}},
               {{{2}}, {{2}}}};
  CHECK(hbar_set(t, 0, {1, 2}) == std::vector<IntSet>{{0}});
  CHECK(hbar_set(t, 0, {1}) == std::vector<IntSet>{{0, 1}, {0, 2}});
}

TEST_CASE("unique_state unwraps singletons only", "[model]") {
  CHECK(unique_state({7}) == 7);
  CHECK_THROWS_AS(unique_state({}), input_error);
  CHECK_THROWS_AS(unique_state({1, 2}), input_error);
}

TEST_CASE("successors flatten the full-coalition cells", "[model]") {
  AgentAts g = fixtures::matrix_game();
  CHECK(successors(g, g.state_index("s")) == IntSet{1, 2, 3, 4});
  CHECK(successors(g, g.state_index("s2")) == IntSet{2});
  AgentAts l = fixtures::line3();
  CHECK(successors(l, 0) == IntSet{0});
}

TEST_CASE("validate accepts the fixtures", "[model]") {
  CHECK(validate(fixtures::line3()).empty());
  CHECK(validate(fixtures::matrix_game()).empty());
  CHECK(validate(fixtures::chain_lats()).empty());
  CHECK(validate(fixtures::divert_lats()).empty());
}

TEST_CASE("validate flags the singleton condition", "[model]") {
  AgentAts g = fixtures::matrix_game();
  // a third "column" {s1, s2} overlaps row {s1, s2} in two states
  g.choices[0][1].push_back({1, 2});
  auto vs = validate(g);
  REQUIRE(has_code(vs, "singleton"));
  // the report names the offending selection
  bool found = false;
  for (const auto& v : vs)
    found = found || v.detail.find("state s") != std::string::npos;
  CHECK(found);
}

TEST_CASE("validate flags structural defects", "[model]") {
  AgentAts g = fixtures::matrix_game();

  SECTION("empty menu") {
    g.choices[1][0].clear();
    CHECK(has_code(validate(g), "empty-menu"));
  }
  SECTION("empty choice set") {
    g.choices[1][0] = {{}};
    CHECK(has_code(validate(g), "empty-choice"));
  }
  SECTION("choice set out of range") {
    g.choices[1][0] = {{9}};
    CHECK(has_code(validate(g), "range"));
  }
  SECTION("no agents") {
    g.agent_count = 0;
    for (auto& per_state : g.choices) per_state.clear();
    CHECK(has_code(validate(g), "agents"));
  }
  SECTION("observation missing") {
    g.obs_of[2] = 17;
    CHECK(has_code(validate(g), "obs"));
  }
}

TEST_CASE("metric axioms are enforced", "[model][metric]") {
  SECTION("clean table") {
    CHECK(fixtures::line3().obs.validate().empty());
  }
  SECTION("nonzero self-distance") {
    auto sp = make_table_space({"p1", "p2"}, {{{"p1", "p1"}, 1.0}});
    auto bad = sp.validate();
    bool found = false;
    for (const auto& m : bad)
      found = found || m.find("self-distance") != std::string::npos;
    CHECK(found);
  }
  SECTION("zero distance between distinct points") {
    auto sp = make_table_space({"p1", "p2"}, {});
    auto bad = sp.validate();
    bool found = false;
    for (const auto& m : bad)
      found = found || m.find("zero distance") != std::string::npos;
    CHECK(found);
  }
  SECTION("triangle inequality") {
    auto sp = make_table_space(
        {"p1", "p2", "p3"},
        {{{"p1", "p2"}, 1.0}, {{"p2", "p3"}, 1.0}, {{"p1", "p3"}, 5.0}});
    auto bad = sp.validate();
    bool found = false;
    for (const auto& m : bad)
      found = found || m.find("triangle") != std::string::npos;
    CHECK(found);
  }
  SECTION("negative distance") {
    auto sp = make_table_space({"p1", "p2"}, {{{"p1", "p2"}, -1.0}});
    auto bad = sp.validate();
    bool found = false;
    for (const auto& m : bad)
      found = found || m.find("negative") != std::string::npos;
    CHECK(found);
  }
  SECTION("unknown name in table") {
    CHECK_THROWS_AS(make_table_space({"p1"}, {{{"p1", "zz"}, 1.0}}),
                    input_error);
  }
}

TEST_CASE("chebyshev spaces use the max-coordinate distance", "[model][metric]") {
  auto sp = make_chebyshev_space(2, {{0, 0}, {1, 3}, {0.5, 0.5}});
  CHECK(sp.names == std::vector<std::string>{"(0,0)", "(1,3)", "(0.5,0.5)"});
  CHECK(sp.distance(0, 1) == 3.0);
  CHECK(sp.distance(0, 2) == 0.5);
  CHECK(sp.distance(1, 1) == 0.0);
  CHECK(sp.index_of("(1,3)") == 1);
  CHECK(sp.index_of("nope") == -1);
  CHECK(sp.validate().empty());
  CHECK_THROWS_AS(sp.distance(0, 9), input_error);
  CHECK_THROWS_AS(make_chebyshev_space(2, {{1, 2, 3}}), input_error);

  SECTION("same_space is structural identity") {
    auto sp2 = make_chebyshev_space(2, {{0, 0}, {1, 3}, {0.5, 0.5}});
    CHECK(sp.same_space(sp2));
    sp2.points[1][0] = 2;
    CHECK_FALSE(sp.same_space(sp2));
    CHECK_FALSE(sp.same_space(fixtures::line3().obs));
  }
}

TEST_CASE("labeled systems validate non-blocking and shape", "[model]") {
  LabelAts t = fixtures::chain_lats();

  SECTION("clean") { CHECK(validate(t).empty()); }
  SECTION("blocking pair") {
    t.succ[1][0][0].clear();
    CHECK(has_code(validate(t), "non-blocking"));
  }
  SECTION("successor out of range") {
    t.succ[1][0][0] = {12};
    CHECK(has_code(validate(t), "range"));
  }
  SECTION("no controls") {
    t.control_names.clear();
    for (auto& row : t.succ) row.clear();
    CHECK(has_code(validate(t), "controls"));
  }
}

TEST_CASE("labeled successors union all label pairs", "[model]") {
  LabelAts t = fixtures::chain_lats();
  CHECK(successors(t, 0) == IntSet{0, 1});  // a1 moves on, a2 stays
  CHECK(successors(t, 2) == IntSet{2});
  CHECK(t.successors(0, 0, 0) == IntSet{1});
}

TEST_CASE("outcomes_n follows the strategy against all adversaries", "[model]") {
  AgentAts g = fixtures::matrix_game();
  int s = g.state_index("s");

  AgStrategy top_row;
  top_row.agents = {1};
  for (int q = 0; q < g.state_count(); ++q)
    top_row.value[{0, q}] = hbar_set(g, q, {1})[0];

  CHECK(outcomes_n(g, s, top_row, 1) ==
        std::set<std::vector<int>>{{s}});
  // agent 2 still picks the column, so both top-row outcomes appear
  CHECK(outcomes_n(g, s, top_row, 2) ==
        std::set<std::vector<int>>{{s, 1}, {s, 2}});
  CHECK(outcomes_n(g, s, top_row, 3) ==
        std::set<std::vector<int>>{{s, 1, 1}, {s, 2, 2}});

  SECTION("extension law: shorter outcome sets are exactly the prefixes") {
    for (int n = 1; n <= 3; ++n) {
      auto shorter = outcomes_n(g, s, top_row, n);
      std::set<std::vector<int>> prefixes;
      for (auto longer : outcomes_n(g, s, top_row, n + 1)) {
        longer.pop_back();
        prefixes.insert(longer);
      }
      CHECK(shorter == prefixes);
    }
  }

  SECTION("full coalition pins a single trace") {
    AgStrategy both;
    both.agents = {1, 2};
    for (int q = 0; q < g.state_count(); ++q)
      both.value[{0, q}] = hbar_set(g, q, {1, 2}).back();
    CHECK(outcomes_n(g, s, both, 3) ==
          std::set<std::vector<int>>{{s, 4, 4}});
  }

  SECTION("errors") {
    CHECK_THROWS_AS(outcomes_n(g, s, top_row, 0), input_error);
    CHECK_THROWS_AS(outcomes_n(g, 99, top_row, 2), input_error);
    AgStrategy bad = top_row;
    bad.value[{0, s}] = {1, 3};  // not a set agent 1 can force
    CHECK_THROWS_AS(outcomes_n(g, s, bad, 2), input_error);
  }
}

TEST_CASE("finite memory drives alternating behaviour", "[model]") {
  // two states, one agent, full control of where to go next
  AgentAts t;
  t.name = "flip";
  t.obs = make_table_space({"pa", "pb"}, {{{"pa", "pb"}, 1.0}});
  t.agent_count = 1;
  t.state_names = {"a", "b"};
  t.obs_of = {0, 1};
  t.choices = {{{{0}, {1}}}, {{{0}, {1}}}};
  REQUIRE(validate(t).empty());

  AgStrategy f;
  f.agents = {1};
  f.memory_count = 2;
  f.init_memory = 0;
  f.value[{0, 0}] = {1};  // fresh memory: move to b
  f.value[{0, 1}] = {1};
  f.value[{1, 0}] = {0};  // flipped memory: move to a
  f.value[{1, 1}] = {0};
  for (int q = 0; q < 2; ++q) {
    f.update[{0, q}] = 1;
    f.update[{1, q}] = 0;
  }
  REQUIRE(validate_strategy(t, f).empty());
  CHECK(outcomes_n(t, 0, f, 5) ==
        std::set<std::vector<int>>{{0, 1, 0, 1, 0}});

  SECTION("missing update entries keep the memory") {
    f.update.clear();
    CHECK(outcomes_n(t, 0, f, 4) ==
          std::set<std::vector<int>>{{0, 1, 1, 1}});
  }
  SECTION("missing value entry for a reachable history") {
    f.value.erase({1, 1});
    CHECK_THROWS_AS(outcomes_n(t, 0, f, 4), strategy_error);
  }
}

TEST_CASE("validate_strategy reports membership and range", "[model]") {
  AgentAts g = fixtures::matrix_game();
  AgStrategy f;
  f.agents = {1};
  f.value[{0, 0}] = {1, 2};
  CHECK(validate_strategy(g, f).empty());

  SECTION("value outside hbar") {
    f.value[{0, 0}] = {2, 3};
    CHECK(has_code(validate_strategy(g, f), "membership"));
  }
  SECTION("unknown agent") {
    f.agents = {5};
    CHECK(has_code(validate_strategy(g, f), "agents"));
  }
  SECTION("unknown state") {
    f.value[{0, 42}] = {1, 2};
    CHECK(has_code(validate_strategy(g, f), "range"));
  }
}

TEST_CASE("labeled outcomes_n quantifies over disturbances", "[model]") {
  LabelAts t = fixtures::divert_lats();
  CtrlStrategy f;
  f.memory_count = 1;
  f.actions[{0, 0}] = {0};
  f.actions[{0, 1}] = {0};
  CHECK(outcomes_n(t, 0, f, 3) ==
        std::set<std::vector<int>>{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}});
}

TEST_CASE("lasso positions fold into prefix plus cycle", "[model][lasso]") {
  Lasso l;
  l.prefix = {3, 1};
  l.cycle = {4, 5};
  CHECK(l.fold_size() == 4);
  CHECK(l.state_at(1) == 3);
  CHECK(l.state_at(2) == 1);
  CHECK(l.state_at(3) == 4);
  CHECK(l.state_at(4) == 5);
  CHECK(l.state_at(5) == 4);  // wrapped
  CHECK(l.state_at(104) == 5);
  CHECK(l.fold_next(2) == 3);
  CHECK(l.fold_next(4) == 3);  // wrap goes to the cycle head
  CHECK_THROWS_AS(l.state_at(0), input_error);
}

TEST_CASE("lasso_check verifies every folded edge", "[model][lasso]") {
  AgentAts t = fixtures::line3();

  Lasso ok;
  ok.cycle = {0};
  CHECK(lasso_check(t, ok).empty());

  Lasso jump;
  jump.prefix = {0};
  jump.cycle = {1};  // q1 -> q2 is not a transition, nor is the q2 self-wrap
  auto bad = lasso_check(t, jump);
  CHECK(bad.size() == 1);  // only the prefix edge; q2 self-loops fine
  CHECK(bad[0].find("q1 -> q2") != std::string::npos);

  Lasso empty;
  CHECK_FALSE(lasso_check(t, empty).empty());

  Lasso unknown;
  unknown.cycle = {9};
  CHECK_FALSE(lasso_check(t, unknown).empty());

  SECTION("random walks always produce valid lassos") {
    Rng rng(11);
    LabelAts g = fixtures::chain_lats();
    for (int i = 0; i < 50; ++i) {
      Lasso l = fixtures::rand_lasso(rng, g, rng.uniform(0, g.state_count() - 1));
      CHECK(lasso_check(g, l).empty());
    }
  }
}

TEST_CASE("set helpers keep canonical sorted form", "[model][common]") {
  CHECK(set_sorted({3, 1, 3, 2}) == IntSet{1, 2, 3});
  CHECK(set_intersect({1, 2, 3}, {2, 3, 4}) == IntSet{2, 3});
  CHECK(set_union({1, 3}, {2, 3}) == IntSet{1, 2, 3});
  CHECK(set_difference({1, 2, 3}, {2}) == IntSet{1, 3});
  CHECK(set_contains({1, 5}, 5));
  CHECK_FALSE(set_contains({1, 5}, 2));
  CHECK(set_subset({1, 3}, {1, 2, 3}));
  CHECK_FALSE(set_subset({1, 4}, {1, 2, 3}));
  CHECK(range_set(3) == IntSet{0, 1, 2});
  CHECK(join_ints({1, 2, 3}) == "1,2,3");
  CHECK(join({"a", "b"}, " ") == "a b");
}

TEST_CASE("fmt_double renders shortest round-trip decimals", "[model][common]") {
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(0.5) == "0.5");
  CHECK(fmt_double(2.25) == "2.25");
  CHECK(fmt_double(-3.0) == "-3");
}

TEST_CASE("rng is deterministic per seed", "[model][common]") {
  Rng a(42), b(42), c(43);
  std::vector<int> va, vb, vc;
  for (int i = 0; i < 32; ++i) {
    va.push_back(a.uniform(-5, 5));
    vb.push_back(b.uniform(-5, 5));
    vc.push_back(c.uniform(-5, 5));
  }
  CHECK(va == vb);
  CHECK(va != vc);
  for (int x : va) {
    CHECK(x >= -5);
    CHECK(x <= 5);
  }
  std::vector<int> items{1, 2, 3, 4, 5};
  auto s1 = items, s2 = items;
  Rng r1(7), r2(7);
  r1.shuffle(s1);
  r2.shuffle(s2);
  CHECK(s1 == s2);
}

}  // namespace

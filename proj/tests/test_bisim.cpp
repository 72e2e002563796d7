#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "altbisim/bisim.hpp"
#include "altbisim/generator.hpp"
#include "altbisim/oracle.hpp"
#include "altbisim/parse.hpp"
#include "fixtures.hpp"

namespace {

using namespace altbisim;

using Pairs = std::vector<std::pair<int, int>>;

bool subset_of(const Pairs& small, const Pairs& big) {
  for (const auto& p : small)
    if (std::find(big.begin(), big.end(), p) == big.end()) return false;
  return true;
}

TEST_CASE("three-state line: blur radius one relates neighbours only",
          "[bisim]") {
  AgentAts t = fixtures::line3();

  BisimResult r1 = approx_bisim(t, t, {1}, 1.0);
  Pairs expect1 = {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 1}, {2, 2}};
  CHECK(r1.relation == expect1);
  CHECK(r1.systems_bisimilar);
  CHECK(r1.rounds == 0);  // self-loops never refute beyond observations
  REQUIRE(r1.refutations.count({0, 2}) == 1);
  CHECK(r1.refutations.at({0, 2}).reason == Refutation::Reason::obs);
  CHECK(r1.refutations.at({0, 2}).round == 0);

  BisimResult r0 = exact_bisim(t, t, {1});
  CHECK(r0.relation == Pairs{{0, 0}, {1, 1}, {2, 2}});
  CHECK(r0.systems_bisimilar);

  SECTION("the radius-one relation is not transitive") {
    auto related = [&](int a, int b) {
      return std::find(r1.relation.begin(), r1.relation.end(),
                       std::make_pair(a, b)) != r1.relation.end();
    };
    CHECK(related(0, 1));
    CHECK(related(1, 2));
    CHECK_FALSE(related(0, 2));
  }
  SECTION("radius two relates everything") {
    CHECK(approx_bisim(t, t, {1}, 2.0).relation.size() == 9);
  }
  SECTION("the enumeration oracle agrees at every radius") {
    for (double e : {0.0, 0.5, 1.0, 2.0})
      CHECK(approx_bisim(t, t, {1}, e).relation == enum_bisim(t, t, {1}, e));
  }
}

TEST_CASE("blur growth only adds pairs", "[bisim]") {
  AgentAts t = fixtures::line3();
  AgentAts g = fixtures::matrix_game();
  for (const AgentAts& s : {t, g}) {
    Pairs prev;
    for (double e : {0.0, 0.5, 1.0, 2.0}) {
      Pairs cur = approx_bisim(s, s, s.all_agents(), e).relation;
      CHECK(subset_of(prev, cur));
      prev = cur;
    }
  }
}

TEST_CASE("zero blur is reflexive and symmetric", "[bisim]") {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    AgentGenSpec spec;
    spec.states = 3;
    spec.agents = rng.uniform(1, 2);
    auto T = gen_agent_ats(spec, gen_obs_space({}, rng), rng);
    IntSet ag = T.all_agents();

    Pairs self = exact_bisim(T, T, ag).relation;
    for (int q = 0; q < T.state_count(); ++q)
      CHECK(std::find(self.begin(), self.end(), std::make_pair(q, q)) !=
            self.end());

    auto U = gen_agent_ats(spec, T.obs, rng);
    Pairs fwd = exact_bisim(T, U, ag).relation;
    Pairs bwd = exact_bisim(U, T, ag).relation;
    Pairs swapped;
    for (auto [a, b] : bwd) swapped.push_back({b, a});
    std::sort(swapped.begin(), swapped.end());
    CHECK(fwd == swapped);
  }
}

TEST_CASE("refinement refutations carry a replayable move", "[bisim]") {
  // left: a -> b (obs o1 -> o2); right: c self-loop on o1
  auto space = make_table_space(
      {"o1", "o2", "o3"},
      {{{"o1", "o2"}, 1.0}, {{"o1", "o3"}, 1.0}, {{"o2", "o3"}, 1.0}});
  AgentAts left;
  left.name = "L";
  left.obs = space;
  left.agent_count = 1;
  left.state_names = {"a", "b"};
  left.obs_of = {0, 1};
  left.choices = {{{{1}}}, {{{1}}}};

  AgentAts right;
  right.name = "R";
  right.obs = space;
  right.agent_count = 1;
  right.state_names = {"c"};
  right.obs_of = {0};
  right.choices = {{{{0}}}};

  BisimResult r = exact_bisim(left, right, {1});
  CHECK(r.relation.empty());
  CHECK_FALSE(r.systems_bisimilar);
  CHECK(r.rounds == 1);
  REQUIRE(r.refutations.count({0, 0}) == 1);
  const Refutation& ref = r.refutations.at({0, 0});
  CHECK(ref.reason == Refutation::Reason::forth);
  CHECK(ref.round == 1);
  CHECK(ref.move == IntSet{1});  // the forced step to b
  REQUIRE(ref.spoilers.size() == 1);
  CHECK(ref.spoilers[0].first == IntSet{0});   // right's only answer, {c}
  CHECK(ref.spoilers[0].second == IntSet{0});  // refuted by its sole completion
  CHECK(enum_bisim(left, right, {1}, 0.0).empty());
}

TEST_CASE("back refutations blame the right system's move", "[bisim]") {
  auto space = make_table_space(
      {"o1", "o2", "o3"},
      {{{"o1", "o2"}, 1.0}, {{"o1", "o3"}, 1.0}, {{"o2", "o3"}, 1.0}});
  // left: l0 -> l1 (o1 -> o2); right: r0 may move to r1 (o2) or r2 (o3)
  AgentAts left;
  left.name = "L";
  left.obs = space;
  left.agent_count = 1;
  left.state_names = {"l0", "l1"};
  left.obs_of = {0, 1};
  left.choices = {{{{1}}}, {{{1}}}};

  AgentAts right;
  right.name = "R";
  right.obs = space;
  right.agent_count = 1;
  right.state_names = {"r0", "r1", "r2"};
  right.obs_of = {0, 1, 2};
  right.choices = {{{{1}, {2}}}, {{{1}}}, {{{2}}}};

  BisimResult r = exact_bisim(left, right, {1});
  REQUIRE(r.refutations.count({0, 0}) == 1);
  const Refutation& ref = r.refutations.at({0, 0});
  CHECK(ref.reason == Refutation::Reason::back);
  CHECK(ref.round == 1);
  CHECK(ref.move == IntSet{2});  // right's unanswerable step to r2
  CHECK(r.relation == Pairs{{1, 1}});
  CHECK(exact_bisim(left, right, {1}).relation ==
        enum_bisim(left, right, {1}, 0.0));
}

TEST_CASE("coverage flags demand every state be related", "[bisim]") {
  AgentAts t = fixtures::line3();
  AgentAts sub;  // only the endpoints of the line, same space
  sub.name = "S";
  sub.obs = t.obs;
  sub.agent_count = 1;
  sub.state_names = {"q1", "q2"};
  sub.obs_of = {0, 1};
  sub.choices = {{{{0}}}, {{{1}}}};

  BisimResult r = exact_bisim(t, sub, {1});
  CHECK(r.relation == Pairs{{0, 0}, {1, 1}});
  CHECK_FALSE(r.left_covered);  // q3 has no partner
  CHECK(r.right_covered);
  CHECK_FALSE(r.systems_bisimilar);
}

TEST_CASE("agent-system refinement matches exhaustive search", "[bisim][oracle]") {
  Rng rng(77);
  int nontrivial = 0;
  for (int i = 0; i < 40; ++i) {
    AgentGenSpec spec;
    spec.states = 3;
    spec.agents = rng.uniform(1, 2);
    auto space = gen_obs_space({}, rng);
    auto T1 = gen_agent_ats(spec, space, rng);
    auto T2 = gen_agent_ats(spec, space, rng);
    IntSet ag;
    for (int a = 1; a <= spec.agents; ++a)
      if (rng.chance(0.7)) ag.push_back(a);
    double e = rng.pick(std::vector<double>{0.0, 0.5, 1.0, 2.0});
    CAPTURE(i, e, ag, to_dsl(T1), to_dsl(T2));
    BisimResult r = approx_bisim(T1, T2, ag, e);
    CHECK(r.relation == enum_bisim(T1, T2, ag, e));
    if (!r.relation.empty()) ++nontrivial;
  }
  CHECK(nontrivial > 5);
}

TEST_CASE("labeled bisimulation refines by control answers", "[bisim][labeled]") {
  LabelAts chain = fixtures::chain_lats();

  BisimResult self = aea_bisim(chain, chain, 0.0);
  CHECK(self.relation == Pairs{{0, 0}, {1, 1}, {2, 2}});
  CHECK(self.systems_bisimilar);
  REQUIRE(self.refutations.count({0, 1}) == 1);
  const Refutation& ref = self.refutations.at({0, 1});
  CHECK(ref.round == 1);
  CHECK(ref.move_label >= 0);
  CHECK_FALSE(ref.label_spoilers.empty());

  SECTION("a renamed copy is fully bisimilar") {
    LabelAts copy = chain;
    copy.name = "CH2";
    copy.state_names = {"t1", "t2", "t3"};
    BisimResult r = aea_bisim(chain, copy, 0.0);
    CHECK(r.relation == Pairs{{0, 0}, {1, 1}, {2, 2}});
    CHECK(r.systems_bisimilar);
  }
  SECTION("the labeled oracle agrees") {
    for (double e : {0.0, 1.0})
      CHECK(aea_bisim(chain, chain, e).relation ==
            enum_aea_bisim(chain, chain, e));
    LabelAts dv = fixtures::divert_lats();
    CHECK(aea_bisim(dv, dv, 0.0).relation == enum_aea_bisim(dv, dv, 0.0));
  }
  SECTION("observation blur widens the labeled relation too") {
    Pairs p0 = aea_bisim(chain, chain, 0.0).relation;
    Pairs p1 = aea_bisim(chain, chain, 1.0).relation;
    CHECK(subset_of(p0, p1));
  }
}

TEST_CASE("labeled refinement matches exhaustive search", "[bisim][labeled][oracle]") {
  Rng rng(78);
  for (int i = 0; i < 30; ++i) {
    LabelGenSpec spec;
    spec.states = rng.uniform(2, 3);
    spec.controls = rng.uniform(1, 2);
    spec.disturbances = rng.uniform(1, 2);
    auto space = gen_obs_space({}, rng);
    auto T1 = gen_label_ats(spec, space, rng);
    spec.states = rng.uniform(2, 3);
    auto T2 = gen_label_ats(spec, space, rng);
    double e = rng.pick(std::vector<double>{0.0, 0.5, 1.0});
    CAPTURE(i, e, to_dsl(T1), to_dsl(T2));
    CHECK(aea_bisim(T1, T2, e).relation == enum_aea_bisim(T1, T2, e));
  }
}

TEST_CASE("bisimulation rejects malformed input", "[bisim]") {
  AgentAts t = fixtures::line3();
  CHECK_THROWS_AS(approx_bisim(t, t, {1}, -0.5), input_error);
  CHECK_THROWS_AS(approx_bisim(t, t, {2}, 0.0), input_error);

  AgentAts g = fixtures::matrix_game();
  CHECK_THROWS_AS(approx_bisim(t, g, {1}, 0.0), input_error);  // agent counts

  AgentAts broken = t;
  broken.choices[0][0] = {{0, 1}};  // not a singleton intersection
  CHECK_THROWS_AS(approx_bisim(broken, t, {1}, 0.0), input_error);

  LabelAts c = fixtures::chain_lats();
  LabelAts blocking = c;
  blocking.succ[0][0][0].clear();
  CHECK_THROWS_AS(aea_bisim(blocking, c, 0.0), input_error);
  CHECK_THROWS_AS(aea_bisim(c, c, -1.0), input_error);

  LabelAts other = c;
  other.obs = make_table_space({"x", "y"}, {{{"x", "y"}, 1.0}});
  other.obs_of = {0, 0, 1};
  CHECK_THROWS_AS(aea_bisim(c, other, 0.0), input_error);
}

}  // namespace

#include <catch2/catch_amalgamated.hpp>

#include "altbisim/distinguish.hpp"
#include "altbisim/generator.hpp"
#include "altbisim/relations.hpp"
#include "fixtures.hpp"

namespace {

using namespace altbisim;

// left: a -> b (obs o1 -> o2), right: c self-loop on o1 — forth refutation
std::pair<AgentAts, AgentAts> forth_pair() {
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
  return {left, right};
}

// left: l0 -> l1, right: r0 may reach r1 (o2) or r2 (o3) — back refutation
std::pair<AgentAts, AgentAts> back_pair() {
  auto space = make_table_space(
      {"o1", "o2", "o3"},
      {{{"o1", "o2"}, 1.0}, {{"o1", "o3"}, 1.0}, {{"o2", "o3"}, 1.0}});
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
  return {left, right};
}

TEST_CASE("an observation gap yields an atomic witness", "[distinguish]") {
  AgentAts t = fixtures::line3();
  DistinguishResult r = distinguish(t, t, {1}, 1.0, 0, 2);
  CHECK_FALSE(r.bisimilar);
  CHECK(r.round == 0);
  CHECK(r.source == Refutation::Reason::obs);
  CHECK(equal(r.phi, sf::atom("p1")));
  CHECK(equal(r.gamma, sf::diamond(1.0, "p1")));
  CHECK(eval_state(t, 0, r.phi, 1.0));
  CHECK_FALSE(eval_state(t, 2, r.gamma, 1.0));
  CHECK(decide_H(r.phi, r.gamma, {1}, 1.0));
}

TEST_CASE("related states give no witness", "[distinguish]") {
  AgentAts t = fixtures::line3();
  DistinguishResult r = distinguish(t, t, {1}, 1.0, 0, 1);
  CHECK(r.bisimilar);
  CHECK(r.phi == nullptr);
  CHECK(r.gamma == nullptr);
}

TEST_CASE("forth refutations negate a right-oriented witness", "[distinguish]") {
  auto [left, right] = forth_pair();
  DistinguishResult r = distinguish(left, right, {1}, 0.0, 0, 0);
  CHECK_FALSE(r.bisimilar);
  CHECK(r.round == 1);
  CHECK(r.source == Refutation::Reason::forth);

  // phi = !!<<1>> !X !o2  (can force the next observation to be o2)
  auto wrap1 = [](StatePtr s) {
    return sf::neg(
        sf::coalition({1}, pf::neg(pf::next(pf::lift(std::move(s))))));
  };
  CHECK(equal(r.phi, sf::neg(wrap1(sf::neg(sf::atom("o2"))))));
  CHECK(equal(r.gamma, sf::neg(wrap1(sf::neg(sf::diamond(0.0, "o2"))))));

  CHECK(decide_H(r.phi, r.gamma, {1}, 0.0));
  CHECK(eval_state(left, 0, r.phi, 0.0));
  CHECK_FALSE(eval_state(right, 0, r.gamma, 0.0));
}

TEST_CASE("back refutations expose the unanswerable move", "[distinguish]") {
  auto [left, right] = back_pair();
  DistinguishResult r = distinguish(left, right, {1}, 0.0, 0, 0);
  CHECK_FALSE(r.bisimilar);
  CHECK(r.round == 1);
  CHECK(r.source == Refutation::Reason::back);

  // phi = !<<1>> !X o2  (every branch leads to o2; r0 can divert to o3)
  auto wrap1 = [](StatePtr s) {
    return sf::neg(
        sf::coalition({1}, pf::neg(pf::next(pf::lift(std::move(s))))));
  };
  CHECK(equal(r.phi, wrap1(sf::atom("o2"))));
  CHECK(equal(r.gamma, wrap1(sf::diamond(0.0, "o2"))));

  CHECK(decide_H(r.phi, r.gamma, {1}, 0.0));
  CHECK(eval_state(left, 0, r.phi, 0.0));
  CHECK_FALSE(eval_state(right, 0, r.gamma, 0.0));
}

TEST_CASE("a precomputed relation is reused verbatim", "[distinguish]") {
  auto [left, right] = back_pair();
  BisimResult pre = exact_bisim(left, right, {1});
  DistinguishResult a = distinguish(left, right, {1}, 0.0, 0, 0, &pre);
  DistinguishResult b = distinguish(left, right, {1}, 0.0, 0, 0);
  CHECK(equal(a.phi, b.phi));
  CHECK(equal(a.gamma, b.gamma));
  CHECK(a.round == b.round);
  CHECK(a.source == b.source);
}

TEST_CASE("state indices are validated", "[distinguish]") {
  AgentAts t = fixtures::line3();
  CHECK_THROWS_AS(distinguish(t, t, {1}, 1.0, -1, 0), input_error);
  CHECK_THROWS_AS(distinguish(t, t, {1}, 1.0, 0, 3), input_error);
}

TEST_CASE("every refuted pair gets a sound partner witness",
          "[distinguish][sweep]") {
  Rng rng(4242);
  int refuted = 0, related = 0;
  for (int i = 0; i < 25; ++i) {
    AgentGenSpec spec;
    spec.states = 3;
    spec.agents = rng.uniform(1, 2);
    auto space = gen_obs_space({}, rng);
    AgentAts t1 = gen_agent_ats(spec, space, rng);
    AgentAts t2 = gen_agent_ats(spec, space, rng);
    IntSet ag;
    for (int a = 1; a <= spec.agents; ++a)
      if (rng.uniform(0, 1)) ag.push_back(a);
    if (ag.empty()) ag = {1};
    double eps = rng.pick(std::vector<double>{0.0, 0.5, 1.0});

    BisimResult rel = approx_bisim(t1, t2, ag, eps);
    for (int a = 0; a < t1.state_count(); ++a)
      for (int b = 0; b < t2.state_count(); ++b) {
        DistinguishResult d = distinguish(t1, t2, ag, eps, a, b, &rel);
        bool in_rel = std::find(rel.relation.begin(), rel.relation.end(),
                                std::make_pair(a, b)) != rel.relation.end();
        CAPTURE(i, a, b, eps);
        CHECK(d.bisimilar == in_rel);
        if (d.bisimilar) {
          ++related;
          continue;
        }
        ++refuted;
        const Refutation& ref = rel.refutations.at({a, b});
        CHECK(d.round == ref.round);
        CHECK(d.source == ref.reason);
        CHECK(decide_H(d.phi, d.gamma, ag, eps));
        CHECK(eval_state(t1, a, d.phi, eps));
        CHECK_FALSE(eval_state(t2, b, d.gamma, eps));
      }
  }
  CHECK(refuted >= 40);
  CHECK(related >= 10);
}

}  // namespace

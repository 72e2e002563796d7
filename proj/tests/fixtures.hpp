#pragma once

// Shared fixtures, deterministic formula enumerators and random-instance
// helpers for the test suite and the acceptance runner.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "altbisim/agent_system.hpp"
#include "altbisim/bisim.hpp"
#include "altbisim/common.hpp"
#include "altbisim/formula.hpp"
#include "altbisim/generator.hpp"
#include "altbisim/labeled_system.hpp"
#include "altbisim/lasso.hpp"
#include "altbisim/metric.hpp"
#include "altbisim/relations.hpp"

namespace fixtures {

using namespace altbisim;

// Three states on a line metric d(p_i, p_j) = |i - j|, one agent, self-loops
// only.  At eps = 1 the middle state relates to both ends but the ends do not
// relate to each other, so the greatest relation is not transitive.
inline AgentAts line3() {
  AgentAts T;
  T.name = "L3";
  std::map<std::pair<std::string, std::string>, double> d;
  d[{"p1", "p2"}] = 1;
  d[{"p1", "p3"}] = 2;
  d[{"p2", "p3"}] = 1;
  T.obs = make_table_space({"p1", "p2", "p3"}, d);
  T.agent_count = 1;
  T.state_names = {"q1", "q2", "q3"};
  T.obs_of = {0, 1, 2};
  T.choices = {{{{0}}}, {{{1}}}, {{{2}}}};
  return T;
}

// Two agents sharing control of a one-shot matrix game: agent 1 picks a row
// set, agent 2 a column set, and the intersection is one of four successors
// (which then self-loop).  States: s, s1..s4; obs: s,s1 -> pa; s2,s4 -> pb;
// s3 -> pc; all distinct observations at distance 1.
inline AgentAts matrix_game() {
  AgentAts T;
  T.name = "MG";
  std::map<std::pair<std::string, std::string>, double> d;
  d[{"pa", "pb"}] = 1;
  d[{"pa", "pc"}] = 1;
  d[{"pb", "pc"}] = 1;
  T.obs = make_table_space({"pa", "pb", "pc"}, d);
  T.agent_count = 2;
  T.state_names = {"s", "s1", "s2", "s3", "s4"};
  T.obs_of = {0, 0, 1, 2, 1};
  auto self = [](int q) {
    return std::vector<std::vector<IntSet>>{{{q}}, {{q}}};
  };
  T.choices = {{{{1, 2}, {3, 4}}, {{1, 3}, {2, 4}}},  // s: rows / columns
               self(1), self(2), self(3), self(4)};
  return T;
}

// Deterministic three-state chain under control a1 (s1 -> s2 -> s3 -> s3),
// a2 stays put; single disturbance.  Observations: s1,s2 -> run; s3 -> goal.
inline LabelAts chain_lats() {
  LabelAts T;
  T.name = "CH";
  std::map<std::pair<std::string, std::string>, double> d;
  d[{"run", "goal"}] = 1;
  T.obs = make_table_space({"run", "goal"}, d);
  T.state_names = {"s1", "s2", "s3"};
  T.obs_of = {0, 0, 1};
  T.control_names = {"a1", "a2"};
  T.disturbance_names = {"b1"};
  T.succ = {{{{1}}, {{0}}}, {{{2}}, {{1}}}, {{{2}}, {{2}}}};
  return T;
}

// The adversary can keep the run away from the goal observation: a1 branches
// on the disturbance and one branch always returns to a goal-free state.
inline LabelAts divert_lats() {
  LabelAts T;
  T.name = "DV";
  std::map<std::pair<std::string, std::string>, double> d;
  d[{"run", "goal"}] = 1;
  T.obs = make_table_space({"run", "goal"}, d);
  T.state_names = {"s1", "s2"};
  T.obs_of = {0, 1};
  T.control_names = {"a1"};
  T.disturbance_names = {"b1", "b2"};
  // b1 always diverts back to s1, b2 would reach the goal
  T.succ = {{{{0}, {1}}}, {{{0}, {1}}}};
  return T;
}

// ---- deterministic formula enumeration -----------------------------------------

// State formulas of the strict grammar whose coalition bodies are next,
// until, or their negations (so every formula is exactly checkable and has a
// defined partner), enumerated smallest-first over two observations.
inline std::vector<StatePtr> enum_left_core(const std::vector<std::string>& obs,
                                            const IntSet& ag, double eps,
                                            int max_rank, size_t want) {
  std::vector<StatePtr> pool;
  std::set<std::string> seen;
  std::vector<StatePtr> out;
  auto push = [&](const StatePtr& f) {
    if (f->rank > max_rank) return;
    std::string key = to_string(f);
    if (!seen.insert(key).second) return;
    pool.push_back(f);
    out.push_back(f);
  };
  for (const std::string& p : obs) push(sf::atom(p));
  auto partner = [&](const StatePtr& f) {
    auto g = h_partner(f, ag, eps);
    return *g;  // total on the strict grammar by construction
  };
  while (out.size() < want) {
    std::vector<StatePtr> base = pool;
    size_t before = out.size();
    for (const StatePtr& x : base) {
      push(sf::neg(partner(x)));
      push(sf::coalition(ag, pf::next(pf::lift(x))));
      push(sf::coalition(ag, pf::neg(pf::next(pf::lift(partner(x))))));
      if (out.size() >= want) break;
    }
    for (const StatePtr& x : base) {
      for (const StatePtr& y : base) {
        push(sf::conj(x, y));
        push(sf::coalition(ag, pf::until(pf::lift(x), pf::lift(y))));
        push(sf::coalition(
            ag, pf::neg(pf::until(pf::lift(partner(x)), pf::lift(partner(y))))));
        if (out.size() >= want) break;
      }
      if (out.size() >= want) break;
    }
    if (out.size() == before) break;  // saturated below the rank bound
  }
  return out;
}

// Negation-free linear formulas over the given atoms with syntactic depth at
// most max_depth, enumerated smallest-first.
inline std::vector<LtlPtr> enum_positive_ltl(const std::vector<std::string>& atoms,
                                             int max_depth, size_t want) {
  std::vector<std::pair<LtlPtr, int>> pool;
  std::set<std::string> seen;
  std::vector<LtlPtr> out;
  auto push = [&](const LtlPtr& f, int depth) {
    if (depth > max_depth) return;
    std::string key = to_string(f);
    if (!seen.insert(key).second) return;
    pool.push_back({f, depth});
    out.push_back(f);
  };
  for (const std::string& p : atoms) push(lf::atom(p), 1);
  while (out.size() < want) {
    auto base = pool;
    size_t before = out.size();
    for (const auto& [x, dx] : base) {
      push(lf::next(x), dx + 1);
      if (out.size() >= want) break;
    }
    for (const auto& [x, dx] : base) {
      for (const auto& [y, dy] : base) {
        int d = std::max(dx, dy) + 1;
        push(lf::conj(x, y), d);
        push(lf::disj(x, y), d);
        push(lf::until(x, y), d);
        if (out.size() >= want) break;
      }
      if (out.size() >= want) break;
    }
    if (out.size() == before) break;
  }
  return out;
}

// ---- random instances ----------------------------------------------------------

// Arbitrary state formula (any connective nesting) for three-valued checks.
inline StatePtr rand_state_formula(Rng& rng, const std::vector<std::string>& obs,
                                   const IntSet& ag, double eps, int depth) {
  if (depth <= 0 || rng.chance(0.3)) {
    const std::string& p = rng.pick(obs);
    return rng.chance(0.5) ? sf::atom(p) : sf::diamond(eps, p);
  }
  switch (rng.uniform(0, 3)) {
    case 0:
      return sf::neg(rand_state_formula(rng, obs, ag, eps, depth - 1));
    case 1:
      return sf::conj(rand_state_formula(rng, obs, ag, eps, depth - 1),
                      rand_state_formula(rng, obs, ag, eps, depth - 1));
    default: {
      // coalition with a shallow path body
      std::function<PathPtr(int)> path = [&](int d) -> PathPtr {
        if (d <= 0 || rng.chance(0.4))
          return pf::lift(rand_state_formula(rng, obs, ag, eps, d - 1));
        switch (rng.uniform(0, 3)) {
          case 0:
            return pf::neg(path(d - 1));
          case 1:
            return pf::conj(path(d - 1), path(d - 1));
          case 2:
            return pf::next(path(d - 1));
          default:
            return pf::until(path(d - 1), path(d - 1));
        }
      };
      return sf::coalition(ag, path(depth - 1));
    }
  }
}

// Core-fragment state formula: coalitions only over X / U / release bodies
// with state-formula operands, so exact evaluation is available.
inline StatePtr rand_core_state(Rng& rng, const std::vector<std::string>& obs,
                                const IntSet& ag, double eps, int depth) {
  if (depth <= 0 || rng.chance(0.3)) {
    const std::string& p = rng.pick(obs);
    return rng.chance(0.5) ? sf::atom(p) : sf::diamond(eps, p);
  }
  auto sub = [&] { return rand_core_state(rng, obs, ag, eps, depth - 1); };
  switch (rng.uniform(0, 4)) {
    case 0:
      return sf::neg(sub());
    case 1:
      return sf::conj(sub(), sub());
    case 2:
      return sf::coalition(ag, pf::next(pf::lift(sub())));
    case 3:
      return sf::coalition(ag, pf::until(pf::lift(sub()), pf::lift(sub())));
    default:
      return sf::coalition(
          ag, pf::neg(pf::until(pf::lift(sub()), pf::lift(sub()))));
  }
}

// Negation-free linear formula.
inline LtlPtr rand_positive(Rng& rng, const std::vector<std::string>& obs,
                            double eps, int depth) {
  if (depth <= 0 || rng.chance(0.3)) {
    const std::string& p = rng.pick(obs);
    return rng.chance(0.5) ? lf::atom(p) : lf::diamond(eps, p);
  }
  auto sub = [&] { return rand_positive(rng, obs, eps, depth - 1); };
  switch (rng.uniform(0, 3)) {
    case 0:
      return lf::conj(sub(), sub());
    case 1:
      return lf::disj(sub(), sub());
    case 2:
      return lf::next(sub());
    default:
      return lf::until(sub(), sub());
  }
}

// Valid lasso by walking successors until a state repeats.
template <class System>
Lasso rand_lasso(Rng& rng, const System& T, int q0) {
  std::vector<int> walk{q0};
  std::map<int, int> first_at;  // state -> position in walk
  first_at[q0] = 0;
  for (;;) {
    IntSet nexts = successors(T, walk.back());
    int v = nexts[static_cast<size_t>(rng.uniform(0, static_cast<int>(nexts.size()) - 1))];
    auto it = first_at.find(v);
    if (it != first_at.end()) {
      Lasso l;
      l.prefix.assign(walk.begin(), walk.begin() + it->second);
      l.cycle.assign(walk.begin() + it->second, walk.end());
      return l;
    }
    first_at[v] = static_cast<int>(walk.size());
    walk.push_back(v);
  }
}

}  // namespace fixtures

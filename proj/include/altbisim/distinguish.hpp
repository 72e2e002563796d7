#pragma once

// Distinguishing-formula extraction.  For a pair (q1, q2) outside the
// greatest (Ag, eps)-bisimulation, produces state formulas (phi, gamma) that
// are partners under the formula relation H such that q1 satisfies phi while
// q2 falsifies gamma.  The construction replays the refutation trace:
//
//   * round 0 (observation distance):  (p, <eps>p) with p the observation
//     of q1 — gamma fails on q2 exactly because the distance exceeds eps.
//   * a forth/back refutation at round r recurses on successor pairs that
//     were refuted strictly earlier, and wraps the results in
//     !<<Ag>>!X (disjunction over answer cells of conjunctions over
//     adversarial cells); for forth failures the orientation of the inner
//     pairs flips through negation.
//
// Formulas are shared DAGs; one recursive pair is built per refuted state
// pair, so sizes stay proportional to the refutation structure.

#include <map>
#include <string>
#include <vector>

#include "altbisim/agent_system.hpp"
#include "altbisim/bisim.hpp"
#include "altbisim/common.hpp"
#include "altbisim/formula.hpp"

namespace altbisim {

struct DistinguishResult {
  bool bisimilar = false;
  StatePtr phi, gamma;  // set iff !bisimilar: q1 |= phi, q2 |/= gamma
  int round = 0;
  Refutation::Reason source = Refutation::Reason::obs;
};

namespace detail {

class DistinguishBuilder {
 public:
  DistinguishBuilder(const AgentAts& T1, const AgentAts& T2, const IntSet& ag,
                     double eps, const BisimResult& B)
      : T1_(T1), T2_(T2), ag_(ag),
        others_(set_difference(T1.all_agents(), ag)), eps_(eps), B_(B) {}

  // Forward-oriented pair for a refuted (a, b): left satisfies, right falsifies.
  std::pair<StatePtr, StatePtr> forward(int a, int b) {
    auto key = std::make_pair(a, b);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const Refutation& ref = B_.refutations.at(key);

    std::pair<StatePtr, StatePtr> out;
    if (ref.reason == Refutation::Reason::obs) {
      std::string p = T1_.obs_name(a);
      out = {sf::atom(p), sf::diamond(eps_, p)};
    } else if (ref.reason == Refutation::Reason::forth) {
      // ref.move = Q1 with no answer; per answer cell Q2 the spoiler Q'2.
      // Successor pairs (u(Q1 n Q'1), u(Q2 n Q'2)) are all refuted earlier.
      std::vector<StatePtr> dl, dr;
      for (const auto& [Q2, Q2s] : ref.spoilers) {
        int y = unique_state(set_intersect(Q2, Q2s));
        std::vector<StatePtr> cl, cr;
        for (const IntSet& Q1s : hbar_set(T1_, a, others_)) {
          int x = unique_state(set_intersect(ref.move, Q1s));
          // swapped pair (!gamma, !phi): satisfied by y, falsified by x
          auto [phi, gamma] = forward(x, y);
          cl.push_back(sf::neg(gamma));
          cr.push_back(sf::neg(phi));
        }
        dl.push_back(nary_conj(cl));
        dr.push_back(nary_conj(cr));
      }
      // q2 satisfies wrap(dl); q1 falsifies wrap(dr); swap restores forward.
      StatePtr A = wrap(nary_disj(dl));
      StatePtr Bf = wrap(nary_disj(dr));
      out = {sf::neg(Bf), sf::neg(A)};
    } else {  // back
      // ref.move = Q2 with no answer; per answer cell Q1 the spoiler Q'1.
      std::vector<StatePtr> dl, dr;
      for (const auto& [Q1, Q1s] : ref.spoilers) {
        int x = unique_state(set_intersect(Q1, Q1s));
        std::vector<StatePtr> cl, cr;
        for (const IntSet& Q2s : hbar_set(T2_, b, others_)) {
          int y = unique_state(set_intersect(ref.move, Q2s));
          auto [phi, gamma] = forward(x, y);
          cl.push_back(phi);
          cr.push_back(gamma);
        }
        dl.push_back(nary_conj(cl));
        dr.push_back(nary_conj(cr));
      }
      out = {wrap(nary_disj(dl)), wrap(nary_disj(dr))};
    }
    memo_.emplace(key, out);
    return out;
  }

 private:
  // !<<Ag>>!X phi
  StatePtr wrap(StatePtr phi) {
    return sf::neg(sf::coalition(ag_, pf::neg(pf::next(pf::lift(std::move(phi))))));
  }

  static StatePtr nary_conj(const std::vector<StatePtr>& fs) {
    StatePtr out = fs.at(0);
    for (size_t i = 1; i < fs.size(); ++i) out = sf::conj(out, fs[i]);
    return out;
  }

  static StatePtr nary_disj(const std::vector<StatePtr>& fs) {
    StatePtr out = fs.at(0);
    for (size_t i = 1; i < fs.size(); ++i) out = sf::disj(out, fs[i]);
    return out;
  }

  const AgentAts& T1_;
  const AgentAts& T2_;
  IntSet ag_, others_;
  double eps_;
  const BisimResult& B_;
  std::map<std::pair<int, int>, std::pair<StatePtr, StatePtr>> memo_;
};

}  // namespace detail

// `pre` may pass an already computed approx_bisim(T1, T2, agents, eps) result.
inline DistinguishResult distinguish(const AgentAts& T1, const AgentAts& T2,
                                     const IntSet& agents, double eps, int q1,
                                     int q2, const BisimResult* pre = nullptr) {
  if (q1 < 0 || q1 >= T1.state_count() || q2 < 0 || q2 >= T2.state_count())
    throw input_error("distinguish: state out of range");
  BisimResult local;
  if (!pre) {
    local = approx_bisim(T1, T2, agents, eps);
    pre = &local;
  }
  DistinguishResult res;
  auto it = pre->refutations.find({q1, q2});
  if (it == pre->refutations.end()) {
    res.bisimilar = true;
    return res;
  }
  res.round = it->second.round;
  res.source = it->second.reason;
  detail::DistinguishBuilder builder(T1, T2, set_sorted(agents), eps, *pre);
  auto [phi, gamma] = builder.forward(q1, q2);
  res.phi = phi;
  res.gamma = gamma;
  return res;
}

}  // namespace altbisim

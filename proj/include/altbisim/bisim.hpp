#pragma once

// Alternating approximate bisimulation for agent systems and its
// action-labeled counterpart for labeled systems.  Both compute the greatest
// relation by synchronous refinement from the observation-distance relation
// and record, per discarded pair, the round and the winning move of the side
// that refuted it — enough to replay the argument or to extract a
// distinguishing formula.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "altbisim/agent_system.hpp"
#include "altbisim/common.hpp"
#include "altbisim/labeled_system.hpp"

namespace altbisim {

struct Refutation {
  // Round 0 refutations are observation-distance failures; round r >= 1 means
  // the pair survived r-1 refinement rounds and fell in round r.
  int round = 0;
  enum class Reason { obs, forth, back } reason = Reason::obs;

  // Agent systems.  forth: `move` is a coalition cell of the left state that
  // the right state cannot answer; spoilers lists, for every candidate
  // answer cell, the adversarial cell refuting it.  back: mirrored.
  IntSet move;
  std::vector<std::pair<IntSet, IntSet>> spoilers;

  // Labeled systems.  forth: `move_label` is a control of the left system;
  // label_spoilers lists, per candidate control of the right system, the
  // (disturbance, successor) pair no left transition can match.  back:
  // mirrored.
  int move_label = -1;
  std::vector<std::array<int, 3>> label_spoilers;  // (counter a, spoiler b, q')
};

struct BisimResult {
  double eps = 0.0;
  IntSet agents;  // empty for labeled systems
  std::vector<std::pair<int, int>> relation;  // sorted (left, right) pairs
  int rounds = 0;  // refinement rounds that removed at least one pair
  std::map<std::pair<int, int>, Refutation> refutations;
  bool left_covered = false;   // every left state related to something
  bool right_covered = false;
  bool systems_bisimilar = false;  // both covered
};

namespace detail {

template <class System>
void check_valid_pair(const System& T1, const System& T2) {
  for (const Violation& v : validate(T1))
    throw input_error("left system is not well-formed: " + v.detail);
  for (const Violation& v : validate(T2))
    throw input_error("right system is not well-formed: " + v.detail);
  if (!T1.obs.same_space(T2.obs))
    throw input_error("systems do not share an observation space");
}

inline void finish_result(BisimResult& res, int n1, int n2,
                          const std::vector<std::vector<char>>& rel) {
  std::vector<char> lcov(static_cast<size_t>(n1), 0), rcov(static_cast<size_t>(n2), 0);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      if (rel[static_cast<size_t>(i)][static_cast<size_t>(j)]) {
        res.relation.push_back({i, j});
        lcov[static_cast<size_t>(i)] = 1;
        rcov[static_cast<size_t>(j)] = 1;
      }
  res.left_covered = std::all_of(lcov.begin(), lcov.end(), [](char c) { return c; });
  res.right_covered = std::all_of(rcov.begin(), rcov.end(), [](char c) { return c; });
  res.systems_bisimilar = res.left_covered && res.right_covered;
}

}  // namespace detail

// Greatest (Ag, eps)-alternating approximate bisimulation between two agent
// systems over a shared observation space and agent set.
inline BisimResult approx_bisim(const AgentAts& T1, const AgentAts& T2,
                                const IntSet& agents_in, double eps) {
  detail::check_valid_pair(T1, T2);
  if (T1.agent_count != T2.agent_count)
    throw input_error("systems have different agent sets");
  if (eps < 0) throw input_error("epsilon must be >= 0");
  IntSet ag = set_sorted(agents_in);
  for (int a : ag)
    if (a < 1 || a > T1.agent_count)
      throw input_error("coalition mentions unknown agent " + std::to_string(a));
  IntSet others = set_difference(T1.all_agents(), ag);

  int n1 = T1.state_count(), n2 = T2.state_count();
  BisimResult res;
  res.eps = eps;
  res.agents = ag;

  std::vector<std::vector<char>> rel(static_cast<size_t>(n1),
                                     std::vector<char>(static_cast<size_t>(n2), 0));
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      double d = T1.obs.distance(T1.obs_of[static_cast<size_t>(i)],
                                 T2.obs_of[static_cast<size_t>(j)]);
      if (leq_tol(d, eps)) {
        rel[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
      } else {
        Refutation r;
        r.round = 0;
        r.reason = Refutation::Reason::obs;
        res.refutations[{i, j}] = std::move(r);
      }
    }

  // Checks the forth condition of pair (q1, q2) against the snapshot `rel`,
  // with the two systems in the given role order; used with swapped roles for
  // the back condition.
  auto find_violation = [&](const AgentAts& L, const AgentAts& R, int ql, int qr,
                            auto in_rel) -> std::optional<Refutation> {
    auto hbl_ag = hbar_set(L, ql, ag);
    auto hbl_op = hbar_set(L, ql, others);
    auto hbr_ag = hbar_set(R, qr, ag);
    auto hbr_op = hbar_set(R, qr, others);
    for (const IntSet& Ql : hbl_ag) {
      bool matched = false;
      std::vector<std::pair<IntSet, IntSet>> spoilers;
      for (const IntSet& Qr : hbr_ag) {
        const IntSet* spoiler = nullptr;
        for (const IntSet& Qr2 : hbr_op) {
          int sr = unique_state(set_intersect(Qr, Qr2));
          bool some = false;
          for (const IntSet& Ql2 : hbl_op) {
            int sl = unique_state(set_intersect(Ql, Ql2));
            if (in_rel(sl, sr)) {
              some = true;
              break;
            }
          }
          if (!some) {
            spoiler = &Qr2;
            break;
          }
        }
        if (spoiler == nullptr) {
          matched = true;
          break;
        }
        spoilers.push_back({Qr, *spoiler});
      }
      if (!matched) {
        Refutation r;
        r.move = Ql;
        r.spoilers = std::move(spoilers);
        return r;
      }
    }
    return std::nullopt;
  };

  int round = 0;
  while (true) {
    std::map<std::pair<int, int>, Refutation> removed;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        if (!rel[static_cast<size_t>(i)][static_cast<size_t>(j)]) continue;
        auto forth = find_violation(
            T1, T2, i, j, [&](int a, int b) { return rel[static_cast<size_t>(a)][static_cast<size_t>(b)] != 0; });
        if (forth) {
          forth->reason = Refutation::Reason::forth;
          forth->round = round + 1;
          removed[{i, j}] = std::move(*forth);
          continue;
        }
        auto back = find_violation(
            T2, T1, j, i, [&](int b, int a) { return rel[static_cast<size_t>(a)][static_cast<size_t>(b)] != 0; });
        if (back) {
          back->reason = Refutation::Reason::back;
          back->round = round + 1;
          removed[{i, j}] = std::move(*back);
        }
      }
    if (removed.empty()) break;
    ++round;
    for (auto& [pq, r] : removed) {
      rel[static_cast<size_t>(pq.first)][static_cast<size_t>(pq.second)] = 0;
      res.refutations[pq] = std::move(r);
    }
  }
  res.rounds = round;
  detail::finish_result(res, n1, n2, rel);
  return res;
}

inline BisimResult exact_bisim(const AgentAts& T1, const AgentAts& T2,
                               const IntSet& agents) {
  return approx_bisim(T1, T2, agents, 0.0);
}

// Greatest eps-approximate alternating bisimulation between labeled systems.
inline BisimResult aea_bisim(const LabelAts& T1, const LabelAts& T2, double eps) {
  detail::check_valid_pair(T1, T2);
  if (eps < 0) throw input_error("epsilon must be >= 0");
  int n1 = T1.state_count(), n2 = T2.state_count();
  BisimResult res;
  res.eps = eps;

  std::vector<std::vector<char>> rel(static_cast<size_t>(n1),
                                     std::vector<char>(static_cast<size_t>(n2), 0));
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      double d = T1.obs.distance(T1.obs_of[static_cast<size_t>(i)],
                                 T2.obs_of[static_cast<size_t>(j)]);
      if (leq_tol(d, eps)) {
        rel[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
      } else {
        Refutation r;
        r.round = 0;
        r.reason = Refutation::Reason::obs;
        res.refutations[{i, j}] = std::move(r);
      }
    }

  // forth at (ql, qr): every control of L must be answered by some control of
  // R such that every R-transition is matched by some L-transition.
  auto find_violation = [&](const LabelAts& L, const LabelAts& R, int ql, int qr,
                            auto in_rel) -> std::optional<Refutation> {
    for (int a1 = 0; a1 < L.control_count(); ++a1) {
      bool matched = false;
      std::vector<std::array<int, 3>> spoilers;
      for (int a2 = 0; a2 < R.control_count(); ++a2) {
        bool answer_ok = true;
        std::array<int, 3> spoiler{-1, -1, -1};
        for (int b2 = 0; b2 < R.disturbance_count() && answer_ok; ++b2)
          for (int q2p : R.successors(qr, a2, b2)) {
            bool some = false;
            for (int b1 = 0; b1 < L.disturbance_count() && !some; ++b1)
              for (int q1p : L.successors(ql, a1, b1))
                if (in_rel(q1p, q2p)) {
                  some = true;
                  break;
                }
            if (!some) {
              answer_ok = false;
              spoiler = {a2, b2, q2p};
              break;
            }
          }
        if (answer_ok) {
          matched = true;
          break;
        }
        spoilers.push_back(spoiler);
      }
      if (!matched) {
        Refutation r;
        r.move_label = a1;
        r.label_spoilers = std::move(spoilers);
        return r;
      }
    }
    return std::nullopt;
  };

  int round = 0;
  while (true) {
    std::map<std::pair<int, int>, Refutation> removed;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        if (!rel[static_cast<size_t>(i)][static_cast<size_t>(j)]) continue;
        auto forth = find_violation(
            T1, T2, i, j, [&](int a, int b) { return rel[static_cast<size_t>(a)][static_cast<size_t>(b)] != 0; });
        if (forth) {
          forth->reason = Refutation::Reason::forth;
          forth->round = round + 1;
          removed[{i, j}] = std::move(*forth);
          continue;
        }
        auto back = find_violation(
            T2, T1, j, i, [&](int b, int a) { return rel[static_cast<size_t>(a)][static_cast<size_t>(b)] != 0; });
        if (back) {
          back->reason = Refutation::Reason::back;
          back->round = round + 1;
          removed[{i, j}] = std::move(*back);
        }
      }
    if (removed.empty()) break;
    ++round;
    for (auto& [pq, r] : removed) {
      rel[static_cast<size_t>(pq.first)][static_cast<size_t>(pq.second)] = 0;
      res.refutations[pq] = std::move(r);
    }
  }
  res.rounds = round;
  detail::finish_result(res, n1, n2, rel);
  return res;
}

}  // namespace altbisim

#pragma once

// Labeled alternating transition systems: transitions q -(a,b)-> q' where the
// controller picks a and the environment picks b.  Well-formedness means
// non-blocking: every (q, a, b) has at least one successor.

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "altbisim/agent_system.hpp"  // Violation
#include "altbisim/common.hpp"
#include "altbisim/metric.hpp"

namespace altbisim {

struct LabelAts {
  std::string name;
  MetricObsSpace obs;
  std::vector<std::string> state_names;
  std::vector<std::string> control_names;
  std::vector<std::string> disturbance_names;
  std::vector<int> obs_of;
  // succ[q][a][b] = sorted successor set
  std::vector<std::vector<std::vector<IntSet>>> succ;

  int state_count() const { return static_cast<int>(state_names.size()); }
  int control_count() const { return static_cast<int>(control_names.size()); }
  int disturbance_count() const { return static_cast<int>(disturbance_names.size()); }

  int state_index(const std::string& s) const {
    for (int i = 0; i < state_count(); ++i)
      if (state_names[static_cast<size_t>(i)] == s) return i;
    return -1;
  }
  int control_index(const std::string& s) const {
    for (int i = 0; i < control_count(); ++i)
      if (control_names[static_cast<size_t>(i)] == s) return i;
    return -1;
  }
  int disturbance_index(const std::string& s) const {
    for (int i = 0; i < disturbance_count(); ++i)
      if (disturbance_names[static_cast<size_t>(i)] == s) return i;
    return -1;
  }

  const IntSet& successors(int q, int a, int b) const {
    return succ[static_cast<size_t>(q)][static_cast<size_t>(a)][static_cast<size_t>(b)];
  }

  std::string obs_name(int q) const {
    return obs.names[static_cast<size_t>(obs_of[static_cast<size_t>(q)])];
  }
};

inline std::vector<Violation> validate(const LabelAts& T) {
  std::vector<Violation> out;
  for (const std::string& msg : T.obs.validate()) out.push_back({"metric", msg});
  if (T.control_count() == 0) out.push_back({"controls", "no control labels"});
  if (T.disturbance_count() == 0)
    out.push_back({"disturbances", "no disturbance labels"});
  for (int q = 0; q < T.state_count(); ++q) {
    int p = T.obs_of[static_cast<size_t>(q)];
    if (p < 0 || p >= T.obs.size())
      out.push_back({"obs", "state " + T.state_names[static_cast<size_t>(q)] +
                                " has no observation"});
    for (int a = 0; a < T.control_count(); ++a)
      for (int b = 0; b < T.disturbance_count(); ++b) {
        const IntSet& ss = T.succ[static_cast<size_t>(q)][static_cast<size_t>(a)]
                                 [static_cast<size_t>(b)];
        if (ss.empty())
          out.push_back({"non-blocking",
                         "(" + T.state_names[static_cast<size_t>(q)] + ", " +
                             T.control_names[static_cast<size_t>(a)] + ", " +
                             T.disturbance_names[static_cast<size_t>(b)] +
                             ") has no successor"});
        for (int v : ss)
          if (v < 0 || v >= T.state_count())
            out.push_back({"range", "transition from " +
                                        T.state_names[static_cast<size_t>(q)] +
                                        " targets unknown state"});
      }
  }
  return out;
}

// One-step successors under any (a, b).
inline IntSet successors(const LabelAts& T, int q) {
  IntSet out;
  for (int a = 0; a < T.control_count(); ++a)
    for (int b = 0; b < T.disturbance_count(); ++b)
      for (int v : T.successors(q, a, b)) out.push_back(v);
  return set_sorted(std::move(out));
}

// Finite-memory control strategy: (memory, state) -> nonempty set of enabled
// controls; memory updates may observe the successor state.
struct CtrlStrategy {
  int memory_count = 1;
  int init_memory = 0;
  std::map<std::pair<int, int>, IntSet> actions;          // (mem, q) -> controls
  std::map<std::tuple<int, int, int>, int> update;        // (mem, q, q') -> mem'

  const IntSet& actions_at(int mem, int q) const {
    auto it = actions.find({mem, q});
    if (it == actions.end() || it->second.empty())
      throw strategy_error("control strategy undefined at memory " +
                           std::to_string(mem) + ", state index " +
                           std::to_string(q));
    return it->second;
  }

  int next_memory(int mem, int q, int next_state) const {
    auto it = update.find({mem, q, next_state});
    return it == update.end() ? mem : it->second;
  }
};

// Length-n outcome prefixes under a control strategy: the environment picks
// any enabled control from F's set, any disturbance, any successor.
inline std::set<std::vector<int>> outcomes_n(const LabelAts& T, int q,
                                             const CtrlStrategy& F, int n) {
  if (n < 1) throw input_error("outcomes_n: n must be >= 1");
  if (q < 0 || q >= T.state_count()) throw input_error("outcomes_n: bad state");
  std::set<std::pair<std::vector<int>, int>> frontier = {
      {std::vector<int>{q}, F.init_memory}};
  for (int len = 1; len < n; ++len) {
    std::set<std::pair<std::vector<int>, int>> next;
    for (const auto& [trace, mem] : frontier) {
      int last = trace.back();
      for (int a : F.actions_at(mem, last)) {
        if (a < 0 || a >= T.control_count())
          throw strategy_error("control strategy names unknown control");
        for (int b = 0; b < T.disturbance_count(); ++b)
          for (int v : T.successors(last, a, b)) {
            auto ext = trace;
            ext.push_back(v);
            next.insert({std::move(ext), F.next_memory(mem, last, v)});
          }
      }
    }
    frontier = std::move(next);
  }
  std::set<std::vector<int>> out;
  for (auto& [trace, mem] : frontier) out.insert(trace);
  return out;
}

}  // namespace altbisim

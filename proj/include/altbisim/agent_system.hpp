#pragma once

// Agent-based alternating transition systems.  Each state carries, per agent,
// a menu of choice sets; hbar(q, Ag) collects the intersections of one choice
// per agent in Ag.  Well-formedness demands the singleton condition: picking
// one choice set for *every* agent always intersects to exactly one state.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "altbisim/common.hpp"
#include "altbisim/metric.hpp"

namespace altbisim {

struct Violation {
  std::string code;    // stable machine tag, e.g. "singleton"
  std::string detail;  // human-readable description naming the culprit
};

struct AgentAts {
  std::string name;
  MetricObsSpace obs;
  int agent_count = 0;  // agents are 1..agent_count
  std::vector<std::string> state_names;
  std::vector<int> obs_of;  // state -> observation index
  // choices[q][i-1] = menu of choice sets for agent i at state q, in
  // declaration order; each choice set is a sorted state set.
  std::vector<std::vector<std::vector<IntSet>>> choices;

  int state_count() const { return static_cast<int>(state_names.size()); }

  int state_index(const std::string& s) const {
    for (int i = 0; i < state_count(); ++i)
      if (state_names[static_cast<size_t>(i)] == s) return i;
    return -1;
  }

  IntSet all_agents() const {
    IntSet out;
    for (int i = 1; i <= agent_count; ++i) out.push_back(i);
    return out;
  }

  const std::vector<IntSet>& menu(int q, int agent) const {
    if (q < 0 || q >= state_count() || agent < 1 || agent > agent_count)
      throw input_error("menu: state or agent out of range");
    return choices[static_cast<size_t>(q)][static_cast<size_t>(agent - 1)];
  }

  std::string obs_name(int q) const {
    return obs.names[static_cast<size_t>(obs_of[static_cast<size_t>(q)])];
  }
};

// hbar(q, Ag): one intersection per selection of a choice set for each agent
// in Ag, enumerated lexicographically over the per-agent menu indices
// (agents ascending), deduplicated keeping first occurrence.  The empty
// coalition yields the whole state space.
inline std::vector<IntSet> hbar_set(const AgentAts& T, int q, const IntSet& ag) {
  for (int a : ag)
    if (a < 1 || a > T.agent_count)
      throw input_error("hbar_set: agent out of range");
  std::vector<IntSet> out;
  if (ag.empty()) {
    out.push_back(range_set(T.state_count()));
    return out;
  }
  std::vector<size_t> idx(ag.size(), 0);
  std::set<IntSet> seen;
  while (true) {
    IntSet cur = T.menu(q, ag[0])[idx[0]];
    for (size_t k = 1; k < ag.size(); ++k)
      cur = set_intersect(cur, T.menu(q, ag[k])[idx[k]]);
    if (seen.insert(cur).second) out.push_back(std::move(cur));
    // advance the selection counter
    size_t k = ag.size();
    while (k > 0) {
      --k;
      if (++idx[k] < T.menu(q, ag[k]).size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
  }
}

// The unique member of a singleton set (the result of a full-coalition
// intersection in a valid system).
inline int unique_state(const IntSet& s) {
  if (s.size() != 1)
    throw input_error("expected singleton intersection, got size " +
                      std::to_string(s.size()));
  return s[0];
}

// Successors reachable in one step: hbar(q, Omega) flattened.
inline IntSet successors(const AgentAts& T, int q) {
  IntSet out;
  for (const IntSet& cell : hbar_set(T, q, T.all_agents()))
    for (int v : cell) out.push_back(v);
  return set_sorted(std::move(out));
}

inline std::vector<Violation> validate(const AgentAts& T) {
  std::vector<Violation> out;
  for (const std::string& msg : T.obs.validate()) out.push_back({"metric", msg});
  if (T.agent_count < 1) out.push_back({"agents", "agent count must be positive"});
  int n = T.state_count();
  for (int q = 0; q < n; ++q) {
    const auto& sq = T.state_names[static_cast<size_t>(q)];
    int p = T.obs_of[static_cast<size_t>(q)];
    if (p < 0 || p >= T.obs.size())
      out.push_back({"obs", "state " + sq + " has no observation"});
    for (int i = 1; i <= T.agent_count; ++i) {
      const auto& menu = T.choices[static_cast<size_t>(q)][static_cast<size_t>(i - 1)];
      if (menu.empty())
        out.push_back({"empty-menu", "state " + sq + " agent " + std::to_string(i) +
                                         " offers no choice sets"});
      for (const IntSet& c : menu) {
        if (c.empty())
          out.push_back({"empty-choice", "state " + sq + " agent " + std::to_string(i) +
                                             " has an empty choice set"});
        for (int v : c)
          if (v < 0 || v >= n)
            out.push_back({"range", "state " + sq + " agent " + std::to_string(i) +
                                        " choice set mentions unknown state"});
      }
    }
  }
  if (!out.empty()) return out;  // singleton check needs well-shaped menus
  // Singleton condition: every full selection across all agents intersects
  // to exactly one state.
  for (int q = 0; q < n; ++q) {
    std::vector<size_t> idx(static_cast<size_t>(T.agent_count), 0);
    while (true) {
      IntSet cur = T.menu(q, 1)[idx[0]];
      for (int i = 2; i <= T.agent_count; ++i)
        cur = set_intersect(cur, T.menu(q, i)[idx[static_cast<size_t>(i - 1)]]);
      if (cur.size() != 1) {
        std::string sel;
        for (int i = 1; i <= T.agent_count; ++i) {
          if (i > 1) sel += ",";
          sel += "agent " + std::to_string(i) + ":#" +
                 std::to_string(idx[static_cast<size_t>(i - 1)] + 1);
        }
        out.push_back({"singleton",
                       "state " + T.state_names[static_cast<size_t>(q)] + " selection (" +
                           sel + ") intersects to " + std::to_string(cur.size()) +
                           " states"});
      }
      size_t k = idx.size();
      bool done = true;
      while (k > 0) {
        --k;
        if (++idx[k] < T.menu(q, static_cast<int>(k) + 1).size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
      if (done) break;
    }
  }
  return out;
}

// ---- strategies -------------------------------------------------------------

// Finite-memory coalition strategy: a table from (memory, state) to a choice
// of hbar(state, Ag), plus a memory update on the successor state.  Missing
// update entries mean "keep the current memory"; a missing value entry for a
// reachable history is a strategy error.  Memoryless strategies have
// memory_count == 1.
struct AgStrategy {
  IntSet agents;
  int memory_count = 1;
  int init_memory = 0;
  std::map<std::pair<int, int>, IntSet> value;   // (mem, state) -> choice set
  std::map<std::pair<int, int>, int> update;     // (mem, next state) -> mem'

  const IntSet& choice_at(int mem, int q) const {
    auto it = value.find({mem, q});
    if (it == value.end())
      throw strategy_error("strategy undefined at memory " + std::to_string(mem) +
                           ", state index " + std::to_string(q));
    return it->second;
  }

  int next_memory(int mem, int next_state) const {
    auto it = update.find({mem, next_state});
    return it == update.end() ? mem : it->second;
  }
};

// Membership test behind strategy admission: every table entry must name a
// set the coalition can actually force at that state.
inline std::vector<Violation> validate_strategy(const AgentAts& T,
                                                const AgStrategy& F) {
  std::vector<Violation> out;
  for (int a : F.agents)
    if (a < 1 || a > T.agent_count)
      out.push_back({"agents", "strategy coalition mentions unknown agent " +
                                   std::to_string(a)});
  if (!out.empty()) return out;
  for (const auto& [key, choice] : F.value) {
    auto [mem, q] = key;
    if (q < 0 || q >= T.state_count()) {
      out.push_back({"range", "strategy entry at unknown state index " +
                                  std::to_string(q)});
      continue;
    }
    auto cells = hbar_set(T, q, F.agents);
    bool member = false;
    for (const IntSet& c : cells) member = member || c == choice;
    if (!member)
      out.push_back({"membership",
                     "strategy value at state " +
                         T.state_names[static_cast<size_t>(q)] + ", memory " +
                         std::to_string(mem) + " is not in hbar(q, Ag)"});
  }
  return out;
}

// All length-n outcome prefixes from q under coalition strategy F, computed
// incrementally: each extension is the unique state in F(history) cut with an
// adversarial cell of the complementary coalition.  n == 1 yields {q}.
inline std::set<std::vector<int>> outcomes_n(const AgentAts& T, int q,
                                             const AgStrategy& F, int n) {
  if (n < 1) throw input_error("outcomes_n: n must be >= 1");
  if (q < 0 || q >= T.state_count()) throw input_error("outcomes_n: bad state");
  for (const Violation& v : validate_strategy(T, F))
    throw input_error("outcomes_n: invalid strategy: " + v.detail);
  IntSet others = set_difference(T.all_agents(), F.agents);
  // frontier: (trace, memory)
  std::set<std::pair<std::vector<int>, int>> frontier = {
      {std::vector<int>{q}, F.init_memory}};
  for (int len = 1; len < n; ++len) {
    std::set<std::pair<std::vector<int>, int>> next;
    for (const auto& [trace, mem] : frontier) {
      int last = trace.back();
      const IntSet& mine = F.choice_at(mem, last);
      for (const IntSet& cell : hbar_set(T, last, others)) {
        int succ = unique_state(set_intersect(mine, cell));
        auto ext = trace;
        ext.push_back(succ);
        next.insert({std::move(ext), F.next_memory(mem, succ)});
      }
    }
    frontier = std::move(next);
  }
  std::set<std::vector<int>> out;
  for (auto& [trace, mem] : frontier) out.insert(trace);
  return out;
}

}  // namespace altbisim

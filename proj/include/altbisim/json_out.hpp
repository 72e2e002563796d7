#pragma once

// JSON views of the result types.  Key order is fixed by construction
// (nlohmann::ordered_json), so identical inputs serialize byte-identically.

#include <string>
#include <vector>

#include "json.hpp"

#include "altbisim/agent_system.hpp"
#include "altbisim/bisim.hpp"
#include "altbisim/common.hpp"
#include "altbisim/distinguish.hpp"
#include "altbisim/labeled_system.hpp"
#include "altbisim/synthesis.hpp"

namespace altbisim {

using Json = nlohmann::ordered_json;

inline const char* reason_str(Refutation::Reason r) {
  switch (r) {
    case Refutation::Reason::obs:
      return "obs-distance";
    case Refutation::Reason::forth:
      return "forth";
    case Refutation::Reason::back:
      return "back";
  }
  return "?";
}

template <class System>
Json json_state_set(const System& T, const IntSet& s) {
  Json a = Json::array();
  for (int q : s) a.push_back(T.state_names[static_cast<size_t>(q)]);
  return a;
}

inline Json json_violations(const std::vector<Violation>& vs) {
  Json a = Json::array();
  for (const Violation& v : vs) a.push_back({{"code", v.code}, {"detail", v.detail}});
  return a;
}

// ---- bisimulation results ----------------------------------------------------------

namespace detail {

template <class System>
Json json_bisim_common(const BisimResult& b, const System& T1, const System& T2) {
  Json j;
  j["epsilon"] = b.eps;
  j["agents"] = b.agents;
  j["rounds"] = b.rounds;
  Json rel = Json::array();
  for (auto [l, r] : b.relation)
    rel.push_back({T1.state_names[static_cast<size_t>(l)],
                   T2.state_names[static_cast<size_t>(r)]});
  j["relation"] = rel;
  j["left_covered"] = b.left_covered;
  j["right_covered"] = b.right_covered;
  j["systems_bisimilar"] = b.systems_bisimilar;
  return j;
}

}  // namespace detail

inline Json json_bisim(const BisimResult& b, const AgentAts& T1, const AgentAts& T2) {
  Json j = detail::json_bisim_common(b, T1, T2);
  Json refs = Json::array();
  for (const auto& [pair, ref] : b.refutations) {
    Json r;
    r["left"] = T1.state_names[static_cast<size_t>(pair.first)];
    r["right"] = T2.state_names[static_cast<size_t>(pair.second)];
    r["round"] = ref.round;
    r["reason"] = reason_str(ref.reason);
    if (ref.reason != Refutation::Reason::obs) {
      // forth: move names left states, answers/spoilers name right states;
      // back is mirrored
      bool forth = ref.reason == Refutation::Reason::forth;
      r["move"] = forth ? json_state_set(T1, ref.move) : json_state_set(T2, ref.move);
      Json sp = Json::array();
      for (const auto& [answer, spoiler] : ref.spoilers)
        sp.push_back({{"answer", forth ? json_state_set(T2, answer)
                                       : json_state_set(T1, answer)},
                      {"spoiler", forth ? json_state_set(T2, spoiler)
                                        : json_state_set(T1, spoiler)}});
      r["spoilers"] = sp;
    }
    refs.push_back(r);
  }
  j["refutations"] = refs;
  return j;
}

inline Json json_bisim(const BisimResult& b, const LabelAts& T1, const LabelAts& T2) {
  Json j = detail::json_bisim_common(b, T1, T2);
  j.erase("agents");
  Json refs = Json::array();
  for (const auto& [pair, ref] : b.refutations) {
    Json r;
    r["left"] = T1.state_names[static_cast<size_t>(pair.first)];
    r["right"] = T2.state_names[static_cast<size_t>(pair.second)];
    r["round"] = ref.round;
    r["reason"] = reason_str(ref.reason);
    if (ref.reason != Refutation::Reason::obs) {
      bool forth = ref.reason == Refutation::Reason::forth;
      const LabelAts& mover = forth ? T1 : T2;
      const LabelAts& other = forth ? T2 : T1;
      r["move"] = mover.control_names[static_cast<size_t>(ref.move_label)];
      Json sp = Json::array();
      for (const auto& [a, bdist, v] : ref.label_spoilers)
        sp.push_back({{"answer", other.control_names[static_cast<size_t>(a)]},
                      {"disturbance", other.disturbance_names[static_cast<size_t>(bdist)]},
                      {"successor", other.state_names[static_cast<size_t>(v)]}});
      r["spoilers"] = sp;
    }
    refs.push_back(r);
  }
  j["refutations"] = refs;
  return j;
}

// ---- strategies ---------------------------------------------------------------------

inline Json json_strategy(const AgStrategy& F, const AgentAts& T) {
  Json j;
  j["agents"] = F.agents;
  j["memory_count"] = F.memory_count;
  j["init_memory"] = F.init_memory;
  Json tab = Json::array();
  for (const auto& [key, cell] : F.value)
    tab.push_back({{"memory", key.first},
                   {"state", T.state_names[static_cast<size_t>(key.second)]},
                   {"choice", json_state_set(T, cell)}});
  j["table"] = tab;
  Json up = Json::array();
  for (const auto& [key, m2] : F.update)
    up.push_back({{"memory", key.first},
                  {"next_state", T.state_names[static_cast<size_t>(key.second)]},
                  {"to", m2}});
  j["updates"] = up;
  return j;
}

inline Json json_strategy(const CtrlStrategy& F, const LabelAts& T,
                          const std::vector<std::string>& memory_labels) {
  Json j;
  j["memory_count"] = F.memory_count;
  j["init_memory"] = F.init_memory;
  if (!memory_labels.empty()) j["memory_labels"] = memory_labels;
  Json tab = Json::array();
  for (const auto& [key, cell] : F.actions) {
    Json ctl = Json::array();
    for (int a : cell) ctl.push_back(T.control_names[static_cast<size_t>(a)]);
    tab.push_back({{"memory", key.first},
                   {"state", T.state_names[static_cast<size_t>(key.second)]},
                   {"controls", ctl}});
  }
  j["table"] = tab;
  Json up = Json::array();
  for (const auto& [key, m2] : F.update)
    up.push_back({{"memory", std::get<0>(key)},
                  {"state", T.state_names[static_cast<size_t>(std::get<1>(key))]},
                  {"next_state", T.state_names[static_cast<size_t>(std::get<2>(key))]},
                  {"to", m2}});
  j["updates"] = up;
  return j;
}

// ---- synthesis and transfer ----------------------------------------------------------

inline Json json_synth(const SynthResult& s, const LabelAts& T) {
  Json j;
  j["realizable"] = s.realizable;
  j["horizon"] = s.horizon;
  Json nodes = Json::array();
  for (const SynthNodeInfo& n : s.nodes) {
    Json ctl = Json::array();
    for (int a : n.actions) ctl.push_back(T.control_names[static_cast<size_t>(a)]);
    nodes.push_back({{"state", T.state_names[static_cast<size_t>(n.state)]},
                     {"residual", n.residual},
                     {"goal", n.goal},
                     {"rank", n.rank},
                     {"actions", ctl}});
  }
  j["nodes"] = nodes;
  if (s.realizable) j["strategy"] = json_strategy(s.strategy, T, s.memory_labels);
  return j;
}

inline Json json_transfer(const TransferReport& r, const LabelAts& sample,
                          const LabelAts& abs) {
  Json j;
  j["epsilon"] = r.bisim.eps;
  j["spec"] = to_string(r.spec);
  j["blurred_spec"] = to_string(r.blurred_spec);
  j["systems_bisimilar"] = r.bisim.systems_bisimilar;
  j["related_pairs"] = static_cast<int>(r.bisim.relation.size());
  Json rows = Json::array();
  for (const TransferRow& row : r.rows)
    rows.push_back({{"sample", sample.state_names[static_cast<size_t>(row.q_sample)]},
                    {"abs", abs.state_names[static_cast<size_t>(row.q_abs)]},
                    {"abs_realizable", row.abs_realizable},
                    {"sample_realizable", row.sample_realizable},
                    {"violation", row.violation}});
  j["pairs"] = rows;
  j["violations"] = r.violations;
  return j;
}

inline Json json_distinguish(const DistinguishResult& d, const AgentAts& T1,
                             const AgentAts& T2, int q1, int q2) {
  Json j;
  j["left_state"] = T1.state_names[static_cast<size_t>(q1)];
  j["right_state"] = T2.state_names[static_cast<size_t>(q2)];
  j["bisimilar"] = d.bisimilar;
  if (!d.bisimilar) {
    j["phi"] = to_string(d.phi);
    j["gamma"] = to_string(d.gamma);
    j["round"] = d.round;
    j["source"] = reason_str(d.source);
  }
  return j;
}

}  // namespace altbisim

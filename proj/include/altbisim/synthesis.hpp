#pragma once

// Co-safety synthesis on labeled systems.  Specifications are negation-free
// Ltl formulas; such a formula is satisfied exactly by traces with a finite
// good prefix, witnessed by obligation progression reaching TRUE.
//
// Obligations are kept as canonical DNF residuals over a closure of
// subformulas (sorted, deduplicated, subsumption-pruned), so the product
// arena (state, residual) is finite.  synthesize solves the arena by backward
// attractor induction — the controller picks a control, the environment picks
// the disturbance and successor — and extracts a finite-memory strategy whose
// memory states are exactly the reachable residuals.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "altbisim/bisim.hpp"
#include "altbisim/common.hpp"
#include "altbisim/formula.hpp"
#include "altbisim/labeled_system.hpp"
#include "altbisim/metric.hpp"

namespace altbisim {

namespace detail {

// Registry of closure formulas touched by progression.
class LtlClosure {
 public:
  int id_of(const LtlPtr& f) {
    auto it = index_.find(f);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(formulas_.size());
    formulas_.push_back(f);
    index_.emplace(f, id);
    return id;
  }
  // By value: progression grows the registry, so references into it are
  // invalidated by the very calls that need the looked-up formula.
  LtlPtr formula(int id) const { return formulas_.at(static_cast<size_t>(id)); }
  int size() const { return static_cast<int>(formulas_.size()); }

 private:
  std::vector<LtlPtr> formulas_;
  std::map<LtlPtr, int, FormulaLess<LtlPtr>> index_;
};

}  // namespace detail

// Canonical DNF over closure formulas: a set of clauses (conjunctions of
// obligation ids).  TRUE is the single empty clause; FALSE is the empty set.
struct Residual {
  std::vector<IntSet> clauses;

  bool is_true() const { return clauses.size() == 1 && clauses[0].empty(); }
  bool is_false() const { return clauses.empty(); }
  bool operator<(const Residual& o) const { return clauses < o.clauses; }
  bool operator==(const Residual& o) const { return clauses == o.clauses; }
};

namespace detail {

inline Residual r_true() { return Residual{{IntSet{}}}; }
inline Residual r_false() { return Residual{}; }

inline Residual r_canon(std::vector<IntSet> clauses) {
  for (IntSet& c : clauses) c = set_sorted(std::move(c));
  std::sort(clauses.begin(), clauses.end());
  clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
  // subsumption: drop any clause that strictly contains another
  std::vector<IntSet> kept;
  for (size_t i = 0; i < clauses.size(); ++i) {
    bool subsumed = false;
    for (size_t j = 0; j < clauses.size() && !subsumed; ++j)
      if (i != j && set_subset(clauses[j], clauses[i]) && clauses[j] != clauses[i])
        subsumed = true;
    if (!subsumed) kept.push_back(clauses[i]);
  }
  return Residual{std::move(kept)};
}

inline Residual r_or(const Residual& a, const Residual& b) {
  std::vector<IntSet> cl = a.clauses;
  cl.insert(cl.end(), b.clauses.begin(), b.clauses.end());
  return r_canon(std::move(cl));
}

inline Residual r_and(const Residual& a, const Residual& b) {
  std::vector<IntSet> cl;
  for (const IntSet& x : a.clauses)
    for (const IntSet& y : b.clauses) cl.push_back(set_union(x, y));
  return r_canon(std::move(cl));
}

// One-step progression of a single obligation through the letter of state q.
template <class System>
Residual progress(const System& T, int q, const LtlPtr& f, LtlClosure& cl) {
  switch (f->kind) {
    case Ltl::Kind::atom: {
      int p = T.obs.index_of(f->obs);
      if (p < 0)
        throw input_error("specification names unknown observation '" + f->obs + "'");
      return p == T.obs_of[static_cast<size_t>(q)] ? r_true() : r_false();
    }
    case Ltl::Kind::diamond: {
      int p = T.obs.index_of(f->obs);
      if (p < 0)
        throw input_error("specification names unknown observation '" + f->obs + "'");
      double d = T.obs.distance(p, T.obs_of[static_cast<size_t>(q)]);
      return leq_tol(d, f->eps) ? r_true() : r_false();
    }
    case Ltl::Kind::disj:
      return r_or(progress(T, q, f->lhs, cl), progress(T, q, f->rhs, cl));
    case Ltl::Kind::conj:
      return r_and(progress(T, q, f->lhs, cl), progress(T, q, f->rhs, cl));
    case Ltl::Kind::next:
      return Residual{{IntSet{cl.id_of(f->lhs)}}};
    case Ltl::Kind::until: {
      // a U b  =  b | (a & X(a U b))
      Residual now = progress(T, q, f->rhs, cl);
      Residual keep = r_and(progress(T, q, f->lhs, cl), Residual{{IntSet{cl.id_of(f)}}});
      return r_or(now, keep);
    }
  }
  return r_false();
}

template <class System>
Residual progress_residual(const System& T, int q, const Residual& r,
                           LtlClosure& cl) {
  Residual out = r_false();
  for (const IntSet& clause : r.clauses) {
    Residual acc = r_true();
    for (int id : clause) acc = r_and(acc, progress(T, q, cl.formula(id), cl));
    out = r_or(out, acc);
  }
  return out;
}

}  // namespace detail

inline std::string render_residual(const Residual& r,
                                   const detail::LtlClosure& cl) {
  if (r.is_true()) return "true";
  if (r.is_false()) return "false";
  std::vector<std::string> cls;
  for (const IntSet& clause : r.clauses) {
    std::vector<std::string> ms;
    for (int id : clause) {
      const LtlPtr& f = cl.formula(id);
      std::string s = to_string(f);
      ms.push_back(f->nodes > 1 ? "(" + s + ")" : s);
    }
    cls.push_back(join(ms, " & "));
  }
  return join(cls, " | ");
}

struct SynthNodeInfo {
  int state = 0;
  std::string residual;   // rendered pending obligation
  bool goal = false;
  int rank = -1;          // attractor rank; -1 if losing
  IntSet actions;         // chosen controls (empty if losing or goal-default)
};

struct SynthResult {
  bool realizable = false;
  int horizon = -1;  // worst-case steps to discharge; 0 when immediate
  CtrlStrategy strategy;  // memory states are residual ids
  std::vector<SynthNodeInfo> nodes;  // reachable product nodes, for reports
  std::vector<std::string> memory_labels;  // residual rendering per memory id
};

// Synthesizes a control strategy enforcing the co-safety specification from
// q0 against all disturbances, or reports unrealizability.
inline SynthResult synthesize(const LabelAts& T, int q0, const LtlPtr& spec) {
  for (const Violation& v : validate(T))
    throw input_error("synthesize: system is not well-formed: " + v.detail);
  if (q0 < 0 || q0 >= T.state_count()) throw input_error("synthesize: bad state");

  detail::LtlClosure closure;
  std::map<Residual, int> rid_of;
  std::vector<Residual> residuals;
  auto residual_id = [&](const Residual& r) {
    auto it = rid_of.find(r);
    if (it != rid_of.end()) return it->second;
    int id = static_cast<int>(residuals.size());
    residuals.push_back(r);
    rid_of.emplace(r, id);
    return id;
  };

  Residual init_r{{IntSet{closure.id_of(spec)}}};
  init_r = detail::r_canon(init_r.clauses);
  int init_rid = residual_id(init_r);

  // forward exploration of the product arena
  struct Node {
    int after = -1;           // residual id after progression through state
    bool goal = false, dead = false;
    std::vector<IntSet> succ_by_action;  // per control: packed successor node ids
  };
  std::map<std::pair<int, int>, int> node_id;  // (state, residual id) -> id
  std::vector<std::pair<int, int>> node_key;
  std::vector<Node> nodes;
  std::deque<int> work;

  auto get_node = [&](int q, int rid) {
    auto it = node_id.find({q, rid});
    if (it != node_id.end()) return it->second;
    int id = static_cast<int>(nodes.size());
    node_id.emplace(std::make_pair(q, rid), id);
    node_key.push_back({q, rid});
    nodes.push_back({});
    work.push_back(id);
    return id;
  };

  int init_node = get_node(q0, init_rid);
  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    auto [q, rid] = node_key[static_cast<size_t>(id)];
    Residual after = detail::progress_residual(T, q, residuals[static_cast<size_t>(rid)],
                                               closure);
    nodes[static_cast<size_t>(id)].after = residual_id(after);
    if (after.is_true()) {
      nodes[static_cast<size_t>(id)].goal = true;
      continue;
    }
    if (after.is_false()) {
      nodes[static_cast<size_t>(id)].dead = true;
      continue;
    }
    int aid = nodes[static_cast<size_t>(id)].after;
    // built locally: get_node may grow `nodes` and invalidate references
    std::vector<IntSet> by_action(static_cast<size_t>(T.control_count()));
    for (int a = 0; a < T.control_count(); ++a) {
      IntSet kids;
      for (int b = 0; b < T.disturbance_count(); ++b)
        for (int v : T.successors(q, a, b)) kids.push_back(get_node(v, aid));
      by_action[static_cast<size_t>(a)] = set_sorted(std::move(kids));
    }
    nodes[static_cast<size_t>(id)].succ_by_action = std::move(by_action);
  }

  // backward attractor: goals at rank 0; a node wins at rank r+1 if some
  // control keeps every (disturbance, successor) inside lower ranks.
  int n = static_cast<int>(nodes.size());
  std::vector<int> rank(static_cast<size_t>(n), -1);
  std::vector<int> pick(static_cast<size_t>(n), -1);
  for (int i = 0; i < n; ++i)
    if (nodes[static_cast<size_t>(i)].goal) rank[static_cast<size_t>(i)] = 0;
  for (int round = 1;; ++round) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const Node& nd = nodes[static_cast<size_t>(i)];
      if (rank[static_cast<size_t>(i)] >= 0 || nd.goal || nd.dead) continue;
      for (int a = 0; a < static_cast<int>(nd.succ_by_action.size()); ++a) {
        bool all = true;
        for (int kid : nd.succ_by_action[static_cast<size_t>(a)])
          if (rank[static_cast<size_t>(kid)] < 0 ||
              rank[static_cast<size_t>(kid)] >= round) {
            all = false;
            break;
          }
        if (all) {
          rank[static_cast<size_t>(i)] = round;
          pick[static_cast<size_t>(i)] = a;
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }

  SynthResult res;
  res.realizable = rank[static_cast<size_t>(init_node)] >= 0;
  res.horizon = rank[static_cast<size_t>(init_node)];
  for (size_t i = 0; i < residuals.size(); ++i)
    res.memory_labels.push_back(render_residual(residuals[i], closure));

  CtrlStrategy F;
  F.memory_count = static_cast<int>(residuals.size());
  F.init_memory = init_rid;
  for (int i = 0; i < n; ++i) {
    auto [q, rid] = node_key[static_cast<size_t>(i)];
    const Node& nd = nodes[static_cast<size_t>(i)];
    SynthNodeInfo info;
    info.state = q;
    info.residual = res.memory_labels[static_cast<size_t>(rid)];
    info.goal = nd.goal;
    info.rank = rank[static_cast<size_t>(i)];
    if (nd.goal) {
      info.actions = {0};  // obligation discharged; any control works
    } else if (pick[static_cast<size_t>(i)] >= 0) {
      info.actions = {pick[static_cast<size_t>(i)]};
    }
    if (!info.actions.empty()) {
      F.actions[{rid, q}] = info.actions;
      for (int v = 0; v < T.state_count(); ++v)
        F.update[{rid, q, v}] = nd.after;
    }
    res.nodes.push_back(std::move(info));
  }
  // Once the obligation is discharged the strategy stays total: any control
  // does from the TRUE memory state on.
  auto true_it = rid_of.find(detail::r_true());
  if (true_it != rid_of.end()) {
    for (int q = 0; q < T.state_count(); ++q)
      F.actions.insert({{true_it->second, q}, IntSet{0}});
  }
  res.strategy = std::move(F);
  return res;
}

struct VerifyResult {
  bool holds = false;
  std::string reason;  // on failure: why
};

// Checks that every outcome of F from q0 satisfies the co-safety spec: no
// reachable product node progresses to FALSE, and no cycle avoids TRUE.
inline VerifyResult verify_under_strategy(const LabelAts& T, int q0,
                                          const CtrlStrategy& F, const LtlPtr& spec) {
  for (const Violation& v : validate(T))
    throw input_error("verify_under_strategy: system is not well-formed: " + v.detail);
  if (q0 < 0 || q0 >= T.state_count())
    throw input_error("verify_under_strategy: bad state");

  detail::LtlClosure closure;
  std::map<Residual, int> rid_of;
  std::vector<Residual> residuals;
  auto residual_id = [&](const Residual& r) {
    auto it = rid_of.find(r);
    if (it != rid_of.end()) return it->second;
    int id = static_cast<int>(residuals.size());
    residuals.push_back(r);
    rid_of.emplace(r, id);
    return id;
  };

  Residual init_r = detail::r_canon({IntSet{closure.id_of(spec)}});
  using Key = std::tuple<int, int, int>;  // state, memory, residual id
  std::map<Key, int> color;               // 1 = on stack, 2 = done
  std::vector<std::pair<Key, bool>> stack;  // (node, expanded?)
  stack.push_back({{q0, F.init_memory, residual_id(init_r)}, false});

  while (!stack.empty()) {
    Key key = stack.back().first;
    bool expanded = stack.back().second;
    auto [q, mem, rid] = key;
    if (expanded) {
      color[key] = 2;
      stack.pop_back();
      continue;
    }
    auto it = color.find(key);
    if (it != color.end()) {
      if (it->second == 1) {
        return {false, "an outcome cycles at state " +
                           T.state_names[static_cast<size_t>(q)] +
                           " with pending obligation " +
                           render_residual(residuals[static_cast<size_t>(rid)], closure)};
      }
      stack.pop_back();
      continue;
    }
    Residual after = detail::progress_residual(
        T, q, residuals[static_cast<size_t>(rid)], closure);
    if (after.is_false())
      return {false, "an outcome reaches state " +
                         T.state_names[static_cast<size_t>(q)] +
                         " where the obligation becomes unsatisfiable"};
    if (after.is_true()) {
      color[key] = 2;
      stack.pop_back();
      continue;
    }
    color[key] = 1;
    stack.back().second = true;
    int aid = residual_id(after);
    for (int a : F.actions_at(mem, q)) {
      if (a < 0 || a >= T.control_count())
        throw strategy_error("control strategy names unknown control");
      for (int b = 0; b < T.disturbance_count(); ++b)
        for (int v : T.successors(q, a, b)) {
          Key kid{v, F.next_memory(mem, q, v), aid};
          auto c = color.find(kid);
          if (c == color.end())
            stack.push_back({kid, false});
          else if (c->second == 1)
            return {false, "an outcome cycles at state " +
                               T.state_names[static_cast<size_t>(v)] +
                               " with pending obligation " +
                               render_residual(residuals[static_cast<size_t>(aid)],
                                               closure)};
        }
    }
  }
  return {true, ""};
}

// ---- abstraction-based control transfer ------------------------------------------

struct TransferRow {
  int q_sample = -1, q_abs = -1;
  bool abs_realizable = false;
  bool sample_realizable = false;
  bool violation = false;  // abs realizable but blurred spec unrealizable
};

struct TransferReport {
  BisimResult bisim;
  LtlPtr spec;          // exact spec, synthesized on the abstraction
  LtlPtr blurred_spec;  // tr_epsilon(spec), synthesized on the sample
  std::vector<TransferRow> rows;
  int violations = 0;
};

// For every pair of the greatest eps-alternating bisimulation between sample
// and abstraction, realizability of the exact spec on the abstraction must
// transfer to realizability of the eps-blurred spec on the sample.  Any
// counterexample row indicates a bug in one of the components.
inline TransferReport transfer_harness(const LabelAts& sample, const LabelAts& abs,
                                       double eps, const LtlPtr& spec) {
  TransferReport rep;
  rep.spec = spec;
  rep.blurred_spec = tr_epsilon(spec, eps);
  rep.bisim = aea_bisim(sample, abs, eps);
  std::map<int, bool> abs_memo, sample_memo;
  auto realizable_abs = [&](int q) {
    auto it = abs_memo.find(q);
    if (it != abs_memo.end()) return it->second;
    bool r = synthesize(abs, q, rep.spec).realizable;
    abs_memo.emplace(q, r);
    return r;
  };
  auto realizable_sample = [&](int q) {
    auto it = sample_memo.find(q);
    if (it != sample_memo.end()) return it->second;
    bool r = synthesize(sample, q, rep.blurred_spec).realizable;
    sample_memo.emplace(q, r);
    return r;
  };
  for (auto [qs, qa] : rep.bisim.relation) {
    TransferRow row;
    row.q_sample = qs;
    row.q_abs = qa;
    row.abs_realizable = realizable_abs(qa);
    row.sample_realizable = realizable_sample(qs);
    row.violation = row.abs_realizable && !row.sample_realizable;
    if (row.violation) ++rep.violations;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace altbisim

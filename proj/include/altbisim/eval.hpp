#pragma once

// Formula evaluation on agent systems.
//
//  * eval_state: exact, for the core fragment — booleans over atoms and
//    diamonds, plus coalition formulas whose path argument normalizes (after
//    pushing negations) to X phi', phi' U phi'' or its released dual with
//    state-formula operands.  Anything else throws unsupported_exact.
//  * eval_bounded: three-valued verdict sound for horizon k on all formulas.
//  * eval_lasso: exact path-formula evaluation on an ultimately periodic
//    trace (lifted state subformulas must themselves be exactly evaluable).
//
// Every diamond must carry the ambient epsilon of the query; a mismatch is
// an input error, not a silent reinterpretation.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "altbisim/agent_system.hpp"
#include "altbisim/common.hpp"
#include "altbisim/formula.hpp"
#include "altbisim/lasso.hpp"

namespace altbisim {

enum class V3 { no = -1, unknown = 0, yes = 1 };

inline V3 and3(V3 a, V3 b) { return std::min(a, b); }
inline V3 or3(V3 a, V3 b) { return std::max(a, b); }
inline V3 not3(V3 a) { return static_cast<V3>(-static_cast<int>(a)); }
inline V3 v3_of(bool b) { return b ? V3::yes : V3::no; }

inline std::string to_string(V3 v) {
  switch (v) {
    case V3::no: return "false";
    case V3::unknown: return "unknown";
    default: return "true";
  }
}

// ---- core-shape normalization -------------------------------------------------

namespace detail {

// Resolves a path formula that is (up to negations) a lifted state formula.
inline std::optional<StatePtr> as_state(const PathPtr& p) {
  if (p->kind == PathFormula::Kind::lift) return p->state;
  if (p->kind == PathFormula::Kind::neg) {
    auto inner = as_state(p->lhs);
    if (!inner) return std::nullopt;
    return sf::neg(*inner);
  }
  return std::nullopt;
}

struct CoreShape {
  enum class Op { next, until, release };
  Op op;
  StatePtr a, b;  // next: a only
};

inline std::optional<CoreShape> core_shape(const PathPtr& p, bool negated = false) {
  switch (p->kind) {
    case PathFormula::Kind::neg:
      return core_shape(p->lhs, !negated);
    case PathFormula::Kind::next: {
      auto st = as_state(p->lhs);
      if (!st) {
        // X applied to a deeper temporal formula: not core, but X commutes
        // with negation so a nested core shape would not help anyway.
        return std::nullopt;
      }
      return CoreShape{CoreShape::Op::next, negated ? sf::neg(*st) : *st, nullptr};
    }
    case PathFormula::Kind::until: {
      auto a = as_state(p->lhs), b = as_state(p->rhs);
      if (!a || !b) return std::nullopt;
      if (!negated) return CoreShape{CoreShape::Op::until, *a, *b};
      return CoreShape{CoreShape::Op::release, sf::neg(*a), sf::neg(*b)};
    }
    default:
      return std::nullopt;
  }
}

// ---- exact evaluator ------------------------------------------------------------

class ExactEval {
 public:
  ExactEval(const AgentAts& T, double eps) : T_(T), eps_(eps) {}

  const std::vector<char>& sat(const StatePtr& f) {
    auto it = memo_.find(f);
    if (it != memo_.end()) return it->second;
    std::vector<char> v(static_cast<size_t>(T_.state_count()), 0);
    switch (f->kind) {
      case StateFormula::Kind::atom: {
        int p = resolve_obs(f->obs);
        for (int q = 0; q < T_.state_count(); ++q)
          v[static_cast<size_t>(q)] = T_.obs_of[static_cast<size_t>(q)] == p;
        break;
      }
      case StateFormula::Kind::diamond: {
        if (!approx_eq(f->eps, eps_))
          throw input_error("diamond epsilon " + fmt_double(f->eps) +
                            " differs from ambient epsilon " + fmt_double(eps_));
        int p = resolve_obs(f->obs);
        for (int q = 0; q < T_.state_count(); ++q)
          v[static_cast<size_t>(q)] =
              leq_tol(T_.obs.distance(p, T_.obs_of[static_cast<size_t>(q)]), eps_);
        break;
      }
      case StateFormula::Kind::neg: {
        const auto& s = sat(f->lhs);
        for (int q = 0; q < T_.state_count(); ++q)
          v[static_cast<size_t>(q)] = !s[static_cast<size_t>(q)];
        break;
      }
      case StateFormula::Kind::conj: {
        const auto& a = sat(f->lhs);
        const auto& b = sat(f->rhs);
        for (int q = 0; q < T_.state_count(); ++q)
          v[static_cast<size_t>(q)] = a[static_cast<size_t>(q)] && b[static_cast<size_t>(q)];
        break;
      }
      case StateFormula::Kind::coalition:
        v = coalition_sat(f);
        break;
    }
    return memo_.emplace(f, std::move(v)).first->second;
  }

  // CPre_Ag(Z): states where the coalition can force the next state into Z.
  std::vector<char> cpre(const IntSet& ag, const std::vector<char>& z) const {
    IntSet others = set_difference(T_.all_agents(), ag);
    std::vector<char> out(static_cast<size_t>(T_.state_count()), 0);
    for (int q = 0; q < T_.state_count(); ++q) {
      bool can = false;
      for (const IntSet& mine : hbar_set(T_, q, ag)) {
        bool all = true;
        for (const IntSet& theirs : hbar_set(T_, q, others)) {
          int succ = unique_state(set_intersect(mine, theirs));
          if (!z[static_cast<size_t>(succ)]) {
            all = false;
            break;
          }
        }
        if (all) {
          can = true;
          break;
        }
      }
      out[static_cast<size_t>(q)] = can;
    }
    return out;
  }

  int resolve_obs(const std::string& name) const {
    int p = T_.obs.index_of(name);
    if (p < 0) throw input_error("formula names unknown observation '" + name + "'");
    return p;
  }

  // Winning sets plus, for strategy extraction, the attractor rank of each
  // winning state (until) — 0 for target states.
  struct CoalitionSolution {
    std::vector<char> win;
    std::vector<int> rank;  // until only
    CoreShape shape{CoreShape::Op::next, nullptr, nullptr};
  };

  CoalitionSolution solve_coalition(const StatePtr& f) {
    auto cs = core_shape(f->path);
    if (!cs)
      throw unsupported_exact("path formula '" + to_string(f->path) +
                              "' is outside the exact core fragment");
    CoalitionSolution sol;
    sol.shape = *cs;
    int n = T_.state_count();
    if (cs->op == CoreShape::Op::next) {
      sol.win = cpre(f->agents, sat(cs->a));
    } else if (cs->op == CoreShape::Op::until) {
      const auto a = sat(cs->a);
      const auto b = sat(cs->b);
      sol.rank.assign(static_cast<size_t>(n), -1);
      std::vector<char> z(static_cast<size_t>(n), 0);
      for (int q = 0; q < n; ++q)
        if (b[static_cast<size_t>(q)]) {
          z[static_cast<size_t>(q)] = 1;
          sol.rank[static_cast<size_t>(q)] = 0;
        }
      for (int round = 1;; ++round) {
        auto pre = cpre(f->agents, z);
        bool changed = false;
        for (int q = 0; q < n; ++q)
          if (!z[static_cast<size_t>(q)] && a[static_cast<size_t>(q)] &&
              pre[static_cast<size_t>(q)]) {
            z[static_cast<size_t>(q)] = 1;
            sol.rank[static_cast<size_t>(q)] = round;
            changed = true;
          }
        if (!changed) break;
      }
      sol.win = z;
    } else {  // release: greatest fixpoint of b & (a | CPre(Z))
      const auto a = sat(cs->a);
      const auto b = sat(cs->b);
      std::vector<char> z(static_cast<size_t>(n), 1);
      while (true) {
        auto pre = cpre(f->agents, z);
        bool changed = false;
        for (int q = 0; q < n; ++q) {
          bool keep = b[static_cast<size_t>(q)] &&
                      (a[static_cast<size_t>(q)] || pre[static_cast<size_t>(q)]);
          if (z[static_cast<size_t>(q)] && !keep) {
            z[static_cast<size_t>(q)] = 0;
            changed = true;
          }
        }
        if (!changed) break;
      }
      sol.win = z;
    }
    return sol;
  }

  const AgentAts& T_;
  double eps_;

 private:
  std::vector<char> coalition_sat(const StatePtr& f) {
    return solve_coalition(f).win;
  }

  // Keyed by owning pointer: entries pin their formula so freed subterm
  // addresses can never be recycled into a stale cache hit.
  std::map<StatePtr, std::vector<char>> memo_;
};

}  // namespace detail

struct EvalResult {
  bool value = false;
  // Present when the query formula is a coalition formula that holds at q:
  // a memoryless strategy witnessing it (valid per the membership test).
  std::optional<AgStrategy> witness;
};

inline EvalResult eval_state_full(const AgentAts& T, int q, const StatePtr& f,
                                  double eps) {
  if (q < 0 || q >= T.state_count()) throw input_error("eval_state: bad state");
  if (eps < 0) throw input_error("eval_state: epsilon must be >= 0");
  detail::ExactEval ev(T, eps);
  EvalResult res;
  res.value = ev.sat(f)[static_cast<size_t>(q)];
  if (f->kind != StateFormula::Kind::coalition || !res.value) return res;

  auto sol = ev.solve_coalition(f);
  IntSet others = set_difference(T.all_agents(), f->agents);
  AgStrategy F;
  F.agents = f->agents;
  auto choose = [&](int s, const std::vector<char>& target) -> IntSet {
    // first coalition cell whose every adversarial completion lands in target
    for (const IntSet& mine : hbar_set(T, s, F.agents)) {
      bool ok = true;
      for (const IntSet& theirs : hbar_set(T, s, others))
        if (!target[static_cast<size_t>(unique_state(set_intersect(mine, theirs)))]) {
          ok = false;
          break;
        }
      if (ok) return mine;
    }
    throw input_error("internal: no forcing cell in winning state");
  };
  using Op = detail::CoreShape::Op;
  for (int s = 0; s < T.state_count(); ++s) {
    IntSet pick = hbar_set(T, s, F.agents)[0];  // default; off-path states
    if (sol.shape.op == Op::next) {
      if (s == q) pick = choose(s, ev.sat(sol.shape.a));
    } else if (sol.shape.op == Op::until) {
      int r = sol.rank[static_cast<size_t>(s)];
      if (r > 0) {
        // descend the attractor: force into states of rank < r
        std::vector<char> lower(static_cast<size_t>(T.state_count()), 0);
        for (int t = 0; t < T.state_count(); ++t)
          lower[static_cast<size_t>(t)] =
              sol.rank[static_cast<size_t>(t)] >= 0 && sol.rank[static_cast<size_t>(t)] < r;
        pick = choose(s, lower);
      }
    } else {  // release: stay inside the fixpoint until released
      if (sol.win[static_cast<size_t>(s)] &&
          !ev.sat(sol.shape.a)[static_cast<size_t>(s)])
        pick = choose(s, sol.win);
    }
    F.value[{0, s}] = pick;
  }
  res.witness = std::move(F);
  return res;
}

inline bool eval_state(const AgentAts& T, int q, const StatePtr& f, double eps) {
  return eval_state_full(T, q, f, eps).value;
}

// Satisfaction set over all states (exact core fragment only).
inline std::vector<char> eval_state_set(const AgentAts& T, const StatePtr& f,
                                        double eps) {
  detail::ExactEval ev(T, eps);
  return ev.sat(f);
}

// ---- bounded three-valued evaluation -------------------------------------------

namespace detail {

// Path formula with three-valued constants, used as residual obligations.
struct B3;
using B3Ptr = std::shared_ptr<const B3>;

struct B3 {
  enum class Kind { val, lift, neg, conj, next, until };
  Kind kind;
  V3 v = V3::unknown;
  StatePtr state;
  B3Ptr lhs, rhs;
};

inline B3Ptr b3_val(V3 v) {
  auto n = std::make_shared<B3>();
  n->kind = B3::Kind::val;
  n->v = v;
  return n;
}

inline B3Ptr b3_of(const PathPtr& p) {
  auto n = std::make_shared<B3>();
  switch (p->kind) {
    case PathFormula::Kind::lift:
      n->kind = B3::Kind::lift;
      n->state = p->state;
      break;
    case PathFormula::Kind::neg:
      n->kind = B3::Kind::neg;
      n->lhs = b3_of(p->lhs);
      break;
    case PathFormula::Kind::conj:
      n->kind = B3::Kind::conj;
      n->lhs = b3_of(p->lhs);
      n->rhs = b3_of(p->rhs);
      break;
    case PathFormula::Kind::next:
      n->kind = B3::Kind::next;
      n->lhs = b3_of(p->lhs);
      break;
    case PathFormula::Kind::until:
      n->kind = B3::Kind::until;
      n->lhs = b3_of(p->lhs);
      n->rhs = b3_of(p->rhs);
      break;
  }
  return n;
}

inline B3Ptr b3_neg(B3Ptr a) {
  if (a->kind == B3::Kind::val) return b3_val(not3(a->v));
  auto n = std::make_shared<B3>();
  n->kind = B3::Kind::neg;
  n->lhs = std::move(a);
  return n;
}

inline B3Ptr b3_and(B3Ptr a, B3Ptr b) {
  if (a->kind == B3::Kind::val && a->v == V3::no) return a;
  if (b->kind == B3::Kind::val && b->v == V3::no) return b;
  if (a->kind == B3::Kind::val && a->v == V3::yes) return b;
  if (b->kind == B3::Kind::val && b->v == V3::yes) return a;
  if (a->kind == B3::Kind::val && b->kind == B3::Kind::val)
    return b3_val(and3(a->v, b->v));
  auto n = std::make_shared<B3>();
  n->kind = B3::Kind::conj;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

inline B3Ptr b3_or(B3Ptr a, B3Ptr b) { return b3_neg(b3_and(b3_neg(a), b3_neg(b))); }

inline std::string b3_key(const B3Ptr& f) {
  switch (f->kind) {
    case B3::Kind::val:
      return f->v == V3::yes ? "#T" : (f->v == V3::no ? "#F" : "#U");
    case B3::Kind::lift:
      return "[" + to_string(f->state) + "]";
    case B3::Kind::neg:
      return "!" + b3_key(f->lhs);
    case B3::Kind::conj:
      return "(" + b3_key(f->lhs) + "&" + b3_key(f->rhs) + ")";
    case B3::Kind::next:
      return "X" + b3_key(f->lhs);
    case B3::Kind::until:
      return "(" + b3_key(f->lhs) + "U" + b3_key(f->rhs) + ")";
  }
  return "";
}

class BoundedEval {
 public:
  BoundedEval(const AgentAts& T, double eps) : T_(T), eps_(eps) {}

  V3 state3(int q, const StatePtr& f, int k) {
    if (k < 1) throw input_error("eval_bounded: horizon must be >= 1");
    switch (f->kind) {
      case StateFormula::Kind::atom: {
        int p = resolve_obs(f->obs);
        return v3_of(T_.obs_of[static_cast<size_t>(q)] == p);
      }
      case StateFormula::Kind::diamond: {
        if (!approx_eq(f->eps, eps_))
          throw input_error("diamond epsilon " + fmt_double(f->eps) +
                            " differs from ambient epsilon " + fmt_double(eps_));
        int p = resolve_obs(f->obs);
        return v3_of(
            leq_tol(T_.obs.distance(p, T_.obs_of[static_cast<size_t>(q)]), eps_));
      }
      case StateFormula::Kind::neg:
        return not3(state3(q, f->lhs, k));
      case StateFormula::Kind::conj:
        return and3(state3(q, f->lhs, k), state3(q, f->rhs, k));
      case StateFormula::Kind::coalition: {
        IntSet others = set_difference(T_.all_agents(), f->agents);
        return game(q, b3_of(f->path), k - 1, f->agents, others);
      }
    }
    return V3::unknown;
  }

 private:
  // Progress the obligation through state q; `budget` trace positions remain
  // including q itself.
  B3Ptr step(const B3Ptr& f, int q, int budget) {
    switch (f->kind) {
      case B3::Kind::val:
        return f;
      case B3::Kind::lift:
        return b3_val(state3(q, f->state, budget));
      case B3::Kind::neg:
        return b3_neg(step(f->lhs, q, budget));
      case B3::Kind::conj:
        return b3_and(step(f->lhs, q, budget), step(f->rhs, q, budget));
      case B3::Kind::next:
        return f->lhs;
      case B3::Kind::until:
        return b3_or(step(f->rhs, q, budget),
                     b3_and(step(f->lhs, q, budget), f));
    }
    return b3_val(V3::unknown);
  }

  V3 game(int q, const B3Ptr& ob, int steps, const IntSet& ag, const IntSet& others) {
    B3Ptr r = step(ob, q, steps + 1);
    if (r->kind == B3::Kind::val) return r->v;
    if (steps == 0) return V3::unknown;
    auto key = std::make_tuple(q, b3_key(r), steps);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    V3 best = V3::no;
    for (const IntSet& mine : hbar_set(T_, q, ag)) {
      V3 worst = V3::yes;
      for (const IntSet& theirs : hbar_set(T_, q, others)) {
        int succ = unique_state(set_intersect(mine, theirs));
        worst = and3(worst, game(succ, r, steps - 1, ag, others));
        if (worst == V3::no) break;
      }
      best = or3(best, worst);
      if (best == V3::yes) break;
    }
    memo_.emplace(key, best);
    return best;
  }

  int resolve_obs(const std::string& name) const {
    int p = T_.obs.index_of(name);
    if (p < 0) throw input_error("formula names unknown observation '" + name + "'");
    return p;
  }

  const AgentAts& T_;
  double eps_;
  std::map<std::tuple<int, std::string, int>, V3> memo_;
};

}  // namespace detail

// Three-valued verdict sound for every horizon: a definite answer never
// contradicts exact truth, and growing k only sharpens verdicts.
inline V3 eval_bounded(const AgentAts& T, int q, const StatePtr& f, int k,
                       double eps) {
  if (q < 0 || q >= T.state_count()) throw input_error("eval_bounded: bad state");
  if (eps < 0) throw input_error("eval_bounded: epsilon must be >= 0");
  detail::BoundedEval ev(T, eps);
  return ev.state3(q, f, k);
}

// ---- lasso evaluation ------------------------------------------------------------

namespace detail {

// Evaluates a coalition-free state formula from an observation alone; this is
// what lifted subformulas of embedded Ltl formulas reduce to, and it works on
// both system kinds.
inline bool eval_obs_formula(const MetricObsSpace& sp, int obs_ix,
                             const StatePtr& f, double eps) {
  switch (f->kind) {
    case StateFormula::Kind::atom: {
      int p = sp.index_of(f->obs);
      if (p < 0) throw input_error("formula names unknown observation '" + f->obs + "'");
      return p == obs_ix;
    }
    case StateFormula::Kind::diamond: {
      if (!approx_eq(f->eps, eps))
        throw input_error("diamond epsilon " + fmt_double(f->eps) +
                          " differs from ambient epsilon " + fmt_double(eps));
      int p = sp.index_of(f->obs);
      if (p < 0) throw input_error("formula names unknown observation '" + f->obs + "'");
      return leq_tol(sp.distance(p, obs_ix), eps);
    }
    case StateFormula::Kind::neg:
      return !eval_obs_formula(sp, obs_ix, f->lhs, eps);
    case StateFormula::Kind::conj:
      return eval_obs_formula(sp, obs_ix, f->lhs, eps) &&
             eval_obs_formula(sp, obs_ix, f->rhs, eps);
    case StateFormula::Kind::coalition:
      throw unsupported_exact("coalition formula in an observation-only context");
  }
  return false;
}

// Shared fixpoint engine over the folded prefix+cycle graph; `lift_val`
// decides lifted state subformulas at a 1-based position.
template <class LiftVal>
bool lasso_engine(const Lasso& l, const PathPtr& f, LiftVal&& lift_val) {
  int n = l.fold_size();
  std::map<const PathFormula*, std::vector<char>> memo;
  std::function<const std::vector<char>&(const PathPtr&)> val =
      [&](const PathPtr& p) -> const std::vector<char>& {
    auto it = memo.find(p.get());
    if (it != memo.end()) return it->second;
    std::vector<char> v(static_cast<size_t>(n) + 1, 0);  // 1-based positions
    switch (p->kind) {
      case PathFormula::Kind::lift:
        for (int i = 1; i <= n; ++i)
          v[static_cast<size_t>(i)] = lift_val(i, p->state);
        break;
      case PathFormula::Kind::neg: {
        const auto& a = val(p->lhs);
        for (int i = 1; i <= n; ++i)
          v[static_cast<size_t>(i)] = !a[static_cast<size_t>(i)];
        break;
      }
      case PathFormula::Kind::conj: {
        const auto& a = val(p->lhs);
        const auto& b = val(p->rhs);
        for (int i = 1; i <= n; ++i)
          v[static_cast<size_t>(i)] = a[static_cast<size_t>(i)] && b[static_cast<size_t>(i)];
        break;
      }
      case PathFormula::Kind::next: {
        const auto& a = val(p->lhs);
        for (int i = 1; i <= n; ++i)
          v[static_cast<size_t>(i)] = a[static_cast<size_t>(l.fold_next(i))];
        break;
      }
      case PathFormula::Kind::until: {
        const auto& a = val(p->lhs);
        const auto& b = val(p->rhs);
        // least fixpoint on the folded graph
        bool changed = true;
        while (changed) {
          changed = false;
          for (int i = n; i >= 1; --i) {
            bool nv = b[static_cast<size_t>(i)] ||
                      (a[static_cast<size_t>(i)] &&
                       v[static_cast<size_t>(l.fold_next(i))]);
            if (nv && !v[static_cast<size_t>(i)]) {
              v[static_cast<size_t>(i)] = 1;
              changed = true;
            }
          }
        }
        break;
      }
    }
    return memo.emplace(p.get(), std::move(v)).first->second;
  };
  return val(f)[1];
}

}  // namespace detail

// Exact path-formula truth on an ultimately periodic trace of an agent
// system.  Lifted coalition subformulas are evaluated exactly and must lie in
// the core fragment.
inline bool eval_lasso(const AgentAts& T, const Lasso& l, const PathPtr& f,
                       double eps) {
  auto bad = lasso_check(T, l);
  if (!bad.empty()) throw input_error("eval_lasso: invalid lasso: " + bad[0]);
  detail::ExactEval ev(T, eps);
  return detail::lasso_engine(l, f, [&](int i, const StatePtr& s) -> bool {
    return ev.sat(s)[static_cast<size_t>(l.state_at(i))];
  });
}

// Ltl on a lasso of either system kind; embedded formulas are coalition-free,
// so only observations are consulted.
template <class System>
bool eval_lasso(const System& T, const Lasso& l, const LtlPtr& f, double eps) {
  auto bad = lasso_check(T, l);
  if (!bad.empty()) throw input_error("eval_lasso: invalid lasso: " + bad[0]);
  PathPtr p = to_path(f);
  return detail::lasso_engine(l, p, [&](int i, const StatePtr& s) -> bool {
    int q = l.state_at(i);
    return detail::eval_obs_formula(T.obs, T.obs_of[static_cast<size_t>(q)], s, eps);
  });
}

}  // namespace altbisim

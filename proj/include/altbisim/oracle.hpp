#pragma once

// Independent oracles.  Each one recomputes a result of the main modules by
// a deliberately different route (brute-force enumeration, explicit
// unrolling, game-tree search) and is used by the test suite to pin the
// optimized implementations.  None of them share algorithmic code with the
// modules they check — only the data types, parsers and accessors.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "altbisim/agent_system.hpp"
#include "altbisim/common.hpp"
#include "altbisim/eval.hpp"
#include "altbisim/formula.hpp"
#include "altbisim/labeled_system.hpp"
#include "altbisim/lasso.hpp"
#include "altbisim/metric.hpp"

namespace altbisim {

// ---- enum_bisim: union of all relations satisfying the definition -----------------

// Greatest (Ag, eps)-bisimulation by enumerating every candidate relation
// R over S1 x S2 as a bitmask and keeping those where each pair satisfies the
// distance bound and both transfer conditions verbatim; the union of the
// survivors is returned.  Requires |S1|*|S2| <= 16.
inline std::vector<std::pair<int, int>> enum_bisim(const AgentAts& T1,
                                                   const AgentAts& T2,
                                                   const IntSet& agents_in,
                                                   double eps) {
  int n1 = T1.state_count(), n2 = T2.state_count();
  if (n1 * n2 > 16) throw input_error("enum_bisim: state spaces too large");
  IntSet ag = set_sorted(agents_in);
  IntSet others = set_difference(T1.all_agents(), ag);
  auto bit = [&](int i, int j) { return i * n2 + j; };

  auto pair_ok = [&](unsigned mask, int q1, int q2) {
    double d = T1.obs.distance(T1.obs_of[static_cast<size_t>(q1)],
                               T2.obs_of[static_cast<size_t>(q2)]);
    if (!leq_tol(d, eps)) return false;
    auto related = [&](int a, int b) { return (mask >> bit(a, b)) & 1u; };
    // forth
    for (const IntSet& Q1 : hbar_set(T1, q1, ag)) {
      bool exists = false;
      for (const IntSet& Q2 : hbar_set(T2, q2, ag)) {
        bool all2 = true;
        for (const IntSet& Q2p : hbar_set(T2, q2, others)) {
          int y = unique_state(set_intersect(Q2, Q2p));
          bool some1 = false;
          for (const IntSet& Q1p : hbar_set(T1, q1, others)) {
            int x = unique_state(set_intersect(Q1, Q1p));
            if (related(x, y)) {
              some1 = true;
              break;
            }
          }
          if (!some1) {
            all2 = false;
            break;
          }
        }
        if (all2) {
          exists = true;
          break;
        }
      }
      if (!exists) return false;
    }
    // back
    for (const IntSet& Q2 : hbar_set(T2, q2, ag)) {
      bool exists = false;
      for (const IntSet& Q1 : hbar_set(T1, q1, ag)) {
        bool all1 = true;
        for (const IntSet& Q1p : hbar_set(T1, q1, others)) {
          int x = unique_state(set_intersect(Q1, Q1p));
          bool some2 = false;
          for (const IntSet& Q2p : hbar_set(T2, q2, others)) {
            int y = unique_state(set_intersect(Q2, Q2p));
            if (related(x, y)) {
              some2 = true;
              break;
            }
          }
          if (!some2) {
            all1 = false;
            break;
          }
        }
        if (all1) {
          exists = true;
          break;
        }
      }
      if (!exists) return false;
    }
    return true;
  };

  unsigned total = 1u << (n1 * n2);
  unsigned best = 0;
  for (unsigned mask = 0; mask < total; ++mask) {
    bool ok = true;
    for (int i = 0; i < n1 && ok; ++i)
      for (int j = 0; j < n2 && ok; ++j)
        if ((mask >> bit(i, j)) & 1u)
          if (!pair_ok(mask, i, j)) ok = false;
    if (ok) best |= mask;
  }
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      if ((best >> bit(i, j)) & 1u) out.push_back({i, j});
  return out;
}

// Labeled-system analog.
inline std::vector<std::pair<int, int>> enum_aea_bisim(const LabelAts& T1,
                                                       const LabelAts& T2,
                                                       double eps) {
  int n1 = T1.state_count(), n2 = T2.state_count();
  if (n1 * n2 > 16) throw input_error("enum_aea_bisim: state spaces too large");
  auto bit = [&](int i, int j) { return i * n2 + j; };

  auto pair_ok = [&](unsigned mask, int q1, int q2) {
    double d = T1.obs.distance(T1.obs_of[static_cast<size_t>(q1)],
                               T2.obs_of[static_cast<size_t>(q2)]);
    if (!leq_tol(d, eps)) return false;
    auto related = [&](int a, int b) { return (mask >> bit(a, b)) & 1u; };
    // forth: every a1 answered by some a2 whose transitions are all matched
    for (int a1 = 0; a1 < T1.control_count(); ++a1) {
      bool exists = false;
      for (int a2 = 0; a2 < T2.control_count() && !exists; ++a2) {
        bool all = true;
        for (int b2 = 0; b2 < T2.disturbance_count() && all; ++b2)
          for (int y : T2.successors(q2, a2, b2)) {
            bool some = false;
            for (int b1 = 0; b1 < T1.disturbance_count() && !some; ++b1)
              for (int x : T1.successors(q1, a1, b1))
                if (related(x, y)) {
                  some = true;
                  break;
                }
            if (!some) {
              all = false;
              break;
            }
          }
        exists = all;
      }
      if (!exists) return false;
    }
    // back
    for (int a2 = 0; a2 < T2.control_count(); ++a2) {
      bool exists = false;
      for (int a1 = 0; a1 < T1.control_count() && !exists; ++a1) {
        bool all = true;
        for (int b1 = 0; b1 < T1.disturbance_count() && all; ++b1)
          for (int x : T1.successors(q1, a1, b1)) {
            bool some = false;
            for (int b2 = 0; b2 < T2.disturbance_count() && !some; ++b2)
              for (int y : T2.successors(q2, a2, b2))
                if (related(x, y)) {
                  some = true;
                  break;
                }
            if (!some) {
              all = false;
              break;
            }
          }
        exists = all;
      }
      if (!exists) return false;
    }
    return true;
  };

  unsigned total = 1u << (n1 * n2);
  unsigned best = 0;
  for (unsigned mask = 0; mask < total; ++mask) {
    bool ok = true;
    for (int i = 0; i < n1 && ok; ++i)
      for (int j = 0; j < n2 && ok; ++j)
        if ((mask >> bit(i, j)) & 1u)
          if (!pair_ok(mask, i, j)) ok = false;
    if (ok) best |= mask;
  }
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      if ((best >> bit(i, j)) & 1u) out.push_back({i, j});
  return out;
}

// ---- unroll_eval: positive formulas by explicit finite unrolling -------------------

// Certificate length sufficient for exactness on an ultimately periodic
// trace: past this many positions a satisfied positive formula must already
// have produced its good prefix.
inline int unroll_bound(const Lasso& l, const LtlPtr& f) {
  std::function<int(const LtlPtr&)> count = [&](const LtlPtr& g) -> int {
    switch (g->kind) {
      case Ltl::Kind::atom:
      case Ltl::Kind::diamond:
        return 1;
      case Ltl::Kind::next:
        return 1 + count(g->lhs);
      default:
        return 1 + count(g->lhs) + count(g->rhs);
    }
  };
  return static_cast<int>(l.prefix.size()) +
         static_cast<int>(l.cycle.size()) * (count(f) + 1);
}

// Truth of a positive formula on a lasso via an explicitly materialized
// prefix of n positions; obligations unmet within the horizon count as
// false, which is exact once n >= unroll_bound.
template <class System>
bool unroll_eval(const System& T, const Lasso& l, const LtlPtr& f, int n,
                 double eps) {
  if (n < unroll_bound(l, f))
    throw input_error("unroll_eval: horizon too small to be conclusive");
  for (const std::string& bad : lasso_check(T, l))
    throw input_error("unroll_eval: invalid lasso: " + bad);
  std::vector<int> w(static_cast<size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) w[static_cast<size_t>(i)] = l.state_at(i);

  std::map<std::pair<int, const Ltl*>, bool> memo;
  std::function<bool(int, const LtlPtr&)> ev = [&](int i, const LtlPtr& g) -> bool {
    if (i > n) return false;
    auto key = std::make_pair(i, g.get());
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool r = false;
    int ob = T.obs_of[static_cast<size_t>(w[static_cast<size_t>(i)])];
    switch (g->kind) {
      case Ltl::Kind::atom: {
        int p = T.obs.index_of(g->obs);
        if (p < 0) throw input_error("formula names unknown observation '" + g->obs + "'");
        r = p == ob;
        break;
      }
      case Ltl::Kind::diamond: {
        int p = T.obs.index_of(g->obs);
        if (p < 0) throw input_error("formula names unknown observation '" + g->obs + "'");
        if (!approx_eq(g->eps, eps))
          throw input_error("diamond epsilon differs from ambient epsilon");
        r = leq_tol(T.obs.distance(p, ob), eps);
        break;
      }
      case Ltl::Kind::conj:
        r = ev(i, g->lhs) && ev(i, g->rhs);
        break;
      case Ltl::Kind::disj:
        r = ev(i, g->lhs) || ev(i, g->rhs);
        break;
      case Ltl::Kind::next:
        r = ev(i + 1, g->lhs);
        break;
      case Ltl::Kind::until:
        for (int j = i; j <= n && !r; ++j) {
          if (ev(j, g->rhs)) {
            r = true;
            for (int k2 = i; k2 < j; ++k2)
              if (!ev(k2, g->lhs)) {
                r = false;
                break;
              }
            if (r) break;
          }
        }
        break;
    }
    memo.emplace(key, r);
    return r;
  };
  return ev(1, f);
}

// ---- bounded_game: three-valued truth by bare game-tree search ---------------------

// Same contract as eval_bounded, computed without progression or memoization:
// coalition formulas spawn a max/min search over full length-k prefixes, each
// scored by a three-valued evaluation of the path formula on that prefix.
class BoundedGameOracle {
 public:
  BoundedGameOracle(const AgentAts& T, double eps) : T_(T), eps_(eps) {}

  V3 state3(int q, const StatePtr& f, int k) {
    if (k < 1) throw input_error("bounded_game: horizon must be >= 1");
    switch (f->kind) {
      case StateFormula::Kind::atom:
        return v3_of(T_.obs_of[static_cast<size_t>(q)] == resolve(f->obs));
      case StateFormula::Kind::diamond: {
        if (!approx_eq(f->eps, eps_))
          throw input_error("diamond epsilon differs from ambient epsilon");
        double d = T_.obs.distance(resolve(f->obs), T_.obs_of[static_cast<size_t>(q)]);
        return v3_of(leq_tol(d, eps_));
      }
      case StateFormula::Kind::neg:
        return not3(state3(q, f->lhs, k));
      case StateFormula::Kind::conj:
        return and3(state3(q, f->lhs, k), state3(q, f->rhs, k));
      case StateFormula::Kind::coalition: {
        IntSet ag = f->agents;
        IntSet others = set_difference(T_.all_agents(), ag);
        std::vector<int> prefix{q};
        return explore(prefix, f->path, k, ag, others);
      }
    }
    return V3::unknown;
  }

 private:
  V3 explore(std::vector<int>& prefix, const PathPtr& psi, int k, const IntSet& ag,
             const IntSet& others) {
    if (static_cast<int>(prefix.size()) == k) return path3(prefix, 1, psi, k);
    int q = prefix.back();
    V3 best = V3::no;
    for (const IntSet& mine : hbar_set(T_, q, ag)) {
      V3 worst = V3::yes;
      for (const IntSet& theirs : hbar_set(T_, q, others)) {
        prefix.push_back(unique_state(set_intersect(mine, theirs)));
        worst = and3(worst, explore(prefix, psi, k, ag, others));
        prefix.pop_back();
      }
      best = or3(best, worst);
    }
    return best;
  }

  // Three-valued truth of psi on the suffix of a fixed finite prefix.
  V3 path3(const std::vector<int>& pre, int i, const PathPtr& psi, int k) {
    int len = static_cast<int>(pre.size());
    switch (psi->kind) {
      case PathFormula::Kind::lift:
        return state3(pre[static_cast<size_t>(i - 1)], psi->state, k - i + 1);
      case PathFormula::Kind::neg:
        return not3(path3(pre, i, psi->lhs, k));
      case PathFormula::Kind::conj:
        return and3(path3(pre, i, psi->lhs, k), path3(pre, i, psi->rhs, k));
      case PathFormula::Kind::next:
        return i + 1 > len ? V3::unknown : path3(pre, i + 1, psi->lhs, k);
      case PathFormula::Kind::until: {
        V3 val = V3::unknown;  // beyond the horizon
        for (int j = len; j >= i; --j)
          val = or3(path3(pre, j, psi->rhs, k),
                    and3(path3(pre, j, psi->lhs, k), val));
        return val;
      }
    }
    return V3::unknown;
  }

  int resolve(const std::string& name) const {
    int p = T_.obs.index_of(name);
    if (p < 0) throw input_error("formula names unknown observation '" + name + "'");
    return p;
  }

  const AgentAts& T_;
  double eps_;
};

inline V3 bounded_game(const AgentAts& T, int q, const StatePtr& f, int k,
                       double eps) {
  BoundedGameOracle o(T, eps);
  return o.state3(q, f, k);
}

// ---- enum_strategies: realizability by exhaustive table search ---------------------

struct EnumStrategiesResult {
  bool realizable = false;
  unsigned long long tables_tried = 0;
};

// Realizability of a co-safety spec by enumerating every finite-memory
// control table over (reachable obligation, state) and playing it out.  The
// obligation space is built by an independent string-keyed progression.
// Throws input_error when the caps would be exceeded.
inline EnumStrategiesResult enum_strategies(const LabelAts& T, int q0,
                                            const LtlPtr& spec,
                                            int memory_bound = 8,
                                            unsigned long long table_cap = 2000000) {
  // DNF residual as a set of clauses of formula strings; formulas recovered
  // through a registry.
  using Clause = std::set<std::string>;
  using Dnf = std::set<Clause>;
  std::map<std::string, LtlPtr> reg;
  auto key_of = [&](const LtlPtr& f) {
    std::string s = to_string(f);
    reg.emplace(s, f);
    return s;
  };

  const Dnf dnf_true = {Clause{}};
  const Dnf dnf_false = {};
  auto canon = [&](Dnf d) {
    if (d.count(Clause{})) return dnf_true;
    Dnf out;
    for (const Clause& c : d) {
      bool subsumed = false;
      for (const Clause& c2 : d)
        if (c2 != c && std::includes(c.begin(), c.end(), c2.begin(), c2.end()))
          subsumed = true;
      if (!subsumed) out.insert(c);
    }
    return out;
  };
  auto dor = [&](const Dnf& a, const Dnf& b) {
    Dnf out = a;
    out.insert(b.begin(), b.end());
    return canon(out);
  };
  auto dand = [&](const Dnf& a, const Dnf& b) {
    Dnf out;
    for (const Clause& x : a)
      for (const Clause& y : b) {
        Clause z = x;
        z.insert(y.begin(), y.end());
        out.insert(z);
      }
    return canon(out);
  };

  std::function<Dnf(int, const LtlPtr&)> prog = [&](int q, const LtlPtr& f) -> Dnf {
    switch (f->kind) {
      case Ltl::Kind::atom: {
        int p = T.obs.index_of(f->obs);
        if (p < 0) throw input_error("spec names unknown observation '" + f->obs + "'");
        return p == T.obs_of[static_cast<size_t>(q)] ? dnf_true : dnf_false;
      }
      case Ltl::Kind::diamond: {
        int p = T.obs.index_of(f->obs);
        if (p < 0) throw input_error("spec names unknown observation '" + f->obs + "'");
        return leq_tol(T.obs.distance(p, T.obs_of[static_cast<size_t>(q)]), f->eps)
                   ? dnf_true
                   : dnf_false;
      }
      case Ltl::Kind::disj:
        return dor(prog(q, f->lhs), prog(q, f->rhs));
      case Ltl::Kind::conj:
        return dand(prog(q, f->lhs), prog(q, f->rhs));
      case Ltl::Kind::next:
        return Dnf{Clause{key_of(f->lhs)}};
      case Ltl::Kind::until:
        return dor(prog(q, f->rhs), dand(prog(q, f->lhs), Dnf{Clause{key_of(f)}}));
    }
    return dnf_false;
  };
  auto prog_dnf = [&](int q, const Dnf& d) {
    Dnf out = dnf_false;
    for (const Clause& c : d) {
      Dnf acc = dnf_true;
      for (const std::string& s : c) acc = dand(acc, prog(q, reg.at(s)));
      out = dor(out, acc);
    }
    return out;
  };

  // reachable nontrivial obligations, from every state (table domain)
  Dnf r0 = Dnf{Clause{key_of(spec)}};
  std::vector<Dnf> rs{r0};
  std::map<Dnf, int> rix{{r0, 0}};
  for (size_t head = 0; head < rs.size(); ++head) {
    Dnf cur = rs[head];
    for (int q = 0; q < T.state_count(); ++q) {
      Dnf nxt = prog_dnf(q, cur);
      if (nxt == dnf_true || nxt == dnf_false) continue;
      if (!rix.count(nxt)) {
        if (static_cast<int>(rs.size()) >= memory_bound)
          throw input_error("enum_strategies: obligation space exceeds memory bound");
        rix.emplace(nxt, static_cast<int>(rs.size()));
        rs.push_back(nxt);
      }
    }
  }

  int cells = static_cast<int>(rs.size()) * T.state_count();
  int na = T.control_count();
  long double total_ld = 1;
  for (int i = 0; i < cells; ++i) {
    total_ld *= na;
    if (total_ld > static_cast<long double>(table_cap))
      throw input_error("enum_strategies: table space exceeds cap");
  }
  unsigned long long total = static_cast<unsigned long long>(total_ld);

  // play-check: obligations evolve deterministically; cycles or FALSE lose
  auto plays_out = [&](const std::vector<int>& table) {
    std::map<std::pair<int, int>, int> seen;  // (state, residual ix) -> color
    std::function<bool(int, int)> go = [&](int q, int r) -> bool {
      Dnf after = prog_dnf(q, rs[static_cast<size_t>(r)]);
      if (after == dnf_false) return false;
      if (after == dnf_true) return true;
      auto key = std::make_pair(q, r);
      auto it = seen.find(key);
      if (it != seen.end()) return it->second == 2;  // gray (1) is a cycle: lose
      seen[key] = 1;
      int ar = rix.at(after);
      int a = table[static_cast<size_t>(ar * T.state_count() + q)];
      bool ok = true;
      for (int b = 0; b < T.disturbance_count() && ok; ++b)
        for (int v : T.successors(q, a, b))
          if (!go(v, ar)) {
            ok = false;
            break;
          }
      seen[key] = ok ? 2 : 3;
      return ok;
    };
    return go(q0, 0);
  };

  EnumStrategiesResult out;
  std::vector<int> table(static_cast<size_t>(cells), 0);
  for (unsigned long long t = 0; t < total; ++t) {
    unsigned long long x = t;
    for (int i = 0; i < cells; ++i) {
      table[static_cast<size_t>(i)] = static_cast<int>(x % static_cast<unsigned>(na));
      x /= static_cast<unsigned>(na);
    }
    ++out.tables_tried;
    if (plays_out(table)) {
      out.realizable = true;
      return out;
    }
  }
  return out;
}

}  // namespace altbisim

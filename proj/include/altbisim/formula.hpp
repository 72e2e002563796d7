#pragma once

// Formula ASTs.
//
//   StateFormula  phi ::= p | <eps>p | !phi | phi & phi | <<Ag>> psi
//   PathFormula   psi ::= phi | !psi | psi & psi | X psi | psi U psi
//   Ltl           f   ::= p | <eps>p | f & f | f | f | X f | f U f
//
// Ltl is the negation-free linear fragment used by the synthesis side; its
// disjunction is primitive, whereas state/path disjunction is the usual
// derived !(!a & !b).  Nodes are immutable and shared; rank and node counts
// are computed at construction.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "altbisim/common.hpp"

namespace altbisim {

struct StateFormula;
struct PathFormula;
using StatePtr = std::shared_ptr<const StateFormula>;
using PathPtr = std::shared_ptr<const PathFormula>;

struct StateFormula {
  enum class Kind { atom, diamond, neg, conj, coalition };
  Kind kind;
  std::string obs;    // atom, diamond
  double eps = 0.0;   // diamond
  StatePtr lhs, rhs;  // neg (lhs only), conj
  IntSet agents;      // coalition
  PathPtr path;       // coalition
  int rank = 0;
  int nodes = 0;
};

struct PathFormula {
  enum class Kind { lift, neg, conj, next, until };
  Kind kind;
  StatePtr state;    // lift: a state formula read as a path formula
  PathPtr lhs, rhs;  // neg/next (lhs only), conj, until
  int rank = 0;
  int nodes = 0;
};

struct Ltl;
using LtlPtr = std::shared_ptr<const Ltl>;

struct Ltl {
  enum class Kind { atom, diamond, conj, disj, next, until };
  Kind kind;
  std::string obs;
  double eps = 0.0;
  LtlPtr lhs, rhs;
  int nodes = 0;
};

// ---- constructors ----------------------------------------------------------

namespace sf {

inline StatePtr atom(std::string p) {
  auto n = std::make_shared<StateFormula>();
  n->kind = StateFormula::Kind::atom;
  n->obs = std::move(p);
  n->rank = 1;
  n->nodes = 1;
  return n;
}

inline StatePtr diamond(double eps, std::string p) {
  auto n = std::make_shared<StateFormula>();
  n->kind = StateFormula::Kind::diamond;
  n->obs = std::move(p);
  n->eps = eps;
  n->rank = 1;
  n->nodes = 1;
  return n;
}

inline StatePtr neg(StatePtr f) {
  auto n = std::make_shared<StateFormula>();
  n->kind = StateFormula::Kind::neg;
  n->rank = f->rank + 1;
  n->nodes = f->nodes + 1;
  n->lhs = std::move(f);
  return n;
}

inline StatePtr conj(StatePtr a, StatePtr b) {
  auto n = std::make_shared<StateFormula>();
  n->kind = StateFormula::Kind::conj;
  n->rank = std::max(a->rank, b->rank) + 1;
  n->nodes = a->nodes + b->nodes + 1;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

inline StatePtr coalition(IntSet agents, PathPtr psi) {
  auto n = std::make_shared<StateFormula>();
  n->kind = StateFormula::Kind::coalition;
  n->agents = set_sorted(std::move(agents));
  n->rank = psi->rank + 1;
  n->nodes = psi->nodes + 1;
  n->path = std::move(psi);
  return n;
}

// Derived disjunction !(!a & !b).
inline StatePtr disj(StatePtr a, StatePtr b) {
  return neg(conj(neg(std::move(a)), neg(std::move(b))));
}

// Derived truth p | !p over a designated observation.
inline StatePtr truth(std::string p) {
  auto a = atom(std::move(p));
  return disj(a, neg(a));
}

}  // namespace sf

namespace pf {

inline PathPtr lift(StatePtr f) {
  auto n = std::make_shared<PathFormula>();
  n->kind = PathFormula::Kind::lift;
  n->rank = f->rank + 1;
  n->nodes = f->nodes;  // the lift itself is not a syntactic operator
  n->state = std::move(f);
  return n;
}

inline PathPtr neg(PathPtr f) {
  auto n = std::make_shared<PathFormula>();
  n->kind = PathFormula::Kind::neg;
  n->rank = f->rank + 1;
  n->nodes = f->nodes + 1;
  n->lhs = std::move(f);
  return n;
}

inline PathPtr conj(PathPtr a, PathPtr b) {
  auto n = std::make_shared<PathFormula>();
  n->kind = PathFormula::Kind::conj;
  n->rank = std::max(a->rank, b->rank) + 1;
  n->nodes = a->nodes + b->nodes + 1;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

inline PathPtr next(PathPtr f) {
  auto n = std::make_shared<PathFormula>();
  n->kind = PathFormula::Kind::next;
  n->rank = f->rank + 1;
  n->nodes = f->nodes + 1;
  n->lhs = std::move(f);
  return n;
}

inline PathPtr until(PathPtr a, PathPtr b) {
  auto n = std::make_shared<PathFormula>();
  n->kind = PathFormula::Kind::until;
  n->rank = std::max(a->rank, b->rank) + 1;
  n->nodes = a->nodes + b->nodes + 1;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

inline PathPtr disj(PathPtr a, PathPtr b) {
  return neg(conj(neg(std::move(a)), neg(std::move(b))));
}

// a R b, expanded at construction to !((!a) U (!b)).
inline PathPtr release(PathPtr a, PathPtr b) {
  return neg(until(neg(std::move(a)), neg(std::move(b))));
}

}  // namespace pf

namespace lf {

inline LtlPtr atom(std::string p) {
  auto n = std::make_shared<Ltl>();
  n->kind = Ltl::Kind::atom;
  n->obs = std::move(p);
  n->nodes = 1;
  return n;
}

inline LtlPtr diamond(double eps, std::string p) {
  auto n = std::make_shared<Ltl>();
  n->kind = Ltl::Kind::diamond;
  n->obs = std::move(p);
  n->eps = eps;
  n->nodes = 1;
  return n;
}

inline LtlPtr binary(Ltl::Kind k, LtlPtr a, LtlPtr b) {
  auto n = std::make_shared<Ltl>();
  n->kind = k;
  n->nodes = a->nodes + b->nodes + 1;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

inline LtlPtr conj(LtlPtr a, LtlPtr b) {
  return binary(Ltl::Kind::conj, std::move(a), std::move(b));
}
inline LtlPtr disj(LtlPtr a, LtlPtr b) {
  return binary(Ltl::Kind::disj, std::move(a), std::move(b));
}
inline LtlPtr until(LtlPtr a, LtlPtr b) {
  return binary(Ltl::Kind::until, std::move(a), std::move(b));
}

inline LtlPtr next(LtlPtr f) {
  auto n = std::make_shared<Ltl>();
  n->kind = Ltl::Kind::next;
  n->nodes = f->nodes + 1;
  n->lhs = std::move(f);
  return n;
}

}  // namespace lf

// ---- structural comparison and hashing -------------------------------------

inline int cmp(const StateFormula& a, const StateFormula& b);
inline int cmp(const PathFormula& a, const PathFormula& b);

inline int cmp3(double a, double b) { return a < b ? -1 : (a > b ? 1 : 0); }

template <class T>
inline int cmp_ptr(const std::shared_ptr<const T>& a,
                   const std::shared_ptr<const T>& b) {
  if (a == b) return 0;
  if (!a || !b) return a ? 1 : -1;
  return cmp(*a, *b);
}

inline int cmp(const StateFormula& a, const StateFormula& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case StateFormula::Kind::atom:
      return a.obs.compare(b.obs) < 0 ? -1 : (a.obs == b.obs ? 0 : 1);
    case StateFormula::Kind::diamond:
      if (int c = cmp3(a.eps, b.eps)) return c;
      return a.obs.compare(b.obs) < 0 ? -1 : (a.obs == b.obs ? 0 : 1);
    case StateFormula::Kind::neg:
      return cmp_ptr(a.lhs, b.lhs);
    case StateFormula::Kind::conj:
      if (int c = cmp_ptr(a.lhs, b.lhs)) return c;
      return cmp_ptr(a.rhs, b.rhs);
    case StateFormula::Kind::coalition:
      if (a.agents != b.agents) return a.agents < b.agents ? -1 : 1;
      return cmp_ptr(a.path, b.path);
  }
  return 0;
}

inline int cmp(const PathFormula& a, const PathFormula& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case PathFormula::Kind::lift:
      return cmp_ptr(a.state, b.state);
    case PathFormula::Kind::neg:
    case PathFormula::Kind::next:
      return cmp_ptr(a.lhs, b.lhs);
    case PathFormula::Kind::conj:
    case PathFormula::Kind::until:
      if (int c = cmp_ptr(a.lhs, b.lhs)) return c;
      return cmp_ptr(a.rhs, b.rhs);
  }
  return 0;
}

inline int cmp(const Ltl& a, const Ltl& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case Ltl::Kind::atom:
      return a.obs.compare(b.obs) < 0 ? -1 : (a.obs == b.obs ? 0 : 1);
    case Ltl::Kind::diamond:
      if (int c = cmp3(a.eps, b.eps)) return c;
      return a.obs.compare(b.obs) < 0 ? -1 : (a.obs == b.obs ? 0 : 1);
    case Ltl::Kind::next:
      return cmp_ptr(a.lhs, b.lhs);
    default:
      if (int c = cmp_ptr(a.lhs, b.lhs)) return c;
      return cmp_ptr(a.rhs, b.rhs);
  }
}

inline bool equal(const StatePtr& a, const StatePtr& b) { return cmp_ptr(a, b) == 0; }
inline bool equal(const PathPtr& a, const PathPtr& b) { return cmp_ptr(a, b) == 0; }
inline bool equal(const LtlPtr& a, const LtlPtr& b) { return cmp_ptr(a, b) == 0; }

template <class Ptr>
struct FormulaLess {
  bool operator()(const Ptr& a, const Ptr& b) const { return cmp_ptr(a, b) < 0; }
};

// ---- printing ---------------------------------------------------------------
// Operator precedence, loosest to tightest:  |  <  &  <  U  <  prefix (! X <<>> <e>).

namespace detail {
enum Prec { kOr = 1, kAnd = 2, kUntil = 3, kPrefix = 4, kAtomP = 5 };

inline void print(const StateFormula& f, std::string& out, int min_prec);
inline void print(const PathFormula& f, std::string& out, int min_prec);

inline void wrap(std::string& out, bool need, const std::function<void()>& body) {
  if (need) out += "(";
  body();
  if (need) out += ")";
}

inline void print(const StateFormula& f, std::string& out, int min_prec) {
  switch (f.kind) {
    case StateFormula::Kind::atom:
      out += f.obs;
      return;
    case StateFormula::Kind::diamond:
      wrap(out, min_prec > kPrefix,
           [&] { out += "<" + fmt_double(f.eps) + "> " + f.obs; });
      return;
    case StateFormula::Kind::neg:
      wrap(out, min_prec > kPrefix, [&] {
        out += "!";
        print(*f.lhs, out, kPrefix);
      });
      return;
    case StateFormula::Kind::conj:
      wrap(out, min_prec > kAnd, [&] {
        print(*f.lhs, out, kAnd);
        out += " & ";
        print(*f.rhs, out, kAnd + 1);
      });
      return;
    case StateFormula::Kind::coalition:
      wrap(out, min_prec > kPrefix, [&] {
        std::vector<std::string> ids;
        for (int a : f.agents) ids.push_back(std::to_string(a));
        out += "<<" + join(ids, ",") + ">> ";
        print(*f.path, out, kPrefix);
      });
      return;
  }
}

inline void print(const PathFormula& f, std::string& out, int min_prec) {
  switch (f.kind) {
    case PathFormula::Kind::lift:
      print(*f.state, out, min_prec);
      return;
    case PathFormula::Kind::neg:
      wrap(out, min_prec > kPrefix, [&] {
        out += "!";
        print(*f.lhs, out, kPrefix);
      });
      return;
    case PathFormula::Kind::next:
      wrap(out, min_prec > kPrefix, [&] {
        out += "X ";
        print(*f.lhs, out, kPrefix);
      });
      return;
    case PathFormula::Kind::conj:
      wrap(out, min_prec > kAnd, [&] {
        print(*f.lhs, out, kAnd);
        out += " & ";
        print(*f.rhs, out, kAnd + 1);
      });
      return;
    case PathFormula::Kind::until:
      wrap(out, min_prec > kUntil, [&] {
        print(*f.lhs, out, kUntil + 1);
        out += " U ";
        print(*f.rhs, out, kUntil);  // right associative
      });
      return;
  }
}
}  // namespace detail

inline std::string to_string(const StatePtr& f) {
  std::string out;
  detail::print(*f, out, 1);
  return out;
}

inline std::string to_string(const PathPtr& f) {
  std::string out;
  detail::print(*f, out, 1);
  return out;
}

inline std::string to_string(const LtlPtr& f) {
  using K = Ltl::Kind;
  std::function<void(const Ltl&, std::string&, int)> pr = [&](const Ltl& n, std::string& out,
                                                              int min_prec) {
    switch (n.kind) {
      case K::atom:
        out += n.obs;
        return;
      case K::diamond:
        detail::wrap(out, min_prec > detail::kPrefix,
                     [&] { out += "<" + fmt_double(n.eps) + "> " + n.obs; });
        return;
      case K::next:
        detail::wrap(out, min_prec > detail::kPrefix, [&] {
          out += "X ";
          pr(*n.lhs, out, detail::kPrefix);
        });
        return;
      case K::until:
        detail::wrap(out, min_prec > detail::kUntil, [&] {
          pr(*n.lhs, out, detail::kUntil + 1);
          out += " U ";
          pr(*n.rhs, out, detail::kUntil);
        });
        return;
      case K::conj:
        detail::wrap(out, min_prec > detail::kAnd, [&] {
          pr(*n.lhs, out, detail::kAnd);
          out += " & ";
          pr(*n.rhs, out, detail::kAnd + 1);
        });
        return;
      case K::disj:
        detail::wrap(out, min_prec > detail::kOr, [&] {
          pr(*n.lhs, out, detail::kOr);
          out += " | ";
          pr(*n.rhs, out, detail::kOr + 1);
        });
        return;
    }
  };
  std::string out;
  pr(*f, out, 1);
  return out;
}

// ---- Ltl-side transformations ----------------------------------------------

// Blurs every exact atom p into <eps>p; the input must be plain (atoms only).
inline LtlPtr tr_epsilon(const LtlPtr& f, double eps) {
  switch (f->kind) {
    case Ltl::Kind::atom:
      return lf::diamond(eps, f->obs);
    case Ltl::Kind::diamond:
      throw input_error("tr_epsilon: input already contains <eps> atoms");
    case Ltl::Kind::next:
      return lf::next(tr_epsilon(f->lhs, eps));
    default:
      return lf::binary(f->kind, tr_epsilon(f->lhs, eps), tr_epsilon(f->rhs, eps));
  }
}

inline bool temporal_free(const Ltl& f) {
  switch (f.kind) {
    case Ltl::Kind::atom:
    case Ltl::Kind::diamond:
      return true;
    case Ltl::Kind::next:
    case Ltl::Kind::until:
      return false;
    default:
      return temporal_free(*f.lhs) && temporal_free(*f.rhs);
  }
}

inline StatePtr to_state(const LtlPtr& f) {
  switch (f->kind) {
    case Ltl::Kind::atom:
      return sf::atom(f->obs);
    case Ltl::Kind::diamond:
      return sf::diamond(f->eps, f->obs);
    case Ltl::Kind::conj:
      return sf::conj(to_state(f->lhs), to_state(f->rhs));
    case Ltl::Kind::disj:
      return sf::disj(to_state(f->lhs), to_state(f->rhs));
    default:
      throw input_error("to_state: temporal operator in state position");
  }
}

// Reads an Ltl formula as a PathFormula.  Maximal temporal-free subtrees
// become a single lifted state formula; disjunction elsewhere expands to its
// !(!a & !b) encoding.
inline PathPtr to_path(const LtlPtr& f) {
  if (temporal_free(*f)) return pf::lift(to_state(f));
  switch (f->kind) {
    case Ltl::Kind::conj:
      return pf::conj(to_path(f->lhs), to_path(f->rhs));
    case Ltl::Kind::disj:
      return pf::disj(to_path(f->lhs), to_path(f->rhs));
    case Ltl::Kind::next:
      return pf::next(to_path(f->lhs));
    case Ltl::Kind::until:
      return pf::until(to_path(f->lhs), to_path(f->rhs));
    default:
      return pf::lift(to_state(f));  // unreachable: atoms are temporal-free
  }
}

}  // namespace altbisim

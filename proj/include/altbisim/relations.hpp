#pragma once

// The formula relations H (state formulas) and E (path formulas) for a fixed
// coalition Ag and epsilon.  Both are graphs of partial bijections between a
// "left" grammar (plain atoms at the leaves, negation only over right
// formulas) and a "right" grammar (<eps>-atoms at the leaves, negation only
// over left formulas); conjunction, X, U and <<Ag>> are congruences.  The
// partner functions below realize the bijection by structural recursion and
// return nothing when the input lies outside the domain.
//
// Partners have equal rank, and left/right truth transfers along alternating
// approximate bisimulations — the transfer check below tests the single-state
// implication (phi implies its partner at the same state).

#include <optional>
#include <string>

#include "altbisim/agent_system.hpp"
#include "altbisim/common.hpp"
#include "altbisim/eval.hpp"
#include "altbisim/formula.hpp"

namespace altbisim {

namespace detail {

struct PartnerCtx {
  IntSet agents;
  double eps;
};

inline void check_coalition(const StateFormula& f, const PartnerCtx& c) {
  if (f.agents != c.agents)
    throw input_error("coalition <<" + [&] {
      std::vector<std::string> ids;
      for (int a : f.agents) ids.push_back(std::to_string(a));
      return join(ids, ",");
    }() + ">> differs from the relation's coalition");
}

inline std::optional<StatePtr> ltr_state(const StatePtr& f, const PartnerCtx& c);
inline std::optional<StatePtr> rtl_state(const StatePtr& f, const PartnerCtx& c);
inline std::optional<PathPtr> ltr_path(const PathPtr& f, const PartnerCtx& c);
inline std::optional<PathPtr> rtl_path(const PathPtr& f, const PartnerCtx& c);

inline std::optional<StatePtr> ltr_state(const StatePtr& f, const PartnerCtx& c) {
  switch (f->kind) {
    case StateFormula::Kind::atom:
      return sf::diamond(c.eps, f->obs);
    case StateFormula::Kind::diamond:
      return std::nullopt;  // <eps>p is never a left formula
    case StateFormula::Kind::neg: {
      auto inner = rtl_state(f->lhs, c);
      if (!inner) return std::nullopt;
      return sf::neg(*inner);
    }
    case StateFormula::Kind::conj: {
      auto a = ltr_state(f->lhs, c);
      auto b = ltr_state(f->rhs, c);
      if (!a || !b) return std::nullopt;
      return sf::conj(*a, *b);
    }
    case StateFormula::Kind::coalition: {
      check_coalition(*f, c);
      auto p = ltr_path(f->path, c);
      if (!p) return std::nullopt;
      return sf::coalition(f->agents, *p);
    }
  }
  return std::nullopt;
}

inline std::optional<StatePtr> rtl_state(const StatePtr& f, const PartnerCtx& c) {
  switch (f->kind) {
    case StateFormula::Kind::atom:
      return std::nullopt;  // plain atoms are never right formulas
    case StateFormula::Kind::diamond:
      if (!approx_eq(f->eps, c.eps))
        throw input_error("diamond epsilon " + fmt_double(f->eps) +
                          " differs from the relation's epsilon " +
                          fmt_double(c.eps));
      return sf::atom(f->obs);
    case StateFormula::Kind::neg: {
      auto inner = ltr_state(f->lhs, c);
      if (!inner) return std::nullopt;
      return sf::neg(*inner);
    }
    case StateFormula::Kind::conj: {
      auto a = rtl_state(f->lhs, c);
      auto b = rtl_state(f->rhs, c);
      if (!a || !b) return std::nullopt;
      return sf::conj(*a, *b);
    }
    case StateFormula::Kind::coalition: {
      check_coalition(*f, c);
      auto p = rtl_path(f->path, c);
      if (!p) return std::nullopt;
      return sf::coalition(f->agents, *p);
    }
  }
  return std::nullopt;
}

inline std::optional<PathPtr> ltr_path(const PathPtr& f, const PartnerCtx& c) {
  switch (f->kind) {
    case PathFormula::Kind::lift: {
      auto s = ltr_state(f->state, c);
      if (!s) return std::nullopt;
      return pf::lift(*s);
    }
    case PathFormula::Kind::neg: {
      auto inner = rtl_path(f->lhs, c);
      if (!inner) return std::nullopt;
      return pf::neg(*inner);
    }
    case PathFormula::Kind::conj: {
      auto a = ltr_path(f->lhs, c);
      auto b = ltr_path(f->rhs, c);
      if (!a || !b) return std::nullopt;
      return pf::conj(*a, *b);
    }
    case PathFormula::Kind::next: {
      auto a = ltr_path(f->lhs, c);
      if (!a) return std::nullopt;
      return pf::next(*a);
    }
    case PathFormula::Kind::until: {
      auto a = ltr_path(f->lhs, c);
      auto b = ltr_path(f->rhs, c);
      if (!a || !b) return std::nullopt;
      return pf::until(*a, *b);
    }
  }
  return std::nullopt;
}

inline std::optional<PathPtr> rtl_path(const PathPtr& f, const PartnerCtx& c) {
  switch (f->kind) {
    case PathFormula::Kind::lift: {
      auto s = rtl_state(f->state, c);
      if (!s) return std::nullopt;
      return pf::lift(*s);
    }
    case PathFormula::Kind::neg: {
      auto inner = ltr_path(f->lhs, c);
      if (!inner) return std::nullopt;
      return pf::neg(*inner);
    }
    case PathFormula::Kind::conj: {
      auto a = rtl_path(f->lhs, c);
      auto b = rtl_path(f->rhs, c);
      if (!a || !b) return std::nullopt;
      return pf::conj(*a, *b);
    }
    case PathFormula::Kind::next: {
      auto a = rtl_path(f->lhs, c);
      if (!a) return std::nullopt;
      return pf::next(*a);
    }
    case PathFormula::Kind::until: {
      auto a = rtl_path(f->lhs, c);
      auto b = rtl_path(f->rhs, c);
      if (!a || !b) return std::nullopt;
      return pf::until(*a, *b);
    }
  }
  return std::nullopt;
}

}  // namespace detail

// The H-partner of a left state formula, or nothing when phi lies outside
// the domain of H.
inline std::optional<StatePtr> h_partner(const StatePtr& phi, const IntSet& agents,
                                         double eps) {
  detail::PartnerCtx c{set_sorted(agents), eps};
  return detail::ltr_state(phi, c);
}

// The E-partner of a left path formula.
inline std::optional<PathPtr> e_partner(const PathPtr& phi, const IntSet& agents,
                                        double eps) {
  detail::PartnerCtx c{set_sorted(agents), eps};
  return detail::ltr_path(phi, c);
}

inline bool decide_H(const StatePtr& phi, const StatePtr& psi, const IntSet& agents,
                     double eps) {
  auto p = h_partner(phi, agents, eps);
  return p && equal(*p, psi);
}

inline bool decide_E(const PathPtr& phi, const PathPtr& psi, const IntSet& agents,
                     double eps) {
  auto p = e_partner(phi, agents, eps);
  return p && equal(*p, psi);
}

struct TransferCheck {
  bool in_domain = false;
  StatePtr partner;
  bool left_value = false;
  bool right_value = false;
  bool implication_holds = true;  // !left_value || right_value
};

// Evaluates phi and its H-partner at the same state; the implication
// phi => partner is the single-system shadow of the truth-transfer property.
inline TransferCheck check_transfer(const AgentAts& T, int q, const StatePtr& phi,
                                    const IntSet& agents, double eps) {
  TransferCheck out;
  auto p = h_partner(phi, agents, eps);
  if (!p) return out;
  out.in_domain = true;
  out.partner = *p;
  out.left_value = eval_state(T, q, phi, eps);
  out.right_value = eval_state(T, q, out.partner, eps);
  out.implication_holds = !out.left_value || out.right_value;
  return out;
}

}  // namespace altbisim

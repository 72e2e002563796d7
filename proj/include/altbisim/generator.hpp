#pragma once

// Seeded random instance generators.  All constructions are valid by design:
// agent systems are built from an injective joint-choice table (which forces
// the singleton intersection property), labeled systems are non-blocking by
// construction, and refinement pairs come with an alternating approximate
// bisimulation between sample and abstraction baked in.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "altbisim/agent_system.hpp"
#include "altbisim/common.hpp"
#include "altbisim/labeled_system.hpp"
#include "altbisim/metric.hpp"

namespace altbisim {

struct ObsGenSpec {
  bool chebyshev = false;  // table space over a hidden grid embedding otherwise
  int count = 3;
  int dim = 2;
};

struct AgentGenSpec {
  std::string name = "G";
  int states = 3;
  int agents = 2;
  int max_menu = 2;  // per-agent cap on choice-set count per state
};

struct LabelGenSpec {
  std::string name = "G";
  int states = 3;
  int controls = 2;
  int disturbances = 2;
  double density = 0.4;  // chance of each extra successor
};

namespace detail {

// Distinct points on the half-integer grid [0,2]^dim.
inline std::vector<std::vector<double>> grid_points(int count, int dim, Rng& rng) {
  if (count < 1 || dim < 1) throw input_error("observation space spec must be positive");
  std::vector<std::vector<double>> pts;
  int attempts = 0;
  while (static_cast<int>(pts.size()) < count) {
    if (++attempts > 1000)
      throw input_error("could not sample enough distinct observation points");
    std::vector<double> p(static_cast<size_t>(dim));
    for (double& c : p) c = 0.5 * rng.uniform(0, 4);
    bool dup = false;
    for (const auto& q : pts)
      if (q == p) dup = true;
    if (!dup) pts.push_back(std::move(p));
  }
  return pts;
}

inline double cheb_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace detail

inline MetricObsSpace gen_obs_space(const ObsGenSpec& spec, Rng& rng) {
  auto pts = detail::grid_points(spec.count, spec.dim, rng);
  if (spec.chebyshev) return make_chebyshev_space(spec.dim, pts);
  std::vector<std::string> names;
  for (int i = 0; i < spec.count; ++i) names.push_back("p" + std::to_string(i + 1));
  std::map<std::pair<std::string, std::string>, double> d;
  for (int i = 0; i < spec.count; ++i)
    for (int j = i + 1; j < spec.count; ++j)
      d[{names[static_cast<size_t>(i)], names[static_cast<size_t>(j)]}] =
          detail::cheb_dist(pts[static_cast<size_t>(i)], pts[static_cast<size_t>(j)]);
  return make_table_space(names, d);
}

// Agent system over a given observation space.  Per state, each agent gets a
// menu of choice sets derived from an injective map of joint choices to
// successor states; injectivity makes every full intersection a singleton.
inline AgentAts gen_agent_ats(const AgentGenSpec& g, const MetricObsSpace& obs,
                              Rng& rng) {
  if (g.states < 1 || g.agents < 1 || g.max_menu < 1)
    throw input_error("agent system spec must be positive");
  if (obs.size() == 0) throw input_error("observation space is empty");
  AgentAts T;
  T.name = g.name;
  T.obs = obs;
  T.agent_count = g.agents;
  for (int q = 0; q < g.states; ++q) {
    T.state_names.push_back("s" + std::to_string(q + 1));
    T.obs_of.push_back(rng.uniform(0, obs.size() - 1));
  }
  T.choices.assign(static_cast<size_t>(g.states), {});
  for (int q = 0; q < g.states; ++q) {
    // menu sizes with product <= |S| so joint choices can map injectively
    std::vector<int> menu(static_cast<size_t>(g.agents), 1);
    int cells = 1;
    for (int tries = 0; tries < 3 * g.agents; ++tries) {
      int i = rng.uniform(0, g.agents - 1);
      int m = menu[static_cast<size_t>(i)];
      if (m < g.max_menu && cells / m * (m + 1) <= g.states && rng.chance(0.6)) {
        menu[static_cast<size_t>(i)] = m + 1;
        cells = cells / m * (m + 1);
      }
    }
    std::vector<int> targets;
    for (int v = 0; v < g.states; ++v) targets.push_back(v);
    rng.shuffle(targets);
    targets.resize(static_cast<size_t>(cells));

    auto& row = T.choices[static_cast<size_t>(q)];
    row.assign(static_cast<size_t>(g.agents), {});
    for (int i = 0; i < g.agents; ++i)
      row[static_cast<size_t>(i)].assign(static_cast<size_t>(menu[static_cast<size_t>(i)]), {});
    for (int cell = 0; cell < cells; ++cell) {
      int rest = cell;
      for (int i = 0; i < g.agents; ++i) {
        int c = rest % menu[static_cast<size_t>(i)];
        rest /= menu[static_cast<size_t>(i)];
        row[static_cast<size_t>(i)][static_cast<size_t>(c)].push_back(
            targets[static_cast<size_t>(cell)]);
      }
    }
    for (auto& m : row)
      for (auto& cs : m) cs = set_sorted(cs);
  }
  return T;
}

// Labeled system over a given observation space; every (state, control,
// disturbance) cell gets at least one successor.
inline LabelAts gen_label_ats(const LabelGenSpec& g, const MetricObsSpace& obs,
                              Rng& rng) {
  if (g.states < 1 || g.controls < 1 || g.disturbances < 1)
    throw input_error("labeled system spec must be positive");
  if (obs.size() == 0) throw input_error("observation space is empty");
  LabelAts T;
  T.name = g.name;
  T.obs = obs;
  for (int q = 0; q < g.states; ++q) {
    T.state_names.push_back("s" + std::to_string(q + 1));
    T.obs_of.push_back(rng.uniform(0, obs.size() - 1));
  }
  for (int a = 0; a < g.controls; ++a) T.control_names.push_back("a" + std::to_string(a + 1));
  for (int b = 0; b < g.disturbances; ++b)
    T.disturbance_names.push_back("b" + std::to_string(b + 1));
  T.succ.assign(static_cast<size_t>(g.states),
                std::vector<std::vector<IntSet>>(
                    static_cast<size_t>(g.controls),
                    std::vector<IntSet>(static_cast<size_t>(g.disturbances))));
  for (int q = 0; q < g.states; ++q)
    for (int a = 0; a < g.controls; ++a)
      for (int b = 0; b < g.disturbances; ++b) {
        IntSet s{rng.uniform(0, g.states - 1)};
        for (int v = 0; v < g.states; ++v)
          if (rng.chance(g.density)) s.push_back(v);
        T.succ[static_cast<size_t>(q)][static_cast<size_t>(a)][static_cast<size_t>(b)] =
            set_sorted(s);
      }
  return T;
}

// ---- refinement pairs ---------------------------------------------------------------

struct AeaPair {
  LabelAts abstraction;
  LabelAts sample;
  double eps = 0;
  std::vector<int> abs_of;  // sample state -> abstract state it refines
};

// Sample/abstraction pair that is alternating approximately bisimilar at the
// given eps by construction: the sample duplicates each abstract state into
// one or two copies, perturbs observations by at most eps along each axis,
// and keeps one copy of every abstract successor per transition cell.
inline AeaPair gen_aea_pair(const LabelGenSpec& g, int dim, double eps, Rng& rng) {
  if (eps < 0) throw input_error("epsilon must be nonnegative");
  AeaPair out;
  out.eps = eps;

  auto abs_pts = detail::grid_points(g.states, std::max(dim, 1), rng);
  std::vector<std::vector<double>> pts = abs_pts;
  std::vector<int> abs_obs;
  for (int q = 0; q < g.states; ++q) abs_obs.push_back(q);

  // copies and their perturbed points (deduplicated into the shared space)
  std::vector<int> copy_abs;     // copy -> abstract state
  std::vector<int> copy_obs;     // copy -> point index
  std::vector<std::vector<int>> copies_of(static_cast<size_t>(g.states));
  auto point_index = [&](const std::vector<double>& p) {
    for (size_t i = 0; i < pts.size(); ++i)
      if (pts[i] == p) return static_cast<int>(i);
    pts.push_back(p);
    return static_cast<int>(pts.size()) - 1;
  };
  for (int q = 0; q < g.states; ++q) {
    int n_copies = 1 + (rng.chance(0.5) ? 1 : 0);
    for (int c = 0; c < n_copies; ++c) {
      std::vector<double> p = abs_pts[static_cast<size_t>(q)];
      for (double& x : p) {
        int step = rng.uniform(-1, 1);  // stay within eps along every axis
        x += step * eps;
      }
      copies_of[static_cast<size_t>(q)].push_back(static_cast<int>(copy_abs.size()));
      copy_abs.push_back(q);
      copy_obs.push_back(point_index(p));
    }
  }
  MetricObsSpace space = make_chebyshev_space(std::max(dim, 1), pts);

  LabelAts& A = out.abstraction;
  A.name = g.name + "_abs";
  A.obs = space;
  for (int q = 0; q < g.states; ++q) {
    A.state_names.push_back("t" + std::to_string(q + 1));
    A.obs_of.push_back(abs_obs[static_cast<size_t>(q)]);
  }
  for (int a = 0; a < g.controls; ++a) A.control_names.push_back("a" + std::to_string(a + 1));
  for (int b = 0; b < g.disturbances; ++b)
    A.disturbance_names.push_back("b" + std::to_string(b + 1));
  A.succ.assign(static_cast<size_t>(g.states),
                std::vector<std::vector<IntSet>>(
                    static_cast<size_t>(g.controls),
                    std::vector<IntSet>(static_cast<size_t>(g.disturbances))));
  for (int q = 0; q < g.states; ++q)
    for (int a = 0; a < g.controls; ++a)
      for (int b = 0; b < g.disturbances; ++b) {
        IntSet s{rng.uniform(0, g.states - 1)};
        for (int v = 0; v < g.states; ++v)
          if (rng.chance(g.density)) s.push_back(v);
        A.succ[static_cast<size_t>(q)][static_cast<size_t>(a)][static_cast<size_t>(b)] =
            set_sorted(s);
      }

  LabelAts& S = out.sample;
  S.name = g.name + "_sample";
  S.obs = space;
  int n_copies = static_cast<int>(copy_abs.size());
  for (int c = 0; c < n_copies; ++c) {
    S.state_names.push_back("s" + std::to_string(c + 1));
    S.obs_of.push_back(copy_obs[static_cast<size_t>(c)]);
  }
  S.control_names = A.control_names;
  S.disturbance_names = A.disturbance_names;
  S.succ.assign(static_cast<size_t>(n_copies),
                std::vector<std::vector<IntSet>>(
                    static_cast<size_t>(g.controls),
                    std::vector<IntSet>(static_cast<size_t>(g.disturbances))));
  for (int c = 0; c < n_copies; ++c) {
    int q = copy_abs[static_cast<size_t>(c)];
    for (int a = 0; a < g.controls; ++a)
      for (int b = 0; b < g.disturbances; ++b) {
        IntSet s;
        for (int t : A.succ[static_cast<size_t>(q)][static_cast<size_t>(a)][static_cast<size_t>(b)])
          s.push_back(rng.pick(copies_of[static_cast<size_t>(t)]));
        S.succ[static_cast<size_t>(c)][static_cast<size_t>(a)][static_cast<size_t>(b)] =
            set_sorted(s);
      }
  }
  out.abs_of = copy_abs;
  return out;
}

}  // namespace altbisim

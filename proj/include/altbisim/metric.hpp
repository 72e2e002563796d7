#pragma once

// Finite metric observation spaces: either an explicit symmetric distance
// table over named points, or points embedded in R^n under the Chebyshev
// (max-coordinate) distance.  Both transition-system kinds carry one of
// these by value; operations on two systems require structurally identical
// spaces.

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "altbisim/common.hpp"

namespace altbisim {

struct MetricObsSpace {
  enum class Kind { table, chebyshev };

  Kind kind = Kind::table;
  // Canonical point names, in declaration order.  In chebyshev mode the name
  // of a point is its rendered coordinate vector, e.g. "(0,0.5)".
  std::vector<std::string> names;
  // table mode: full |P| x |P| distance matrix.
  std::vector<std::vector<double>> dist;
  // chebyshev mode: coordinates per point.
  std::vector<std::vector<double>> points;
  int dim = 0;

  int size() const { return static_cast<int>(names.size()); }

  int index_of(std::string_view name) const {
    for (int i = 0; i < size(); ++i)
      if (names[static_cast<size_t>(i)] == name) return i;
    return -1;
  }

  double distance(int p, int q) const {
    if (p < 0 || q < 0 || p >= size() || q >= size())
      throw input_error("observation index out of range");
    if (kind == Kind::table) return dist[static_cast<size_t>(p)][static_cast<size_t>(q)];
    double d = 0;
    for (int k = 0; k < dim; ++k)
      d = std::max(d, std::abs(points[static_cast<size_t>(p)][static_cast<size_t>(k)] -
                               points[static_cast<size_t>(q)][static_cast<size_t>(k)]));
    return d;
  }

  // Structural identity: two systems share an observation space iff their
  // embedded spaces compare equal (names, mode and all numeric data).
  bool same_space(const MetricObsSpace& o) const {
    return kind == o.kind && names == o.names && dist == o.dist &&
           points == o.points && dim == o.dim;
  }

  // Metric-axiom check.  Table distances must be exactly symmetric as given;
  // identity and triangle inequality get the standard numeric slack.
  std::vector<std::string> validate() const {
    std::vector<std::string> bad;
    int n = size();
    if (n == 0) bad.push_back("observation space is empty");
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double d = distance(i, j);
        if (d < 0)
          bad.push_back("negative distance " + names[static_cast<size_t>(i)] + " " +
                        names[static_cast<size_t>(j)]);
        if (i == j && !approx_eq(d, 0))
          bad.push_back("nonzero self-distance at " + names[static_cast<size_t>(i)]);
        if (i != j && approx_eq(d, 0))
          bad.push_back("zero distance between distinct points " +
                        names[static_cast<size_t>(i)] + " " + names[static_cast<size_t>(j)]);
        if (kind == Kind::table && dist[static_cast<size_t>(i)][static_cast<size_t>(j)] !=
                                       dist[static_cast<size_t>(j)][static_cast<size_t>(i)])
          bad.push_back("asymmetric table entry " + names[static_cast<size_t>(i)] + " " +
                        names[static_cast<size_t>(j)]);
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (!leq_tol(distance(i, k), distance(i, j) + distance(j, k)))
            bad.push_back("triangle inequality fails at " + names[static_cast<size_t>(i)] +
                          " " + names[static_cast<size_t>(j)] + " " +
                          names[static_cast<size_t>(k)]);
    return bad;
  }
};

inline std::string render_point(const std::vector<double>& coords) {
  std::vector<std::string> parts;
  parts.reserve(coords.size());
  for (double c : coords) parts.push_back(fmt_double(c));
  return "(" + join(parts, ",") + ")";
}

// Builds a table-mode space from named points and pairwise distances
// (unordered pairs; self-distances implicit zero).
inline MetricObsSpace make_table_space(
    std::vector<std::string> names,
    const std::map<std::pair<std::string, std::string>, double>& pairs) {
  MetricObsSpace sp;
  sp.kind = MetricObsSpace::Kind::table;
  sp.names = std::move(names);
  int n = sp.size();
  sp.dist.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (const auto& [key, d] : pairs) {
    int i = sp.index_of(key.first), j = sp.index_of(key.second);
    if (i < 0 || j < 0)
      throw input_error("metric entry names unknown observation: " + key.first +
                        " " + key.second);
    sp.dist[static_cast<size_t>(i)][static_cast<size_t>(j)] = d;
    sp.dist[static_cast<size_t>(j)][static_cast<size_t>(i)] = d;
  }
  return sp;
}

// Builds a chebyshev-mode space; point names are canonical renderings of the
// coordinate vectors, so formulas can refer to them as written.
inline MetricObsSpace make_chebyshev_space(int dim,
                                           std::vector<std::vector<double>> pts) {
  MetricObsSpace sp;
  sp.kind = MetricObsSpace::Kind::chebyshev;
  sp.dim = dim;
  sp.points = std::move(pts);
  for (const auto& p : sp.points) {
    if (static_cast<int>(p.size()) != dim)
      throw input_error("chebyshev point has wrong dimension");
    sp.names.push_back(render_point(p));
  }
  return sp;
}

}  // namespace altbisim

#pragma once

// Ultimately periodic traces: a finite prefix followed by a nonempty cycle,
// both given as state indices.  Positions are 1-based and infinite.

#include <string>
#include <vector>

#include "altbisim/agent_system.hpp"
#include "altbisim/common.hpp"
#include "altbisim/labeled_system.hpp"

namespace altbisim {

struct Lasso {
  std::vector<int> prefix;
  std::vector<int> cycle;  // nonempty

  int fold_size() const {
    return static_cast<int>(prefix.size() + cycle.size());
  }

  // State at 1-based position i of the infinite trace.
  int state_at(int i) const {
    if (i < 1) throw input_error("lasso position must be >= 1");
    int m = static_cast<int>(prefix.size());
    int k = static_cast<int>(cycle.size());
    if (i <= m) return prefix[static_cast<size_t>(i - 1)];
    return cycle[static_cast<size_t>((i - 1 - m) % k)];
  }

  // Successor position in the folded prefix+cycle graph (positions 1..m+k).
  int fold_next(int i) const {
    int m = static_cast<int>(prefix.size());
    int k = static_cast<int>(cycle.size());
    return i < m + k ? i + 1 : m + 1;
  }
};

// A lasso is valid for a system iff every folded edge (including the wrap
// back into the cycle) is a one-step transition.
template <class System>
std::vector<std::string> lasso_check(const System& T, const Lasso& l) {
  std::vector<std::string> bad;
  if (l.cycle.empty()) {
    bad.push_back("cycle is empty");
    return bad;
  }
  auto name = [&](int q) {
    return q >= 0 && q < T.state_count() ? T.state_names[static_cast<size_t>(q)]
                                         : "#" + std::to_string(q);
  };
  int n = l.fold_size();
  for (int i = 1; i <= n; ++i) {
    int q = l.state_at(i);
    if (q < 0 || q >= T.state_count()) {
      bad.push_back("position " + std::to_string(i) + " names unknown state");
      continue;
    }
    int j = l.fold_next(i);
    int r = l.state_at(j);
    if (r < 0 || r >= T.state_count()) continue;  // reported at its own index
    if (!set_contains(successors(T, q), r))
      bad.push_back("no transition " + name(q) + " -> " + name(r) +
                    " (positions " + std::to_string(i) + "," + std::to_string(j) +
                    ")");
  }
  return bad;
}

}  // namespace altbisim

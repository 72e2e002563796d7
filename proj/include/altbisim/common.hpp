#pragma once

// Shared plumbing: error types, the numeric tolerance policy, sorted-vector
// set helpers and a deterministic RNG facade used by the fixture generator.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace altbisim {

// Bad arguments, unsatisfied preconditions, malformed systems handed to an
// operation that requires valid ones.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A strategy table consulted outside its domain (undefined reachable history).
struct strategy_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact evaluation requested for a formula outside the supported core
// fragment; callers should fall back to bounded evaluation.
struct unsupported_exact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All metric-vs-epsilon comparisons in the toolkit go through leq_tol so the
// absolute tolerance is applied in exactly one place.
inline constexpr double kEpsTol = 1e-9;

inline bool leq_tol(double a, double b) { return a <= b + kEpsTol; }

inline bool approx_eq(double a, double b) {
  return leq_tol(a, b) && leq_tol(b, a);
}

// Shortest round-trip decimal rendering; keeps emitted files and JSON stable.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---- sorted-vector sets ---------------------------------------------------
// State/agent sets are kept as strictly increasing vectors of indices.

using IntSet = std::vector<int>;

inline IntSet set_sorted(IntSet v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline IntSet set_intersect(const IntSet& a, const IntSet& b) {
  IntSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

inline IntSet set_union(const IntSet& a, const IntSet& b) {
  IntSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

inline IntSet set_difference(const IntSet& a, const IntSet& b) {
  IntSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

inline bool set_contains(const IntSet& a, int x) {
  return std::binary_search(a.begin(), a.end(), x);
}

inline bool set_subset(const IntSet& a, const IntSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline IntSet range_set(int n) {
  IntSet out(n);
  for (int i = 0; i < n; ++i) out[i] = i;
  return out;
}

inline std::string join(const std::vector<std::string>& parts,
                        const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string join_ints(const IntSet& xs, const std::string& sep = ",") {
  std::vector<std::string> parts;
  for (int x : xs) parts.push_back(std::to_string(x));
  return join(parts, sep);
}

// ---- deterministic RNG ----------------------------------------------------
// std::uniform_int_distribution is implementation-defined, so fixtures roll
// their own rejection sampling on top of mt19937_64 to stay reproducible.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform integer in [lo, hi], inclusive.
  int uniform(int lo, int hi) {
    if (lo > hi) throw input_error("Rng::uniform: empty range");
    std::uint64_t span = static_cast<std::uint64_t>(hi) - lo + 1;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

  bool chance(double p) { return next_unit() < p; }

  // Uniform element of a nonempty vector.
  template <class T>
  const T& pick(const std::vector<T>& v) {
    if (v.empty()) throw input_error("Rng::pick: empty vector");
    return v[static_cast<size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
      std::swap(v[static_cast<size_t>(i)],
                v[static_cast<size_t>(uniform(0, i))]);
  }

  std::uint64_t raw() { return eng_(); }

 private:
  double next_unit() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  std::mt19937_64 eng_;
};

}  // namespace altbisim

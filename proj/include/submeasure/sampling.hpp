#pragma once

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include "submeasure/correspondence.hpp"
#include "submeasure/strong_submeasure.hpp"

// Random instances for property checks.

namespace submeasure {

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo = -3.0, double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline FunctionVector random_function(std::mt19937_64& rng, const SpaceRef& space) {
  return FunctionVector(space, random_values(rng, space->size()));
}

/// Integer-valued test function.
inline FunctionVector random_integer_function(std::mt19937_64& rng, const SpaceRef& space, int lo = -5, int hi = 5) {
  std::uniform_int_distribution<int> u(lo, hi);
  std::vector<double> v(space->size());
  for (double& x : v) x = u(rng);
  return FunctionVector(space, std::move(v));
}

inline SignedMeasure random_positive_measure(std::mt19937_64& rng, const SpaceRef& space, double mass = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution keep(0.5);
  std::vector<double> w(space->size(), 0.0);
  double total = 0.0;
  for (double& x : w) {
    if (keep(rng)) {
      x = u(rng);
      total += x;
    }
  }
  if (total == 0.0) {
    w[std::uniform_int_distribution<std::size_t>(0, w.size() - 1)(rng)] = 1.0;
    total = 1.0;
  }
  for (double& x : w) x *= mass / total;
  return SignedMeasure(space, std::move(w));
}

inline SignedMeasure random_signed_measure(std::mt19937_64& rng, const SpaceRef& space) {
  return SignedMeasure(space, random_values(rng, space->size(), -1.0, 1.0));
}

/// Positive submeasure: a sup of 1..max_gens random positive measures of
/// random masses, optionally plus a second such block.
inline StrongSubmeasure random_positive_submeasure(std::mt19937_64& rng, const SpaceRef& space,
                                                   std::size_t max_gens = 4) {
  std::uniform_int_distribution<std::size_t> count(1, max_gens);
  std::uniform_real_distribution<double> mass(0.5, 2.0);
  auto block = [&] {
    std::vector<SignedMeasure> gens;
    const std::size_t k = count(rng);
    for (std::size_t i = 0; i < k; ++i) gens.push_back(random_positive_measure(rng, space, mass(rng)));
    return StrongSubmeasure(space, gens);
  };
  StrongSubmeasure mu = block();
  if (std::bernoulli_distribution(0.3)(rng)) mu = mu.plus(block());
  return mu;
}

inline StrongSubmeasure random_signed_submeasure(std::mt19937_64& rng, const SpaceRef& space,
                                                 std::size_t max_gens = 4) {
  std::uniform_int_distribution<std::size_t> count(1, max_gens);
  std::vector<SignedMeasure> gens;
  const std::size_t k = count(rng);
  for (std::size_t i = 0; i < k; ++i) gens.push_back(random_signed_measure(rng, space));
  return StrongSubmeasure(space, gens);
}

/// Equal-dimension correspondence X -> Y of generic degree d, |X| = d |Y|,
/// with a few indeterminate points and random limit data over every
/// exceptional target.
inline Correspondence random_correspondence(std::mt19937_64& rng, const SpaceRef& x, const SpaceRef& y, unsigned d,
                                            std::size_t n_indeterminate) {
  const std::size_t ny = y->size();
  std::vector<std::size_t> slots;
  for (std::size_t j = 0; j < ny; ++j)
    for (unsigned k = 0; k < d; ++k) slots.push_back(j);
  std::shuffle(slots.begin(), slots.end(), rng);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < x->size(); ++i) edges.push_back({i, slots[i % slots.size()], 1});
  std::vector<std::size_t> order(x->size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<std::size_t> pick_y(0, ny - 1);
  std::uniform_int_distribution<std::size_t> pick_x(0, x->size() - 1);
  for (std::size_t k = 0; k < n_indeterminate && k < order.size(); ++k) {
    if (ny < 2) break;
    const std::size_t extra = 1 + rng() % 2;
    const std::size_t base = edges[order[k]].y;
    for (std::size_t e = 0; e < extra; ++e) {
      std::size_t t = pick_y(rng);
      while (t == base) t = pick_y(rng);
      edges.push_back({order[k], t, 1});
    }
  }
  // Which targets end up exceptional: those hit from multi-valued points.
  std::vector<std::vector<std::size_t>> targets(x->size());
  for (const auto& e : edges) targets[e.x].push_back(e.y);
  std::vector<bool> exceptional(ny, false);
  for (auto& t : targets) {
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (t.size() > 1)
      for (std::size_t j : t) exceptional[j] = true;
  }
  CorrespondenceOptions opt;
  for (std::size_t j = 0; j < ny; ++j) {
    if (!exceptional[j]) continue;
    std::vector<LimitGroup> groups;
    const std::size_t ng = 1 + rng() % 3;
    for (std::size_t g = 0; g < ng; ++g) {
      LimitGroup group;
      for (unsigned k = 0; k < d; ++k) group.emplace_back(pick_x(rng), 1.0);
      groups.push_back(std::move(group));
    }
    opt.limit_fibers[j] = std::move(groups);
  }
  return Correspondence(x, y, std::move(edges), d, std::move(opt));
}

}  // namespace submeasure

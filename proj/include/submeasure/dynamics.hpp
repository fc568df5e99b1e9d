#pragma once

// Invariant positive submeasures of an endo-correspondence: Cesaro averages,
// monotone fixed-point iteration from sub- and super-invariant seeds, and a
// sampler of invariant submeasures built from invariant sets and cycles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "submeasure/correspondence.hpp"
#include "submeasure/error.hpp"
#include "submeasure/measure.hpp"
#include "submeasure/strong_submeasure.hpp"

namespace submeasure {

inline void require_endo(const Correspondence& f, const char* where) {
  if (!f.is_endo()) throw Error(ErrorCode::kInvalidArgument, "map is not an endomorphism", where);
}

/// Indicator basis followed by the constants 1 and -1.
inline std::vector<FunctionVector> audit_basis(const SpaceRef& space) {
  std::vector<FunctionVector> basis = indicator_basis(space);
  basis.push_back(FunctionVector::constant(space, 1.0));
  basis.push_back(FunctionVector::constant(space, -1.0));
  return basis;
}

// ---------------------------------------------------------------------------
// Point-set dynamics on the graph.

inline PointSet image_set(const Correspondence& f, const PointSet& a) {
  std::vector<bool> hit(f.target()->size(), false);
  for (std::size_t x : a)
    for (const auto& [y, m] : f.image(x)) hit[y] = true;
  PointSet out;
  for (std::size_t y = 0; y < hit.size(); ++y)
    if (hit[y]) out.push_back(y);
  return out;
}

/// Union of F^k(a) over k >= 0.
inline PointSet forward_closure(const Correspondence& f, const PointSet& a) {
  std::vector<bool> in(f.source()->size(), false);
  std::vector<std::size_t> stack(a.begin(), a.end());
  for (std::size_t x : a) in[x] = true;
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (const auto& [y, m] : f.image(x)) {
      if (!in[y]) {
        in[y] = true;
        stack.push_back(y);
      }
    }
  }
  PointSet out;
  for (std::size_t x = 0; x < in.size(); ++x)
    if (in[x]) out.push_back(x);
  return out;
}

/// I_inf(f): points some forward path of which meets I(f).
inline PointSet indeterminacy_closure(const Correspondence& f) {
  require_endo(f, "indeterminacy_closure");
  std::vector<bool> in(f.source()->size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t x : f.indeterminacy()) {
    in[x] = true;
    stack.push_back(x);
  }
  while (!stack.empty()) {
    const std::size_t y = stack.back();
    stack.pop_back();
    for (const auto& [x, m] : f.preimage(y)) {
      if (!in[x]) {
        in[x] = true;
        stack.push_back(x);
      }
    }
  }
  PointSet out;
  for (std::size_t x = 0; x < in.size(); ++x)
    if (in[x]) out.push_back(x);
  return out;
}

/// Iterates a -> F(a) until the sequence of sets repeats and returns the
/// union over the period, a set U with F(U) = U.
inline PointSet invariant_hull(const Correspondence& f, const PointSet& a) {
  require_endo(f, "invariant_hull");
  std::vector<PointSet> seen{a};
  for (;;) {
    PointSet next = image_set(f, seen.back());
    auto it = std::find(seen.begin(), seen.end(), next);
    if (it != seen.end()) {
      std::vector<bool> in(f.source()->size(), false);
      for (; it != seen.end(); ++it)
        for (std::size_t x : *it) in[x] = true;
      PointSet out;
      for (std::size_t x = 0; x < in.size(); ++x)
        if (in[x]) out.push_back(x);
      return out;
    }
    seen.push_back(std::move(next));
  }
}

// ---------------------------------------------------------------------------
// Cesaro averages.

struct CesaroResult {
  StrongSubmeasure average;
  /// Per step j: values of (f_*)^j(mu0) on the audit basis.
  std::vector<std::vector<double>> iterates;
  /// max over the audit basis of |f_*(average) - average|.
  double defect = 0.0;
};

inline double invariance_defect(const Correspondence& f, const StrongSubmeasure& mu) {
  const auto basis = audit_basis(mu.space());
  return max_abs_difference(pushforward_submeasure(f, mu), mu, basis);
}

/// (1/n) sum_{j=0}^{n-1} (f_*)^j(mu0).
inline CesaroResult cesaro_run(const Correspondence& f, const StrongSubmeasure& mu0, std::size_t n) {
  require_endo(f, "cesaro_average");
  require_same_space(f.source(), mu0.space(), "cesaro_average");
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1", "cesaro_average");
  if (!mu0.positive()) throw Error(ErrorCode::kNotPositive, "seed must be positive", "cesaro_average");
  const auto basis = audit_basis(mu0.space());
  const double inv_n = 1.0 / static_cast<double>(n);
  StrongSubmeasure current = mu0;
  StrongSubmeasure sum = mu0.scaled(inv_n);
  std::vector<std::vector<double>> trace{evaluate_on(current, basis)};
  for (std::size_t j = 1; j < n; ++j) {
    current = pushforward_submeasure(f, current);
    trace.push_back(evaluate_on(current, basis));
    sum = sum.plus(current.scaled(inv_n));
  }
  const double defect = max_abs_difference(pushforward_submeasure(f, sum), sum, basis);
  return {std::move(sum), std::move(trace), defect};
}

inline StrongSubmeasure cesaro_average(const Correspondence& f, const StrongSubmeasure& mu0, std::size_t n) {
  return cesaro_run(f, mu0, n).average;
}

// ---------------------------------------------------------------------------
// Monotone fixed points.

struct FixedPointOptions {
  double tol = 1e-9;
  /// 0 selects 10 |X|^2.
  std::size_t max_iter = 0;
};

struct FixedPointResult {
  StrongSubmeasure limit;
  std::size_t iterations = 0;
  /// Audit-basis values of every iterate, seed first.
  std::vector<std::vector<double>> trace;
  /// max |f_*(limit) - limit| on the audit basis.
  double residual = 0.0;
};

namespace detail {

enum class Direction { kDown, kUp };

inline FixedPointResult monotone_iteration(const Correspondence& f, const StrongSubmeasure& mu0,
                                           const FixedPointOptions& opt, Direction dir, const char* where) {
  require_endo(f, where);
  require_same_space(f.source(), mu0.space(), where);
  if (!mu0.positive()) throw Error(ErrorCode::kNotPositive, "seed must be positive", where);
  const std::size_t nx = f.source()->size();
  const std::size_t max_iter = opt.max_iter ? opt.max_iter : 10 * nx * nx;
  const auto basis = audit_basis(mu0.space());

  StrongSubmeasure current = mu0;
  std::vector<double> values = evaluate_on(current, basis);
  StrongSubmeasure next = pushforward_submeasure(f, current);
  std::vector<double> next_values = evaluate_on(next, basis);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double gap = (dir == Direction::kDown) ? next_values[j] - values[j] : values[j] - next_values[j];
    if (gap > opt.tol) {
      throw Error(ErrorCode::kPrecondition,
                  std::string("seed is not ") + (dir == Direction::kDown ? "sub" : "super") +
                      "-invariant on basis function " + std::to_string(j),
                  where);
    }
  }
  FixedPointResult out{current, 0, {values}, 0.0};
  for (std::size_t it = 1; it <= max_iter; ++it) {
    double diff = 0.0;
    for (std::size_t j = 0; j < basis.size(); ++j) diff = std::max(diff, std::fabs(next_values[j] - values[j]));
    out.iterations = it;
    if (diff < opt.tol) {
      out.limit = current;
      out.residual = diff;
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const double over = (dir == Direction::kDown) ? values[j] - out.trace.front()[j] : out.trace.front()[j] - values[j];
        if (over > opt.tol) throw Error(ErrorCode::kNonConvergence, "limit escaped the seed bound", where);
      }
      return out;
    }
    current = std::move(next);
    values = std::move(next_values);
    out.trace.push_back(values);
    next = pushforward_submeasure(f, current);
    next_values = evaluate_on(next, basis);
  }
  throw Error(ErrorCode::kNonConvergence, "no fixed point within " + std::to_string(max_iter) + " iterations", where);
}

}  // namespace detail

/// Largest invariant submeasure below a sub-invariant seed: lim (f_*)^n(mu0).
inline FixedPointResult inv_leq(const Correspondence& f, const StrongSubmeasure& mu0, const FixedPointOptions& opt = {}) {
  return detail::monotone_iteration(f, mu0, opt, detail::Direction::kDown, "inv_leq");
}

/// Smallest invariant submeasure above a super-invariant seed.
inline FixedPointResult inv_geq(const Correspondence& f, const StrongSubmeasure& mu0, const FixedPointOptions& opt = {}) {
  return detail::monotone_iteration(f, mu0, opt, detail::Direction::kUp, "inv_geq");
}

/// sup of delta over the forward closure of x; F maps that set into itself,
/// so the seed is sub-invariant.
inline StrongSubmeasure subinvariant_seed(const Correspondence& f, std::size_t x) {
  const PointSet s = forward_closure(f, {x});
  return StrongSubmeasure::sup_of_diracs(f.source(), s);
}

/// sup of delta over {x} u F(x) u ... u F^{j-1}(x) for the first recurrent x
/// (x in F^j(x)); that set S satisfies S in F(S), so the seed is
/// super-invariant.
inline StrongSubmeasure superinvariant_seed(const Correspondence& f) {
  require_endo(f, "superinvariant_seed");
  const std::size_t n = f.source()->size();
  for (std::size_t x = 0; x < n; ++x) {
    PointSet layer{x};
    PointSet acc{x};
    for (std::size_t j = 1; j <= n; ++j) {
      layer = image_set(f, layer);
      if (std::binary_search(layer.begin(), layer.end(), x)) {
        return StrongSubmeasure::sup_of_diracs(f.source(), acc);
      }
      PointSet merged;
      std::set_union(acc.begin(), acc.end(), layer.begin(), layer.end(), std::back_inserter(merged));
      acc = std::move(merged);
    }
  }
  throw Error(ErrorCode::kInvalidModel, "map has no recurrent point", "superinvariant_seed");
}

// ---------------------------------------------------------------------------
// Invariant submeasures for extremality checks.

/// Draws positive f-invariant submeasures of a prescribed mass whose
/// generators are supported in `allowed` (an F-forward-closed set).
class InvariantSampler {
 public:
  InvariantSampler(const Correspondence& f, PointSet allowed) : f_(f), allowed_(std::move(allowed)) {
    require_endo(f, "InvariantSampler");
    const PointSet bad = indeterminacy_closure(f);
    std::vector<bool> blocked(f.source()->size(), false);
    for (std::size_t x : bad) blocked[x] = true;
    std::vector<bool> allowed_flag(f.source()->size(), false);
    for (std::size_t x : allowed_) allowed_flag[x] = true;
    std::vector<bool> used(f.source()->size(), false);
    for (std::size_t x : allowed_) {
      if (blocked[x] || used[x]) continue;
      std::vector<std::size_t> orbit{x};
      std::size_t y = f.apply(x);
      while (y != x && orbit.size() <= f.source()->size()) {
        orbit.push_back(y);
        y = f.apply(y);
      }
      if (y != x) continue;
      bool inside = true;
      for (std::size_t z : orbit) inside = inside && allowed_flag[z] && !used[z];
      if (!inside) continue;
      for (std::size_t z : orbit) used[z] = true;
      std::sort(orbit.begin(), orbit.end());
      cycles_.push_back(std::move(orbit));
    }
  }

  const std::vector<PointSet>& cycles() const noexcept { return cycles_; }

  /// Invariant set U inside `allowed` with F(U) = U.
  PointSet random_invariant_set(std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, allowed_.size() - 1);
    std::bernoulli_distribution coin(0.5);
    PointSet start{allowed_[pick(rng)]};
    for (std::size_t x : allowed_)
      if (coin(rng)) start.push_back(x);
    std::sort(start.begin(), start.end());
    start.erase(std::unique(start.begin(), start.end()), start.end());
    return invariant_hull(f_, start);
  }

  StrongSubmeasure sample(std::mt19937_64& rng, double mass, int depth = 2) const {
    std::uniform_int_distribution<int> kind(0, depth > 0 ? 3 : 1);
    const int k = kind(rng);
    if (k == 1 && !cycles_.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, cycles_.size() - 1);
      const PointSet& c = cycles_[pick(rng)];
      std::vector<double> w(f_.source()->size(), 0.0);
      for (std::size_t x : c) w[x] = mass / static_cast<double>(c.size());
      return StrongSubmeasure::from_measure(SignedMeasure(f_.source(), std::move(w)));
    }
    if (k == 2) {
      std::uniform_real_distribution<double> split(0.0, 1.0);
      const double t = split(rng);
      return sample(rng, t * mass, depth - 1).plus(sample(rng, (1.0 - t) * mass, depth - 1));
    }
    if (k == 3) return combine(sample(rng, mass, depth - 1), sample(rng, mass, depth - 1), CombineMode::kMax);
    const PointSet u = random_invariant_set(rng);
    return StrongSubmeasure::sup_of_diracs(f_.source(), u, mass);
  }

 private:
  const Correspondence& f_;
  PointSet allowed_;
  std::vector<PointSet> cycles_;
};

/// Points charged by some generator of mu.
inline PointSet support_of(const StrongSubmeasure& mu) {
  std::vector<bool> charged(mu.space()->size(), false);
  for (const auto& b : mu.blocks())
    for (const auto& w : b)
      for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] != 0.0) charged[i] = true;
  PointSet out;
  for (std::size_t i = 0; i < charged.size(); ++i)
    if (charged[i]) out.push_back(i);
  return out;
}

/// A random invariant submeasure dominated by mu0, drawn inside the forward
/// closure of its support with mass mu0(1); nullopt when the draw is not
/// dominated.
inline std::optional<StrongSubmeasure> sample_invariant_below(const Correspondence& f, const StrongSubmeasure& mu0,
                                                              std::mt19937_64& rng) {
  const PointSet allowed = forward_closure(f, support_of(mu0));
  if (allowed.empty()) return std::nullopt;
  const InvariantSampler sampler(f, allowed);
  const double c = mu0.eval(FunctionVector::constant(mu0.space(), 1.0));
  std::uniform_real_distribution<double> scale(0.25, 1.0);
  StrongSubmeasure nu = sampler.sample(rng, c * (std::bernoulli_distribution(0.5)(rng) ? 1.0 : scale(rng)));
  if (!dominates(mu0, nu)) return std::nullopt;
  return nu;
}

/// A random invariant submeasure dominating mu0: the max of c sup_U delta,
/// with U the invariant hull of supp(mu0) and a random invariant set, and an
/// independent invariant draw of mass c = mu0(1); nullopt when not dominating.
inline std::optional<StrongSubmeasure> sample_invariant_above(const Correspondence& f, const StrongSubmeasure& mu0,
                                                              std::mt19937_64& rng) {
  const PointSet all = f.source()->all_points();
  const InvariantSampler sampler(f, all);
  const double c = mu0.eval(FunctionVector::constant(mu0.space(), 1.0));
  PointSet start = support_of(mu0);
  const PointSet extra = sampler.random_invariant_set(rng);
  start.insert(start.end(), extra.begin(), extra.end());
  std::sort(start.begin(), start.end());
  start.erase(std::unique(start.begin(), start.end()), start.end());
  StrongSubmeasure mu = StrongSubmeasure::sup_of_diracs(f.source(), invariant_hull(f, start), c);
  if (std::bernoulli_distribution(0.5)(rng)) mu = combine(mu, sampler.sample(rng, c), CombineMode::kMax);
  if (!dominates(mu, mu0)) return std::nullopt;
  return mu;
}

}  // namespace submeasure

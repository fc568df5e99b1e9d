#pragma once

// The orbit subshift of an endo-correspondence: the path space of its edge
// graph, topological entropy, Parry measures, Markov entropy, and the
// entropy of invariant submeasures.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "submeasure/correspondence.hpp"
#include "submeasure/dynamics.hpp"
#include "submeasure/error.hpp"
#include "submeasure/linalg.hpp"
#include "submeasure/lp.hpp"
#include "submeasure/measure.hpp"
#include "submeasure/strong_submeasure.hpp"

namespace submeasure {

inline constexpr double kPowerTol = 1e-10;

class OrbitSFT {
 public:
  explicit OrbitSFT(Correspondence base, std::optional<PointSet> allowed_support = std::nullopt)
      : base_(std::move(base)), allowed_(std::move(allowed_support)) {
    require_endo(base_, "build_orbit_sft");
    const std::size_t n = base_.source()->size();
    adjacency_ = Matrix(n, n);
    for (const auto& e : base_.edges()) adjacency_(e.x, e.y) = 1.0;
    if (allowed_) {
      std::vector<bool> keep(n, false);
      for (std::size_t v : *allowed_) keep.at(v) = true;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (!keep[i] || !keep[j]) adjacency_(i, j) = 0.0;
    }
  }

  const Correspondence& base() const noexcept { return base_; }
  const SpaceRef& space() const noexcept { return base_.source(); }
  std::size_t size() const noexcept { return adjacency_.rows(); }
  const Matrix& adjacency() const noexcept { return adjacency_; }
  const std::optional<PointSet>& allowed_support() const noexcept { return allowed_; }

 private:
  Correspondence base_;
  std::optional<PointSet> allowed_;
  Matrix adjacency_;
};

inline OrbitSFT build_orbit_sft(const Correspondence& f) { return OrbitSFT(f); }

/// Paths of length `depth` (depth vertices) in the adjacency graph.
inline std::vector<std::vector<std::size_t>> orbit_words(const OrbitSFT& sft, std::size_t depth,
                                                         std::size_t cap = kDefaultGeneratorCap) {
  if (depth < 1) throw Error(ErrorCode::kInvalidArgument, "depth must be >= 1", "orbit_words");
  std::vector<std::vector<std::size_t>> words;
  for (std::size_t v = 0; v < sft.size(); ++v) words.push_back({v});
  for (std::size_t d = 1; d < depth; ++d) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& w : words) {
      for (std::size_t j = 0; j < sft.size(); ++j) {
        if (sft.adjacency()(w.back(), j) <= 0.0) continue;
        if (next.size() >= cap) throw Error(ErrorCode::kTooLarge, "word count exceeds cap", "orbit_words");
        auto u = w;
        u.push_back(j);
        next.push_back(std::move(u));
      }
    }
    words = std::move(next);
  }
  return words;
}

/// log of the spectral radius, the max over strongly connected components.
inline double topological_entropy(const OrbitSFT& sft) {
  const double rho = spectral_radius_nonnegative(sft.adjacency(), kPowerTol);
  return rho > 0.0 ? std::log(rho) : 0.0;
}

inline double topological_entropy_on(const OrbitSFT& sft, const PointSet& support) {
  const double rho = spectral_radius_nonnegative(sft.adjacency().submatrix(support), kPowerTol);
  return rho > 0.0 ? std::log(rho) : 0.0;
}

// ---------------------------------------------------------------------------
// Markov measures.

class MarkovMeasure {
 public:
  MarkovMeasure(const OrbitSFT& sft, std::vector<double> stationary, Matrix transitions)
      : stationary_(std::move(stationary)), transitions_(std::move(transitions)) {
    const std::size_t n = sft.size();
    if (stationary_.size() != n || transitions_.rows() != n || transitions_.cols() != n)
      throw Error(ErrorCode::kInvalidArgument, "shape mismatch", "markov_measure");
    constexpr double kTol = 1e-9;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (stationary_[i] < -kTol) throw Error(ErrorCode::kInvalidArgument, "negative stationary weight", "markov_measure");
      total += stationary_[i];
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p = transitions_(i, j);
        if (p < -kTol) throw Error(ErrorCode::kInvalidArgument, "negative transition", "markov_measure");
        if (p > kTol && sft.adjacency()(i, j) <= 0.0)
          throw Error(ErrorCode::kInvalidArgument, "transition outside adjacency", "markov_measure");
        row += p;
      }
      if (std::fabs(row - 1.0) > kTol) throw Error(ErrorCode::kInvalidArgument, "row does not sum to 1", "markov_measure");
    }
    if (std::fabs(total - 1.0) > kTol) throw Error(ErrorCode::kInvalidArgument, "stationary vector not normalized", "markov_measure");
    const std::vector<double> moved = transitions_.left_multiply(stationary_);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(moved[i] - stationary_[i]) > kTol)
        throw Error(ErrorCode::kInvalidArgument, "stationary vector is not invariant", "markov_measure");
    }
  }

  const std::vector<double>& stationary() const noexcept { return stationary_; }
  const Matrix& transitions() const noexcept { return transitions_; }

 private:
  std::vector<double> stationary_;
  Matrix transitions_;
};

namespace detail {
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
}  // namespace detail

/// sum_i pi_i sum_j P_ij log(1 / P_ij).
inline double markov_entropy(const MarkovMeasure& m) {
  double h = 0.0;
  const std::size_t n = m.stationary().size();
  for (std::size_t i = 0; i < n; ++i) {
    if (m.stationary()[i] <= 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row -= detail::xlogx(m.transitions()(i, j));
    h += m.stationary()[i] * row;
  }
  return h;
}

/// (1/n) H over the partition into cylinders of length n, for n = 1..horizon.
inline std::vector<double> block_entropies(const MarkovMeasure& m, std::size_t horizon, std::size_t cap = 2000000) {
  const std::size_t n = m.stationary().size();
  std::vector<std::pair<double, std::size_t>> words;
  for (std::size_t i = 0; i < n; ++i)
    if (m.stationary()[i] > 0.0) words.emplace_back(m.stationary()[i], i);
  std::vector<double> out;
  for (std::size_t len = 1; len <= horizon; ++len) {
    if (len > 1) {
      std::vector<std::pair<double, std::size_t>> next;
      for (const auto& [p, last] : words) {
        for (std::size_t j = 0; j < n; ++j) {
          const double q = p * m.transitions()(last, j);
          if (q <= 0.0) continue;
          if (next.size() >= cap) throw Error(ErrorCode::kTooLarge, "cylinder count exceeds cap", "block_entropies");
          next.emplace_back(q, j);
        }
      }
      words = std::move(next);
    }
    double h = 0.0;
    for (const auto& [p, last] : words) h -= detail::xlogx(p);
    out.push_back(h / static_cast<double>(len));
  }
  return out;
}

/// Parry measure of the maximal-entropy strongly connected component, or of
/// the component inside `support` when given.
inline MarkovMeasure parry_measure(const OrbitSFT& sft, const std::optional<PointSet>& support = std::nullopt) {
  const std::size_t n = sft.size();
  Matrix a = sft.adjacency();
  if (support) {
    std::vector<bool> keep(n, false);
    for (std::size_t v : *support) keep.at(v) = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!keep[i] || !keep[j]) a(i, j) = 0.0;
  }
  std::vector<std::size_t> best;
  double best_rho = -1.0;
  for (const auto& comp : strongly_connected_components(a)) {
    const Matrix sub = a.submatrix(comp);
    if (comp.size() == 1 && sub(0, 0) <= 0.0) continue;
    const PerronResult r = perron_power_iteration(sub, kPowerTol);
    if (!r.converged) throw Error(ErrorCode::kNonConvergence, "power iteration did not converge", "parry_measure");
    if (r.eigenvalue > best_rho) {
      best_rho = r.eigenvalue;
      best = comp;
    }
  }
  if (best.empty()) throw Error(ErrorCode::kInvalidArgument, "graph has no cycle", "parry_measure");
  const Matrix sub = a.submatrix(best);
  const PerronResult right = perron_power_iteration(sub, kPowerTol);
  const PerronResult left = perron_power_iteration(sub.transposed(), kPowerTol);
  const double lambda = right.eigenvalue;
  const std::size_t k = best.size();
  std::vector<double> pi(n, 0.0);
  double norm = 0.0;
  for (std::size_t i = 0; i < k; ++i) norm += left.vector[i] * right.vector[i];
  for (std::size_t i = 0; i < k; ++i) pi[best[i]] = left.vector[i] * right.vector[i] / norm;
  Matrix p(n, n);
  for (std::size_t i = 0; i < k; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      p(best[i], best[j]) = sub(i, j) * right.vector[j] / (lambda * right.vector[i]);
      row += p(best[i], best[j]);
    }
    for (std::size_t j = 0; j < k; ++j) p(best[i], best[j]) /= row;
  }
  std::vector<bool> in_best(n, false);
  for (std::size_t v : best) in_best[v] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_best[i]) continue;
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += sft.adjacency()(i, j);
    for (std::size_t j = 0; j < n; ++j) p(i, j) = deg > 0.0 ? sft.adjacency()(i, j) / deg : 0.0;
    if (deg <= 0.0) throw Error(ErrorCode::kInvalidModel, "vertex without out-edge", "parry_measure");
  }
  return MarkovMeasure(sft, std::move(pi), std::move(p));
}

// ---------------------------------------------------------------------------
// Entropy of invariant submeasures.

struct SubmeasureEntropy {
  double value = 0.0;
  /// True when value is the exact supremum; otherwise a certified lower bound
  /// attained by an explicit admissible Markov measure.
  bool exact = false;
  /// Marginal (unnormalized, mass of the witness) of the best candidate.
  std::vector<double> witness_marginal;
};

namespace detail {

/// c when mu = c sup_{x in S} delta_x, with S returned through `support`.
inline std::optional<double> sup_of_diracs_scale(const StrongSubmeasure& mu, PointSet& support) {
  if (mu.blocks().size() != 1) return std::nullopt;
  std::optional<double> c;
  support.clear();
  for (const auto& w : mu.blocks().front()) {
    std::size_t nz = 0, at = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] != 0.0) {
        ++nz;
        at = i;
      }
    if (nz != 1) return std::nullopt;
    if (c && *c != w[at]) return std::nullopt;
    c = w[at];
    support.push_back(at);
  }
  std::sort(support.begin(), support.end());
  return c;
}

inline bool strongly_connected_with_cycle(const Matrix& a, const PointSet& s) {
  const Matrix sub = a.submatrix(s);
  const auto comps = strongly_connected_components(sub);
  if (comps.size() != 1) return false;
  return s.size() > 1 || sub(0, 0) > 0.0;
}

/// Largest t >= 0 with t * target in the hull of mu's generators (mass-scaled
/// feasibility), or nullopt when only t = 0 or nothing is feasible.
inline std::optional<double> max_scale_in_hull(const StrongSubmeasure& mu, std::span<const double> target) {
  const std::size_t n = mu.space()->size();
  std::vector<std::pair<std::size_t, std::size_t>> index;
  for (std::size_t bi = 0; bi < mu.blocks().size(); ++bi)
    for (std::size_t gi = 0; gi < mu.blocks()[bi].size(); ++gi) index.emplace_back(bi, gi);
  const std::size_t vars = index.size() + 1;
  lp::Problem p;
  p.c.assign(vars, 0.0);
  p.c.back() = 1.0;
  for (std::size_t bi = 0; bi < mu.blocks().size(); ++bi) {
    std::vector<double> row(vars, 0.0);
    for (std::size_t v = 0; v + 1 < vars; ++v) row[v] = (index[v].first == bi) ? 1.0 : 0.0;
    p.add_eq(row, 1.0);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(vars, 0.0);
    for (std::size_t v = 0; v + 1 < vars; ++v) row[v] = mu.blocks()[index[v].first][index[v].second][j];
    row.back() = -target[j];
    p.add_eq(row, 0.0);
  }
  const lp::Result r = lp::solve(p, 1e-12);
  if (r.status != lp::Status::kOptimal || r.value <= 1e-12) return std::nullopt;
  return r.value;
}

/// Stationary flow F on the adjacency whose marginal lies in the hull of mu,
/// maximizing the mass placed on `weights` (a positive objective direction).
inline std::optional<std::vector<double>> feasible_flow_marginal(const StrongSubmeasure& mu, const Matrix& adj,
                                                                 const std::vector<double>& weights,
                                                                 std::vector<std::pair<std::size_t, std::size_t>>& arcs,
                                                                 std::vector<double>& flow) {
  const std::size_t n = mu.space()->size();
  arcs.clear();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (adj(i, j) > 0.0) arcs.emplace_back(i, j);
  std::vector<std::pair<std::size_t, std::size_t>> index;
  for (std::size_t bi = 0; bi < mu.blocks().size(); ++bi)
    for (std::size_t gi = 0; gi < mu.blocks()[bi].size(); ++gi) index.emplace_back(bi, gi);
  const std::size_t na = arcs.size();
  const std::size_t vars = na + index.size();
  lp::Problem p;
  p.c.assign(vars, 0.0);
  for (std::size_t a = 0; a < na; ++a) p.c[a] = weights[arcs[a].first];
  for (std::size_t bi = 0; bi < mu.blocks().size(); ++bi) {
    std::vector<double> row(vars, 0.0);
    for (std::size_t v = 0; v < index.size(); ++v) row[na + v] = (index[v].first == bi) ? 1.0 : 0.0;
    p.add_eq(row, 1.0);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> out_row(vars, 0.0), in_row(vars, 0.0);
    for (std::size_t a = 0; a < na; ++a) {
      if (arcs[a].first == j) out_row[a] += 1.0;
      if (arcs[a].second == j) in_row[a] += 1.0;
    }
    std::vector<double> balance(vars, 0.0);
    for (std::size_t v = 0; v < vars; ++v) balance[v] = out_row[v] - in_row[v];
    p.add_eq(balance, 0.0);
    std::vector<double> hull(out_row);
    for (std::size_t v = 0; v < index.size(); ++v) hull[na + v] = -mu.blocks()[index[v].first][index[v].second][j];
    p.add_eq(hull, 0.0);
  }
  const lp::Result r = lp::solve(p, 1e-12);
  if (r.status != lp::Status::kOptimal) return std::nullopt;
  flow.assign(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(na));
  std::vector<double> marginal(n, 0.0);
  for (std::size_t a = 0; a < na; ++a) marginal[arcs[a].first] += flow[a];
  return marginal;
}

/// Max-entropy flow with both marginals equal to m and support inside the
/// support of `start`, by alternating row/column scaling.
inline std::optional<double> sinkhorn_entropy(const std::vector<double>& m,
                                              const std::vector<std::pair<std::size_t, std::size_t>>& arcs,
                                              const std::vector<double>& start) {
  const std::size_t n = m.size();
  std::vector<std::pair<std::size_t, std::size_t>> support;
  for (std::size_t a = 0; a < arcs.size(); ++a)
    if (start[a] > 1e-12) support.push_back(arcs[a]);
  // Arcs that some positive stationary flow can use: those inside strongly
  // connected pieces of the support graph.
  Matrix g(n, n);
  for (const auto& [i, j] : support) g(i, j) = 1.0;
  std::vector<std::size_t> comp_of(n, 0);
  const auto comps = strongly_connected_components(g);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (std::size_t v : comps[c]) comp_of[v] = c;
  std::vector<std::pair<std::size_t, std::size_t>> usable;
  for (const auto& [i, j] : support)
    if (comp_of[i] == comp_of[j]) usable.emplace_back(i, j);
  std::vector<double> x(n, 1.0), y(n, 1.0);
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> rows(n, 0.0), cols(n, 0.0);
    for (const auto& [i, j] : usable) rows[i] += y[j];
    for (std::size_t i = 0; i < n; ++i) x[i] = rows[i] > 0.0 ? m[i] / rows[i] : 0.0;
    for (const auto& [i, j] : usable) cols[j] += x[i];
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double ny = cols[j] > 0.0 ? m[j] / cols[j] : 0.0;
      err = std::max(err, std::fabs(ny * cols[j] - m[j]));
      y[j] = ny;
    }
    std::vector<double> check(n, 0.0);
    for (const auto& [i, j] : usable) check[i] += x[i] * y[j];
    double row_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) row_err = std::max(row_err, std::fabs(check[i] - m[i]));
    if (row_err < 1e-12 && err < 1e-12) break;
  }
  std::vector<double> rows(n, 0.0);
  for (const auto& [i, j] : usable) rows[i] += x[i] * y[j];
  for (std::size_t i = 0; i < n; ++i)
    if (std::fabs(rows[i] - m[i]) > 1e-9) return std::nullopt;
  double h = 0.0;
  for (const auto& [i, j] : usable) {
    const double fij = x[i] * y[j];
    if (fij > 0.0) h += fij * std::log(m[i] / fij);
  }
  return h;
}

}  // namespace detail

inline constexpr std::size_t kEntropySubsetLimit = 12;

/// sup of h_nu over shift-invariant nu with (pi1)_* nu <= mu. A measure of
/// mass t contributes t times the entropy of its normalization.
inline SubmeasureEntropy submeasure_entropy(const OrbitSFT& sft, const StrongSubmeasure& mu, double tol = 1e-9) {
  require_same_space(sft.space(), mu.space(), "submeasure_entropy");
  if (!mu.positive()) throw Error(ErrorCode::kNotPositive, "submeasure must be positive", "submeasure_entropy");
  if (invariance_defect(sft.base(), mu) > tol)
    throw Error(ErrorCode::kPrecondition, "submeasure is not invariant", "submeasure_entropy");
  const Matrix& a = sft.adjacency();

  PointSet s;
  if (auto c = detail::sup_of_diracs_scale(mu, s)) {
    double rho = spectral_radius_nonnegative(a.submatrix(s), kPowerTol);
    SubmeasureEntropy out{*c * (rho > 0.0 ? std::log(rho) : 0.0), true, {}};
    if (rho > 0.0) {
      const MarkovMeasure parry = parry_measure(sft, s);
      out.witness_marginal = parry.stationary();
      for (double& v : out.witness_marginal) v *= *c;
    }
    return out;
  }

  SubmeasureEntropy best{0.0, false, {}};
  // Support of mu: points charged by some generator.
  std::vector<bool> charged(mu.space()->size(), false);
  for (const auto& b : mu.blocks())
    for (const auto& w : b)
      for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] != 0.0) charged[i] = true;
  PointSet support;
  for (std::size_t i = 0; i < charged.size(); ++i)
    if (charged[i]) support.push_back(i);

  // (a) Scaled Parry measures of strongly connected subgraphs.
  std::vector<PointSet> candidates;
  if (support.size() <= kEntropySubsetLimit) {
    const std::size_t subsets = std::size_t{1} << support.size();
    for (std::size_t mask = 1; mask < subsets; ++mask) {
      PointSet sub;
      for (std::size_t i = 0; i < support.size(); ++i)
        if (mask & (std::size_t{1} << i)) sub.push_back(support[i]);
      if (detail::strongly_connected_with_cycle(a, sub)) candidates.push_back(std::move(sub));
    }
  } else {
    for (auto comp : strongly_connected_components(a.submatrix(support))) {
      PointSet sub;
      for (std::size_t v : comp) sub.push_back(support[v]);
      if (detail::strongly_connected_with_cycle(a, sub)) candidates.push_back(std::move(sub));
    }
  }
  for (const auto& sub : candidates) {
    const MarkovMeasure parry = parry_measure(sft, sub);
    const auto t = detail::max_scale_in_hull(mu, parry.stationary());
    if (!t) continue;
    const double h = *t * markov_entropy(parry);
    if (h > best.value || best.witness_marginal.empty()) {
      best.value = h;
      best.witness_marginal = parry.stationary();
      for (double& v : best.witness_marginal) v *= *t;
    }
  }

  // (b) Max-entropy chains at marginals found by the flow program.
  std::vector<std::vector<double>> directions{std::vector<double>(mu.space()->size(), 1.0)};
  for (std::size_t v : support) {
    std::vector<double> d(mu.space()->size(), 1.0);
    d[v] = 2.0;
    directions.push_back(std::move(d));
  }
  for (const auto& d : directions) {
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    std::vector<double> flow;
    const auto marginal = detail::feasible_flow_marginal(mu, a, d, arcs, flow);
    if (!marginal) continue;
    const auto h = detail::sinkhorn_entropy(*marginal, arcs, flow);
    if (h && *h > best.value) {
      best.value = *h;
      best.witness_marginal = *marginal;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Lifts and the key inequality.

/// Markov lift of an invariant measure with no mass on I_inf(f); the measure
/// is normalized to a probability.
inline MarkovMeasure lift_invariant_measure(const OrbitSFT& sft, const PositiveMeasure& mu, double tol = 1e-9) {
  const Correspondence& f = sft.base();
  require_same_space(f.source(), mu.space(), "lift_invariant_measure");
  for (std::size_t x : indeterminacy_closure(f)) {
    if (mu.weights()[x] > 0.0)
      throw Error(ErrorCode::kPrecondition,
                  "measure charges '" + f.source()->label(x) + "' in I_inf(f); entropy is undefined there",
                  "lift_invariant_measure");
  }
  const double mass = mu.mass();
  if (!(mass > 0.0)) throw Error(ErrorCode::kInvalidArgument, "zero measure", "lift_invariant_measure");
  const auto image = pushforward_measure(f, mu.as_signed()).as_measure();
  for (std::size_t i = 0; i < mu.weights().size(); ++i) {
    if (std::fabs((*image)[i] - mu.weights()[i]) > tol)
      throw Error(ErrorCode::kPrecondition, "measure is not invariant", "lift_invariant_measure");
  }
  const std::size_t n = sft.size();
  std::vector<double> pi(mu.weights());
  for (double& v : pi) v /= mass;
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& targets = f.image(i);
    for (const auto& [y, m] : targets) p(i, y) = 1.0 / static_cast<double>(targets.size());
  }
  return MarkovMeasure(sft, std::move(pi), std::move(p));
}

struct KeyInequalityReport {
  /// Word space of depth-N paths, with the first and second coordinate maps.
  SpaceRef words;
  std::vector<double> lhs;
  std::vector<double> rhs;
  bool holds = false;
  /// Exact: every generator of the right side lies in the hull of the left.
  bool dominated = false;
  /// Indicator-basis indices where lhs > rhs + tol.
  std::vector<std::size_t> strict_witnesses;
};

struct WordSpace {
  SpaceRef space;
  std::vector<std::vector<std::size_t>> words;
  /// w -> w_0 and w -> w_1.
  Correspondence first;
  Correspondence second;
};

inline WordSpace build_word_space(const OrbitSFT& sft, std::size_t depth) {
  if (depth < 2) throw Error(ErrorCode::kInvalidArgument, "depth must be >= 2", "word_space");
  auto words = orbit_words(sft, depth);
  std::vector<std::string> labels;
  std::vector<std::size_t> t0, t1;
  for (const auto& w : words) {
    std::string l;
    for (std::size_t k = 0; k < w.size(); ++k) l += (k ? "." : "") + sft.space()->label(w[k]);
    labels.push_back(std::move(l));
    t0.push_back(w[0]);
    t1.push_back(w[1]);
  }
  SpaceRef space = FiniteSpace::make(std::move(labels));
  return {space, std::move(words), map_correspondence(space, sft.space(), t0),
          map_correspondence(space, sft.space(), t1)};
}

/// f_*(pi1)_*(muhat) >= (pi1)_*(shift)_*(muhat) on the indicator basis.
inline KeyInequalityReport key_inequality_check(const OrbitSFT& sft, const WordSpace& ws, const StrongSubmeasure& muhat,
                                                double tol = 1e-9) {
  require_same_space(ws.space, muhat.space(), "key_inequality_check");
  const StrongSubmeasure left = pushforward_submeasure(sft.base(), pushforward_submeasure(ws.first, muhat));
  const StrongSubmeasure right = pushforward_submeasure(ws.second, muhat);
  KeyInequalityReport rep;
  rep.words = ws.space;
  const auto basis = indicator_basis(sft.space());
  rep.lhs = evaluate_on(left, basis);
  rep.rhs = evaluate_on(right, basis);
  rep.holds = true;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (rep.lhs[j] < rep.rhs[j] - tol) rep.holds = false;
    if (rep.lhs[j] > rep.rhs[j] + tol) rep.strict_witnesses.push_back(j);
  }
  rep.dominated = dominates(left, right, tol);
  return rep;
}

/// Smallest topological entropy over compactification models.
inline double kahler_entropy(std::span<const Correspondence> models) {
  if (models.empty()) throw Error(ErrorCode::kInvalidArgument, "no models", "kahler_entropy");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : models) best = std::min(best, topological_entropy(build_orbit_sft(m)));
  return best;
}

}  // namespace submeasure

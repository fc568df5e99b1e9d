#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "submeasure/error.hpp"
#include "submeasure/lp.hpp"
#include "submeasure/measure.hpp"
#include "submeasure/space.hpp"

namespace submeasure {

using Weights = std::vector<double>;
/// A finite generator list; the block acts as phi -> max over generators.
using Block = std::vector<Weights>;

inline constexpr std::size_t kDefaultGeneratorCap = 200000;
inline constexpr std::size_t kNormalizeCap = 4096;

namespace detail {
inline void dedupe(Block& block) {
  std::sort(block.begin(), block.end());
  block.erase(std::unique(block.begin(), block.end()), block.end());
}

inline Block minkowski(const Block& a, const Block& b, std::size_t cap) {
  if (a.size() * b.size() > cap) {
    throw Error(ErrorCode::kTooLarge,
                "generator expansion exceeds cap of " + std::to_string(cap), "submeasure.generators");
  }
  Block out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) {
      Weights w(x);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += y[i];
      out.push_back(std::move(w));
    }
  }
  dedupe(out);
  return out;
}

inline bool weights_positive(const Weights& w) {
  return std::all_of(w.begin(), w.end(), [](double v) { return v >= 0.0; });
}
}  // namespace detail

/// A strong submeasure on a finite space: a bounded sublinear functional,
/// stored as a sum of blocks, each block the supremum of finitely many signed
/// measures. The sum of sups is itself the sup over the Minkowski sum of the
/// blocks, which generators() materializes on demand.
class StrongSubmeasure {
 public:
  StrongSubmeasure(SpaceRef space, std::span<const SignedMeasure> generators) : space_(std::move(space)) {
    if (generators.empty()) throw Error(ErrorCode::kInvalidArgument, "empty generator collection", "submeasure");
    Block block;
    for (const auto& g : generators) {
      require_same_space(space_, g.space(), "submeasure.generators");
      block.push_back(g.weights());
    }
    blocks_.push_back(std::move(block));
    finish();
  }
  StrongSubmeasure(SpaceRef space, std::initializer_list<SignedMeasure> generators)
      : StrongSubmeasure(std::move(space), std::span<const SignedMeasure>(generators.begin(), generators.size())) {}

  static StrongSubmeasure from_blocks(SpaceRef space, std::vector<Block> blocks) {
    if (blocks.empty()) throw Error(ErrorCode::kInvalidArgument, "no blocks", "submeasure");
    for (const auto& b : blocks) {
      if (b.empty()) throw Error(ErrorCode::kInvalidArgument, "empty generator collection", "submeasure");
      for (const auto& w : b) {
        if (w.size() != space->size())
          throw Error(ErrorCode::kInvalidArgument, "generator length does not match space", "submeasure");
        detail::require_finite(w, "submeasure");
      }
    }
    return StrongSubmeasure(std::move(space), std::move(blocks));
  }

  static StrongSubmeasure from_measure(const SignedMeasure& m) {
    const SignedMeasure gens[] = {m};
    return StrongSubmeasure(m.space(), gens);
  }
  static StrongSubmeasure zero(const SpaceRef& space) { return from_measure(SignedMeasure::zero(space)); }
  /// c * sup_{x in S} delta_x.
  static StrongSubmeasure sup_of_diracs(const SpaceRef& space, std::span<const std::size_t> points, double c = 1.0) {
    if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "empty point set", "submeasure.sup_of_diracs");
    std::vector<SignedMeasure> gens;
    for (std::size_t p : points) gens.push_back(SignedMeasure::dirac(space, p, c));
    return StrongSubmeasure(space, gens);
  }
  /// sup_{x in X} delta_x.
  static StrongSubmeasure sup_all_diracs(const SpaceRef& space) {
    const PointSet all = space->all_points();
    return sup_of_diracs(space, all);
  }

  const SpaceRef& space() const noexcept { return space_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  /// True when every stored generator is a positive measure.
  bool positive() const noexcept { return positive_; }

  double eval(const FunctionVector& phi) const {
    require_same_space(space_, phi.space(), "submeasure.eval");
    double total = 0.0;
    for (const auto& block : blocks_) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& w : block) best = std::max(best, detail::dot(w, phi.values()));
      total += best;
    }
    return total;
  }
  double operator()(const FunctionVector& phi) const { return eval(phi); }

  /// Number of generators of the materialized (Minkowski) form, saturating.
  std::size_t generator_count() const noexcept {
    std::size_t n = 1;
    for (const auto& b : blocks_) {
      if (n > std::numeric_limits<std::size_t>::max() / std::max<std::size_t>(b.size(), 1)) {
        return std::numeric_limits<std::size_t>::max();
      }
      n *= b.size();
    }
    return n;
  }

  Block generator_weights(std::size_t cap = kDefaultGeneratorCap) const {
    Block acc = blocks_.front();
    for (std::size_t k = 1; k < blocks_.size(); ++k) acc = detail::minkowski(acc, blocks_[k], cap);
    if (acc.size() > cap) throw Error(ErrorCode::kTooLarge, "generator count exceeds cap", "submeasure.generators");
    return acc;
  }

  std::vector<SignedMeasure> generators(std::size_t cap = kDefaultGeneratorCap) const {
    std::vector<SignedMeasure> out;
    for (auto& w : generator_weights(cap)) out.emplace_back(space_, std::move(w));
    return out;
  }

  /// Same functional with all blocks folded into one generator list.
  StrongSubmeasure flattened(std::size_t cap = kDefaultGeneratorCap) const {
    return StrongSubmeasure(space_, std::vector<Block>{generator_weights(cap)});
  }

  StrongSubmeasure scaled(double lambda) const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw Error(ErrorCode::kInvalidArgument, "scale must be finite and nonnegative", "submeasure.scaled");
    std::vector<Block> blocks = blocks_;
    for (auto& b : blocks)
      for (auto& w : b)
        for (double& v : w) v *= lambda;
    return StrongSubmeasure(space_, std::move(blocks));
  }

  /// Sum of the two functionals (block concatenation).
  StrongSubmeasure plus(const StrongSubmeasure& other) const {
    require_same_space(space_, other.space_, "submeasure.sum");
    std::vector<Block> blocks = blocks_;
    blocks.insert(blocks.end(), other.blocks_.begin(), other.blocks_.end());
    return StrongSubmeasure(space_, std::move(blocks));
  }

  /// Single-generator submeasures are measures.
  std::optional<SignedMeasure> as_measure() const {
    Weights acc(space_->size(), 0.0);
    for (const auto& b : blocks_) {
      if (b.size() != 1) return std::nullopt;
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += b.front()[i];
    }
    return SignedMeasure(space_, std::move(acc));
  }

 private:
  StrongSubmeasure(SpaceRef space, std::vector<Block> blocks) : space_(std::move(space)), blocks_(std::move(blocks)) {
    finish();
  }

  void finish() {
    for (auto& b : blocks_) detail::dedupe(b);
    // Fold mixed-sign blocks when cheap so the positivity flag reflects the
    // materialized generators rather than the stored factors.
    auto all_positive = [this] {
      for (const auto& b : blocks_)
        for (const auto& w : b)
          if (!detail::weights_positive(w)) return false;
      return true;
    };
    positive_ = all_positive();
    if (!positive_ && blocks_.size() > 1 && generator_count() <= kNormalizeCap) {
      blocks_ = {generator_weights(kNormalizeCap)};
      positive_ = all_positive();
    }
    // c1 * B + c2 * B = (c1 + c2) * B for c1, c2 >= 0: merge proportional blocks.
    if (blocks_.size() > 1) {
      struct Shape {
        Block original;
        Block normalized;
        double scale = 0.0;
        bool merged = false;
      };
      std::vector<Shape> shapes;
      for (auto& b : blocks_) {
        if (b.size() == 1) {
          shapes.push_back({std::move(b), {}, 0.0, false});
          continue;
        }
        double s = 0.0;
        for (const auto& w : b)
          for (double v : w) s = std::max(s, std::fabs(v));
        Block shape = b;
        for (auto& w : shape)
          for (double& v : w) v /= s;
        detail::dedupe(shape);
        auto it = std::find_if(shapes.begin(), shapes.end(),
                               [&](const Shape& e) { return e.scale > 0.0 && e.normalized == shape; });
        if (it == shapes.end()) {
          shapes.push_back({std::move(b), std::move(shape), s, false});
        } else {
          it->scale += s;
          it->merged = true;
        }
      }
      blocks_.clear();
      for (auto& sh : shapes) {
        if (!sh.merged) {
          blocks_.push_back(std::move(sh.original));
          continue;
        }
        for (auto& w : sh.normalized)
          for (double& v : w) v *= sh.scale;
        blocks_.push_back(std::move(sh.normalized));
      }
    }
    // Singleton blocks fold into one linear block.
    std::size_t singles = 0;
    for (const auto& b : blocks_) singles += (b.size() == 1);
    if (singles > 1) {
      Weights lin(space_->size(), 0.0);
      std::vector<Block> rest;
      for (auto& b : blocks_) {
        if (b.size() == 1) {
          for (std::size_t i = 0; i < lin.size(); ++i) lin[i] += b.front()[i];
        } else {
          rest.push_back(std::move(b));
        }
      }
      rest.insert(rest.begin(), Block{std::move(lin)});
      blocks_ = std::move(rest);
    }
  }

  SpaceRef space_;
  std::vector<Block> blocks_;
  bool positive_ = false;
};

inline double eval_submeasure(const StrongSubmeasure& mu, const FunctionVector& phi) { return mu.eval(phi); }

inline std::vector<double> evaluate_on(const StrongSubmeasure& mu, std::span<const FunctionVector> basis) {
  std::vector<double> out;
  out.reserve(basis.size());
  for (const auto& phi : basis) out.push_back(mu.eval(phi));
  return out;
}

struct NormReport {
  double mass_plus;
  double mass_minus;
  double norm;
  /// False when mu is not positive and `norm` is only the generator-norm bound.
  bool exact;
};

inline NormReport norm_and_mass(const StrongSubmeasure& mu) {
  const double plus = mu.eval(FunctionVector::constant(mu.space(), 1.0));
  const double minus = mu.eval(FunctionVector::constant(mu.space(), -1.0));
  if (mu.positive()) return {plus, minus, std::max(std::fabs(plus), std::fabs(minus)), true};
  double bound = 0.0;
  for (const auto& b : mu.blocks()) {
    double best = 0.0;
    for (const auto& w : b) {
      double tv = 0.0;
      for (double v : w) tv += std::fabs(v);
      best = std::max(best, tv);
    }
    bound += best;
  }
  return {plus, minus, bound, false};
}

enum class CombineMode { kMax, kSum };

inline StrongSubmeasure combine(const StrongSubmeasure& a, const StrongSubmeasure& b, CombineMode mode,
                                std::size_t cap = kDefaultGeneratorCap) {
  require_same_space(a.space(), b.space(), "combine");
  if (mode == CombineMode::kSum) return a.plus(b);
  Block gens = a.generator_weights(cap);
  Block more = b.generator_weights(cap);
  gens.insert(gens.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  return StrongSubmeasure::from_blocks(a.space(), {std::move(gens)});
}

// ---------------------------------------------------------------------------
// Upper-semicontinuous extension: E(mu)(g) = inf { mu(psi) : psi >= g }.

struct ExtendedValue {
  double value = 0.0;
  /// When the infimum is -inf: a direction s >= 0 with mu(g + t s) -> -inf.
  std::optional<std::vector<double>> ray;
  bool finite() const noexcept { return std::isfinite(value); }
};

namespace detail {

inline std::vector<double> unbounded_ray(const StrongSubmeasure& mu) {
  // Find s >= 0 and per-block levels t_k with chi.s <= t_k for every
  // generator of block k and sum_k t_k <= -1. t_k is split as tp - tm.
  const std::size_t n = mu.space()->size();
  const std::size_t k = mu.blocks().size();
  const std::size_t vars = n + 2 * k;
  lp::Problem p;
  p.c.assign(vars, 0.0);
  for (std::size_t bi = 0; bi < k; ++bi) {
    for (const auto& w : mu.blocks()[bi]) {
      std::vector<double> row(vars, 0.0);
      for (std::size_t j = 0; j < n; ++j) row[j] = w[j];
      row[n + 2 * bi] = -1.0;
      row[n + 2 * bi + 1] = 1.0;
      p.add_le(std::move(row), 0.0);
    }
  }
  std::vector<double> total(vars, 0.0);
  for (std::size_t bi = 0; bi < k; ++bi) {
    total[n + 2 * bi] = 1.0;
    total[n + 2 * bi + 1] = -1.0;
  }
  p.add_le(std::move(total), -1.0);
  const lp::Result r = lp::solve(p);
  if (r.status != lp::Status::kOptimal) return {};
  return std::vector<double>(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(n));
}

}  // namespace detail

/// For positive mu the infimum is attained at psi = g. Otherwise the dual
/// program  max sum lambda.chi(g)  over lambda in a product of simplices with
/// sum lambda.chi >= 0 is solved; infeasibility means the value is -inf.
inline ExtendedValue extend_usc(const StrongSubmeasure& mu, const FunctionVector& g) {
  require_same_space(mu.space(), g.space(), "extend_usc");
  if (mu.positive()) return {mu.eval(g), std::nullopt};

  const std::size_t n = mu.space()->size();
  std::vector<std::pair<std::size_t, std::size_t>> index;
  for (std::size_t bi = 0; bi < mu.blocks().size(); ++bi)
    for (std::size_t gi = 0; gi < mu.blocks()[bi].size(); ++gi) index.emplace_back(bi, gi);
  const std::size_t vars = index.size();

  lp::Problem p;
  p.c.resize(vars);
  for (std::size_t v = 0; v < vars; ++v) {
    p.c[v] = detail::dot(mu.blocks()[index[v].first][index[v].second], g.values());
  }
  for (std::size_t bi = 0; bi < mu.blocks().size(); ++bi) {
    std::vector<double> row(vars, 0.0);
    for (std::size_t v = 0; v < vars; ++v) row[v] = (index[v].first == bi) ? 1.0 : 0.0;
    p.add_eq(row, 1.0);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(vars, 0.0);
    for (std::size_t v = 0; v < vars; ++v) row[v] = -mu.blocks()[index[v].first][index[v].second][j];
    p.add_le(std::move(row), 0.0);
  }
  const lp::Result r = lp::solve(p);
  if (r.status == lp::Status::kOptimal) return {r.value, std::nullopt};
  return {-std::numeric_limits<double>::infinity(), detail::unbounded_ray(mu)};
}

enum class SetMode { kClosed, kOpen };

inline constexpr std::size_t kOpenSetEnumerationLimit = 16;

/// mu(A) for closed A is E(mu)(1_A); for open A it is the sup over compact
/// K inside A. Every subset of a finite space is compact, and E(mu) is
/// monotone, so beyond the enumeration limit the sup is taken at K = A.
inline double set_value(const StrongSubmeasure& mu, const PointSet& a, SetMode mode) {
  const SpaceRef& space = mu.space();
  for (std::size_t p : a) {
    if (p >= space->size()) throw Error(ErrorCode::kInvalidArgument, "point out of range", "set_value");
  }
  if (mode == SetMode::kClosed || a.size() > kOpenSetEnumerationLimit) {
    return extend_usc(mu, FunctionVector::indicator(space, a)).value;
  }
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t subsets = std::size_t{1} << a.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    PointSet k;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (mask & (std::size_t{1} << i)) k.push_back(a[i]);
    best = std::max(best, extend_usc(mu, FunctionVector::indicator(space, k)).value);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Domination: nu <= mu pointwise iff nu lies in the closed convex hull of the
// generators of mu. Decided by cutting planes: a small LP over test functions
// in [-1, 1] separates nu from the hull of the generators seen so far, and the
// maximizing generator of mu at the separating function joins the set.

namespace detail {

/// max over |phi| <= 1 of nu(phi) - max_{w in cut} w.phi, with the maximizer.
inline std::pair<double, std::vector<double>> separation(const std::vector<Weights>& cut, std::span<const double> target) {
  const std::size_t n = target.size();
  // Variables u = phi + 1 in [0, 2], then t+ and t-.
  lp::Problem p;
  p.c.assign(n + 2, 0.0);
  double offset = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    p.c[j] = target[j];
    offset -= target[j];
  }
  p.c[n] = -1.0;
  p.c[n + 1] = 1.0;
  for (const auto& w : cut) {
    std::vector<double> row(n + 2, 0.0);
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = w[j];
      mass += w[j];
    }
    row[n] = -1.0;
    row[n + 1] = 1.0;
    p.add_le(std::move(row), mass);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(n + 2, 0.0);
    row[j] = 1.0;
    p.add_le(std::move(row), 2.0);
  }
  const lp::Result r = lp::solve(p);
  if (r.status != lp::Status::kOptimal) return {std::numeric_limits<double>::infinity(), {}};
  std::vector<double> phi(n);
  for (std::size_t j = 0; j < n; ++j) phi[j] = r.x[j] - 1.0;
  return {r.value + offset, std::move(phi)};
}

/// The generator of mu (a sum of one member per block) attaining mu(phi).
inline Weights maximizing_generator(const StrongSubmeasure& mu, std::span<const double> phi) {
  Weights out(phi.size(), 0.0);
  for (const auto& block : mu.blocks()) {
    const Weights* best = nullptr;
    double best_value = -std::numeric_limits<double>::infinity();
    for (const auto& w : block) {
      const double v = dot(w, phi);
      if (v > best_value) {
        best_value = v;
        best = &w;
      }
    }
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += (*best)[j];
  }
  return out;
}

/// A test function phi with |phi| <= 1 and target.phi > mu(phi) + tol, if any.
inline std::optional<FunctionVector> separating_function(const StrongSubmeasure& mu, std::span<const double> target,
                                                         double tol) {
  const SpaceRef& space = mu.space();
  std::vector<double> zero(target.size(), 0.0);
  std::vector<Weights> cut{maximizing_generator(mu, zero)};
  const std::size_t limit = mu.generator_count() + 1;
  for (std::size_t round = 0; round <= limit; ++round) {
    auto [gap, phi] = separation(cut, target);
    if (!(gap > tol)) return std::nullopt;
    FunctionVector f(space, phi);
    if (dot(target, phi) > mu.eval(f) + tol) return f;
    Weights next = maximizing_generator(mu, phi);
    if (std::find(cut.begin(), cut.end(), next) != cut.end()) return std::nullopt;
    cut.push_back(std::move(next));
  }
  return std::nullopt;
}

}  // namespace detail

inline constexpr double kDominationTol = 1e-9;

/// nu(phi) <= mu(phi) for every phi.
inline bool is_dominated(const SignedMeasure& nu, const StrongSubmeasure& mu, double tol = kDominationTol) {
  require_same_space(nu.space(), mu.space(), "is_dominated");
  // Cheap exits: generator membership, then the mass obstruction.
  if (mu.blocks().size() == 1) {
    for (const auto& w : mu.blocks().front())
      if (w == nu.weights()) return true;
  }
  const double m = nu.mass();
  if (m > mu.eval(FunctionVector::constant(mu.space(), 1.0)) + tol ||
      -m > mu.eval(FunctionVector::constant(mu.space(), -1.0)) + tol) {
    return false;
  }
  const double scale = std::max(1.0, nu.total_variation());
  return !detail::separating_function(mu, nu.weights(), tol * scale).has_value();
}

/// mu >= nu as functionals, decided exactly on generators.
inline bool dominates(const StrongSubmeasure& mu, const StrongSubmeasure& nu, double tol = kDominationTol,
                      std::size_t cap = kDefaultGeneratorCap) {
  require_same_space(mu.space(), nu.space(), "dominates");
  for (const auto& w : nu.generator_weights(cap)) {
    if (!is_dominated(SignedMeasure(nu.space(), w), mu, tol)) return false;
  }
  return true;
}

/// Largest violation of a(phi) <= b(phi) over the panel (<= 0 means holds).
inline double max_excess(const StrongSubmeasure& a, const StrongSubmeasure& b, std::span<const FunctionVector> panel) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& phi : panel) worst = std::max(worst, a.eval(phi) - b.eval(phi));
  return worst;
}

inline double max_abs_difference(const StrongSubmeasure& a, const StrongSubmeasure& b,
                                 std::span<const FunctionVector> panel) {
  double worst = 0.0;
  for (const auto& phi : panel) worst = std::max(worst, std::fabs(a.eval(phi) - b.eval(phi)));
  return worst;
}

// ---------------------------------------------------------------------------
// Weak limits of sequences.

struct WeakLimitOptions {
  double tol = 1e-9;
  /// Norms above this bound violate the uniform-boundedness premise.
  double norm_bound = 1e12;
};

struct WeakLimitResult {
  bool converged = false;
  /// Index of the first element of the Cauchy tail.
  std::size_t tail_start = 0;
  /// Oscillation max - min of n -> mu_n(phi) over the tail, per basis function.
  std::vector<double> oscillation;
  /// Limit values on the basis (last element of the sequence).
  std::vector<double> values;
  std::optional<StrongSubmeasure> limit;
};

/// Tail-Cauchy test of n -> mu_n(phi) for every basis function. On success
/// the limit is the sup of the tail elements. Empty `basis` means the
/// indicator basis.
inline WeakLimitResult weak_limit(std::span<const StrongSubmeasure> seq, std::span<const FunctionVector> basis,
                                  const WeakLimitOptions& opt = {}) {
  if (seq.empty()) throw Error(ErrorCode::kInvalidArgument, "empty sequence", "weak_limit");
  const SpaceRef& space = seq.front().space();
  std::vector<FunctionVector> default_basis;
  if (basis.empty()) {
    default_basis = indicator_basis(space);
    basis = default_basis;
  }
  for (std::size_t i = 0; i < seq.size(); ++i) {
    require_same_space(space, seq[i].space(), "weak_limit");
    const double norm = norm_and_mass(seq[i]).norm;
    if (!(norm <= opt.norm_bound)) {
      throw Error(ErrorCode::kUnboundedNorm,
                  "element " + std::to_string(i) + " has norm " + std::to_string(norm) + " above bound", "weak_limit");
    }
  }
  std::vector<std::vector<double>> table;
  table.reserve(seq.size());
  for (const auto& mu : seq) table.push_back(evaluate_on(mu, basis));

  WeakLimitResult out;
  const std::size_t nb = basis.size();
  // Scan the tail backwards while the running oscillation stays within tol.
  std::vector<double> lo(table.back()), hi(table.back());
  std::size_t start = seq.size() - 1;
  while (start > 0) {
    bool ok = true;
    for (std::size_t j = 0; j < nb && ok; ++j) {
      const double v = table[start - 1][j];
      ok = std::max(hi[j], v) - std::min(lo[j], v) <= opt.tol;
    }
    if (!ok) break;
    --start;
    for (std::size_t j = 0; j < nb; ++j) {
      lo[j] = std::min(lo[j], table[start][j]);
      hi[j] = std::max(hi[j], table[start][j]);
    }
  }
  out.tail_start = start;
  out.oscillation.resize(nb);
  for (std::size_t j = 0; j < nb; ++j) out.oscillation[j] = hi[j] - lo[j];
  out.values = table.back();
  out.converged = seq.size() >= 2 && start <= seq.size() - 2;
  if (!out.converged) return out;
  StrongSubmeasure acc = seq[start];
  for (std::size_t i = start + 1; i < seq.size(); ++i) acc = combine(acc, seq[i], CombineMode::kMax);
  out.limit = std::move(acc);
  return out;
}

}  // namespace submeasure

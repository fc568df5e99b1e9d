#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "submeasure/error.hpp"
#include "submeasure/measure.hpp"
#include "submeasure/space.hpp"
#include "submeasure/strong_submeasure.hpp"

namespace submeasure {

struct Edge {
  std::size_t x;
  std::size_t y;
  unsigned multiplicity = 1;
};

/// One admissible limit configuration over an exceptional target point:
/// weighted source points whose weighted sum is a candidate envelope value.
using LimitGroup = std::vector<std::pair<std::size_t, double>>;
using LimitFibers = std::map<std::size_t, std::vector<LimitGroup>>;

inline constexpr std::size_t kLimitGroupCap = 100000;

struct CorrespondenceOptions {
  std::optional<PointSet> indeterminacy;
  LimitFibers limit_fibers;
  bool equal_dimension = true;
};

/// Finite graph of a meromorphic map X -> Y, required to be dominant (every
/// target hit) in equal-dimension mode. Source points with
/// several targets form the indeterminacy set; targets hit from it, and any
/// target with declared limit data, are exceptional.
class Correspondence {
 public:
  using Options = CorrespondenceOptions;

  Correspondence(SpaceRef source, SpaceRef target, std::vector<Edge> edges, unsigned generic_degree,
                 Options opt = Options())
      : source_(std::move(source)),
        target_(std::move(target)),
        degree_(generic_degree),
        limit_fibers_(std::move(opt.limit_fibers)),
        equal_dimension_(opt.equal_dimension) {
    if (!source_ || !target_) throw Error(ErrorCode::kInvalidModel, "missing space", "correspondence");
    if (degree_ == 0) throw Error(ErrorCode::kInvalidModel, "generic degree must be positive", "correspondence.generic_degree");
    const std::size_t nx = source_->size();
    const std::size_t ny = target_->size();
    std::map<std::pair<std::size_t, std::size_t>, unsigned> merged;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const Edge& e = edges[i];
      const std::string where = "correspondence.edges[" + std::to_string(i) + "]";
      if (e.x >= nx || e.y >= ny) throw Error(ErrorCode::kInvalidModel, "edge endpoint out of range", where);
      if (e.multiplicity == 0) throw Error(ErrorCode::kInvalidModel, "multiplicity must be >= 1", where);
      merged[{e.x, e.y}] += e.multiplicity;
    }
    out_.resize(nx);
    in_.resize(ny);
    for (const auto& [xy, m] : merged) {
      edges_.push_back({xy.first, xy.second, m});
      out_[xy.first].emplace_back(xy.second, m);
      in_[xy.second].emplace_back(xy.first, m);
    }
    for (std::size_t x = 0; x < nx; ++x) {
      if (out_[x].empty())
        throw Error(ErrorCode::kInvalidModel, "source point '" + source_->label(x) + "' has no image",
                    "correspondence.edges");
      if (out_[x].size() > 1) indeterminacy_.push_back(x);
    }
    for (std::size_t y = 0; y < ny && equal_dimension_; ++y) {
      if (in_[y].empty())
        throw Error(ErrorCode::kInvalidModel, "target point '" + target_->label(y) + "' is not hit (map not dominant)",
                    "correspondence.edges");
    }
    if (opt.indeterminacy) {
      PointSet declared = *opt.indeterminacy;
      std::sort(declared.begin(), declared.end());
      declared.erase(std::unique(declared.begin(), declared.end()), declared.end());
      if (declared != indeterminacy_)
        throw Error(ErrorCode::kInvalidModel, "declared indeterminacy set differs from multi-valued points",
                    "correspondence.indeterminacy");
    }
    exceptional_flag_.assign(ny, false);
    for (std::size_t x : indeterminacy_)
      for (const auto& [y, m] : out_[x]) exceptional_flag_[y] = true;
    for (const auto& [y, groups] : limit_fibers_) {
      const std::string where = "correspondence.limit_fibers." + (y < ny ? target_->label(y) : std::to_string(y));
      if (y >= ny) throw Error(ErrorCode::kInvalidModel, "limit fiber target out of range", where);
      if (groups.empty()) throw Error(ErrorCode::kInvalidModel, "empty limit fiber", where);
      exceptional_flag_[y] = true;
      for (const auto& g : groups) {
        if (g.empty()) throw Error(ErrorCode::kInvalidModel, "empty limit group", where);
        double total = 0.0;
        for (const auto& [x, w] : g) {
          if (x >= nx) throw Error(ErrorCode::kInvalidModel, "limit fiber source out of range", where);
          if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::kInvalidModel, "limit weight must be positive", where);
          total += w;
        }
        if (equal_dimension_ && std::fabs(total - degree_) > 1e-9)
          throw Error(ErrorCode::kInvalidModel, "limit group weights do not sum to the generic degree", where);
      }
    }
    for (std::size_t y = 0; y < ny; ++y) {
      if (exceptional_flag_[y]) {
        exceptional_.push_back(y);
        continue;
      }
      if (!equal_dimension_) continue;
      unsigned total = 0;
      for (const auto& [x, m] : in_[y]) total += m;
      if (total != degree_)
        throw Error(ErrorCode::kInvalidModel,
                    "fiber over '" + target_->label(y) + "' has degree " + std::to_string(total) + ", declared " +
                        std::to_string(degree_),
                    "correspondence.generic_degree");
    }
  }

  const SpaceRef& source() const noexcept { return source_; }
  const SpaceRef& target() const noexcept { return target_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  unsigned generic_degree() const noexcept { return degree_; }
  bool equal_dimension() const noexcept { return equal_dimension_; }
  const PointSet& indeterminacy() const noexcept { return indeterminacy_; }
  const LimitFibers& limit_fibers() const noexcept { return limit_fibers_; }
  /// Targets outside the covering locus.
  const PointSet& exceptional() const noexcept { return exceptional_; }
  bool is_exceptional(std::size_t y) const { return exceptional_flag_.at(y); }
  bool is_indeterminate(std::size_t x) const { return out_.at(x).size() > 1; }
  bool single_valued() const noexcept { return indeterminacy_.empty(); }
  bool is_endo() const { return source_->same_as(*target_); }

  /// Targets of x with multiplicities, sorted by target index.
  const std::vector<std::pair<std::size_t, unsigned>>& image(std::size_t x) const { return out_.at(x); }
  /// Sources of y with multiplicities, sorted by source index.
  const std::vector<std::pair<std::size_t, unsigned>>& preimage(std::size_t y) const { return in_.at(y); }

  /// f(x) for x off the indeterminacy set.
  std::size_t apply(std::size_t x) const {
    if (is_indeterminate(x)) throw Error(ErrorCode::kInvalidArgument, "point is indeterminate", "correspondence.apply");
    return out_.at(x).front().first;
  }

  /// Same source and target with a sub-collection of edges and new limit data.
  Correspondence restricted(const std::function<bool(const Edge&)>& keep, LimitFibers limit_fibers) const {
    std::vector<Edge> kept;
    for (const auto& e : edges_)
      if (keep(e)) kept.push_back(e);
    Options opt;
    opt.limit_fibers = std::move(limit_fibers);
    opt.equal_dimension = equal_dimension_;
    return Correspondence(source_, target_, std::move(kept), degree_, std::move(opt));
  }

 private:
  SpaceRef source_;
  SpaceRef target_;
  unsigned degree_;
  LimitFibers limit_fibers_;
  bool equal_dimension_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<std::size_t, unsigned>>> out_;
  std::vector<std::vector<std::pair<std::size_t, unsigned>>> in_;
  PointSet indeterminacy_;
  PointSet exceptional_;
  std::vector<bool> exceptional_flag_;
};

inline Correspondence identity_correspondence(const SpaceRef& space) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < space->size(); ++i) edges.push_back({i, i, 1});
  return Correspondence(space, space, std::move(edges), 1);
}

/// Single-valued map given by an image table.
inline Correspondence map_correspondence(const SpaceRef& source, const SpaceRef& target,
                                         const std::vector<std::size_t>& table, bool equal_dimension = false) {
  if (table.size() != source->size())
    throw Error(ErrorCode::kInvalidModel, "map table length does not match source", "correspondence");
  std::vector<Edge> edges;
  for (std::size_t x = 0; x < table.size(); ++x) edges.push_back({x, table[x], 1});
  Correspondence::Options opt;
  opt.equal_dimension = equal_dimension;
  return Correspondence(source, target, std::move(edges), 1, std::move(opt));
}

// ---------------------------------------------------------------------------
// Functions.

/// f*(phi)(x) = max of phi over the fiber of x: composition off I(f), the
/// usc envelope on I(f).
inline FunctionVector pullback_function(const Correspondence& f, const FunctionVector& phi) {
  require_same_space(f.target(), phi.space(), "pullback_function");
  std::vector<double> out(f.source()->size());
  for (std::size_t x = 0; x < out.size(); ++x) {
    double best = -INFINITY;
    for (const auto& [y, m] : f.image(x)) best = std::max(best, phi[y]);
    out[x] = best;
  }
  return FunctionVector(f.source(), std::move(out));
}

inline double limit_value(const LimitGroup& g, const FunctionVector& phi) {
  double s = 0.0;
  for (const auto& [x, w] : g) s += w * phi[x];
  return s;
}

/// f_*(phi)(y): the multiplicity-weighted fiber sum on the covering locus,
/// the max over declared limit groups at exceptional targets.
inline FunctionVector pushforward_function(const Correspondence& f, const FunctionVector& phi) {
  require_same_space(f.source(), phi.space(), "pushforward_function");
  if (!f.equal_dimension())
    throw Error(ErrorCode::kPrecondition, "function pushforward needs an equal-dimension model", "pushforward_function");
  std::vector<double> out(f.target()->size());
  for (std::size_t y = 0; y < out.size(); ++y) {
    if (f.is_exceptional(y)) {
      auto it = f.limit_fibers().find(y);
      if (it == f.limit_fibers().end())
        throw Error(ErrorCode::kInvalidModel,
                    "exceptional target '" + f.target()->label(y) + "' needs limit_fibers data",
                    "correspondence.limit_fibers");
      double best = -INFINITY;
      for (const auto& g : it->second) best = std::max(best, limit_value(g, phi));
      out[y] = best;
    } else {
      double s = 0.0;
      for (const auto& [x, m] : f.preimage(y)) s += m * phi[x];
      out[y] = s;
    }
  }
  return FunctionVector(f.target(), std::move(out));
}

// ---------------------------------------------------------------------------
// Submeasures.

namespace detail {

/// Blocks on the target representing phi -> sum_x chi_x max_{t in T(x)} <t, phi>
/// for chi >= 0, where options(x) lists the candidate target weight vectors.
template <class Options>
std::vector<Block> transport_measure(const Weights& chi, std::size_t target_size, Options&& options) {
  Weights linear(target_size, 0.0);
  std::vector<Block> blocks;
  for (std::size_t x = 0; x < chi.size(); ++x) {
    if (chi[x] == 0.0) continue;
    const std::vector<Weights>& opts = options(x);
    if (opts.size() == 1) {
      for (std::size_t j = 0; j < target_size; ++j) linear[j] += chi[x] * opts.front()[j];
      continue;
    }
    Block b;
    for (const auto& t : opts) {
      Weights w(t);
      for (double& v : w) v *= chi[x];
      b.push_back(std::move(w));
    }
    blocks.push_back(std::move(b));
  }
  blocks.insert(blocks.begin(), Block{std::move(linear)});
  return blocks;
}

/// Sup over a list of generators of sums of blocks, as blocks.
template <class Options>
std::vector<Block> transport_submeasure(const StrongSubmeasure& mu, std::size_t target_size, Options&& options,
                                        std::size_t cap) {
  std::vector<Block> result;
  for (const auto& block : mu.blocks()) {
    if (block.size() == 1) {
      auto parts = transport_measure(block.front(), target_size, options);
      result.insert(result.end(), std::make_move_iterator(parts.begin()), std::make_move_iterator(parts.end()));
      continue;
    }
    Block unioned;
    for (const auto& chi : block) {
      auto parts = transport_measure(chi, target_size, options);
      Block acc = parts.front();
      for (std::size_t k = 1; k < parts.size(); ++k) acc = minkowski(acc, parts[k], cap);
      unioned.insert(unioned.end(), std::make_move_iterator(acc.begin()), std::make_move_iterator(acc.end()));
      if (unioned.size() > cap)
        throw Error(ErrorCode::kTooLarge, "transported generator count exceeds cap", "transport");
    }
    result.push_back(std::move(unioned));
  }
  return result;
}

inline Weights unit(std::size_t n, std::size_t i, double mass = 1.0) {
  Weights w(n, 0.0);
  w[i] = mass;
  return w;
}

}  // namespace detail

/// f_*(mu)(phi) = E(mu)(f*phi); for non-positive mu through the LP.
inline double pushforward_value(const Correspondence& f, const StrongSubmeasure& mu, const FunctionVector& phi) {
  require_same_space(f.source(), mu.space(), "pushforward_value");
  return extend_usc(mu, pullback_function(f, phi)).value;
}

/// Positive pushforward as a submeasure on the target. Each point of I(f)
/// charged by a generator contributes one sup-block over its fiber, so the
/// materialized generators are the transports along all sections.
inline StrongSubmeasure pushforward_submeasure(const Correspondence& f, const StrongSubmeasure& mu,
                                               std::size_t cap = kDefaultGeneratorCap) {
  require_same_space(f.source(), mu.space(), "pushforward_submeasure");
  if (!mu.positive())
    throw Error(ErrorCode::kNotPositive, "generator representation needs a positive submeasure; use pushforward_value",
                "pushforward_submeasure");
  const std::size_t ny = f.target()->size();
  std::vector<std::vector<Weights>> options(f.source()->size());
  for (std::size_t x = 0; x < options.size(); ++x)
    for (const auto& [y, m] : f.image(x)) options[x].push_back(detail::unit(ny, y));
  auto blocks = detail::transport_submeasure(mu, ny, [&](std::size_t x) -> const std::vector<Weights>& { return options[x]; },
                                             cap);
  return StrongSubmeasure::from_blocks(f.target(), std::move(blocks));
}

inline StrongSubmeasure pushforward_measure(const Correspondence& f, const SignedMeasure& chi) {
  return pushforward_submeasure(f, StrongSubmeasure::from_measure(chi));
}

/// f*(nu)(phi) = E(nu)(f_*phi).
inline double pullback_value(const Correspondence& f, const StrongSubmeasure& nu, const FunctionVector& phi) {
  require_same_space(f.target(), nu.space(), "pullback_value");
  return extend_usc(nu, pushforward_function(f, phi)).value;
}

inline StrongSubmeasure pullback_submeasure(const Correspondence& f, const StrongSubmeasure& nu,
                                            std::size_t cap = kDefaultGeneratorCap) {
  require_same_space(f.target(), nu.space(), "pullback_submeasure");
  if (!f.equal_dimension())
    throw Error(ErrorCode::kPrecondition, "pullback needs an equal-dimension model", "pullback_submeasure");
  if (!nu.positive())
    throw Error(ErrorCode::kNotPositive, "generator representation needs a positive submeasure; use pullback_value",
                "pullback_submeasure");
  const std::size_t nx = f.source()->size();
  std::vector<std::vector<Weights>> options(f.target()->size());
  for (std::size_t y = 0; y < options.size(); ++y) {
    if (!f.is_exceptional(y)) {
      Weights w(nx, 0.0);
      for (const auto& [x, m] : f.preimage(y)) w[x] += m;
      options[y].push_back(std::move(w));
      continue;
    }
    auto it = f.limit_fibers().find(y);
    if (it == f.limit_fibers().end())
      throw Error(ErrorCode::kInvalidModel, "exceptional target '" + f.target()->label(y) + "' needs limit_fibers data",
                  "correspondence.limit_fibers");
    for (const auto& g : it->second) {
      Weights w(nx, 0.0);
      for (const auto& [x, wt] : g) w[x] += wt;
      options[y].push_back(std::move(w));
    }
    detail::dedupe(options[y]);
  }
  auto blocks = detail::transport_submeasure(nu, nx, [&](std::size_t y) -> const std::vector<Weights>& { return options[y]; },
                                             cap);
  return StrongSubmeasure::from_blocks(f.source(), std::move(blocks));
}

// ---------------------------------------------------------------------------
// Composition.

namespace detail {

/// Limit groups describing phi -> (f_* phi)(y) as a max of weighted sums.
inline std::vector<LimitGroup> groups_at(const Correspondence& f, std::size_t y) {
  if (!f.is_exceptional(y)) {
    LimitGroup g;
    for (const auto& [x, m] : f.preimage(y)) g.emplace_back(x, static_cast<double>(m));
    return {g};
  }
  auto it = f.limit_fibers().find(y);
  if (it == f.limit_fibers().end())
    throw Error(ErrorCode::kInvalidModel, "exceptional target '" + f.target()->label(y) + "' needs limit_fibers data",
                "compose");
  return it->second;
}

inline LimitGroup normalize_group(LimitGroup g) {
  std::sort(g.begin(), g.end());
  LimitGroup out;
  for (const auto& [x, w] : g) {
    if (!out.empty() && out.back().first == x) {
      out.back().second += w;
    } else {
      out.emplace_back(x, w);
    }
  }
  return out;
}

/// Groups of sum_k c_k * max(groups_k), expanded into a max of sums.
inline std::vector<LimitGroup> expand_groups(const std::vector<std::pair<double, std::vector<LimitGroup>>>& terms) {
  std::vector<LimitGroup> acc{LimitGroup{}};
  for (const auto& [c, groups] : terms) {
    if (acc.size() * groups.size() > kLimitGroupCap)
      throw Error(ErrorCode::kTooLarge, "composite limit data exceeds cap", "compose");
    std::vector<LimitGroup> next;
    for (const auto& a : acc) {
      for (const auto& g : groups) {
        LimitGroup s = a;
        for (const auto& [x, w] : g) s.emplace_back(x, c * w);
        next.push_back(std::move(s));
      }
    }
    acc = std::move(next);
  }
  for (auto& g : acc) g = normalize_group(std::move(g));
  std::sort(acc.begin(), acc.end());
  acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
  return acc;
}

}  // namespace detail

/// Relational composite g o f with multiplicity products. In equal-dimension
/// mode the composite limit data is chosen so that (g o f)_* = g_* f_* on
/// functions.
inline Correspondence compose(const Correspondence& f, const Correspondence& g) {
  require_same_space(f.target(), g.source(), "compose");
  std::map<std::pair<std::size_t, std::size_t>, unsigned> merged;
  for (const auto& e : f.edges())
    for (const auto& [z, m] : g.image(e.y)) merged[{e.x, z}] += e.multiplicity * m;
  std::vector<Edge> edges;
  for (const auto& [xz, m] : merged) edges.push_back({xz.first, xz.second, m});

  Correspondence::Options opt;
  opt.equal_dimension = f.equal_dimension() && g.equal_dimension();
  if (opt.equal_dimension) {
    for (std::size_t z = 0; z < g.target()->size(); ++z) {
      bool needs = g.is_exceptional(z);
      for (const auto& [y, m] : g.preimage(z)) needs = needs || f.is_exceptional(y);
      if (!needs) continue;
      std::vector<LimitGroup> result;
      for (const auto& outer : detail::groups_at(g, z)) {
        std::vector<std::pair<double, std::vector<LimitGroup>>> terms;
        for (const auto& [y, w] : outer) terms.emplace_back(w, detail::groups_at(f, y));
        auto expanded = detail::expand_groups(terms);
        result.insert(result.end(), expanded.begin(), expanded.end());
      }
      std::sort(result.begin(), result.end());
      result.erase(std::unique(result.begin(), result.end()), result.end());
      opt.limit_fibers[z] = std::move(result);
    }
  }
  return Correspondence(f.source(), g.target(), std::move(edges), f.generic_degree() * g.generic_degree(),
                        std::move(opt));
}

/// Resolution of the graph: X -> Gamma -> Y with Gamma the edge set, the first
/// map multi-valued exactly over I(f) and the second single-valued.
inline std::pair<Correspondence, Correspondence> resolve_graph(const Correspondence& f) {
  std::vector<std::string> labels;
  std::vector<Edge> to_graph;
  std::vector<Edge> to_target;
  for (std::size_t i = 0; i < f.edges().size(); ++i) {
    const Edge& e = f.edges()[i];
    labels.push_back(f.source()->label(e.x) + "|" + f.target()->label(e.y));
    to_graph.push_back({e.x, i, 1});
    to_target.push_back({i, e.y, e.multiplicity});
  }
  SpaceRef graph = FiniteSpace::make(std::move(labels));
  Correspondence::Options loose;
  loose.equal_dimension = false;
  return {Correspondence(f.source(), graph, std::move(to_graph), 1, loose),
          Correspondence(graph, f.target(), std::move(to_target), f.generic_degree(), loose)};
}

}  // namespace submeasure

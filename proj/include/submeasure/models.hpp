#pragma once

// Bundled finite models: blowup of a point, the Cremona involution, a
// transcendental toy map, and small endomorphisms used by the dynamics suites.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "submeasure/correspondence.hpp"
#include "submeasure/error.hpp"
#include "submeasure/measure.hpp"
#include "submeasure/space.hpp"

namespace submeasure {

struct BlowupModel {
  /// pi: Y -> X, collapsing the exceptional fiber V onto p.
  Correspondence pi;
  std::size_t p;
  /// Indices of V in Y.
  PointSet fiber;
};

/// X has n_base points with p first; Y replaces p by n_fiber points.
inline BlowupModel build_blowup_model(std::size_t n_base, std::size_t n_fiber) {
  if (n_base < 2 || n_fiber < 1)
    throw Error(ErrorCode::kInvalidArgument, "need n_base >= 2 and n_fiber >= 1", "build_blowup_model");
  std::vector<std::string> xl{"p"};
  std::vector<std::string> yl;
  for (std::size_t i = 1; i < n_base; ++i) {
    xl.push_back("x" + std::to_string(i));
    yl.push_back("x" + std::to_string(i));
  }
  PointSet fiber;
  for (std::size_t j = 0; j < n_fiber; ++j) {
    fiber.push_back(yl.size());
    yl.push_back("v" + std::to_string(j));
  }
  SpaceRef x = FiniteSpace::make(std::move(xl), {{"p", {0}}});
  SpaceRef y = FiniteSpace::make(std::move(yl), {{"V", fiber}});
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n_base; ++i) edges.push_back({i, i + 1, 1});
  for (std::size_t v : fiber) edges.push_back({v, 0, 1});
  Correspondence::Options opt;
  if (n_fiber > 1) {
    std::vector<LimitGroup> groups;
    for (std::size_t v : fiber) groups.push_back({{v, 1.0}});
    opt.limit_fibers[0] = std::move(groups);
  }
  return {Correspondence(y, x, std::move(edges), 1, std::move(opt)), 0, std::move(fiber)};
}

/// Generators of pi*(mu) for a positive measure mu on X: with mu = mu1 + mu2
/// and mu2 the mass at p, one measure mu1~ + mu(p) delta_v per section p -> v.
inline std::vector<SignedMeasure> blowup_generating_family(const BlowupModel& model, const PositiveMeasure& mu) {
  require_same_space(model.pi.target(), mu.space(), "blowup_generating_family");
  const SpaceRef& y = model.pi.source();
  std::vector<double> lifted(y->size(), 0.0);
  for (std::size_t i = 0; i < y->size(); ++i) {
    const std::size_t x = model.pi.apply(i);
    if (x != model.p) lifted[i] = mu.weights()[x];
  }
  std::vector<SignedMeasure> family;
  for (std::size_t v : model.fiber) {
    std::vector<double> w = lifted;
    w[v] += mu.weights()[model.p];
    family.emplace_back(y, std::move(w));
  }
  return family;
}

struct CremonaModel {
  Correspondence map;
  std::array<std::size_t, 3> e;
  /// Sigma_i: the line through the other two coordinate points, sampled.
  std::array<PointSet, 3> sigma;
  /// Interior samples of Sigma_i (mapped to e_i).
  std::array<PointSet, 3> samples;
  /// Generic approach pairs: p_n -> e0 while J(p_n) = r_n -> q.
  PointSet approach_p;
  PointSet approach_r;
  std::size_t q;
  std::size_t fixed_generic;
};

/// Points e0, e1, e2, n_line interior samples s<i>_<k> on each Sigma_i, a
/// generic fixed point, and n_approach generic pairs swapped by J.
inline CremonaModel build_cremona_model(std::size_t n_line, std::size_t n_approach = 3) {
  if (n_line < 2) throw Error(ErrorCode::kInvalidArgument, "need n_line >= 2", "build_cremona_model");
  if (n_approach < 1) throw Error(ErrorCode::kInvalidArgument, "need n_approach >= 1", "build_cremona_model");
  std::vector<std::string> labels{"e0", "e1", "e2"};
  std::array<PointSet, 3> samples;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < n_line; ++k) {
      samples[i].push_back(labels.size());
      labels.push_back("s" + std::to_string(i) + "_" + std::to_string(k));
    }
  }
  const std::size_t fixed = labels.size();
  labels.push_back("g");
  PointSet ps, rs;
  for (std::size_t n = 0; n < n_approach; ++n) {
    ps.push_back(labels.size());
    labels.push_back("p" + std::to_string(n));
    rs.push_back(labels.size());
    labels.push_back("r" + std::to_string(n));
  }
  std::array<PointSet, 3> sigma;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j)
      if (j != i) sigma[i].push_back(j);
    sigma[i].insert(sigma[i].end(), samples[i].begin(), samples[i].end());
  }
  PointSet generic{fixed};
  generic.insert(generic.end(), ps.begin(), ps.end());
  generic.insert(generic.end(), rs.begin(), rs.end());
  std::map<std::string, PointSet> subsets{{"E", {0, 1, 2}},
                                          {"Sigma0", sigma[0]},
                                          {"Sigma1", sigma[1]},
                                          {"Sigma2", sigma[2]},
                                          {"generic", generic},
                                          {"approach_p", ps},
                                          {"approach_r", rs}};
  SpaceRef space = FiniteSpace::make(std::move(labels), std::move(subsets));

  std::vector<Edge> edges;
  Correspondence::Options opt;
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<LimitGroup> groups;
    for (std::size_t s : sigma[i]) {
      edges.push_back({i, s, 1});
      groups.push_back({{s, 1.0}});
    }
    opt.limit_fibers[i] = std::move(groups);
    for (std::size_t s : samples[i]) {
      edges.push_back({s, i, 1});
      opt.limit_fibers[s] = {{{i, 1.0}}};
    }
  }
  edges.push_back({fixed, fixed, 1});
  for (std::size_t n = 0; n < n_approach; ++n) {
    edges.push_back({ps[n], rs[n], 1});
    edges.push_back({rs[n], ps[n], 1});
  }
  Correspondence map(space, space, std::move(edges), 1, std::move(opt));
  return {std::move(map), {0, 1, 2}, sigma, samples, std::move(ps), std::move(rs), samples[0].front(), fixed};
}

struct TranscendentalModel {
  Correspondence map;
  /// The point at infinity; its fiber is the whole space.
  std::size_t infinity;
};

/// Net z0..z<n-1> plus the essential singularity x0. The default finite map
/// shifts z_i to z_{i+1}, closes z_{n-2} back to z0 and contracts z_{n-1}
/// onto z0. A custom table lists the image of each z_i.
inline TranscendentalModel build_transcendental_model(std::size_t n_net,
                                                      const std::optional<std::vector<std::size_t>>& table = {}) {
  if (n_net < 2) throw Error(ErrorCode::kInvalidArgument, "need n_net >= 2", "build_transcendental_model");
  std::vector<std::size_t> image(n_net);
  if (table) {
    if (table->size() != n_net)
      throw Error(ErrorCode::kInvalidArgument, "map table length differs from n_net", "build_transcendental_model");
    for (std::size_t i = 0; i < n_net; ++i) {
      if ((*table)[i] >= n_net) throw Error(ErrorCode::kInvalidArgument, "map table entry out of range", "build_transcendental_model");
      image[i] = (*table)[i];
    }
  } else {
    for (std::size_t i = 0; i < n_net; ++i) image[i] = (i + 1 < n_net - 1) ? i + 1 : 0;
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n_net; ++i) labels.push_back("z" + std::to_string(i));
  labels.push_back("x0");
  PointSet net(n_net);
  for (std::size_t i = 0; i < n_net; ++i) net[i] = i;
  SpaceRef space = FiniteSpace::make(std::move(labels), {{"net", net}, {"infinity", {n_net}}});
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n_net; ++i) edges.push_back({i, image[i], 1});
  for (std::size_t y = 0; y <= n_net; ++y) edges.push_back({n_net, y, 1});
  Correspondence::Options opt;
  opt.equal_dimension = false;
  return {Correspondence(space, space, std::move(edges), 1, std::move(opt)), n_net};
}

/// a<k> -> ... -> a1 -> q -> q.
inline Correspondence build_attractor_model(std::size_t chain) {
  std::vector<std::string> labels{"q"};
  for (std::size_t i = 1; i <= chain; ++i) labels.push_back("a" + std::to_string(i));
  SpaceRef space = FiniteSpace::make(std::move(labels));
  std::vector<std::size_t> table(chain + 1);
  for (std::size_t i = 1; i <= chain; ++i) table[i] = i - 1;
  return map_correspondence(space, space, table);
}

/// Full relation on k symbols.
inline Correspondence build_full_shift_model(std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "need k >= 1", "build_full_shift_model");
  SpaceRef space = FiniteSpace::numbered(k, "s");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) edges.push_back({i, j, 1});
  Correspondence::Options opt;
  opt.equal_dimension = false;
  return Correspondence(space, space, std::move(edges), static_cast<unsigned>(k), std::move(opt));
}

/// a -> {a, b}, b -> a.
inline Correspondence build_golden_mean_model() {
  SpaceRef space = FiniteSpace::make({"a", "b"});
  Correspondence::Options opt;
  opt.equal_dimension = false;
  return Correspondence(space, space, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}}, 1, std::move(opt));
}

/// Cyclic permutation of k points.
inline Correspondence build_cycle_model(std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "need k >= 1", "build_cycle_model");
  SpaceRef space = FiniteSpace::numbered(k, "c");
  std::vector<std::size_t> table(k);
  for (std::size_t i = 0; i < k; ++i) table[i] = (i + 1) % k;
  return map_correspondence(space, space, table, true);
}

inline Correspondence build_identity_model(std::size_t k) {
  return identity_correspondence(FiniteSpace::numbered(k, "x"));
}

/// Two compactifications of the golden-mean map on {a, b}: one adds a single
/// fixed point at infinity, the other a pair of points at infinity that
/// connect to each other freely.
inline std::pair<Correspondence, Correspondence> build_compactification_pair() {
  SpaceRef one = FiniteSpace::make({"a", "b", "inf"});
  SpaceRef two = FiniteSpace::make({"a", "b", "inf0", "inf1"});
  Correspondence::Options opt;
  opt.equal_dimension = false;
  Correspondence small(one, one, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {2, 2, 1}}, 1, opt);
  Correspondence large(two, two, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {2, 2, 1}, {2, 3, 1}, {3, 2, 1}, {3, 3, 1}}, 1,
                       opt);
  return {std::move(small), std::move(large)};
}

struct NamedModel {
  std::string name;
  Correspondence map;
};

/// Every bundled endomorphism at a default size.
inline std::vector<NamedModel> bundled_endo_models() {
  std::vector<NamedModel> out;
  out.push_back({"cremona", build_cremona_model(3).map});
  out.push_back({"transcendental", build_transcendental_model(20).map});
  out.push_back({"attractor", build_attractor_model(4)});
  out.push_back({"full_shift2", build_full_shift_model(2)});
  out.push_back({"full_shift3", build_full_shift_model(3)});
  out.push_back({"golden_mean", build_golden_mean_model()});
  out.push_back({"cycle5", build_cycle_model(5)});
  out.push_back({"identity3", build_identity_model(3)});
  auto [small, large] = build_compactification_pair();
  out.push_back({"compactification_small", std::move(small)});
  out.push_back({"compactification_large", std::move(large)});
  return out;
}

}  // namespace submeasure

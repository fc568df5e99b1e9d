#pragma once

// Built-in property suite run by `submeasure verify`. Every check draws from
// its own generator seeded from the run seed and its position, so a filtered
// run reproduces the same draws as a full one.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "submeasure/submeasure.hpp"

namespace submeasure::verify {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Check {
  std::string name;
  std::vector<std::string> tags;
  std::function<Outcome(std::mt19937_64&)> run;
};

/// Records the first violation with its witness.
class Recorder {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && out_.pass) {
      out_.pass = false;
      out_.detail = what;
    }
  }
  void expect_near(double a, double b, double tol, const std::string& what) {
    if (!(std::fabs(a - b) <= tol)) expect(false, what + ": " + num(a) + " vs " + num(b));
  }
  void expect_le(double a, double b, double tol, const std::string& what) {
    if (!(a <= b + tol)) expect(false, what + ": " + num(a) + " > " + num(b));
  }
  Outcome done(const std::string& summary) {
    if (out_.pass) out_.detail = summary;
    return out_;
  }
  static std::string num(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  }

 private:
  Outcome out_;
};

inline std::string phi_text(const FunctionVector& phi) {
  std::string s = "phi=[";
  for (std::size_t i = 0; i < phi.size(); ++i) s += (i ? "," : "") + Recorder::num(phi[i]);
  return s + "]";
}

// Sub-graph keeping every target hit, as a loose correspondence.
inline Correspondence prune_graph(std::mt19937_64& rng, const Correspondence& h) {
  std::bernoulli_distribution drop(0.5);
  std::vector<Edge> kept;
  std::vector<bool> hit(h.target()->size(), false);
  for (std::size_t x = 0; x < h.source()->size(); ++x) {
    const auto& img = h.image(x);
    for (std::size_t k = 0; k < img.size(); ++k)
      if (k == 0 || !drop(rng)) {
        kept.push_back({x, img[k].first, img[k].second});
        hit[img[k].first] = true;
      }
  }
  for (const auto& e : h.edges())
    if (!hit[e.y]) {
      kept.push_back(e);
      hit[e.y] = true;
    }
  CorrespondenceOptions opt;
  opt.equal_dimension = false;
  return Correspondence(h.source(), h.target(), std::move(kept), h.generic_degree(), opt);
}

inline double mass_of(const StrongSubmeasure& mu, double sign = 1.0) {
  return mu.eval(FunctionVector::constant(mu.space(), sign));
}

// ---------------------------------------------------------------------------

inline Outcome check_measure_core(std::mt19937_64& rng) {
  Recorder r;
  auto s = FiniteSpace::numbered(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto mu = random_signed_submeasure(rng, s);
    auto a = random_function(rng, s), b = random_function(rng, s);
    r.expect_le(mu.eval(a + b), mu.eval(a) + mu.eval(b), 1e-9, "subadditivity " + phi_text(a));
    r.expect_near(mu.eval(a * 2.5), 2.5 * mu.eval(a), 1e-9, "positive homogeneity " + phi_text(a));
    const double lip = norm_and_mass(mu).norm * (a - b).sup_norm();
    r.expect_le(std::fabs(mu.eval(a) - mu.eval(b)), lip, 1e-9, "Lipschitz bound");
    for (const auto& g : mu.generators()) r.expect(is_dominated(g, mu), "generator not dominated");
    auto pos = random_positive_submeasure(rng, s);
    r.expect_le(pos.eval(a), pos.eval(a + FunctionVector(s, random_values(rng, 5, 0.0, 1.0))), 1e-12,
                "monotonicity");
  }
  return r.done("50 random submeasures: sublinear, Lipschitz, monotone when positive");
}

inline Outcome check_blowup(std::mt19937_64& rng) {
  Recorder r;
  auto blow = build_blowup_model(5, 4);
  auto y = blow.pi.source();
  auto x = blow.pi.target();
  auto pulled = pullback_submeasure(blow.pi, StrongSubmeasure::from_measure(SignedMeasure::dirac(x, blow.p)));
  for (int i = 0; i < 200; ++i) {
    auto phi = random_integer_function(rng, y);
    r.expect(pulled.eval(phi) == phi.max_over(blow.fiber), "pullback of delta_p " + phi_text(phi));
  }
  for (unsigned mask = 0; mask < (1u << y->size()); ++mask) {
    PointSet a;
    bool hits = false;
    for (std::size_t i = 0; i < y->size(); ++i)
      if (mask & (1u << i)) {
        a.push_back(i);
        hits = hits || blow.pi.apply(i) == blow.p;
      }
    r.expect(set_value(pulled, a, SetMode::kClosed) == (hits ? 1.0 : 0.0), "set value on mask " + std::to_string(mask));
  }
  return r.done("pullback of delta_p is the max over the fiber; 256 set values match");
}

inline Outcome check_cremona(std::mt19937_64& rng) {
  Recorder r;
  auto c = build_cremona_model(3, 4);
  auto s = c.map.source();
  auto delta = StrongSubmeasure::from_measure(SignedMeasure::dirac(s, c.e[0]));
  auto once = pushforward_submeasure(c.map, delta);
  for (int i = 0; i < 100; ++i) {
    auto phi = random_function(rng, s);
    r.expect_near(once.eval(phi), phi.max_over(c.sigma[0]), 0.0, "J_* delta_e0 " + phi_text(phi));
  }
  auto twice = pushforward_submeasure(c.map, once);
  auto id = pushforward_submeasure(identity_correspondence(s), delta);
  const auto w1 = FunctionVector::indicator(s, c.samples[1].front());
  r.expect(twice.eval(w1) == 1.0 && id.eval(w1) == 0.0, "J_*J_* vs identity not strict at 1_" + s->label(c.samples[1].front()));
  PointSet g = c.approach_p;
  g.push_back(c.e[0]);
  PointSet small = c.approach_r;
  small.push_back(c.q);
  auto full = pushforward_submeasure(c.map, StrongSubmeasure::sup_of_diracs(s, g));
  auto reduced = StrongSubmeasure::sup_of_diracs(s, small);
  const auto w0 = FunctionVector::indicator(s, c.samples[0][1]);
  r.expect(full.eval(w0) == 1.0 && reduced.eval(w0) == 0.0, "smaller generating set commutes at 1_" + s->label(c.samples[0][1]));
  return r.done("J_* delta_e0 = sup over Sigma0; composition strict at 1_" + s->label(c.samples[1].front()) +
                "; smaller generating set fails at 1_" + s->label(c.samples[0][1]));
}

inline Outcome check_intersection(std::mt19937_64& rng) {
  Recorder r;
  for (std::size_t n : {1u, 4u, 50u}) {
    auto line = build_divisor_model(DivisorKind::kLineP2, n);
    auto exc = build_divisor_model(DivisorKind::kExceptionalE, n);
    r.expect(kappa(line) == 0.0, "kappa(line) != 0");
    auto ll = least_negative(line);
    auto le = least_negative(exc);
    const PointSet d = line.space()->subset("D"), e = exc.space()->subset("E");
    auto panel = indicator_basis(line.space());
    for (int i = 0; i < 50; ++i) panel.push_back(random_function(rng, line.space()));
    for (const auto& phi : panel) {
      r.expect_near(ll.eval(phi), phi.max_over(d), 1e-9, "line Lambda " + phi_text(phi));
      const FunctionVector psi(exc.space(), phi.values());
      r.expect_near(le.eval(psi), (psi * -1.0).max_over(e), 1e-9, "exceptional Lambda " + phi_text(psi));
    }
    for (const auto& gen : le.generators()) r.expect_near(gen.mass(), -1.0, 1e-12, "exceptional mass");
  }
  auto [f1, f2] = build_split_line_pair();
  auto sum = least_negative(family_sum(f1, f2));
  const auto w = FunctionVector::indicator(f1.space(), 1);
  r.expect(sum.eval(w) > least_negative(f1).eval(w) + least_negative(f2).eval(w), "split lines not strictly superadditive");
  return r.done("line: kappa 0, Lambda = sup_D; exceptional: Lambda = sup_E(-phi), mass -1; strict superadditivity");
}

inline Outcome check_pushforward(std::mt19937_64& rng) {
  Recorder r;
  auto pair = [&](unsigned d1, unsigned d2, std::size_t indet) {
    auto z = FiniteSpace::numbered(2, "z");
    auto y = FiniteSpace::numbered(2 * d2, "y");
    auto x = FiniteSpace::numbered(2 * d2 * d1, "x");
    return std::pair{random_correspondence(rng, x, y, d1, indet), random_correspondence(rng, y, z, d2, indet)};
  };
  // Mass and degree.
  for (int t = 0; t < 50; ++t) {
    const unsigned d = 1 + t % 3;
    auto y = FiniteSpace::numbered(3, "y");
    auto f = random_correspondence(rng, FiniteSpace::numbered(3 * d, "x"), y, d, t % 4);
    auto mu = random_positive_submeasure(rng, f.source());
    auto nu = random_positive_submeasure(rng, y);
    r.expect_near(mass_of(pushforward_submeasure(f, mu)), mass_of(mu), 1e-12, "pushforward mass");
    r.expect_near(mass_of(pullback_submeasure(f, nu)), d * mass_of(nu), 1e-12, "pullback mass");
  }
  // Composition.
  int strict = 0;
  for (int t = 0; t < 200; ++t) {
    auto [f, g] = pair(1 + t % 2, 1 + (t / 2) % 2, 1 + t % 3);
    auto h = compose(f, g);
    auto loose = prune_graph(rng, h);
    auto mu = random_positive_submeasure(rng, f.source());
    auto two = pushforward_submeasure(g, pushforward_submeasure(f, mu));
    auto direct = pushforward_submeasure(loose, mu);
    auto nu = random_positive_submeasure(rng, g.target());
    auto pulled = pullback_submeasure(f, pullback_submeasure(g, nu));
    for (int i = 0; i < 5; ++i) {
      auto phi = random_function(rng, g.target());
      r.expect_le(direct.eval(phi), two.eval(phi), 1e-9, "(g o f)_* <= g_* f_* " + phi_text(phi));
      if (two.eval(phi) > direct.eval(phi) + 1e-9) ++strict;
      auto psi = random_function(rng, f.source());
      r.expect_le(pullback_value(h, nu, psi), pulled.eval(psi), 1e-9, "(g o f)^* <= f^* g^* " + phi_text(psi));
    }
  }
  r.expect(strict > 0, "no strict composition on 200 pairs");
  // Cluster points.
  auto c = build_cremona_model(3, 4);
  auto s = c.map.source();
  PointSet ps;
  PointSet cl = c.approach_r;
  cl.push_back(c.q);
  auto cluster = StrongSubmeasure::sup_of_diracs(s, cl);
  for (std::size_t n = 0; n < c.approach_p.size(); ++n) {
    ps.push_back(c.approach_p[n]);
    auto img = pushforward_submeasure(c.map, StrongSubmeasure::sup_of_diracs(s, ps));
    for (const auto& phi : indicator_basis(s)) r.expect_le(img.eval(phi), cluster.eval(phi), 0.0, "approach image");
  }
  PointSet g = c.approach_p;
  g.push_back(c.e[0]);
  auto image = pushforward_submeasure(c.map, StrongSubmeasure::sup_of_diracs(s, g));
  for (const auto& phi : indicator_basis(s)) r.expect_le(cluster.eval(phi), image.eval(phi), 0.0, "cluster point");
  const auto w = FunctionVector::indicator(s, c.samples[0][1]);
  r.expect(cluster.eval(w) < image.eval(w), "cluster point not strict");
  // Classical agreement, sup commutation, superadditivity.
  for (int t = 0; t < 100; ++t) {
    auto y = FiniteSpace::numbered(3, "y");
    auto x = FiniteSpace::numbered(6, "x");
    auto f = random_correspondence(rng, x, y, 2, 2);
    std::vector<double> wts(x->size(), 0.0);
    for (std::size_t i = 0; i < wts.size(); ++i)
      if (!f.is_indeterminate(i)) wts[i] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::vector<double> expect(y->size(), 0.0);
    for (std::size_t i = 0; i < wts.size(); ++i)
      if (wts[i] != 0.0) expect[f.apply(i)] += wts[i];
    auto img = pushforward_measure(f, SignedMeasure(x, wts)).as_measure();
    r.expect(img && img->weights() == expect, "classical pushforward differs");
    auto mu = random_positive_submeasure(rng, x, 3);
    auto push = pushforward_submeasure(f, mu);
    auto m2 = random_positive_submeasure(rng, x);
    auto sum_push = pushforward_submeasure(f, mu.plus(m2));
    auto push_sum = push.plus(pushforward_submeasure(f, m2));
    for (int i = 0; i < 3; ++i) {
      auto phi = random_function(rng, y);
      double best = -INFINITY;
      for (const auto& chi : mu.generators()) best = std::max(best, pushforward_measure(f, chi).eval(phi));
      r.expect_near(push.eval(phi), best, 1e-9, "sup commutation " + phi_text(phi));
      r.expect_le(push_sum.eval(phi), sum_push.eval(phi), 1e-9, "superadditivity " + phi_text(phi));
    }
  }
  return r.done("mass/degree, composition (" + std::to_string(strict) +
                " strict), cluster points, classical agreement, sup commutation, superadditivity");
}

inline Outcome check_entropy(std::mt19937_64&) {
  Recorder r;
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<std::pair<Correspondence, double>> cases{{build_full_shift_model(2), std::log(2.0)},
                                                       {build_full_shift_model(3), std::log(3.0)},
                                                       {build_full_shift_model(5), std::log(5.0)},
                                                       {build_golden_mean_model(), std::log(golden)}};
  for (const auto& [f, expect] : cases) {
    auto sft = build_orbit_sft(f);
    const double top = topological_entropy(sft);
    r.expect_near(top, expect, 1e-6, "topological entropy");
    r.expect_near(markov_entropy(parry_measure(sft)), top, 1e-6, "Parry entropy");
    r.expect_near(submeasure_entropy(sft, StrongSubmeasure::sup_all_diracs(sft.space())).value, top, 1e-6,
                  "entropy of sup of diracs");
  }
  return r.done("log 2, log 3, log 5, log golden: topological = Parry = sup-of-diracs entropy");
}

inline Outcome check_invariant(std::mt19937_64& rng) {
  Recorder r;
  std::size_t compared = 0;
  for (const auto& m : bundled_endo_models()) {
    const auto& f = m.map;
    const std::size_t n = f.source()->size();
    auto below = subinvariant_seed(f, n - 1);
    auto above = superinvariant_seed(f);
    auto leq = inv_leq(f, below);
    auto geq = inv_geq(f, above);
    r.expect(leq.iterations <= 10 * n * n && geq.iterations <= 10 * n * n, m.name + ": iteration budget");
    r.expect_le(invariance_defect(f, leq.limit), 0.0, 1e-9, m.name + ": inv_leq invariance");
    r.expect_le(invariance_defect(f, geq.limit), 0.0, 1e-9, m.name + ": inv_geq invariance");
    for (int k = 0; k < 100; ++k) {
      if (auto nu = sample_invariant_below(f, below, rng)) {
        r.expect(dominates(leq.limit, *nu), m.name + ": inv_leq not maximal");
        ++compared;
      }
      if (auto mu = sample_invariant_above(f, above, rng)) {
        r.expect(dominates(*mu, geq.limit), m.name + ": inv_geq not minimal");
        ++compared;
      }
    }
  }
  return r.done("fixed points invariant within budget; extremal against " + std::to_string(compared) + " samples");
}

inline Outcome check_transcendental(std::mt19937_64& rng) {
  Recorder r;
  auto t = build_transcendental_model(20);
  auto s = t.map.source();
  auto mu_x = StrongSubmeasure::sup_all_diracs(s);
  std::vector<double> w(s->size(), 0.0);
  for (std::size_t i : s->subset("net")) w[i] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  SignedMeasure mu0(s, w);
  for (double a : {0.0, 0.5, 1.0}) {
    auto lhs = pushforward_submeasure(t.map, StrongSubmeasure::from_measure(mu0 + SignedMeasure::dirac(s, t.infinity, a)));
    auto rhs = pushforward_measure(t.map, mu0).plus(mu_x.scaled(a));
    for (const auto& phi : indicator_basis(s)) r.expect(lhs.eval(phi) == rhs.eval(phi), "mass at infinity, a=" + Recorder::num(a));
  }
  auto fixed = pushforward_submeasure(t.map, mu_x);
  for (const auto& phi : indicator_basis(s)) r.expect(fixed.eval(phi) == mu_x.eval(phi), "mu_X not invariant");
  return r.done("f_*(mu0 + a delta_x0) = f_*mu0 + a mu_X for a in {0, 1/2, 1}; f_*mu_X = mu_X");
}

/// Random lifted submeasure on the word space: sups and sums of point masses
/// on words and two-block marginals of lifted invariant measures.
inline StrongSubmeasure random_lift(std::mt19937_64& rng, const OrbitSFT& sft, const WordSpace& ws,
                                    const InvariantSampler& sampler) {
  if (std::bernoulli_distribution(0.5)(rng)) return random_positive_submeasure(rng, ws.space);
  auto inv = sampler.sample(rng, 1.0, 0).as_measure();
  std::vector<double> w(ws.words.size(), 0.0);
  if (inv && mass_of(StrongSubmeasure::from_measure(*inv)) > 0.0) {
    auto lift = lift_invariant_measure(sft, PositiveMeasure(*inv));
    for (std::size_t k = 0; k < ws.words.size(); ++k)
      w[k] = lift.stationary()[ws.words[k][0]] * lift.transitions()(ws.words[k][0], ws.words[k][1]);
  } else {
    w[std::uniform_int_distribution<std::size_t>(0, w.size() - 1)(rng)] = 1.0;
  }
  return combine(StrongSubmeasure::from_measure(SignedMeasure(ws.space, w)), random_positive_submeasure(rng, ws.space),
                 CombineMode::kMax);
}

inline Outcome check_key_inequality(std::mt19937_64& rng) {
  Recorder r;
  auto c = build_cremona_model(3);
  auto sft = build_orbit_sft(c.map);
  auto ws = build_word_space(sft, 2);
  InvariantSampler sampler(c.map, c.map.source()->subset("generic"));
  std::size_t strict = 0;
  for (int k = 0; k < 100; ++k) {
    auto rep = key_inequality_check(sft, ws, random_lift(rng, sft, ws, sampler));
    r.expect(rep.holds, "key inequality fails on draw " + std::to_string(k));
    if (!rep.strict_witnesses.empty()) ++strict;
  }
  r.expect(strict > 0, "no strict witness");
  return r.done("100 lifted submeasures on the Cremona orbit space; " + std::to_string(strict) + " strict");
}

inline std::vector<Check> registry() {
  return {
      {"measure-core", {"measure-core", "sublinear"}, check_measure_core},
      {"blowup-pullback", {"blowup", "pullback", "examples"}, check_blowup},
      {"cremona-strictness", {"cremona", "pushforward", "examples"}, check_cremona},
      {"least-negative-intersection", {"intersection", "examples"}, check_intersection},
      {"pushforward-properties", {"pushforward", "composition"}, check_pushforward},
      {"variational-principle", {"entropy"}, check_entropy},
      {"invariant-solvers", {"invariant", "dynamics"}, check_invariant},
      {"transcendental-formulas", {"transcendental", "pushforward", "examples"}, check_transcendental},
      {"key-inequality", {"entropy", "key-inequality", "cremona"}, check_key_inequality},
  };
}

inline bool matches(const Check& c, const std::string& filter) {
  if (filter.empty() || c.name == filter) return true;
  return std::find(c.tags.begin(), c.tags.end(), filter) != c.tags.end();
}

}  // namespace submeasure::verify

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "submeasure/submeasure.hpp"

using namespace submeasure;
using namespace testing_support;

namespace {

SpaceRef two_points() { return FiniteSpace::make({"a", "b"}); }

// Minimum of t over the vertices of {t >= chi.psi for every generator, psi >= g}.
// Each vertex fixes n+1 of the constraints with equality.
double vertex_oracle(const std::vector<std::vector<double>>& gens, const std::vector<double>& g) {
  const std::size_t n = g.size();
  // Rows: a.x >= b with x = (psi, t).
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (const auto& chi : gens) {
    Eigen::VectorXd r(n + 1);
    for (std::size_t j = 0; j < n; ++j) r[j] = -chi[j];
    r[n] = 1.0;
    rows.push_back(r);
    rhs.push_back(0.0);
  }
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n + 1);
    r[j] = 1.0;
    rows.push_back(r);
    rhs.push_back(g[j]);
  }
  const std::size_t m = rows.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(m, 0);
  std::fill(pick.end() - static_cast<long>(n + 1), pick.end(), 1);
  do {
    Eigen::MatrixXd a(n + 1, n + 1);
    Eigen::VectorXd b(n + 1);
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!pick[i]) continue;
      a.row(static_cast<long>(k)) = rows[i].transpose();
      b[static_cast<long>(k)] = rhs[i];
      ++k;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < static_cast<long>(n + 1)) continue;
    const Eigen::VectorXd x = lu.solve(b);
    bool feasible = true;
    for (std::size_t i = 0; i < m; ++i) feasible = feasible && rows[i].dot(x) >= rhs[i] - 1e-9;
    if (feasible) best = std::min(best, x[static_cast<long>(n)]);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST(Lp, SolvesSmallProgram) {
  lp::Problem p;
  p.c = {3.0, 2.0};
  p.add_le({1.0, 1.0}, 4.0);
  p.add_le({1.0, 3.0}, 6.0);
  p.add_le({1.0, 0.0}, 3.0);
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::kOptimal);
  EXPECT_NEAR(r.value, 11.0, 1e-12);
  EXPECT_NEAR(r.x[0], 3.0, 1e-12);
  EXPECT_NEAR(r.x[1], 1.0, 1e-12);
}

TEST(Lp, ReportsInfeasibleAndUnbounded) {
  lp::Problem infeasible;
  infeasible.c = {1.0};
  infeasible.add_le({1.0}, 1.0);
  infeasible.add_ge({1.0}, 2.0);
  EXPECT_EQ(lp::solve(infeasible).status, lp::Status::kInfeasible);

  lp::Problem unbounded;
  unbounded.c = {1.0, 0.0};
  unbounded.add_le({-1.0, 1.0}, 1.0);
  EXPECT_EQ(lp::solve(unbounded).status, lp::Status::kUnbounded);
}

TEST(Lp, TerminatesOnDegenerateCyclingExample) {
  // Beale's program cycles under the largest-coefficient rule.
  lp::Problem p;
  p.c = {0.75, -150.0, 0.02, -6.0};
  p.add_le({0.25, -60.0, -0.04, 9.0}, 0.0);
  p.add_le({0.5, -90.0, -0.02, 3.0}, 0.0);
  p.add_le({0.0, 0.0, 1.0, 0.0}, 1.0);
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::kOptimal);
  EXPECT_NEAR(r.value, 0.05, 1e-12);
}

TEST(Space, RejectsDuplicateLabelsAndBadMetric) {
  EXPECT_THROW(FiniteSpace({"a", "a"}), Error);
  Matrix d(2, 2);
  d(0, 1) = 1.0;
  d(1, 0) = 2.0;
  EXPECT_THROW(FiniteSpace({"a", "b"}, d), Error);
  Matrix tri(3, 3);
  tri(0, 1) = tri(1, 0) = 1.0;
  tri(1, 2) = tri(2, 1) = 1.0;
  tri(0, 2) = tri(2, 0) = 3.0;
  EXPECT_THROW(FiniteSpace({"a", "b", "c"}, tri), Error);
  tri(0, 2) = tri(2, 0) = 2.0;
  EXPECT_NO_THROW(FiniteSpace({"a", "b", "c"}, tri));
}

TEST(Eval, Examples) {
  auto s = two_points();
  StrongSubmeasure mu(s, {SignedMeasure::dirac(s, 0), SignedMeasure::dirac(s, 1)});
  EXPECT_EQ(mu.eval(FunctionVector(s, {2.0, 5.0})), 5.0);

  auto single = StrongSubmeasure::from_measure(SignedMeasure::dirac(s, 1));
  EXPECT_EQ(single.eval(FunctionVector(s, {7.0, -4.0})), -4.0);

  const SignedMeasure d = SignedMeasure::dirac(s, 0) - SignedMeasure::dirac(s, 1);
  StrongSubmeasure sym(s, {d, -d});
  EXPECT_EQ(sym.eval(FunctionVector(s, {1.0, -1.0})), 2.0);

  auto other = FiniteSpace::make({"a", "b", "c"});
  EXPECT_THROW(mu.eval(FunctionVector::constant(other, 1.0)), Error);
}

TEST(NormAndMass, Examples) {
  auto s = FiniteSpace::numbered(5);
  StrongSubmeasure ab(s, {SignedMeasure::dirac(s, 0), SignedMeasure::dirac(s, 1)});
  auto r = norm_and_mass(ab);
  EXPECT_EQ(r.mass_plus, 1.0);
  EXPECT_EQ(r.mass_minus, -1.0);
  EXPECT_EQ(r.norm, 1.0);
  EXPECT_TRUE(r.exact);

  r = norm_and_mass(StrongSubmeasure::sup_all_diracs(s));
  EXPECT_EQ(r.mass_plus, 1.0);
  EXPECT_EQ(r.mass_minus, -1.0);
  EXPECT_EQ(r.norm, 1.0);

  r = norm_and_mass(StrongSubmeasure::from_measure(SignedMeasure::dirac(s, 0, 2.0)));
  EXPECT_EQ(r.mass_plus, 2.0);
  EXPECT_EQ(r.mass_minus, -2.0);
  EXPECT_EQ(r.norm, 2.0);

  const SignedMeasure d = SignedMeasure::dirac(s, 0) - SignedMeasure::dirac(s, 1);
  r = norm_and_mass(StrongSubmeasure(s, {d, -d}));
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.norm, 2.0);
}

TEST(Combine, Examples) {
  auto s = two_points();
  auto da = StrongSubmeasure::from_measure(SignedMeasure::dirac(s, 0));
  auto db = StrongSubmeasure::from_measure(SignedMeasure::dirac(s, 1));
  auto mx = combine(da, db, CombineMode::kMax);
  const PointSet a{0};
  EXPECT_EQ(set_value(mx, a, SetMode::kClosed), 1.0);

  auto sum = combine(da, db, CombineMode::kSum);
  ASSERT_TRUE(sum.as_measure().has_value());
  EXPECT_EQ(sum.as_measure()->weights(), (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(norm_and_mass(sum).mass_plus, 2.0);

  std::mt19937_64 rng(7);
  auto mu = random_positive_submeasure(rng, s);
  auto twice = combine(mu, mu, CombineMode::kMax);
  for (int i = 0; i < 20; ++i) {
    auto phi = random_function(rng, s);
    EXPECT_NEAR(twice.eval(phi), mu.eval(phi), 1e-12);
  }
}

TEST(Combine, FunctionalValuesOnRandomPairs) {
  std::mt19937_64 rng(11);
  auto s = FiniteSpace::numbered(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto m1 = random_signed_submeasure(rng, s);
    auto m2 = random_positive_submeasure(rng, s);
    auto mx = combine(m1, m2, CombineMode::kMax);
    auto sm = combine(m1, m2, CombineMode::kSum);
    auto flat = sm.flattened();
    for (int i = 0; i < 10; ++i) {
      auto phi = random_function(rng, s);
      EXPECT_NEAR(mx.eval(phi), std::max(m1.eval(phi), m2.eval(phi)), 1e-12);
      EXPECT_NEAR(sm.eval(phi), m1.eval(phi) + m2.eval(phi), 1e-12);
      EXPECT_NEAR(flat.eval(phi), sm.eval(phi), 1e-12);
    }
  }
}

TEST(Combine, ProportionalBlocksMerge) {
  auto s = FiniteSpace::numbered(3);
  auto mu = StrongSubmeasure::sup_all_diracs(s);
  auto sum = mu.scaled(0.25).plus(mu.scaled(0.75));
  ASSERT_EQ(sum.blocks().size(), 1u);
  EXPECT_EQ(sum.generator_count(), 3u);
  auto phi = FunctionVector(s, {1.0, 4.0, -2.0});
  EXPECT_NEAR(sum.eval(phi), 4.0, 1e-12);
}

TEST(WeakLimit, ConstantSequence) {
  std::mt19937_64 rng(3);
  auto s = FiniteSpace::numbered(4);
  auto mu = random_positive_submeasure(rng, s);
  std::vector<StrongSubmeasure> seq(6, mu);
  auto r = weak_limit(seq, {});
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.tail_start, 0u);
  for (const auto& phi : indicator_basis(s)) EXPECT_NEAR(r.limit->eval(phi), mu.eval(phi), 1e-12);
}

TEST(WeakLimit, ScalarLimitWithinListResolution) {
  auto s = two_points();
  std::vector<StrongSubmeasure> seq;
  const std::size_t len = 200000;
  for (std::size_t n = 1; n <= len; ++n)
    seq.push_back(StrongSubmeasure::from_measure(SignedMeasure::dirac(s, 0, 1.0 - 1.0 / static_cast<double>(n))));
  // The gap between consecutive terms near the end is about 1/len^2.
  WeakLimitOptions opt;
  opt.tol = 1e-9;
  auto r = weak_limit(seq, {}, opt);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.values[0], 1.0, 1.0 / static_cast<double>(len - 1));
  EXPECT_GE(r.tail_start, len / 2);
}

TEST(WeakLimit, IncreasingMaxesOfDiracs) {
  auto s = FiniteSpace::numbered(6, "p");
  std::vector<StrongSubmeasure> seq;
  for (std::size_t n = 1; n <= 12; ++n) {
    PointSet pts;
    for (std::size_t i = 0; i < std::min<std::size_t>(n, 6); ++i) pts.push_back(i);
    seq.push_back(StrongSubmeasure::sup_of_diracs(s, pts));
  }
  auto r = weak_limit(seq, {});
  ASSERT_TRUE(r.converged);
  auto target = StrongSubmeasure::sup_all_diracs(s);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    auto phi = random_function(rng, s);
    EXPECT_NEAR(r.limit->eval(phi), target.eval(phi), 1e-12);
  }
}

TEST(WeakLimit, DivergenceAndUnboundedNorms) {
  auto s = two_points();
  std::vector<StrongSubmeasure> alternating;
  for (int n = 0; n < 10; ++n) alternating.push_back(StrongSubmeasure::from_measure(SignedMeasure::dirac(s, n % 2)));
  EXPECT_FALSE(weak_limit(alternating, {}).converged);

  std::vector<StrongSubmeasure> growing;
  for (int n = 0; n < 4; ++n)
    growing.push_back(StrongSubmeasure::from_measure(SignedMeasure::dirac(s, 0, std::pow(10.0, 4 * n))));
  WeakLimitOptions opt;
  opt.norm_bound = 1e9;
  try {
    weak_limit(growing, {}, opt);
    FAIL() << "expected an unbounded-norm error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnboundedNorm);
  }
}

TEST(WeakLimit, BoundedSequencesHaveConvergentSubsequences) {
  std::mt19937_64 rng(19);
  auto s = FiniteSpace::numbered(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<StrongSubmeasure> atoms;
    for (int k = 0; k < 3; ++k) atoms.push_back(random_positive_submeasure(rng, s));
    std::vector<StrongSubmeasure> seq;
    std::vector<int> label;
    std::uniform_int_distribution<int> pick(0, 2);
    for (int n = 1; n <= 60; ++n) {
      const int k = pick(rng);
      label.push_back(k);
      const double eps = 1.0 / (static_cast<double>(n) * n * n * n * n);
      seq.push_back(atoms[k].scaled(1.0 + eps));
    }
    // Pigeonhole: some atom recurs infinitely often in the idealized sequence.
    std::vector<int> counts(3, 0);
    for (int k : label) ++counts[k];
    const int best = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    std::vector<StrongSubmeasure> sub;
    for (std::size_t i = 0; i < seq.size(); ++i)
      if (label[i] == best) sub.push_back(seq[i]);
    WeakLimitOptions opt;
    opt.tol = 1e-6;
    auto r = weak_limit(sub, {}, opt);
    ASSERT_TRUE(r.converged);
    for (const auto& phi : indicator_basis(s)) EXPECT_NEAR(r.limit->eval(phi), atoms[best].eval(phi), 1e-5);
  }
}

TEST(ExtendUsc, Examples) {
  auto s = two_points();
  auto dp = StrongSubmeasure::from_measure(SignedMeasure::dirac(s, 1));
  EXPECT_EQ(extend_usc(dp, FunctionVector(s, {3.0, -2.5})).value, -2.5);

  auto neg = StrongSubmeasure::from_measure(SignedMeasure::dirac(s, 0, -1.0));
  auto r = extend_usc(neg, FunctionVector::constant(s, 0.0));
  EXPECT_TRUE(std::isinf(r.value) && r.value < 0.0);
  ASSERT_TRUE(r.ray.has_value());
  // Certificate: psi = t * ray drives every generator to -inf.
  EXPECT_GT((*r.ray)[0], 0.0);
  EXPECT_LT(neg.eval(FunctionVector(s, *r.ray)), 0.0);

  StrongSubmeasure mixed(s, {SignedMeasure::dirac(s, 0) - SignedMeasure::dirac(s, 1), SignedMeasure::dirac(s, 1)});
  const auto e = extend_usc(mixed, FunctionVector::constant(s, 0.0));
  EXPECT_NEAR(e.value, 0.0, 1e-12);
  EXPECT_NEAR(e.value, vertex_oracle({{1.0, -1.0}, {0.0, 1.0}}, {0.0, 0.0}), 1e-12);
}

TEST(ExtendUsc, MatchesVertexEnumerationOnSmallInstances) {
  std::mt19937_64 rng(23);
  auto s = FiniteSpace::numbered(2);
  int finite_cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto mu = random_signed_submeasure(rng, s, 3);
    auto g = random_function(rng, s);
    const auto e = extend_usc(mu, g);
    std::vector<std::vector<double>> gens;
    for (const auto& w : mu.generator_weights()) gens.push_back(w);
    if (!e.finite()) {
      ASSERT_TRUE(e.ray.has_value());
      // Along the ray the value decreases without bound.
      std::vector<double> far(g.values());
      for (std::size_t j = 0; j < far.size(); ++j) far[j] += 1e6 * (*e.ray)[j];
      EXPECT_LT(mu.eval(FunctionVector(s, far)), mu.eval(g) - 1.0);
      continue;
    }
    ++finite_cases;
    EXPECT_NEAR(e.value, vertex_oracle(gens, g.values()), 1e-8);
  }
  EXPECT_GT(finite_cases, 20);
}

TEST(ExtendUsc, Properties) {
  std::mt19937_64 rng(29);
  auto s = FiniteSpace::numbered(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto pos = random_positive_submeasure(rng, s);
    auto phi = random_function(rng, s);
    EXPECT_NEAR(extend_usc(pos, phi).value, pos.eval(phi), 1e-12);

    auto mu = random_signed_submeasure(rng, s);
    const auto zero = extend_usc(mu, FunctionVector::constant(s, 0.0));
    if (!zero.finite()) continue;
    EXPECT_NEAR(zero.value, 0.0, 1e-9);
    EXPECT_GE(extend_usc(mu, FunctionVector::constant(s, -1.0)).value,
              -mu.eval(FunctionVector::constant(s, 1.0)) - 1e-9);
    auto p1 = random_function(rng, s);
    auto p2 = random_function(rng, s);
    const double e1 = extend_usc(mu, p1).value;
    const double e2 = extend_usc(mu, p2).value;
    const double e12 = extend_usc(mu, p1 + p2).value;
    EXPECT_LE(e12, e1 + e2 + 1e-9);
    EXPECT_LE(e1, mu.eval(p1) + 1e-9);
  }
}

TEST(SetValue, Examples) {
  auto s = FiniteSpace::numbered(4);
  auto dp = StrongSubmeasure::from_measure(SignedMeasure::dirac(s, 2));
  EXPECT_EQ(set_value(dp, PointSet{1, 2}, SetMode::kClosed), 1.0);
  EXPECT_EQ(set_value(dp, PointSet{0, 3}, SetMode::kClosed), 0.0);
  EXPECT_EQ(set_value(dp, PointSet{1, 2}, SetMode::kOpen), 1.0);
}

TEST(SetValue, SubadditivityOnRandomPairs) {
  std::mt19937_64 rng(31);
  auto s = FiniteSpace::numbered(6);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    auto mu = (trial % 2) ? random_positive_submeasure(rng, s) : random_signed_submeasure(rng, s);
    PointSet a1, a2, u;
    for (std::size_t i = 0; i < 6; ++i) {
      const bool in1 = coin(rng), in2 = coin(rng);
      if (in1) a1.push_back(i);
      if (in2) a2.push_back(i);
      if (in1 || in2) u.push_back(i);
    }
    for (SetMode mode : {SetMode::kClosed, SetMode::kOpen}) {
      const double v1 = set_value(mu, a1, mode);
      const double v2 = set_value(mu, a2, mode);
      const double vu = set_value(mu, u, mode);
      if (std::isinf(v1) || std::isinf(v2)) continue;
      EXPECT_LE(vu, v1 + v2 + 1e-9);
    }
    if (mu.positive()) {
      EXPECT_NEAR(set_value(mu, u, SetMode::kOpen), set_value(mu, u, SetMode::kClosed), 1e-12);
    }
  }
}

TEST(Jordan, Examples) {
  auto s = two_points();
  auto j = jordan_decompose(SignedMeasure::dirac(s, 0) - SignedMeasure::dirac(s, 1));
  EXPECT_EQ(j.plus.weights(), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(j.minus.weights(), (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(j.neg_norm, 1.0);
  EXPECT_EQ(jordan_decompose(SignedMeasure(s, {0.3, 2.0})).neg_norm, 0.0);
  EXPECT_EQ(jordan_decompose(SignedMeasure::dirac(s, 1, -1.0)).neg_norm, 1.0);
}

TEST(Jordan, ReconstructsAndIsMinimal) {
  std::mt19937_64 rng(37);
  auto s = FiniteSpace::numbered(6);
  for (int trial = 0; trial < 50; ++trial) {
    auto sigma = random_signed_measure(rng, s);
    auto j = jordan_decompose(sigma);
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_EQ(j.plus.weights()[i] - j.minus.weights()[i], sigma.weights()[i]);
      EXPECT_EQ(j.plus.weights()[i] * j.minus.weights()[i], 0.0);
    }
    for (int alt = 0; alt < 100; ++alt) {
      auto r = random_values(rng, 6, 0.0, 2.0);
      std::vector<double> minus(6);
      for (std::size_t i = 0; i < 6; ++i) minus[i] = j.minus.weights()[i] + r[i];
      double total = 0.0;
      for (double v : minus) total += v;
      EXPECT_GE(total, j.neg_norm);
    }
  }
}

TEST(IsDominated, Examples) {
  auto s = two_points();
  StrongSubmeasure mu(s, {SignedMeasure::dirac(s, 0), SignedMeasure::dirac(s, 1)});
  EXPECT_TRUE(is_dominated(SignedMeasure::dirac(s, 0), mu));
  EXPECT_TRUE(is_dominated(SignedMeasure(s, {0.5, 0.5}), mu));
  EXPECT_FALSE(is_dominated(SignedMeasure(s, {1.0, 1.0}), mu));
  EXPECT_FALSE(is_dominated(SignedMeasure(s, {0.5, 0.0}), mu));
}

TEST(IsDominated, AgreesWithEvaluationPanel) {
  std::mt19937_64 rng(41);
  auto s = FiniteSpace::numbered(3);
  std::vector<FunctionVector> panel;
  for (int i = 0; i < 4000; ++i) panel.push_back(random_function(rng, s));
  int yes = 0, no = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto mu = random_positive_submeasure(rng, s, 3);
    for (const auto& g : mu.generators()) EXPECT_TRUE(is_dominated(g, mu));
    // Convex combinations of generators are dominated.
    auto gens = mu.generators();
    auto w = random_values(rng, gens.size(), 0.0, 1.0);
    double total = 0.0;
    for (double v : w) total += v;
    SignedMeasure combo = SignedMeasure::zero(s);
    for (std::size_t i = 0; i < gens.size(); ++i) combo = combo + gens[i] * (w[i] / total);
    EXPECT_TRUE(is_dominated(combo, mu));

    auto nu = random_positive_measure(rng, s, norm_and_mass(mu).mass_plus);
    const bool dom = is_dominated(nu, mu);
    double worst = -INFINITY;
    for (const auto& phi : panel) worst = std::max(worst, nu.apply(phi) - mu.eval(phi));
    if (dom) {
      ++yes;
      EXPECT_LE(worst, 1e-9);
      EXPECT_LE(nu.mass(), mu.eval(FunctionVector::constant(s, 1.0)) + 1e-9);
    } else {
      ++no;
      EXPECT_GT(worst, 0.0);
    }
  }
  EXPECT_GT(yes + no, 0);
}

TEST(Submeasure, SublinearLipschitzMonotone) {
  std::mt19937_64 rng(43);
  auto s = FiniteSpace::numbered(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto mu = (trial % 2) ? random_positive_submeasure(rng, s) : random_signed_submeasure(rng, s);
    auto p1 = random_function(rng, s);
    auto p2 = random_function(rng, s);
    std::uniform_real_distribution<double> lam(0.0, 5.0);
    const double l = lam(rng);
    EXPECT_LE(mu.eval(p1 + p2), mu.eval(p1) + mu.eval(p2) + 1e-12);
    EXPECT_NEAR(mu.eval(p1 * l), l * mu.eval(p1), 1e-9);
    const double diff = (p1 - p2).sup_norm();
    EXPECT_LE(std::fabs(mu.eval(p1) - mu.eval(p2)), norm_and_mass(mu).norm * diff + 1e-9);
    if (mu.positive()) {
      auto bump = FunctionVector(s, random_values(rng, 5, 0.0, 1.0));
      EXPECT_GE(mu.eval(p1 + bump), mu.eval(p1) - 1e-12);
    }
  }
}

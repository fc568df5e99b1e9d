#pragma once

// Least-negative aggregation over finite families of signed measures with a
// common total mass.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "submeasure/error.hpp"
#include "submeasure/measure.hpp"
#include "submeasure/space.hpp"
#include "submeasure/strong_submeasure.hpp"

namespace submeasure {

inline constexpr double kMassTol = 1e-9;
inline constexpr double kKappaTol = 1e-9;

class SignedFamily {
 public:
  SignedFamily(SpaceRef space, std::vector<SignedMeasure> members, std::vector<SignedMeasure> declared_limits,
               double intersection_number)
      : space_(std::move(space)), c_(intersection_number) {
    if (members.empty()) throw Error(ErrorCode::kInvalidModel, "family has no members", "family.members");
    if (!std::isfinite(c_)) throw Error(ErrorCode::kInvalidModel, "non-finite intersection number", "family.intersection_number");
    members_ = dedupe(std::move(members), "family.members");
    limits_ = dedupe(std::move(declared_limits), "family.declared_limits");
  }

  const SpaceRef& space() const noexcept { return space_; }
  const std::vector<SignedMeasure>& members() const noexcept { return members_; }
  const std::vector<SignedMeasure>& declared_limits() const noexcept { return limits_; }
  double intersection_number() const noexcept { return c_; }

  /// Members followed by declared limits.
  std::vector<SignedMeasure> closure() const {
    std::vector<SignedMeasure> all = members_;
    for (const auto& l : limits_)
      if (std::find(all.begin(), all.end(), l) == all.end()) all.push_back(l);
    return all;
  }

 private:
  std::vector<SignedMeasure> dedupe(std::vector<SignedMeasure> list, const std::string& where) const {
    std::vector<SignedMeasure> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string at = where + "[" + std::to_string(i) + "]";
      require_same_space(space_, list[i].space(), at.c_str());
      if (std::fabs(list[i].mass() - c_) > kMassTol)
        throw Error(ErrorCode::kInvalidModel,
                    "total mass " + std::to_string(list[i].mass()) + " differs from intersection number " +
                        std::to_string(c_),
                    at);
      if (std::find(out.begin(), out.end(), list[i]) == out.end()) out.push_back(std::move(list[i]));
    }
    return out;
  }

  SpaceRef space_;
  std::vector<SignedMeasure> members_;
  std::vector<SignedMeasure> limits_;
  double c_;
};

/// Least negative-part norm over members and declared limits.
inline double kappa(const SignedFamily& family) {
  double k = INFINITY;
  for (const auto& m : family.closure()) k = std::min(k, neg_norm(m));
  return k;
}

/// Members and limits within tol of kappa, ties kept.
inline std::vector<SignedMeasure> kappa_minimal_members(const SignedFamily& family, double tol = kKappaTol) {
  const double k = kappa(family);
  std::vector<SignedMeasure> out;
  for (const auto& m : family.closure())
    if (neg_norm(m) <= k + tol) out.push_back(m);
  return out;
}

/// Lambda(phi) = sup of mu(phi) over kappa-minimal members.
inline StrongSubmeasure least_negative(const SignedFamily& family, double tol = kKappaTol) {
  const double k = kappa(family);
  const auto gens = kappa_minimal_members(family, tol);
  StrongSubmeasure lambda(family.space(), gens);
  const double bound = family.intersection_number() + 2.0 * k;
  for (const auto& g : gens) {
    if (g.total_variation() > bound + 2.0 * tol + kMassTol)
      throw Error(ErrorCode::kInvalidModel, "generator norm exceeds c + 2 kappa", "least_negative");
  }
  return lambda;
}

/// f1 precedes f2 when kappa(f1) < kappa(f2), or the kappas agree and
/// Lambda(f1) >= Lambda(f2) as functionals.
inline bool precedes(const SignedFamily& f1, const SignedFamily& f2, double tol = kKappaTol) {
  require_same_space(f1.space(), f2.space(), "precedes");
  const double k1 = kappa(f1);
  const double k2 = kappa(f2);
  if (k1 < k2 - tol) return true;
  if (k1 > k2 + tol) return false;
  return dominates(least_negative(f1, tol), least_negative(f2, tol));
}

/// Pairwise sums of members; limits are the sums over closures that are not
/// already member sums. The intersection numbers add.
inline SignedFamily family_sum(const SignedFamily& f1, const SignedFamily& f2) {
  require_same_space(f1.space(), f2.space(), "family_sum");
  std::vector<SignedMeasure> members;
  for (const auto& a : f1.members())
    for (const auto& b : f2.members()) {
      SignedMeasure s = a + b;
      if (std::find(members.begin(), members.end(), s) == members.end()) members.push_back(std::move(s));
    }
  std::vector<SignedMeasure> limits;
  for (const auto& a : f1.closure())
    for (const auto& b : f2.closure()) {
      SignedMeasure s = a + b;
      if (std::find(members.begin(), members.end(), s) != members.end()) continue;
      if (std::find(limits.begin(), limits.end(), s) == limits.end()) limits.push_back(std::move(s));
    }
  return SignedFamily(f1.space(), std::move(members), std::move(limits),
                      f1.intersection_number() + f2.intersection_number());
}

enum class DivisorKind { kLineP2, kExceptionalE };

/// line_P2: n points d<i> on the line plus ambient points a0, a1; members
/// delta_d, declared limits 2 delta_d - delta_a0, c = 1.
/// exceptional_E: n points e<i> on the curve plus ambient a0; members
/// -delta_e, declared limits delta_{e next} - 2 delta_e, c = -1.
inline SignedFamily build_divisor_model(DivisorKind kind, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "need n >= 1", "build_divisor_models");
  std::vector<std::string> labels;
  PointSet curve;
  const std::string prefix = (kind == DivisorKind::kLineP2) ? "d" : "e";
  for (std::size_t i = 0; i < n; ++i) {
    curve.push_back(labels.size());
    labels.push_back(prefix + std::to_string(i));
  }
  const std::size_t a0 = labels.size();
  labels.push_back("a0");
  labels.push_back("a1");
  SpaceRef space = FiniteSpace::make(std::move(labels), {{kind == DivisorKind::kLineP2 ? "D" : "E", curve}});
  std::vector<SignedMeasure> members, limits;
  if (kind == DivisorKind::kLineP2) {
    for (std::size_t p : curve) {
      members.push_back(SignedMeasure::dirac(space, p));
      limits.push_back(SignedMeasure::dirac(space, p, 2.0) - SignedMeasure::dirac(space, a0));
    }
    return SignedFamily(space, std::move(members), std::move(limits), 1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    members.push_back(SignedMeasure::dirac(space, curve[i], -1.0));
    limits.push_back(SignedMeasure::dirac(space, curve[(i + 1) % n]) - SignedMeasure::dirac(space, curve[i], 2.0));
  }
  return SignedFamily(space, std::move(members), std::move(limits), -1.0);
}

/// Two line-type families on six points whose sum has a positive limit
/// 2 delta_1 absent from either summand: superadditivity is strict at the
/// indicator of point 1.
inline std::pair<SignedFamily, SignedFamily> build_split_line_pair() {
  SpaceRef space = FiniteSpace::numbered(6, "l");
  auto d = [&](std::size_t i, double m = 1.0) { return SignedMeasure::dirac(space, i, m); };
  SignedFamily f1(space, {d(0), d(2)}, {d(1, 2.0) - d(0)}, 1.0);
  SignedFamily f2(space, {d(0), d(4)}, {}, 1.0);
  return {std::move(f1), std::move(f2)};
}

}  // namespace submeasure

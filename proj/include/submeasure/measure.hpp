#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "submeasure/error.hpp"
#include "submeasure/space.hpp"

namespace submeasure {

namespace detail {
inline void require_finite(std::span<const double> v, const char* where) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "non-finite value", where);
  }
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}
}  // namespace detail

/// A real function on a finite space. Every such function is continuous.
class FunctionVector {
 public:
  FunctionVector(SpaceRef space, std::vector<double> values) : space_(std::move(space)), values_(std::move(values)) {
    if (!space_ || values_.size() != space_->size())
      throw Error(ErrorCode::kInvalidArgument, "function length does not match space", "function");
    detail::require_finite(values_, "function");
  }

  static FunctionVector constant(const SpaceRef& space, double c) {
    return FunctionVector(space, std::vector<double>(space->size(), c));
  }
  static FunctionVector indicator(const SpaceRef& space, std::span<const std::size_t> points) {
    std::vector<double> v(space->size(), 0.0);
    for (std::size_t p : points) v.at(p) = 1.0;
    return FunctionVector(space, std::move(v));
  }
  static FunctionVector indicator(const SpaceRef& space, std::size_t point) {
    const std::size_t pts[] = {point};
    return indicator(space, pts);
  }

  const SpaceRef& space() const noexcept { return space_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
  }
  double max_over(std::span<const std::size_t> pts) const {
    double m = -INFINITY;
    for (std::size_t p : pts) m = std::max(m, values_.at(p));
    return m;
  }

  FunctionVector operator+(const FunctionVector& o) const {
    require_same_space(space_, o.space_, "function.add");
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.values_[i];
    return FunctionVector(space_, std::move(v));
  }
  FunctionVector operator-(const FunctionVector& o) const {
    require_same_space(space_, o.space_, "function.sub");
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.values_[i];
    return FunctionVector(space_, std::move(v));
  }
  FunctionVector operator*(double s) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= s;
    return FunctionVector(space_, std::move(v));
  }
  FunctionVector plus_constant(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x += c;
    return FunctionVector(space_, std::move(v));
  }

 private:
  SpaceRef space_;
  std::vector<double> values_;
};

/// Coordinatewise indicator basis {1_{x}} of the function space.
inline std::vector<FunctionVector> indicator_basis(const SpaceRef& space) {
  std::vector<FunctionVector> basis;
  basis.reserve(space->size());
  for (std::size_t i = 0; i < space->size(); ++i) basis.push_back(FunctionVector::indicator(space, i));
  return basis;
}

class SignedMeasure {
 public:
  SignedMeasure(SpaceRef space, std::vector<double> weights) : space_(std::move(space)), weights_(std::move(weights)) {
    if (!space_ || weights_.size() != space_->size())
      throw Error(ErrorCode::kInvalidArgument, "weight vector length does not match space", "measure");
    detail::require_finite(weights_, "measure");
  }

  static SignedMeasure zero(const SpaceRef& space) { return SignedMeasure(space, std::vector<double>(space->size())); }
  static SignedMeasure dirac(const SpaceRef& space, std::size_t point, double mass = 1.0) {
    std::vector<double> w(space->size(), 0.0);
    w.at(point) = mass;
    return SignedMeasure(space, std::move(w));
  }

  const SpaceRef& space() const noexcept { return space_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }

  double apply(const FunctionVector& phi) const {
    require_same_space(space_, phi.space(), "measure.apply");
    return detail::dot(weights_, phi.values());
  }
  double mass() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }
  /// Total variation norm ||chi+|| + ||chi-||.
  double total_variation() const {
    double s = 0.0;
    for (double w : weights_) s += std::fabs(w);
    return s;
  }
  bool is_positive(double tol = 0.0) const {
    return std::all_of(weights_.begin(), weights_.end(), [tol](double w) { return w >= -tol; });
  }

  SignedMeasure operator+(const SignedMeasure& o) const {
    require_same_space(space_, o.space_, "measure.add");
    std::vector<double> w(weights_);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += o.weights_[i];
    return SignedMeasure(space_, std::move(w));
  }
  SignedMeasure operator-(const SignedMeasure& o) const {
    require_same_space(space_, o.space_, "measure.sub");
    std::vector<double> w(weights_);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= o.weights_[i];
    return SignedMeasure(space_, std::move(w));
  }
  SignedMeasure operator*(double s) const {
    std::vector<double> w(weights_);
    for (double& x : w) x *= s;
    return SignedMeasure(space_, std::move(w));
  }
  SignedMeasure operator-() const { return (*this) * -1.0; }

  bool operator==(const SignedMeasure& o) const { return space_->same_as(*o.space_) && weights_ == o.weights_; }

 private:
  SpaceRef space_;
  std::vector<double> weights_;
};

/// A signed measure whose weights are all nonnegative.
class PositiveMeasure {
 public:
  PositiveMeasure(SpaceRef space, std::vector<double> weights) : measure_(std::move(space), std::move(weights)) {
    if (!measure_.is_positive()) throw Error(ErrorCode::kNotPositive, "negative weight", "positive_measure");
  }
  explicit PositiveMeasure(SignedMeasure m) : measure_(std::move(m)) {
    if (!measure_.is_positive()) throw Error(ErrorCode::kNotPositive, "negative weight", "positive_measure");
  }
  static PositiveMeasure dirac(const SpaceRef& space, std::size_t point, double mass = 1.0) {
    return PositiveMeasure(SignedMeasure::dirac(space, point, mass));
  }

  const SignedMeasure& as_signed() const noexcept { return measure_; }
  operator const SignedMeasure&() const noexcept { return measure_; }
  const SpaceRef& space() const noexcept { return measure_.space(); }
  const std::vector<double>& weights() const noexcept { return measure_.weights(); }
  double apply(const FunctionVector& phi) const { return measure_.apply(phi); }
  double mass() const { return measure_.mass(); }

 private:
  SignedMeasure measure_;
};

struct JordanDecomposition {
  PositiveMeasure plus;
  PositiveMeasure minus;
  double neg_norm;
};

/// Coordinatewise split sigma = plus - minus with disjoint supports. On a
/// finite space this attains the least possible negative mass.
inline JordanDecomposition jordan_decompose(const SignedMeasure& sigma) {
  const auto& w = sigma.weights();
  std::vector<double> plus(w.size()), minus(w.size());
  double neg = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    plus[i] = std::max(w[i], 0.0);
    minus[i] = std::max(-w[i], 0.0);
    neg += minus[i];
  }
  return {PositiveMeasure(sigma.space(), std::move(plus)), PositiveMeasure(sigma.space(), std::move(minus)), neg};
}

inline double neg_norm(const SignedMeasure& sigma) {
  double neg = 0.0;
  for (double w : sigma.weights()) neg += std::max(-w, 0.0);
  return neg;
}

}  // namespace submeasure

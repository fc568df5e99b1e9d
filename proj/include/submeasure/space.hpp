#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "submeasure/error.hpp"
#include "submeasure/linalg.hpp"

namespace submeasure {

using PointSet = std::vector<std::size_t>;

/// A finite set of labeled points standing in for a compact metric space.
/// The metric, when present, is used for diagnostics only.
class FiniteSpace {
 public:
  explicit FiniteSpace(std::vector<std::string> labels, std::optional<Matrix> metric = std::nullopt,
                       std::map<std::string, PointSet> subsets = {})
      : labels_(std::move(labels)), metric_(std::move(metric)), subsets_(std::move(subsets)) {
    if (labels_.empty()) throw Error(ErrorCode::kInvalidModel, "space has no points", "space.points");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!index_.emplace(labels_[i], i).second) {
        throw Error(ErrorCode::kInvalidModel, "duplicate label '" + labels_[i] + "'", "space.points");
      }
    }
    if (metric_) validate_metric(*metric_);
    for (auto& [name, pts] : subsets_) {
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      for (std::size_t p : pts) {
        if (p >= labels_.size()) {
          throw Error(ErrorCode::kInvalidModel, "subset index out of range", "space.subsets." + name);
        }
      }
    }
  }

  static std::shared_ptr<const FiniteSpace> make(std::vector<std::string> labels,
                                                 std::map<std::string, PointSet> subsets = {}) {
    return std::make_shared<const FiniteSpace>(std::move(labels), std::nullopt, std::move(subsets));
  }

  /// Points labeled prefix0, prefix1, ...
  static std::shared_ptr<const FiniteSpace> numbered(std::size_t n, const std::string& prefix = "x") {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
    return make(std::move(labels));
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  std::size_t index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw Error(ErrorCode::kInvalidArgument, "unknown point '" + label + "'");
    return it->second;
  }
  std::optional<std::size_t> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::optional<Matrix>& metric() const noexcept { return metric_; }
  const std::map<std::string, PointSet>& subsets() const noexcept { return subsets_; }
  const PointSet& subset(const std::string& name) const {
    auto it = subsets_.find(name);
    if (it == subsets_.end()) throw Error(ErrorCode::kInvalidArgument, "unknown subset '" + name + "'");
    return it->second;
  }

  PointSet all_points() const {
    PointSet all(size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }

  bool same_as(const FiniteSpace& other) const { return this == &other || labels_ == other.labels_; }

 private:
  void validate_metric(const Matrix& d) const {
    const std::size_t n = labels_.size();
    if (d.rows() != n || d.cols() != n) {
      throw Error(ErrorCode::kInvalidModel, "metric has wrong shape", "space.metric");
    }
    constexpr double kTol = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(d(i, i)) > kTol) throw Error(ErrorCode::kInvalidModel, "nonzero diagonal", "space.metric");
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(d(i, j)) || d(i, j) < 0.0)
          throw Error(ErrorCode::kInvalidModel, "negative or non-finite distance", "space.metric");
        if (std::fabs(d(i, j) - d(j, i)) > kTol)
          throw Error(ErrorCode::kInvalidModel, "metric is not symmetric", "space.metric");
        for (std::size_t k = 0; k < n; ++k) {
          if (d(i, k) > d(i, j) + d(j, k) + kTol)
            throw Error(ErrorCode::kInvalidModel, "triangle inequality fails", "space.metric");
        }
      }
    }
  }

  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
  std::optional<Matrix> metric_;
  std::map<std::string, PointSet> subsets_;
};

using SpaceRef = std::shared_ptr<const FiniteSpace>;

inline void require_same_space(const SpaceRef& a, const SpaceRef& b, const char* where) {
  if (!a || !b || !a->same_as(*b)) throw Error(ErrorCode::kSpaceMismatch, "operands live on different spaces", where);
}

}  // namespace submeasure

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "submeasure/error.hpp"

namespace submeasure {

/// Small dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> multiply(std::span<const double> v) const {
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
      out[i] = acc;
    }
    return out;
  }

  std::vector<double> left_multiply(std::span<const double> v) const {
    std::vector<double> out(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) out[j] += v[i] * (*this)(i, j);
    }
    return out;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix submatrix(std::span<const std::size_t> idx) const {
    Matrix s(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) s(i, j) = (*this)(idx[i], idx[j]);
    return s;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Strongly connected components of the digraph with an edge i->j whenever
/// m(i,j) > 0. Components come out in reverse topological order.
inline std::vector<std::vector<std::size_t>> strongly_connected_components(const Matrix& m) {
  const std::size_t n = m.rows();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;

  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < n) {
        const std::size_t w = f.next++;
        if (m(f.v, w) <= 0.0) continue;
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const std::size_t v = f.v;
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return out;
}

struct PerronResult {
  double eigenvalue = 0.0;
  std::vector<double> vector;  // normalized to unit l1 norm, nonnegative
  std::size_t iterations = 0;
  bool converged = false;
};

/// Perron root and right eigenvector of a nonnegative irreducible matrix by
/// power iteration on (M + I), which is primitive, so the iteration converges
/// even for periodic M. Stops at relative tolerance `rel_tol`.
inline PerronResult perron_power_iteration(const Matrix& m, double rel_tol = 1e-10,
                                           std::size_t max_iter = 1000000) {
  const std::size_t n = m.rows();
  PerronResult out;
  if (n == 0) {
    out.converged = true;
    return out;
  }
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  double lambda = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    std::vector<double> w = m.multiply(v);
    for (std::size_t i = 0; i < n; ++i) w[i] += v[i];
    const double norm = std::accumulate(w.begin(), w.end(), 0.0);
    if (norm <= 0.0) {
      out.iterations = it;
      out.converged = true;
      out.vector = v;
      return out;
    }
    for (double& x : w) x /= norm;
    // For l1-normalized nonnegative v, sum((M+I)v) is the Collatz-Wielandt
    // average; its change and the vector change both have to settle.
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::fabs(w[i] - v[i]));
    const double next = norm - 1.0;
    const bool settled = std::fabs(next - lambda) <= rel_tol * std::max(1.0, std::fabs(next)) &&
                         diff <= rel_tol;
    v = std::move(w);
    lambda = next;
    out.iterations = it;
    if (settled) {
      out.converged = true;
      break;
    }
  }
  out.eigenvalue = lambda;
  out.vector = std::move(v);
  return out;
}

/// Spectral radius of a nonnegative matrix: max Perron root over its
/// strongly connected components.
inline double spectral_radius_nonnegative(const Matrix& m, double rel_tol = 1e-10) {
  double best = 0.0;
  for (const auto& comp : strongly_connected_components(m)) {
    const Matrix sub = m.submatrix(comp);
    if (comp.size() == 1 && sub(0, 0) <= 0.0) continue;
    const PerronResult r = perron_power_iteration(sub, rel_tol);
    if (!r.converged) {
      throw Error(ErrorCode::kNonConvergence, "power iteration did not converge", "spectral_radius");
    }
    best = std::max(best, r.eigenvalue);
  }
  return best;
}

}  // namespace submeasure

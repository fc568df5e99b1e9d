#pragma once

// Dense two-phase simplex for small linear programs:
//   maximize c.x  subject to  A x <= b,  x >= 0.
// Bland's rule is used for both entering and leaving choices, so the method
// terminates on degenerate problems. Scratch space is per call.

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace submeasure::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Result {
  Status status = Status::kInfeasible;
  double value = 0.0;
  std::vector<double> x;
};

struct Problem {
  std::vector<std::vector<double>> a;  // rows of A
  std::vector<double> b;
  std::vector<double> c;

  void add_le(std::vector<double> row, double rhs) {
    a.push_back(std::move(row));
    b.push_back(rhs);
  }
  void add_ge(std::vector<double> row, double rhs) {
    for (double& v : row) v = -v;
    add_le(std::move(row), -rhs);
  }
  void add_eq(const std::vector<double>& row, double rhs) {
    add_le(row, rhs);
    add_ge(row, rhs);
  }
};

namespace detail {

class Tableau {
 public:
  Tableau(const Problem& p, double eps)
      : m_(static_cast<int>(p.b.size())),
        n_(static_cast<int>(p.c.size())),
        eps_(eps),
        basis_(m_),
        nonbasis_(n_ + 1),
        d_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) d_[i][j] = p.a[i][j];
      basis_[i] = n_ + i;
      d_[i][n_] = -1.0;
      d_[i][n_ + 1] = p.b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      d_[m_][j] = -p.c[j];
    }
    nonbasis_[n_] = -1;
    d_[m_ + 1][n_] = 1.0;
  }

  Result solve() {
    Result out;
    int r = 0;
    for (int i = 1; i < m_; ++i) {
      if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    }
    if (m_ > 0 && d_[r][n_ + 1] < -eps_) {
      pivot(r, n_);
      if (!run(2) || d_[m_ + 1][n_ + 1] < -eps_) {
        out.status = Status::kInfeasible;
        return out;
      }
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        int s = 0;
        for (int j = 1; j <= n_; ++j) {
          if (std::make_pair(d_[i][j], nonbasis_[j]) < std::make_pair(d_[i][s], nonbasis_[s])) s = j;
        }
        pivot(i, s);
      }
    }
    const bool bounded = run(1);
    out.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= 0 && basis_[i] < n_) out.x[basis_[i]] = d_[i][n_ + 1];
    }
    if (!bounded) {
      out.status = Status::kUnbounded;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out.status = Status::kOptimal;
    out.value = d_[m_][n_ + 1];
    return out;
  }

 private:
  void pivot(int r, int s) {
    const double inv = 1.0 / d_[r][s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::fabs(d_[i][s]) <= eps_) continue;
      const double factor = d_[i][s] * inv;
      for (int j = 0; j < n_ + 2; ++j) d_[i][j] -= d_[r][j] * factor;
      d_[i][s] = d_[r][s] * factor;
    }
    for (int j = 0; j < n_ + 2; ++j) {
      if (j != s) d_[r][j] *= inv;
    }
    for (int i = 0; i < m_ + 2; ++i) {
      if (i != r) d_[i][s] *= -inv;
    }
    d_[r][s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool run(int phase) {
    const int row = m_ + phase - 1;
    for (;;) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (nonbasis_[j] == -phase || d_[row][j] >= -eps_) continue;
        if (s == -1 || nonbasis_[j] < nonbasis_[s]) s = j;
      }
      if (s == -1) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (d_[i][s] <= eps_) continue;
        if (r == -1 || std::make_pair(d_[i][n_ + 1] / d_[i][s], basis_[i]) <
                           std::make_pair(d_[r][n_ + 1] / d_[r][s], basis_[r])) {
          r = i;
        }
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  int m_;
  int n_;
  double eps_;
  std::vector<int> basis_;
  std::vector<int> nonbasis_;
  std::vector<std::vector<double>> d_;
};

}  // namespace detail

inline Result solve(const Problem& problem, double eps = 1e-11) {
  detail::Tableau tableau(problem, eps);
  return tableau.solve();
}

}  // namespace submeasure::lp

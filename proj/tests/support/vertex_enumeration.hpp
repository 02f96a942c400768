#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "cashmgmt/simplex.hpp"

namespace cashmgmt::test {

// Brute-force LP reference: every choice of num_vars linearly independent
// hyperplanes (rows or finite bounds) gives a candidate vertex; the best
// feasible one is the optimum. Only valid for bounded feasible regions.
class VertexEnumerator {
 public:
  explicit VertexEnumerator(const LpProblem& lp) : lp_(lp) {
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
      std::vector<double> a(lp.num_vars, 0.0);
      bool nonzero = false;
      for (const Term& t : lp.constraints[i].terms) {
        a[t.var] += t.coef;
        nonzero = nonzero || t.coef != 0.0;
      }
      if (nonzero) planes_.push_back({std::move(a), lp.constraints[i].rhs});
    }
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      std::vector<double> e(lp.num_vars, 0.0);
      e[j] = 1.0;
      planes_.push_back({e, lp.lower[j]});
      if (std::isfinite(lp.upper[j])) planes_.push_back({e, lp.upper[j]});
    }
  }

  // Optimal objective, or nullopt when no vertex is feasible.
  std::optional<double> solve() {
    best_.reset();
    std::vector<std::size_t> chosen;
    recurse(0, chosen);
    return best_;
  }

 private:
  struct Plane {
    std::vector<double> a;
    double rhs;
  };

  void recurse(std::size_t start, std::vector<std::size_t>& chosen) {
    if (chosen.size() == lp_.num_vars) {
      evaluate(chosen);
      return;
    }
    for (std::size_t k = start; k < planes_.size(); ++k) {
      chosen.push_back(k);
      recurse(k + 1, chosen);
      chosen.pop_back();
    }
  }

  void evaluate(const std::vector<std::size_t>& chosen) {
    const std::size_t n = lp_.num_vars;
    std::vector<double> mat(n * n);
    std::vector<double> rhs(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) mat[r * n + c] = planes_[chosen[r]].a[c];
      rhs[r] = planes_[chosen[r]].rhs;
    }
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t p = col;
      for (std::size_t r = col + 1; r < n; ++r) {
        if (std::abs(mat[r * n + col]) > std::abs(mat[p * n + col])) p = r;
      }
      if (std::abs(mat[p * n + col]) < 1e-10) return;
      if (p != col) {
        for (std::size_t c = 0; c < n; ++c) std::swap(mat[p * n + c], mat[col * n + c]);
        std::swap(rhs[p], rhs[col]);
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = mat[r * n + col] / mat[col * n + col];
        if (f == 0.0) continue;
        for (std::size_t c = col; c < n; ++c) mat[r * n + c] -= f * mat[col * n + c];
        rhs[r] -= f * rhs[col];
      }
    }
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = rhs[j] / mat[j * n + j];
    if (max_row_violation(lp_, x) > 1e-9 || max_bound_violation(lp_, x) > 1e-9) return;
    const double value = evaluate_objective(lp_, x);
    if (!best_ || value < *best_) best_ = value;
  }

  const LpProblem& lp_;
  std::vector<Plane> planes_;
  std::optional<double> best_;
};

inline std::optional<double> vertex_enumeration_optimum(const LpProblem& lp) {
  return VertexEnumerator(lp).solve();
}

}  // namespace cashmgmt::test

#pragma once

// Derivative-free simplex minimizer for the small likelihood problems here
// (4 parameters for state tomography, 16 for process matrices). Restarts
// rebuild the simplex around the incumbent until a restart stops paying.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace weakrev {

struct NelderMeadOptions {
  std::size_t max_evaluations = 20000;
  double tolerance = 1e-9;   // convergence: best-value improvement over a cycle
  double initial_step = 0.1;
};

struct NelderMeadResult {
  std::vector<double> point;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

inline NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, const NelderMeadOptions& opts = {}) {
  const std::size_t n = start.size();
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  NelderMeadResult result;
  result.point = start;
  result.evaluations = 0;

  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    return f(x);
  };

  result.value = eval(start);

  double step = opts.initial_step;
  bool improved_by_restart = true;
  while (improved_by_restart && result.evaluations < opts.max_evaluations) {
    // Simplex around the incumbent.
    std::vector<std::vector<double>> pts(n + 1, result.point);
    std::vector<double> vals(n + 1);
    pts[0] = result.point;
    vals[0] = result.value;
    for (std::size_t i = 0; i < n; ++i) {
      pts[i + 1][i] += step * std::max(std::abs(result.point[i]), 1.0);
      vals[i + 1] = eval(pts[i + 1]);
    }

    const double restart_baseline = result.value;
    double cycle_baseline = *std::min_element(vals.begin(), vals.end());

    std::size_t cycle = 0;
    while (result.evaluations < opts.max_evaluations) {
      std::vector<std::size_t> order(n + 1);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
      const std::size_t best = order[0];
      const std::size_t worst = order[n];
      const std::size_t second_worst = order[n - 1];

      // Convergence probe once per dimension-sized cycle.
      if (++cycle >= n) {
        cycle = 0;
        if (cycle_baseline - vals[best] < opts.tolerance) break;
        cycle_baseline = vals[best];
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == worst) continue;
        for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d];
      }
      for (double& c : centroid) c /= static_cast<double>(n);

      auto blend = [&](double coeff) {
        std::vector<double> x(n);
        for (std::size_t d = 0; d < n; ++d)
          x[d] = centroid[d] + coeff * (pts[worst][d] - centroid[d]);
        return x;
      };

      const std::vector<double> reflected = blend(-kReflect);
      const double f_reflected = eval(reflected);

      if (f_reflected < vals[best]) {
        const std::vector<double> expanded = blend(-kReflect * kExpand);
        const double f_expanded = eval(expanded);
        if (f_expanded < f_reflected) {
          pts[worst] = expanded;
          vals[worst] = f_expanded;
        } else {
          pts[worst] = reflected;
          vals[worst] = f_reflected;
        }
      } else if (f_reflected < vals[second_worst]) {
        pts[worst] = reflected;
        vals[worst] = f_reflected;
      } else {
        const bool outside = f_reflected < vals[worst];
        const std::vector<double> contracted =
            blend(outside ? -kContract : kContract);
        const double f_contracted = eval(contracted);
        if (f_contracted < std::min(f_reflected, vals[worst])) {
          pts[worst] = contracted;
          vals[worst] = f_contracted;
        } else {
          for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t d = 0; d < n; ++d)
              pts[i][d] = pts[best][d] + kShrink * (pts[i][d] - pts[best][d]);
            vals[i] = eval(pts[i]);
          }
        }
      }
    }

    const std::size_t best =
        std::min_element(vals.begin(), vals.end()) - vals.begin();
    if (vals[best] < result.value) {
      result.value = vals[best];
      result.point = pts[best];
    }
    improved_by_restart = restart_baseline - result.value >= opts.tolerance;
    step *= 0.5;  // tighter simplex on each restart
  }

  result.converged = !improved_by_restart;
  return result;
}

}  // namespace weakrev

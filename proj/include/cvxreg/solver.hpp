#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvxreg/dataset.hpp"

namespace cvxreg {

struct SolverConfig {
  int max_iters = 10000;
  double grad_tol = 1e-8;        // stop when ||grad|| <= grad_tol * (1 + |L|)
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double init_step = 1.0;
  std::uint64_t seed = 0;        // restart initialization

  void validate() const;
};

// Steps shorter than this end the line search.
inline constexpr double kMinStep = 1e-16;

enum class Termination { converged, max_iters, line_search_stalled };

const char* to_string(Termination t);

struct FitReport {
  Vector initial_weights;
  Vector final_weights;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
  int iterations = 0;
  Termination termination = Termination::max_iters;
  std::vector<double> loss_trace;  // L(w0) followed by the loss after each accepted step
  std::vector<double> step_sizes;  // accepted step length per iteration

  bool converged() const noexcept { return termination == Termination::converged; }
};

// Full-batch gradient descent with Armijo backtracking. Accepted steps never
// increase the loss.
FitReport gd_fit(const Dataset& ds, const TransformKind& t, const Vector& w0,
                 const SolverConfig& cfg);

// Normal equations X^T X w = X^T y via Cholesky. Throws SingularSystemError when
// a pivot drops to <= 1e-12 of the largest diagonal entry of X^T X.
Vector ols_fit(const Dataset& ds);

inline constexpr double kSingularPivotRatio = 1e-12;

// Half-width r = 10 / (1 + max column norm) of the restart initialization box.
double restart_radius(const Dataset& ds);

// Initial point for restart `index`: i.i.d. uniform[-r, r]^d seeded from
// cfg.seed + index.
Vector restart_initial_point(const Dataset& ds, const SolverConfig& cfg, int index);

// Independent gd_fit runs from restart_initial_point(…, k), k = 0..restarts-1.
// Runs concurrently; output order is by restart index.
std::vector<FitReport> multi_restart_fit(const Dataset& ds, const TransformKind& t, int restarts,
                                         const SolverConfig& cfg);

// (max - min) / (1 + min) over final losses.
double relative_loss_spread(const std::vector<FitReport>& reports);

// Index of the report with the lowest final loss (first one on ties).
std::size_t best_report(const std::vector<FitReport>& reports);

}  // namespace cvxreg

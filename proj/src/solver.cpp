#include "cvxreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>

#include "cvxreg/error.hpp"
#include "cvxreg/loss.hpp"

namespace cvxreg {

void SolverConfig::validate() const {
  if (max_iters < 1) throw Error(ErrorKind::invalid_argument, "max_iters must be positive");
  if (!(grad_tol > 0.0) || !std::isfinite(grad_tol))
    throw Error(ErrorKind::invalid_argument, "grad_tol must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0))
    throw Error(ErrorKind::invalid_argument, "armijo_c must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw Error(ErrorKind::invalid_argument, "backtrack_factor must lie in (0, 1)");
  if (!(init_step > 0.0) || !std::isfinite(init_step))
    throw Error(ErrorKind::invalid_argument, "init_step must be positive");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iters: return "max_iters";
    case Termination::line_search_stalled: return "line_search_stalled";
  }
  return "unknown";
}

FitReport gd_fit(const Dataset& ds, const TransformKind& t, const Vector& w0,
                 const SolverConfig& cfg) {
  cfg.validate();
  Model model{w0, t};
  check_dimensions(model, ds);

  FitReport report;
  report.initial_weights = w0;
  double loss = total_loss(model, ds);
  if (!std::isfinite(loss)) throw Error(ErrorKind::nonfinite_loss, "initial loss is not finite");
  report.loss_trace.push_back(loss);

  Vector grad = total_gradient(model, ds);
  double grad_norm = grad.norm();
  Model trial{model.weights, t};

  while (true) {
    if (grad_norm <= cfg.grad_tol * (1.0 + std::fabs(loss))) {
      report.termination = Termination::converged;
      break;
    }
    if (report.iterations >= cfg.max_iters) {
      report.termination = Termination::max_iters;
      break;
    }

    const double decrease = cfg.armijo_c * grad_norm * grad_norm;
    double step = cfg.init_step;
    double trial_loss = 0.0;
    bool accepted = false;
    while (step >= kMinStep) {
      trial.weights = model.weights - step * grad;
      trial_loss = total_loss(trial, ds);
      if (trial_loss <= loss - step * decrease) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack_factor;
    }
    // A step that leaves the loss unchanged and moves the weights by less than
    // their rounding error cannot make progress.
    const bool negligible =
        trial_loss == loss &&
        step * grad_norm <= std::numeric_limits<double>::epsilon() * model.weights.norm();
    if (!accepted || negligible) {
      report.termination = Termination::line_search_stalled;
      break;
    }

    model.weights.swap(trial.weights);
    loss = trial_loss;
    grad = total_gradient(model, ds);
    grad_norm = grad.norm();
    ++report.iterations;
    report.loss_trace.push_back(loss);
    report.step_sizes.push_back(step);
  }

  report.final_weights = std::move(model.weights);
  report.final_loss = loss;
  report.final_grad_norm = grad_norm;
  return report;
}

Vector ols_fit(const Dataset& ds) {
  const Matrix& x = ds.features();
  const Eigen::Index d = ds.n_features();
  const Eigen::MatrixXd gram = x.transpose() * x;
  const Vector rhs = x.transpose() * ds.targets();

  const double largest = gram.diagonal().maxCoeff();
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double pivot = gram(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (!(pivot > kSingularPivotRatio * largest)) {
      std::ostringstream msg;
      msg << "normal equations are singular at pivot " << j << " (value " << pivot
          << ", largest diagonal " << largest << ")";
      throw SingularSystemError(static_cast<std::size_t>(j), msg.str());
    }
    lower(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      double v = gram(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= lower(i, k) * lower(j, k);
      lower(i, j) = v / lower(j, j);
    }
  }

  auto solve = [&](const Vector& b) {
    const Vector y = lower.triangularView<Eigen::Lower>().solve(b);
    return Vector(lower.transpose().triangularView<Eigen::Upper>().solve(y));
  };
  Vector w = solve(rhs);
  // One step of iterative refinement.
  w += solve(rhs - gram * w);
  return w;
}

double restart_radius(const Dataset& ds) {
  return 10.0 / (1.0 + ds.features().colwise().norm().maxCoeff());
}

Vector restart_initial_point(const Dataset& ds, const SolverConfig& cfg, int index) {
  const double r = restart_radius(ds);
  std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(index));
  std::uniform_real_distribution<double> box(-r, r);
  Vector w(ds.n_features());
  for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = box(rng);
  return w;
}

std::vector<FitReport> multi_restart_fit(const Dataset& ds, const TransformKind& t, int restarts,
                                         const SolverConfig& cfg) {
  if (restarts < 2) throw Error(ErrorKind::invalid_argument, "multi_restart_fit needs restarts >= 2");
  cfg.validate();

  std::vector<FitReport> reports(static_cast<std::size_t>(restarts));
  std::vector<std::exception_ptr> errors(reports.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < restarts; ++k) {
    try {
      reports[static_cast<std::size_t>(k)] = gd_fit(ds, t, restart_initial_point(ds, cfg, k), cfg);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return reports;
}

double relative_loss_spread(const std::vector<FitReport>& reports) {
  if (reports.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(
      reports.begin(), reports.end(),
      [](const FitReport& a, const FitReport& b) { return a.final_loss < b.final_loss; });
  return (hi->final_loss - lo->final_loss) / (1.0 + lo->final_loss);
}

std::size_t best_report(const std::vector<FitReport>& reports) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < reports.size(); ++k)
    if (reports[k].final_loss < reports[best].final_loss) best = k;
  return best;
}

}  // namespace cvxreg

#include "cvxreg/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cvxreg/error.hpp"
#include "cvxreg/loss.hpp"

namespace cvxreg {

std::optional<double> Witness::get(std::string_view name) const {
  for (const auto& [key, value] : values)
    if (key == name) return value;
  return std::nullopt;
}

std::string ConvexityReport::summary() const {
  std::ostringstream out;
  out << check_name << ": ";
  if (passed)
    out << "no violation found among " << samples_tested << " samples";
  else
    out << "violated (worst " << worst_violation << ", tolerance " << tolerance << ")";
  return out.str();
}

namespace {

void require_sorted(std::span<const double> grid, bool strict, const char* what) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]))
      throw Error(ErrorKind::invalid_grid, std::string(what) + " contains a non-finite point");
    if (i > 0 && (strict ? !(grid[i] > grid[i - 1]) : grid[i] < grid[i - 1]))
      throw Error(ErrorKind::invalid_grid,
                  std::string(what) + (strict ? " must be strictly ascending" : " must be ascending"));
  }
}

}  // namespace

ConvexityReport midpoint_convexity_check(const TransformKind& t, double y,
                                         std::pair<double, double> z_range, long long n_samples,
                                         double tol, std::uint64_t seed) {
  const auto [lo, hi] = z_range;
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorKind::invalid_argument, "z range must be finite and nondegenerate");
  if (n_samples < 1) throw Error(ErrorKind::invalid_argument, "n_samples must be positive");
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick_z(lo, hi);
  std::uniform_real_distribution<double> pick_lambda(0.0, 1.0);

  ConvexityReport report;
  report.check_name = "midpoint_convexity";
  report.tolerance = tol;
  report.samples_tested = n_samples;
  report.worst_violation = std::numeric_limits<double>::infinity();

  for (long long i = 0; i < n_samples; ++i) {
    const double z1 = pick_z(rng);
    const double z2 = pick_z(rng);
    const double lambda = pick_lambda(rng);
    const double zm = lambda * z1 + (1.0 - lambda) * z2;
    const double f1 = loss_z(t, z1, y);
    const double f2 = loss_z(t, z2, y);
    const double fm = loss_z(t, zm, y);
    const double chord = lambda * f1 + (1.0 - lambda) * f2;
    const double slack = (chord - fm) / (1.0 + std::max({f1, f2, fm}));
    if (slack < report.worst_violation) {
      report.worst_violation = slack;
      report.witness = {};
      report.witness.add("z1", z1);
      report.witness.add("z2", z2);
      report.witness.add("lambda", lambda);
      report.witness.add("z_mid", zm);
      report.witness.add("y", y);
      report.witness.add("loss_mid", fm);
      report.witness.add("chord", chord);
    }
  }
  report.passed = report.worst_violation >= -tol;
  return report;
}

ConvexityReport derivative_monotonicity_check(const TransformKind& t, double y,
                                              std::span<const double> z_grid, double tol) {
  if (z_grid.size() < 2) throw Error(ErrorKind::invalid_grid, "grid needs at least two points");
  require_sorted(z_grid, true, "z grid");
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");

  ConvexityReport report;
  report.check_name = "derivative_monotonicity";
  report.tolerance = tol;
  report.samples_tested = static_cast<long long>(z_grid.size());
  report.worst_violation = std::numeric_limits<double>::infinity();

  double prev = dloss_dz(t, z_grid[0], y);
  for (std::size_t i = 1; i < z_grid.size(); ++i) {
    const double cur = dloss_dz(t, z_grid[i], y);
    const double diff = cur - prev;
    if (diff < report.worst_violation) {
      report.worst_violation = diff;
      report.witness = {};
      report.witness.add("z_left", z_grid[i - 1]);
      report.witness.add("z_right", z_grid[i]);
      report.witness.add("y", y);
      report.witness.add("dloss_left", prev);
      report.witness.add("dloss_right", cur);
    }
    prev = cur;
  }
  report.passed = report.worst_violation >= -tol;
  return report;
}

FdHessian fd_hessian(const Dataset& ds, const TransformKind& t, const Vector& w, double fd_step) {
  const Eigen::Index d = ds.n_features();
  if (d > kMaxHessianDimension)
    throw Error(ErrorKind::dimension_too_large, "finite-difference Hessian limited to d <= 50");
  if (!(fd_step > 0.0) || !std::isfinite(fd_step))
    throw Error(ErrorKind::invalid_argument, "fd_step must be positive");
  check_dimensions(Model{w, t}, ds);

  Eigen::MatrixXd raw(d, d);
  Model probe{w, t};
  for (Eigen::Index j = 0; j < d; ++j) {
    const double h = fd_step * (1.0 + std::fabs(w[j]));
    probe.weights[j] = w[j] + h;
    const Vector up = total_gradient(probe, ds);
    probe.weights[j] = w[j] - h;
    const Vector down = total_gradient(probe, ds);
    probe.weights[j] = w[j];
    raw.col(j) = (up - down) / (2.0 * h);
  }
  FdHessian out;
  out.asymmetry = (raw - raw.transpose()).cwiseAbs().maxCoeff();
  out.symmetric = 0.5 * (raw + raw.transpose());
  return out;
}

ConvexityReport fd_hessian_psd_check(const Dataset& ds, const TransformKind& t, const Vector& w,
                                     double fd_step, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");
  const FdHessian hess = fd_hessian(ds, t, w, fd_step);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess.symmetric);
  const double max_entry = hess.symmetric.cwiseAbs().maxCoeff();

  ConvexityReport report;
  report.check_name = "fd_hessian_psd";
  report.samples_tested = 1;
  report.tolerance = tol * (1.0 + max_entry);
  report.worst_violation = eig.eigenvalues()[0];
  report.passed = report.worst_violation >= -report.tolerance;

  report.witness.add("min_eigenvalue", eig.eigenvalues()[0]);
  report.witness.add("max_abs_entry", max_entry);
  report.witness.add("asymmetry", hess.asymmetry);
  for (Eigen::Index j = 0; j < w.size(); ++j)
    report.witness.add("w[" + std::to_string(j) + "]", w[j]);
  for (Eigen::Index j = 0; j < w.size(); ++j)
    report.witness.add("v[" + std::to_string(j) + "]", eig.eigenvectors()(j, 0));
  return report;
}

std::optional<NonconvexWitness> find_nonconvex_witness(const TransformKind& t,
                                                       std::span<const double> z_grid,
                                                       std::span<const double> y_grid) {
  if (!has_second_derivative(t))
    throw Error(ErrorKind::unsupported_transform,
                "convex-sqrt exposes no second derivative; use the monotonicity check");
  if (z_grid.empty() || y_grid.empty()) throw Error(ErrorKind::invalid_grid, "grids must be nonempty");
  require_sorted(z_grid, false, "z grid");
  require_sorted(y_grid, false, "y grid");

  NonconvexWitness best{z_grid[0], y_grid[0], std::numeric_limits<double>::infinity()};
  for (double z : z_grid) {
    for (double y : y_grid) {
      const double v = psd_condition_value(t, z, y);
      if (v < best.value) best = {z, y, v};
    }
  }
  if (best.value < 0.0) return best;
  return std::nullopt;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "linspace needs at least two points");
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::vector<double> graded_grid(double half_width, std::size_t points_per_side, double min_abs) {
  if (!(half_width > min_abs) || !(min_abs > 0.0) || points_per_side < 2)
    throw Error(ErrorKind::invalid_argument, "graded grid needs 0 < min_abs < half_width");
  std::vector<double> mags(points_per_side);
  const double log_lo = std::log(min_abs);
  const double log_step = (std::log(half_width) - log_lo) / static_cast<double>(points_per_side - 1);
  for (std::size_t i = 0; i < points_per_side; ++i)
    mags[i] = std::exp(log_lo + log_step * static_cast<double>(i));
  mags.back() = half_width;

  std::vector<double> grid;
  grid.reserve(2 * points_per_side + 1);
  for (auto it = mags.rbegin(); it != mags.rend(); ++it) grid.push_back(-*it);
  grid.push_back(0.0);
  grid.insert(grid.end(), mags.begin(), mags.end());
  return grid;
}

std::vector<ConvexityReport> verification_battery(const TransformKind& t, double y_bound,
                                                  long long samples, std::uint64_t seed) {
  if (!(y_bound > 0.0)) throw Error(ErrorKind::invalid_argument, "y bound must be positive");
  std::vector<ConvexityReport> reports;
  const std::vector<double> z_grid = graded_grid(50.0, 1000);
  const double targets[] = {-y_bound, -0.5 * y_bound, 0.0, 0.5 * y_bound, y_bound};

  auto tag = [](ConvexityReport r, const std::string& suffix) {
    r.check_name += suffix;
    return r;
  };

  std::uint64_t stream = seed;
  for (double y : targets) {
    std::ostringstream suffix;
    suffix << "[y=" << y << "]";
    reports.push_back(tag(
        midpoint_convexity_check(t, y, {-100.0, 100.0}, samples, kMidpointTol, stream++),
        suffix.str()));
    reports.push_back(
        tag(derivative_monotonicity_check(t, y, z_grid, kMonotonicityTol), suffix.str()));
    Matrix x(1, 1);
    x(0, 0) = 1.0;
    Vector target(1);
    target[0] = y;
    const Dataset single(std::move(x), std::move(target));
    reports.push_back(tag(fd_hessian_psd_check(single, t, Vector::Ones(1), kHessianStep, kHessianTol),
                          suffix.str() + "[x=1,w=1]"));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix x(20, 3);
  Vector y(20);
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(n, j) = unit(rng);
    y[n] = y_bound * unit(rng);
  }
  const Dataset random_ds(std::move(x), std::move(y));
  for (int k = 0; k < 3; ++k) {
    Vector w(3);
    for (Eigen::Index j = 0; j < 3; ++j) w[j] = 2.0 * unit(rng);
    reports.push_back(tag(fd_hessian_psd_check(random_ds, t, w, kHessianStep, kHessianTol),
                          "[random N=20 d=3 #" + std::to_string(k) + "]"));
  }

  if (has_second_derivative(t)) {
    const std::vector<double> zs = linspace(-3.0, 3.0, 61);
    const std::vector<double> ys = linspace(-y_bound, y_bound, 21);
    ConvexityReport search;
    search.check_name = "psd_condition_search";
    search.samples_tested = static_cast<long long>(zs.size() * ys.size());
    if (const auto hit = find_nonconvex_witness(t, zs, ys)) {
      search.passed = false;
      search.worst_violation = hit->value;
      search.witness.add("z", hit->z);
      search.witness.add("y", hit->y);
      search.witness.add("value", hit->value);
    } else {
      search.passed = true;
      search.worst_violation = 0.0;
    }
    reports.push_back(std::move(search));
  }
  return reports;
}

}  // namespace cvxreg

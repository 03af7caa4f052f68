#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cvxreg/dataset.hpp"
#include "cvxreg/transform.hpp"

namespace cvxreg {

// Named numbers locating the worst observation of a check, so a failure can
// be re-evaluated independently.
struct Witness {
  std::vector<std::pair<std::string, double>> values;

  void add(std::string name, double value) { values.emplace_back(std::move(name), value); }
  std::optional<double> get(std::string_view name) const;
};

// passed <=> worst_violation >= -tolerance. A passing report only means no
// violation was found among samples_tested evaluations.
struct ConvexityReport {
  std::string check_name;
  bool passed = true;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  Witness witness;
  long long samples_tested = 0;

  std::string summary() const;
};

// Samples (z1, z2, lambda) uniformly and tests
//   l(lambda z1 + (1-lambda) z2) <= lambda l(z1) + (1-lambda) l(z2)
// for l(z) = loss_z(t, z, y). Slack is normalised by 1 + max of the three
// losses; tol applies to the normalised slack.
ConvexityReport midpoint_convexity_check(const TransformKind& t, double y,
                                         std::pair<double, double> z_range, long long n_samples,
                                         double tol, std::uint64_t seed);

// Most negative successive difference of dloss_dz over a strictly ascending grid.
ConvexityReport derivative_monotonicity_check(const TransformKind& t, double y,
                                              std::span<const double> z_grid, double tol);

struct FdHessian {
  Eigen::MatrixXd symmetric;  // (H + H^T) / 2
  double asymmetry = 0.0;     // max |H - H^T| before symmetrisation
};

inline constexpr Eigen::Index kMaxHessianDimension = 50;

// Central differences of total_gradient with per-coordinate step
// fd_step * (1 + |w_i|).
FdHessian fd_hessian(const Dataset& ds, const TransformKind& t, const Vector& w, double fd_step);

// Minimum eigenvalue of the finite-difference Hessian of total_loss at w;
// passes when it is >= -tol * (1 + max |H_ij|).
ConvexityReport fd_hessian_psd_check(const Dataset& ds, const TransformKind& t, const Vector& w,
                                     double fd_step, double tol);

struct NonconvexWitness {
  double z;
  double y;
  double value;  // psd_condition_value(t, z, y) < 0
};

// Grid minimiser of psd_condition_value when that minimum is negative.
std::optional<NonconvexWitness> find_nonconvex_witness(const TransformKind& t,
                                                       std::span<const double> z_grid,
                                                       std::span<const double> y_grid);

// Default tolerances.
inline constexpr double kMidpointTol = 1e-9;
inline constexpr double kMonotonicityTol = 1e-9;
inline constexpr double kHessianTol = 1e-5;
inline constexpr double kHessianStep = 1e-5;

// n evenly spaced points on [lo, hi], n >= 2.
std::vector<double> linspace(double lo, double hi, std::size_t n);

// 0, then points_per_side log-spaced magnitudes in [min_abs, half_width],
// mirrored to both signs; ascending, 2 * points_per_side + 1 points.
std::vector<double> graded_grid(double half_width, std::size_t points_per_side,
                                double min_abs = 1e-6);

// Every applicable check for one transform: midpoint and derivative
// monotonicity at y in {-Y, -Y/2, 0, Y/2, Y}, finite-difference Hessians on a
// one-sample dataset and on a seeded random dataset, and (when g'' exists) a
// grid search for a negative PSD condition value.
std::vector<ConvexityReport> verification_battery(const TransformKind& t, double y_bound,
                                                  long long samples, std::uint64_t seed);

}  // namespace cvxreg

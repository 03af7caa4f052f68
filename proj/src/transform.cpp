#include "cvxreg/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvxreg/error.hpp"

namespace cvxreg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::domain: return "domain";
    case ErrorKind::invalid_grid: return "invalid-grid";
    case ErrorKind::unsupported_transform: return "unsupported-transform";
    case ErrorKind::nonfinite_loss: return "nonfinite-loss";
    case ErrorKind::singular_system: return "singular-system";
    case ErrorKind::dimension_too_large: return "dimension-too-large";
    case ErrorKind::parse: return "parse";
    case ErrorKind::missing_target_column: return "missing-target-column";
    case ErrorKind::non_numeric_cell: return "non-numeric-cell";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

namespace {

constexpr double kMaxReal = std::numeric_limits<double>::max();

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// sqrt(alpha*a + 1) for a >= 0, rescaled when alpha*a would overflow.
double radical(double alpha, double a) noexcept {
  if (a <= kMaxReal / alpha - 1.0) return std::sqrt(std::fma(alpha, a, 1.0));
  return std::sqrt(alpha) * std::sqrt(a);
}

}  // namespace

ConvexSqrtTransform::ConvexSqrtTransform(double alpha, double y_bound)
    : alpha_(alpha), y_bound_(y_bound) {
  if (!positive_finite(alpha))
    throw Error(ErrorKind::invalid_argument, "convex-sqrt transform needs alpha > 0");
  if (!positive_finite(y_bound))
    throw Error(ErrorKind::invalid_argument, "convex-sqrt transform needs Y > 0");
}

double ConvexSqrtTransform::evaluate(double z) const noexcept {
  const double a = std::fabs(z);
  const double r = radical(alpha_, a);
  // Y*(r - 1) rewritten as Y*alpha*a/(r + 1) to avoid cancellation near 0.
  const double mag = a <= kMaxReal / alpha_ - 1.0
                         ? y_bound_ * (alpha_ * a) / (r + 1.0)
                         : y_bound_ * (r - 1.0);
  return std::copysign(mag, z);
}

double ConvexSqrtTransform::derivative(double z) const noexcept {
  return 0.5 * y_bound_ * alpha_ / radical(alpha_, std::fabs(z));
}

double ConvexSqrtTransform::inverse(double u) const {
  if (!std::isfinite(u)) throw Error(ErrorKind::domain, "inverse of non-finite value");
  const double r = std::fabs(u) / y_bound_;
  return std::copysign(r * (r + 2.0) / alpha_, u);
}

double ConvexSqrtTransform::h(double t) const noexcept {
  return y_bound_ / alpha_ * radical(alpha_, t);
}

double ConvexSqrtTransform::h_derivative(double t) const noexcept {
  return 0.5 * y_bound_ / radical(alpha_, t);
}

double ConvexSqrtTransform::gamma() const noexcept {
  return y_bound_ * y_bound_ / (2.0 * alpha_);
}

AffineTransform::AffineTransform(double slope, double intercept)
    : slope_(slope), intercept_(intercept) {
  if (!std::isfinite(slope) || !std::isfinite(intercept))
    throw Error(ErrorKind::invalid_argument, "affine transform needs finite coefficients");
}

double AffineTransform::inverse(double u) const {
  if (slope_ == 0.0) throw Error(ErrorKind::domain, "affine transform with zero slope has no inverse");
  if (!std::isfinite(u)) throw Error(ErrorKind::domain, "inverse of non-finite value");
  return (u - intercept_) / slope_;
}

TanhTransform::TanhTransform(double scale) : scale_(scale) {
  if (!positive_finite(scale))
    throw Error(ErrorKind::invalid_argument, "tanh transform needs scale > 0");
}

double TanhTransform::evaluate(double z) const noexcept { return scale_ * std::tanh(z); }

double TanhTransform::derivative(double z) const noexcept {
  const double sech = 1.0 / std::cosh(z);
  return scale_ * sech * sech;
}

double TanhTransform::second_derivative(double z) const noexcept {
  const double sech = 1.0 / std::cosh(z);
  return -2.0 * scale_ * std::tanh(z) * sech * sech;
}

double TanhTransform::inverse(double u) const {
  if (!(std::fabs(u) < scale_)) {
    std::ostringstream msg;
    msg << "tanh inverse: |" << u << "| is outside the open range (-" << scale_ << ", "
        << scale_ << ")";
    throw Error(ErrorKind::domain, msg.str());
  }
  return std::atanh(u / scale_);
}

double evaluate(const TransformKind& t, double z) noexcept {
  return std::visit([z](const auto& g) { return g.evaluate(z); }, t);
}

double derivative(const TransformKind& t, double z) noexcept {
  return std::visit([z](const auto& g) { return g.derivative(z); }, t);
}

double inverse(const TransformKind& t, double u) {
  return std::visit([u](const auto& g) { return g.inverse(u); }, t);
}

bool has_second_derivative(const TransformKind& t) noexcept {
  return !std::holds_alternative<ConvexSqrtTransform>(t);
}

double second_derivative(const TransformKind& t, double z) {
  if (const auto* a = std::get_if<AffineTransform>(&t)) return a->second_derivative(z);
  if (const auto* th = std::get_if<TanhTransform>(&t)) return th->second_derivative(z);
  throw Error(ErrorKind::unsupported_transform,
              "convex-sqrt has no second derivative at the origin");
}

std::string kind_name(const TransformKind& t) {
  switch (t.index()) {
    case 0: return "convex-sqrt";
    case 1: return "affine";
    default: return "tanh";
  }
}

std::optional<double> output_bound(const TransformKind& t) noexcept {
  if (const auto* th = std::get_if<TanhTransform>(&t)) return th->scale();
  return std::nullopt;
}

bool ConditionReport::all_passed() const noexcept {
  for (const auto& c : conditions)
    if (!c.passed) return false;
  return true;
}

namespace {

struct Tracker {
  ConditionResult& out;

  void observe(double residual, double allowance, double at) {
    if (!(residual <= allowance)) out.passed = false;
    const double r = std::isnan(residual) ? std::numeric_limits<double>::infinity() : residual;
    if (r > out.worst_violation) {
      out.worst_violation = r;
      out.witness = at;
    }
  }
};

}  // namespace

ConditionReport check_remark_conditions(const ScalarFunction& h,
                                        const ScalarFunction& h_prime, double alpha,
                                        double y_bound, double gamma,
                                        std::span<const double> grid, double tol) {
  if (grid.empty()) throw Error(ErrorKind::invalid_grid, "grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0)
      throw Error(ErrorKind::invalid_grid, "grid points must be finite and nonnegative");
    if (i > 0 && grid[i] < grid[i - 1])
      throw Error(ErrorKind::invalid_grid, "grid must be sorted ascending");
  }
  if (!positive_finite(tol)) throw Error(ErrorKind::invalid_argument, "tol must be > 0");

  ConditionReport report;
  report.conditions[0].name = "odd_symmetry";
  report.conditions[1].name = "constant_product";
  report.conditions[2].name = "nonincreasing_derivative";
  report.conditions[3].name = "continuity_at_zero";

  Tracker odd{report.conditions[0]};
  Tracker product{report.conditions[1]};
  Tracker monotone{report.conditions[2]};
  Tracker continuity{report.conditions[3]};

  double prev_slope = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double ht = h(t);
    const double slope = h_prime(t);
    if (t > 0.0) odd.observe(std::fabs(ht + h(-t)), tol * (1.0 + std::fabs(ht)), t);
    product.observe(std::fabs(ht * slope - gamma), tol * (1.0 + std::fabs(gamma)), t);
    if (i > 0)
      monotone.observe(std::max(0.0, slope - prev_slope), tol * (1.0 + std::fabs(prev_slope)), t);
    prev_slope = slope;
  }
  const double target = alpha * gamma;
  continuity.observe(std::fabs(h_prime(0.0) * y_bound - target), tol * (1.0 + std::fabs(target)),
                     0.0);
  return report;
}

}  // namespace cvxreg

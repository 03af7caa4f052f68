#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace cvxreg {

// g(z) = sign(z) * (Y * sqrt(alpha*|z| + 1) - Y). Squared loss composed with
// this map stays convex in z whenever |y| <= Y.
class ConvexSqrtTransform {
 public:
  ConvexSqrtTransform(double alpha, double y_bound);

  double alpha() const noexcept { return alpha_; }
  double y_bound() const noexcept { return y_bound_; }

  double evaluate(double z) const noexcept;
  double derivative(double z) const noexcept;
  double inverse(double u) const;

  // The generating half-map h(t) = (Y/alpha) sqrt(alpha*t + 1), t >= 0, and
  // the constant gamma = h(t) h'(t) = Y^2 / (2 alpha).
  double h(double t) const noexcept;
  double h_derivative(double t) const noexcept;
  double gamma() const noexcept;

 private:
  double alpha_;
  double y_bound_;
};

class AffineTransform {
 public:
  AffineTransform(double slope, double intercept);

  double slope() const noexcept { return slope_; }
  double intercept() const noexcept { return intercept_; }

  double evaluate(double z) const noexcept { return slope_ * z + intercept_; }
  double derivative(double) const noexcept { return slope_; }
  double second_derivative(double) const noexcept { return 0.0; }
  double inverse(double u) const;

 private:
  double slope_;
  double intercept_;
};

class TanhTransform {
 public:
  explicit TanhTransform(double scale);

  double scale() const noexcept { return scale_; }

  double evaluate(double z) const noexcept;
  double derivative(double z) const noexcept;
  double second_derivative(double z) const noexcept;
  double inverse(double u) const;

 private:
  double scale_;
};

using TransformKind =
    std::variant<ConvexSqrtTransform, AffineTransform, TanhTransform>;

double evaluate(const TransformKind& t, double z) noexcept;
double derivative(const TransformKind& t, double z) noexcept;
double inverse(const TransformKind& t, double u);

bool has_second_derivative(const TransformKind& t) noexcept;
// Throws unsupported_transform for ConvexSqrt, whose g'' jumps at z = 0.
double second_derivative(const TransformKind& t, double z);

// "convex-sqrt", "affine" or "tanh".
std::string kind_name(const TransformKind& t);

// Range of g is bounded for tanh only.
std::optional<double> output_bound(const TransformKind& t) noexcept;

// ---------------------------------------------------------------------------
// Numeric checker for the four sufficient conditions on a generating map h:
//   odd symmetry, h(t) h'(t) = gamma, h' nonincreasing in t, h'(0) Y = alpha gamma.

using ScalarFunction = std::function<double(double)>;

struct ConditionResult {
  std::string name;
  bool passed = true;
  double worst_violation = 0.0;  // largest residual magnitude seen
  double witness = 0.0;          // grid point where it occurred
};

struct ConditionReport {
  std::array<ConditionResult, 4> conditions;

  bool all_passed() const noexcept;
};

// Grid must be nonempty, ascending and nonnegative. Odd symmetry is checked at
// grid points t > 0 only: the product and continuity conditions use h(0) as the
// right-hand limit, which an odd function cannot also take at 0.
ConditionReport check_remark_conditions(const ScalarFunction& h,
                                        const ScalarFunction& h_prime,
                                        double alpha, double y_bound,
                                        double gamma, std::span<const double> grid,
                                        double tol);

}  // namespace cvxreg

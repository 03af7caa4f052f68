#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cvxreg/convexity.hpp"
#include "cvxreg/error.hpp"
#include "cvxreg/loss.hpp"
#include "oracles.hpp"

using namespace cvxreg;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected cvxreg::Error");
  return ErrorKind::io;
}

Dataset one_sample(double x, double y) {
  Matrix m(1, 1);
  m(0, 0) = x;
  Vector t(1);
  t[0] = y;
  return Dataset(std::move(m), std::move(t));
}

Dataset random_dataset(std::mt19937_64& rng, int n, int d, double y_bound) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix x(n, d);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = unit(rng);
    y[i] = y_bound * unit(rng);
  }
  return Dataset(std::move(x), std::move(y));
}

// Re-evaluates a failed midpoint report from its witness alone.
double midpoint_slack(const TransformKind& t, const ConvexityReport& r) {
  const double z1 = *r.witness.get("z1"), z2 = *r.witness.get("z2");
  const double l = *r.witness.get("lambda"), y = *r.witness.get("y");
  const double f1 = loss_z(t, z1, y), f2 = loss_z(t, z2, y);
  const double fm = loss_z(t, l * z1 + (1 - l) * z2, y);
  return (l * f1 + (1 - l) * f2 - fm) / (1.0 + std::max({f1, f2, fm}));
}

}  // namespace

TEST_CASE("midpoint check examples") {
  const ConvexityReport ok =
      midpoint_convexity_check(ConvexSqrtTransform(1.0, 1.0), 0.5, {-100, 100}, 10000, 1e-9, 1);
  CHECK(ok.passed);
  CHECK(ok.samples_tested == 10000);
  CHECK(ok.summary().find("no violation found among 10000 samples") != std::string::npos);

  const TransformKind tanh1 = TanhTransform(1.0);
  const ConvexityReport bad = midpoint_convexity_check(tanh1, -1.0, {0, 3}, 10000, 1e-9, 2);
  CHECK_FALSE(bad.passed);
  // Concave region of (tanh z + 1)^2 starts at atanh(1/3).
  CHECK(*bad.witness.get("z_mid") > std::atanh(1.0 / 3.0));
  CHECK(midpoint_slack(tanh1, bad) < 0.5 * bad.worst_violation);

  for (double y : {-3.0, 0.0, 10.0})
    CHECK(midpoint_convexity_check(AffineTransform(1.0, 0.0), y, {-50, 50}, 5000, 1e-9, 3).passed);
}

TEST_CASE("midpoint check is reproducible and validates input") {
  const TransformKind t = TanhTransform(2.0);
  const auto a = midpoint_convexity_check(t, 1.0, {-5, 5}, 2000, 1e-9, 42);
  const auto b = midpoint_convexity_check(t, 1.0, {-5, 5}, 2000, 1e-9, 42);
  CHECK(a.worst_violation == b.worst_violation);
  CHECK(kind_of([&] { midpoint_convexity_check(t, 0, {1, 1}, 10, 1e-9, 0); }) ==
        ErrorKind::invalid_argument);
  CHECK(kind_of([&] { midpoint_convexity_check(t, 0, {0, 1}, 10, 0.0, 0); }) ==
        ErrorKind::invalid_argument);
}

TEST_CASE("derivative monotonicity examples") {
  const std::vector<double> grid = linspace(-50.0, 50.0, 2001);
  CHECK(derivative_monotonicity_check(ConvexSqrtTransform(2.0, 3.0), 2.0, grid, 1e-9).passed);

  const TransformKind outside = ConvexSqrtTransform(1.0, 1.0);
  const ConvexityReport r = derivative_monotonicity_check(outside, 1.5, grid, 1e-9);
  CHECK_FALSE(r.passed);
  const double recomputed = dloss_dz(outside, *r.witness.get("z_right"), 1.5) -
                            dloss_dz(outside, *r.witness.get("z_left"), 1.5);
  CHECK(recomputed < 0.5 * r.worst_violation);
  // y > Y breaks monotonicity on the negative side only.
  CHECK(*r.witness.get("z_right") <= 0.0);

  const std::vector<double> near_one = linspace(0.0, 3.0, 301);
  const ConvexityReport th = derivative_monotonicity_check(TanhTransform(1.0), -1.0, near_one, 1e-9);
  CHECK_FALSE(th.passed);
  CHECK(*th.witness.get("z_left") > std::atanh(1.0 / 3.0));
}

TEST_CASE("derivative monotonicity grid validation") {
  const TransformKind t = ConvexSqrtTransform(1.0, 1.0);
  const std::vector<double> single{1.0};
  const std::vector<double> repeated{0.0, 1.0, 1.0};
  const std::vector<double> unsorted{0.0, 2.0, 1.0};
  CHECK(kind_of([&] { derivative_monotonicity_check(t, 0, single, 1e-9); }) ==
        ErrorKind::invalid_grid);
  CHECK(kind_of([&] { derivative_monotonicity_check(t, 0, repeated, 1e-9); }) ==
        ErrorKind::invalid_grid);
  CHECK(kind_of([&] { derivative_monotonicity_check(t, 0, unsorted, 1e-9); }) ==
        ErrorKind::invalid_grid);
}

TEST_CASE("finite-difference Hessian of an affine model is 2 X^T X") {
  std::mt19937_64 rng(1);
  const Dataset ds = random_dataset(rng, 30, 4, 2.0);
  const TransformKind t = AffineTransform(1.0, 0.0);
  const Vector w = Vector::LinSpaced(4, -1.0, 2.0);
  const FdHessian h = fd_hessian(ds, t, w, kHessianStep);
  const Eigen::MatrixXd exact = 2.0 * ds.features().transpose() * ds.features();
  CHECK((h.symmetric - exact).cwiseAbs().maxCoeff() <= 1e-8 * exact.cwiseAbs().maxCoeff());
  const ConvexityReport r = fd_hessian_psd_check(ds, t, w, kHessianStep, kHessianTol);
  CHECK(r.passed);
  CHECK(r.worst_violation > 0.0);
}

TEST_CASE("fd Hessian check on convex-sqrt and the tanh witness") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const TransformKind t = ConvexSqrtTransform(2.0, 1.5);
  const Dataset ds = random_dataset(rng, 40, 3, 1.5);
  for (int k = 0; k < 10; ++k) {
    Vector w(3);
    for (int j = 0; j < 3; ++j) w[j] = 3.0 * unit(rng);
    const ConvexityReport r = fd_hessian_psd_check(ds, t, w, kHessianStep, kHessianTol);
    CHECK(r.passed);
    const double max_h = *r.witness.get("max_abs_entry");
    CHECK(*r.witness.get("asymmetry") <= 100 * kHessianStep * (1.0 + max_h));
  }

  const TransformKind tanh1 = TanhTransform(1.0);
  const Dataset crafted = one_sample(1.0, -1.0);
  const ConvexityReport bad =
      fd_hessian_psd_check(crafted, tanh1, Vector::Ones(1), kHessianStep, kHessianTol);
  CHECK_FALSE(bad.passed);
  CHECK(bad.worst_violation == doctest::Approx(psd_condition_value(tanh1, 1.0, -1.0)).epsilon(1e-6));
  CHECK(bad.worst_violation == doctest::Approx(-1.9010266250).epsilon(1e-6));
  // Independent second difference of total_loss along the reported eigenvector.
  const double v = *bad.witness.get("v[0]");
  const double curvature = oracle::second_difference(
      [&](double s) { return total_loss({Vector::Constant(1, 1.0 + s * v), tanh1}, crafted); }, 0.0,
      1e-4);
  CHECK(curvature < 0.5 * bad.worst_violation);
}

TEST_CASE("fd Hessian limits") {
  std::mt19937_64 rng(3);
  const Dataset wide = random_dataset(rng, 5, 51, 1.0);
  CHECK(kind_of([&] {
          fd_hessian_psd_check(wide, TanhTransform(1.0), Vector::Zero(51), 1e-5, 1e-5);
        }) == ErrorKind::dimension_too_large);
  const Dataset narrow = random_dataset(rng, 5, 2, 1.0);
  CHECK(kind_of([&] {
          fd_hessian_psd_check(narrow, TanhTransform(1.0), Vector::Zero(3), 1e-5, 1e-5);
        }) == ErrorKind::dimension_mismatch);
  CHECK(kind_of([&] {
          fd_hessian_psd_check(narrow, TanhTransform(1.0), Vector::Zero(2), 0.0, 1e-5);
        }) == ErrorKind::invalid_argument);
}

TEST_CASE("nonconvex witness search") {
  const std::vector<double> zs = linspace(-3.0, 3.0, 61);
  const std::vector<double> ys = linspace(-1.0, 1.0, 21);
  const auto hit = find_nonconvex_witness(TanhTransform(1.0), zs, ys);
  REQUIRE(hit.has_value());
  CHECK(hit->value <= -1.5);
  // The PSD value is invariant under (z, y) -> (-z, -y); either mirror of
  // (1, -1) is a valid witness.
  CHECK(std::fabs(hit->y) == 1.0);
  CHECK(std::fabs(hit->z * -hit->y - 1.0) <= 0.2);
  CHECK(hit->value == doctest::Approx(oracle::tanh_psd_value(1.0, hit->z, hit->y)).epsilon(1e-12));
  const double fd = oracle::second_difference(
      [&](double z) { return loss_z(TanhTransform(1.0), z, hit->y); }, hit->z, 1e-4);
  CHECK(hit->value == doctest::Approx(fd).epsilon(1e-6));

  CHECK_FALSE(find_nonconvex_witness(AffineTransform(1.0, 0.0), zs, ys).has_value());
  CHECK(kind_of([&] { find_nonconvex_witness(ConvexSqrtTransform(1, 1), zs, ys); }) ==
        ErrorKind::unsupported_transform);
  const std::vector<double> empty;
  CHECK(kind_of([&] { find_nonconvex_witness(TanhTransform(1.0), empty, ys); }) ==
        ErrorKind::invalid_grid);
}

TEST_CASE("graded grid layout") {
  const std::vector<double> g = graded_grid(50.0, 1000);
  REQUIRE(g.size() == 2001);
  CHECK(g.front() == -50.0);
  CHECK(g.back() == 50.0);
  CHECK(g[1000] == 0.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  for (std::size_t i = 0; i < 1000; ++i) CHECK(g[i] == -g[2000 - i]);
}

TEST_CASE("monotone derivative implies passing midpoint check") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const std::vector<double> grid = graded_grid(50.0, 400);
  int alarms = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const double scale = 0.5 + 2.0 * (unit(rng) + 1.0);
    const TransformKind ts[] = {ConvexSqrtTransform(0.5 + 4.0 * (unit(rng) + 1.0), scale),
                                TanhTransform(scale), AffineTransform(1.0 + unit(rng), unit(rng))};
    const TransformKind& t = ts[trial % 3];
    const double y = 1.6 * scale * unit(rng);
    const auto mono = derivative_monotonicity_check(t, y, grid, kMonotonicityTol);
    const auto mid = midpoint_convexity_check(t, y, {-50, 50}, 2000, kMidpointTol,
                                              static_cast<std::uint64_t>(trial));
    if (mono.passed) CHECK(mid.passed);
    if (mid.passed && !mono.passed) ++alarms;  // converse is not guaranteed
  }
  MESSAGE("monotonicity-only failures: " << alarms);
}

TEST_CASE("convex-sqrt end to end over random configurations") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u01(0.0, 1.0), unit(-1.0, 1.0);
  const std::vector<double> grid = graded_grid(50.0, 1000);
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = 10.0 * (1.0 - u01(rng));
    const double yb = 0.1 + 9.9 * (1.0 - u01(rng));
    const TransformKind t = ConvexSqrtTransform(alpha, yb);
    const double y = yb * unit(rng);
    CHECK(midpoint_convexity_check(t, y, {-100, 100}, 2000, kMidpointTol, trial).passed);
    CHECK(derivative_monotonicity_check(t, y, grid, kMonotonicityTol).passed);
    CHECK(fd_hessian_psd_check(one_sample(1.0, y), t, Vector::Constant(1, 3.0 * unit(rng)),
                               kHessianStep, kHessianTol)
              .passed);

    const double u = 1.0 - u01(rng);
    const double y_out = (trial % 2 == 0 ? 1.0 : -1.0) * yb * (1.0 + u);
    const auto r = derivative_monotonicity_check(t, y_out, grid, kMonotonicityTol);
    if (u >= 0.5) CHECK_FALSE(r.passed);
  }
}

TEST_CASE("verification battery") {
  const auto convex = verification_battery(ConvexSqrtTransform(1.0, 1.0), 1.0, 2000, 7);
  for (const auto& r : convex) {
    INFO(r.summary());
    CHECK(r.passed);
  }
  const auto affine = verification_battery(AffineTransform(1.0, 0.0), 1.0, 2000, 7);
  for (const auto& r : affine) CHECK(r.passed);

  const auto tanh = verification_battery(TanhTransform(1.0), 1.0, 2000, 7);
  const auto search = std::find_if(tanh.begin(), tanh.end(), [](const ConvexityReport& r) {
    return r.check_name == "psd_condition_search";
  });
  REQUIRE(search != tanh.end());
  CHECK_FALSE(search->passed);
  const double wz = *search->witness.get("z"), wy = *search->witness.get("y");
  CHECK(std::fabs(wy) == 1.0);
  CHECK(std::fabs(wz * -wy - 1.0) <= 0.2);
}

#pragma once

#include <cstddef>

#include "cvxreg/dataset.hpp"
#include "cvxreg/transform.hpp"

namespace cvxreg {

// Squared loss as a function of the linear score z: (g(z) - y)^2.
double loss_z(const TransformKind& t, double z, double y) noexcept;

// d/dz of loss_z: 2 (g(z) - y) g'(z).
double dloss_dz(const TransformKind& t, double z, double y) noexcept;

// 2 g'(z)^2 + 2 (g(z) - y) g''(z). Its sign decides pointwise convexity of the
// composed loss. Throws unsupported_transform for ConvexSqrt.
double psd_condition_value(const TransformKind& t, double z, double y);

// dloss_dz(w . x, y) * x.
Vector sample_gradient(const Model& m, const Eigen::Ref<const Vector>& x, double y);

// Sum of per-sample losses / gradients. These dispatch to the OpenMP kernels
// in kernels.hpp; results do not depend on the thread count.
double total_loss(const Model& m, const Dataset& ds);
Vector total_gradient(const Model& m, const Dataset& ds);

// Number of targets with |y| > Y for a ConvexSqrt transform (0 otherwise).
// The convexity guarantee holds only when this is zero.
std::size_t targets_outside_bound(const TransformKind& t, const Dataset& ds);

void check_dimensions(const Model& m, const Dataset& ds);

}  // namespace cvxreg
